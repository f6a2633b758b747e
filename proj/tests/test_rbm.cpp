#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "textae/errors.hpp"
#include "textae/rbm.hpp"

using namespace textae;

namespace {

RbmParams make_rbm(std::size_t nv, std::size_t nh, RbmFlavor flavor, std::uint64_t seed,
                   double scale = 0.8) {
    Rng rng(seed);
    RbmParams p = init_rbm(nv, nh, flavor, rng);
    for (double& w : p.W.data) w = rng.normal() * scale;
    for (double& a : p.vis_bias) a = rng.normal() * scale;
    for (double& b : p.hid_bias) b = rng.normal() * scale;
    return p;
}

// Boltzmann conditional p(h_j=1|v) by enumerating every hidden state of a
// binary RBM; the oracle for the sigmoid shortcut.
double enum_hidden_conditional_binary(const RbmParams& p, const std::vector<double>& v,
                                      std::size_t j) {
    const std::size_t nh = p.n_hidden();
    double z = 0.0, zj = 0.0;
    for (std::size_t mask = 0; mask < (1u << nh); ++mask) {
        std::vector<double> h(nh);
        for (std::size_t k = 0; k < nh; ++k) h[k] = (mask >> k) & 1u;
        const double w = std::exp(-energy_binary(p, v, h));
        z += w;
        if (h[j] == 1.0) zj += w;
    }
    return zj / z;
}

double enum_visible_conditional_binary(const RbmParams& p, const std::vector<double>& h,
                                       std::size_t i) {
    const std::size_t nv = p.n_visible();
    double z = 0.0, zi = 0.0;
    for (std::size_t mask = 0; mask < (1u << nv); ++mask) {
        std::vector<double> v(nv);
        for (std::size_t k = 0; k < nv; ++k) v[k] = (mask >> k) & 1u;
        const double w = std::exp(-energy_binary(p, v, h));
        z += w;
        if (v[i] == 1.0) zi += w;
    }
    return zi / z;
}

double enum_hidden_conditional_rsm(const RbmParams& p, const std::vector<double>& counts, double D,
                                   std::size_t j) {
    const std::size_t nh = p.n_hidden();
    double z = 0.0, zj = 0.0;
    for (std::size_t mask = 0; mask < (1u << nh); ++mask) {
        std::vector<double> h(nh);
        for (std::size_t k = 0; k < nh; ++k) h[k] = (mask >> k) & 1u;
        const double w = std::exp(-energy_rsm(p, counts, D, h));
        z += w;
        if (h[j] == 1.0) zj += w;
    }
    return zj / z;
}

double factorial(std::uint32_t n) {
    double f = 1.0;
    for (std::uint32_t i = 2; i <= n; ++i) f *= i;
    return f;
}

}  // namespace

TEST_CASE("energy values on hand-evaluated fixtures") {
    RbmParams p;
    p.flavor = RbmFlavor::BinaryBinary;
    p.W = Matrix(1, 1);
    p.W(0, 0) = 2.0;
    p.vis_bias = {0.5};
    p.hid_bias = {-0.25};
    CHECK(energy_binary(p, {1.0}, {1.0}) == doctest::Approx(-2.25).epsilon(1e-15));
    CHECK(energy_binary(p, {0.0}, {0.0}) == 0.0);

    RbmParams zero;
    zero.W = Matrix(2, 2);
    zero.vis_bias = {0.0, 0.0};
    zero.hid_bias = {0.0, 0.0};
    CHECK(energy_binary(zero, {1.0, 0.0}, {0.0, 1.0}) == 0.0);

    RbmParams r;
    r.flavor = RbmFlavor::ReplicatedSoftmax;
    r.W = Matrix(1, 1);
    r.W(0, 0) = 1.0;
    r.vis_bias = {0.5};
    r.hid_bias = {0.1};
    CHECK(energy_rsm(r, {2.0}, 2.0, {1.0}) == doctest::Approx(-3.2).epsilon(1e-15));
    CHECK(energy_rsm(r, {0.0}, 0.0, {0.0}) == 0.0);
    CHECK_THROWS_AS(energy_rsm(r, {2.0}, 3.0, {1.0}), InvalidLength);
}

TEST_CASE("hidden and visible probabilities on scalar fixtures") {
    RbmParams p;
    p.flavor = RbmFlavor::BinaryBinary;
    p.W = Matrix(2, 1);
    p.W(0, 0) = 2.0;
    p.W(1, 0) = -2.0;
    p.vis_bias = {0.0, 0.0};
    p.hid_bias = {0.0};
    const auto h = hidden_probs(p, {1.0, 0.0});
    CHECK(h[0] == doctest::Approx(1.0 / (1.0 + std::exp(-2.0))).epsilon(1e-12));

    RbmParams z;
    z.W = Matrix(3, 2);
    z.vis_bias.assign(3, 0.0);
    z.hid_bias.assign(2, 0.0);
    for (double x : hidden_probs(z, {0.0, 1.0, 0.0})) CHECK(x == 0.5);
    for (double x : visible_probs_binary(z, {1.0, 0.0})) CHECK(x == 0.5);

    RbmParams q;
    q.W = Matrix(1, 1);
    q.W(0, 0) = -1.0;
    q.vis_bias = {1.0};
    q.hid_bias = {0.0};
    CHECK(visible_probs_binary(q, {1.0})[0] == doctest::Approx(0.5).epsilon(1e-15));

    // rsm: hidden bias scaled by D
    RbmParams r;
    r.flavor = RbmFlavor::ReplicatedSoftmax;
    r.W = Matrix(1, 1);
    r.W(0, 0) = 1.0;
    r.vis_bias = {0.0};
    r.hid_bias = {0.5};
    CHECK(hidden_probs(r, {3.0}, 3.0)[0] ==
          doctest::Approx(1.0 / (1.0 + std::exp(-4.5))).epsilon(1e-12));
}

TEST_CASE("rsm hidden pre-activation scales exactly with doubled counts and D") {
    const RbmParams p = make_rbm(4, 3, RbmFlavor::ReplicatedSoftmax, 31);
    const std::vector<double> counts{1.0, 0.0, 2.0, 1.0};
    std::vector<double> doubled(counts);
    for (double& c : doubled) c *= 2.0;

    for (std::size_t j = 0; j < 3; ++j) {
        auto logit = [&](const std::vector<double>& v, double d) {
            double pre = d * p.hid_bias[j];
            for (std::size_t k = 0; k < v.size(); ++k) pre += v[k] * p.W(k, j);
            return pre;
        };
        CHECK(logit(doubled, 8.0) == doctest::Approx(2.0 * logit(counts, 4.0)).epsilon(1e-12));
        const double via_probs = hidden_probs(p, doubled, 8.0)[j];
        CHECK(via_probs == doctest::Approx(1.0 / (1.0 + std::exp(-logit(doubled, 8.0)))));
    }
}

TEST_CASE("softmax visible layer fixtures") {
    RbmParams p;
    p.flavor = RbmFlavor::ReplicatedSoftmax;
    p.W = Matrix(4, 1);
    p.vis_bias.assign(4, 0.0);
    p.hid_bias = {0.0};
    const auto uniform = visible_softmax_rsm(p, {0.0});
    for (double x : uniform) CHECK(x == doctest::Approx(0.25).epsilon(1e-12));

    RbmParams q;
    q.flavor = RbmFlavor::ReplicatedSoftmax;
    q.W = Matrix(2, 1);
    q.vis_bias = {std::log(2.0), 0.0};
    q.hid_bias = {0.0};
    const auto probs = visible_softmax_rsm(q, {0.0});
    CHECK(probs[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(probs[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("sigmoid/softmax conditionals agree with Boltzmann enumeration") {
    const RbmParams p = make_rbm(2, 2, RbmFlavor::BinaryBinary, 77);
    for (std::size_t mask = 0; mask < 4; ++mask) {
        const std::vector<double> v{static_cast<double>(mask & 1u),
                                    static_cast<double>((mask >> 1) & 1u)};
        const auto probs = hidden_probs(p, v);
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(probs[j] == doctest::Approx(enum_hidden_conditional_binary(p, v, j)).epsilon(1e-10));
        const auto vis = visible_probs_binary(p, v);  // v doubles as a hidden state here
        for (std::size_t i = 0; i < 2; ++i)
            CHECK(vis[i] == doctest::Approx(enum_visible_conditional_binary(p, v, i)).epsilon(1e-10));
    }

    // rsm hidden conditional at D=2, K=3
    const RbmParams r = make_rbm(3, 2, RbmFlavor::ReplicatedSoftmax, 78);
    const std::vector<std::vector<double>> count_configs{
        {2, 0, 0}, {0, 2, 0}, {0, 0, 2}, {1, 1, 0}, {1, 0, 1}, {0, 1, 1}};
    for (const auto& counts : count_configs) {
        const auto probs = hidden_probs(r, counts, 2.0);
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(probs[j] ==
                  doctest::Approx(enum_hidden_conditional_rsm(r, counts, 2.0, j)).epsilon(1e-10));
    }

    // rsm visible conditional: enumerating count configurations with the
    // multinomial coefficient recovers multinomial(D, softmax) exactly
    for (std::size_t hmask = 0; hmask < 4; ++hmask) {
        const std::vector<double> h{static_cast<double>(hmask & 1u),
                                    static_cast<double>((hmask >> 1) & 1u)};
        const auto soft = visible_softmax_rsm(r, h);
        double z = 0.0;
        std::vector<double> weights;
        for (const auto& counts : count_configs) {
            double coeff = factorial(2);
            for (double c : counts) coeff /= factorial(static_cast<std::uint32_t>(c));
            const double w = coeff * std::exp(-energy_rsm(r, counts, 2.0, h));
            weights.push_back(w);
            z += w;
        }
        for (std::size_t c = 0; c < count_configs.size(); ++c) {
            double expected = factorial(2);
            for (std::size_t k = 0; k < 3; ++k) {
                expected *= std::pow(soft[k], count_configs[c][k]);
                expected /= factorial(static_cast<std::uint32_t>(count_configs[c][k]));
            }
            CHECK(weights[c] / z == doctest::Approx(expected).epsilon(1e-10));
        }
    }
}

TEST_CASE("multinomial sampling") {
    Rng rng(9);
    CHECK(sample_visible_multinomial({0.3, 0.7}, 0, rng) ==
          std::vector<std::uint32_t>{0, 0});
    CHECK(sample_visible_multinomial({1.0, 0.0}, 5, rng) ==
          std::vector<std::uint32_t>{5, 0});

    const auto counts = sample_visible_multinomial({0.5, 0.5}, 10000, rng);
    CHECK(counts[0] + counts[1] == 10000);
    // binomial concentration: 4 sigma around the mean, sigma = 50
    CHECK(std::abs(static_cast<double>(counts[0]) - 5000.0) <= 200.0);

    CHECK_THROWS_AS(sample_visible_multinomial({0.5, 0.6}, 1, rng), InvalidDistribution);
    CHECK_THROWS_AS(sample_visible_multinomial({-0.1, 1.1}, 1, rng), InvalidDistribution);
}

TEST_CASE("cd1 positive-phase statistics equal the v p(h|v) outer product") {
    const RbmParams p = make_rbm(5, 3, RbmFlavor::BinaryBinary, 13);
    const std::vector<double> v{1.0, 0.0, 1.0, 1.0, 0.0};
    const auto hp = hidden_probs(p, v);

    Matrix vrow(1, 5), hrow(1, 3);
    for (std::size_t i = 0; i < 5; ++i) vrow(0, i) = v[i];
    for (std::size_t j = 0; j < 3; ++j) hrow(0, j) = hp[j];
    Matrix grad(5, 3);
    kernels::add_outer_products(vrow, hrow, grad);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(grad(i, j) == doctest::Approx(v[i] * hp[j]).epsilon(1e-14));
}

TEST_CASE("cd1 with lr=0 is a no-op on the parameters") {
    RbmParams p = make_rbm(4, 3, RbmFlavor::BinaryBinary, 21);
    const RbmParams before = p;
    CdState state = CdState::zeros(p);
    VisibleBatch batch;
    batch.rows = Matrix(2, 4);
    batch.rows(0, 0) = 1.0;
    batch.rows(1, 2) = 1.0;
    Rng rng(3);
    cd1_update(p, state, batch, 0.0, 0.9, 2e-4, rng);
    CHECK(p == before);
}

TEST_CASE("cd1 learns a single repeated pattern") {
    Rng rng(42);
    RbmParams p = init_rbm(6, 4, RbmFlavor::BinaryBinary, rng);
    VisibleBatch data;
    data.rows = Matrix(20, 6);
    for (std::size_t r = 0; r < 20; ++r) {
        data.rows(r, 0) = 1.0;
        data.rows(r, 3) = 1.0;
        data.rows(r, 5) = 1.0;
    }
    RbmHyper hyper;
    hyper.batch_size = 20;
    const auto history = train_rbm(p, data, 200, hyper, rng);

    // reconstruction cosine against the pattern; threshold frozen from a run
    const auto h = hidden_probs(p, {1, 0, 0, 1, 0, 1});
    const auto recon = visible_probs_binary(p, h);
    double uv = 0.0, uu = 0.0, vv = 0.0;
    const std::vector<double> target{1, 0, 0, 1, 0, 1};
    for (std::size_t i = 0; i < 6; ++i) {
        uv += recon[i] * target[i];
        uu += recon[i] * recon[i];
        vv += target[i] * target[i];
    }
    CHECK(uv / std::sqrt(uu * vv) >= 0.95);

    // error trend: median of last 10 epochs below median of first 10
    auto median10 = [&](std::size_t start) {
        std::vector<double> vals;
        for (std::size_t e = start; e < start + 10; ++e) vals.push_back(history[e].mean_recon_error);
        std::sort(vals.begin(), vals.end());
        return 0.5 * (vals[4] + vals[5]);
    };
    CHECK(median10(190) < median10(0));
}

TEST_CASE("train_rbm is bit-deterministic under a fixed seed") {
    VisibleBatch data;
    data.rows = Matrix(12, 5);
    Rng data_rng(8);
    for (double& x : data.rows.data) x = data_rng.bernoulli(0.3) ? 1.0 : 0.0;

    auto run = [&] {
        Rng rng(99);
        RbmParams p = init_rbm(5, 3, RbmFlavor::BinaryBinary, rng);
        RbmHyper hyper;
        hyper.batch_size = 4;
        train_rbm(p, data, 5, hyper, rng);
        return p;
    };
    CHECK(run() == run());
}

TEST_CASE("rbm serialization round-trips exactly") {
    const RbmParams p = make_rbm(7, 4, RbmFlavor::ReplicatedSoftmax, 55);
    std::string blob;
    write_rbm(p, blob);
    RbmParams q;
    const std::size_t consumed = read_rbm(blob, 0, q);
    CHECK(consumed == blob.size());
    CHECK(p == q);
}

#include "textae/rbm.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include "textae/errors.hpp"

namespace textae {

namespace {

void check_dims(bool ok, const char* what) {
    if (!ok) throw DimensionMismatch(what);
}

bool all_finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

RbmParams init_rbm(std::size_t n_visible, std::size_t n_hidden, RbmFlavor flavor, Rng& rng) {
    RbmParams p;
    p.flavor = flavor;
    p.W = Matrix(n_visible, n_hidden);
    for (double& w : p.W.data) w = rng.normal(0.0, 0.01);
    p.vis_bias.assign(n_visible, 0.0);
    p.hid_bias.assign(n_hidden, 0.0);
    return p;
}

CdState CdState::zeros(const RbmParams& p) {
    CdState s;
    s.vel_W = Matrix(p.W.rows, p.W.cols);
    s.vel_vis.assign(p.vis_bias.size(), 0.0);
    s.vel_hid.assign(p.hid_bias.size(), 0.0);
    return s;
}

double energy_binary(const RbmParams& p, const std::vector<double>& v,
                     const std::vector<double>& h) {
    check_dims(v.size() == p.n_visible() && h.size() == p.n_hidden(), "energy_binary dims");
    double e = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) e -= p.vis_bias[i] * v[i];
    for (std::size_t j = 0; j < h.size(); ++j) e -= p.hid_bias[j] * h[j];
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] == 0.0) continue;
        const double* w = p.W.row(i);
        for (std::size_t j = 0; j < h.size(); ++j) e -= v[i] * h[j] * w[j];
    }
    return e;
}

double energy_rsm(const RbmParams& p, const std::vector<double>& v_counts, double D,
                  const std::vector<double>& h) {
    check_dims(v_counts.size() == p.n_visible() && h.size() == p.n_hidden(), "energy_rsm dims");
    const double sum = std::accumulate(v_counts.begin(), v_counts.end(), 0.0);
    if (std::abs(sum - D) > 1e-9) throw InvalidLength("D does not equal the count sum");
    double e = 0.0;
    for (std::size_t k = 0; k < v_counts.size(); ++k) e -= p.vis_bias[k] * v_counts[k];
    for (std::size_t j = 0; j < h.size(); ++j) e -= D * p.hid_bias[j] * h[j];
    for (std::size_t k = 0; k < v_counts.size(); ++k) {
        if (v_counts[k] == 0.0) continue;
        const double* w = p.W.row(k);
        for (std::size_t j = 0; j < h.size(); ++j) e -= v_counts[k] * h[j] * w[j];
    }
    return e;
}

std::vector<double> hidden_probs(const RbmParams& p, const std::vector<double>& v, double D) {
    check_dims(v.size() == p.n_visible(), "hidden_probs dims");
    const double bias_scale = p.flavor == RbmFlavor::ReplicatedSoftmax ? D : 1.0;
    std::vector<double> h(p.n_hidden());
    for (std::size_t j = 0; j < h.size(); ++j) h[j] = bias_scale * p.hid_bias[j];
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] == 0.0) continue;
        const double* w = p.W.row(i);
        for (std::size_t j = 0; j < h.size(); ++j) h[j] += v[i] * w[j];
    }
    for (double& x : h) x = sigmoid(x);
    return h;
}

std::vector<double> visible_probs_binary(const RbmParams& p, const std::vector<double>& h) {
    check_dims(h.size() == p.n_hidden(), "visible_probs_binary dims");
    std::vector<double> v(p.n_visible());
    for (std::size_t i = 0; i < v.size(); ++i) {
        double acc = p.vis_bias[i];
        const double* w = p.W.row(i);
        for (std::size_t j = 0; j < h.size(); ++j) acc += h[j] * w[j];
        v[i] = sigmoid(acc);
    }
    return v;
}

std::vector<double> visible_softmax_rsm(const RbmParams& p, const std::vector<double>& h) {
    check_dims(h.size() == p.n_hidden(), "visible_softmax_rsm dims");
    std::vector<double> logits(p.n_visible());
    for (std::size_t k = 0; k < logits.size(); ++k) {
        double acc = p.vis_bias[k];
        const double* w = p.W.row(k);
        for (std::size_t j = 0; j < h.size(); ++j) acc += h[j] * w[j];
        logits[k] = acc;
    }
    const double mx = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double& x : logits) {
        x = std::exp(x - mx);
        sum += x;
    }
    for (double& x : logits) x /= sum;
    return logits;
}

std::vector<std::uint32_t> sample_visible_multinomial(const std::vector<double>& probs,
                                                      std::uint32_t D, Rng& rng) {
    double sum = 0.0;
    for (double p : probs) {
        if (p < 0.0) throw InvalidDistribution("negative probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw InvalidDistribution("probabilities do not sum to 1");

    std::vector<double> cdf(probs.size());
    std::partial_sum(probs.begin(), probs.end(), cdf.begin());
    cdf.back() = 1.0;

    std::vector<std::uint32_t> counts(probs.size(), 0);
    for (std::uint32_t d = 0; d < D; ++d) {
        const double u = rng.uniform();
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        ++counts[static_cast<std::size_t>(it - cdf.begin())];
    }
    return counts;
}

CdStats cd1_update(RbmParams& p, CdState& state, const VisibleBatch& batch, double lr,
                   double momentum, double weight_decay, Rng& rng) {
    const bool rsm = p.flavor == RbmFlavor::ReplicatedSoftmax;
    check_dims(batch.rows.cols == p.n_visible(), "cd1_update visible dims");
    if (batch.rows.rows == 0) throw DimensionMismatch("cd1_update: empty batch");
    if (rsm && batch.lengths.size() != batch.rows.rows)
        throw DimensionMismatch("cd1_update: rsm batch needs per-row lengths");
    const std::size_t B = batch.rows.rows;
    const double* scale = rsm ? batch.lengths.data() : nullptr;

    // positive phase
    Matrix h0;
    kernels::affine_forward(batch.rows, p.W, p.hid_bias, scale, h0);
    kernels::sigmoid_inplace(h0);

    Matrix h0_sample(h0.rows, h0.cols);
    for (std::size_t i = 0; i < h0.data.size(); ++i)
        h0_sample.data[i] = rng.bernoulli(h0.data[i]) ? 1.0 : 0.0;

    // reconstruction: mean-field visibles for binary, D-fold multinomial for rsm
    Matrix v1;
    kernels::affine_backward(h0_sample, p.W, p.vis_bias, v1);
    if (rsm) {
        kernels::softmax_rows_inplace(v1);
        for (std::size_t r = 0; r < B; ++r) {
            std::vector<double> row(v1.row(r), v1.row(r) + v1.cols);
            const auto counts = sample_visible_multinomial(
                row, static_cast<std::uint32_t>(batch.lengths[r]), rng);
            for (std::size_t k = 0; k < counts.size(); ++k) v1(r, k) = counts[k];
        }
    } else {
        kernels::sigmoid_inplace(v1);
    }

    // negative phase
    Matrix h1;
    kernels::affine_forward(v1, p.W, p.hid_bias, scale, h1);
    kernels::sigmoid_inplace(h1);

    Matrix grad_pos(p.W.rows, p.W.cols), grad_neg(p.W.rows, p.W.cols);
    kernels::add_outer_products(batch.rows, h0, grad_pos);
    kernels::add_outer_products(v1, h1, grad_neg);

    const double inv_b = 1.0 / static_cast<double>(B);
    double grad_sq = 0.0;
    for (std::size_t i = 0; i < p.W.data.size(); ++i) {
        const double g = (grad_pos.data[i] - grad_neg.data[i]) * inv_b;
        grad_sq += g * g;
        state.vel_W.data[i] = momentum * state.vel_W.data[i] + lr * (g - weight_decay * p.W.data[i]);
        p.W.data[i] += state.vel_W.data[i];
    }
    for (std::size_t i = 0; i < p.vis_bias.size(); ++i) {
        double g = 0.0;
        for (std::size_t r = 0; r < B; ++r) g += batch.rows(r, i) - v1(r, i);
        state.vel_vis[i] = momentum * state.vel_vis[i] + lr * g * inv_b;
        p.vis_bias[i] += state.vel_vis[i];
    }
    for (std::size_t j = 0; j < p.hid_bias.size(); ++j) {
        double g = 0.0;
        for (std::size_t r = 0; r < B; ++r) g += h0(r, j) - h1(r, j);
        state.vel_hid[j] = momentum * state.vel_hid[j] + lr * g * inv_b;
        p.hid_bias[j] += state.vel_hid[j];
    }

    if (!all_finite(p.W.data) || !all_finite(p.vis_bias) || !all_finite(p.hid_bias))
        throw NonFiniteUpdate("cd1_update produced non-finite parameters");

    CdStats stats;
    double err = 0.0;
    for (std::size_t i = 0; i < v1.data.size(); ++i) {
        const double d = batch.rows.data[i] - v1.data[i];
        err += d * d;
    }
    stats.mean_recon_error = err * inv_b;
    stats.gradient_norm = std::sqrt(grad_sq);
    return stats;
}

std::vector<CdStats> train_rbm(RbmParams& p, const VisibleBatch& data, std::size_t epochs,
                               const RbmHyper& hyper, Rng& rng) {
    const std::size_t n = data.rows.rows;
    CdState state = CdState::zeros(p);
    std::vector<CdStats> history;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        rng.shuffle(order);
        const double momentum = hyper.momentum_at(epoch);
        double epoch_err = 0.0;
        double epoch_grad = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < n; start += hyper.batch_size) {
            const std::size_t end = std::min(n, start + hyper.batch_size);
            VisibleBatch batch;
            batch.rows = Matrix(end - start, data.rows.cols);
            if (data.is_count_data()) batch.lengths.resize(end - start);
            for (std::size_t r = start; r < end; ++r) {
                std::memcpy(batch.rows.row(r - start), data.rows.row(order[r]),
                            sizeof(double) * data.rows.cols);
                if (data.is_count_data()) batch.lengths[r - start] = data.lengths[order[r]];
            }
            const CdStats s =
                cd1_update(p, state, batch, hyper.lr, momentum, hyper.weight_decay, rng);
            epoch_err += s.mean_recon_error;
            epoch_grad += s.gradient_norm;
            ++batches;
        }
        history.push_back({epoch, epoch_err / static_cast<double>(batches),
                           epoch_grad / static_cast<double>(batches)});
    }
    return history;
}

Matrix hidden_probs_batch(const RbmParams& p, const VisibleBatch& batch) {
    const double* scale =
        p.flavor == RbmFlavor::ReplicatedSoftmax ? batch.lengths.data() : nullptr;
    Matrix h;
    kernels::affine_forward(batch.rows, p.W, p.hid_bias, scale, h);
    kernels::sigmoid_inplace(h);
    return h;
}

// --- serialization (assumes little-endian host) ---

namespace {

constexpr char kMagic[4] = {'R', 'B', 'M', 'W'};
constexpr std::uint8_t kVersion = 1;

template <typename T>
void put(std::string& out, T value) {
    out.append(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(const std::string& in, std::size_t& offset) {
    if (offset + sizeof(T) > in.size()) throw IoError("truncated RBM block");
    T value;
    std::memcpy(&value, in.data() + offset, sizeof(T));
    offset += sizeof(T);
    return value;
}

void put_doubles(std::string& out, const std::vector<double>& v) {
    out.append(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(double));
}

void get_doubles(const std::string& in, std::size_t& offset, std::vector<double>& v,
                 std::size_t count) {
    if (offset + count * sizeof(double) > in.size()) throw IoError("truncated RBM block");
    v.resize(count);
    std::memcpy(v.data(), in.data() + offset, count * sizeof(double));
    offset += count * sizeof(double);
}

}  // namespace

void write_rbm(const RbmParams& p, std::string& out) {
    out.append(kMagic, sizeof(kMagic));
    put(out, kVersion);
    put(out, static_cast<std::uint8_t>(p.flavor));
    put(out, static_cast<std::uint32_t>(p.n_visible()));
    put(out, static_cast<std::uint32_t>(p.n_hidden()));
    put_doubles(out, p.W.data);
    put_doubles(out, p.vis_bias);
    put_doubles(out, p.hid_bias);
}

std::size_t read_rbm(const std::string& in, std::size_t offset, RbmParams& p) {
    if (offset + 4 > in.size() || std::memcmp(in.data() + offset, kMagic, 4) != 0)
        throw IoError("bad RBM magic");
    offset += 4;
    if (get<std::uint8_t>(in, offset) != kVersion) throw IoError("unsupported RBM version");
    p.flavor = static_cast<RbmFlavor>(get<std::uint8_t>(in, offset));
    const auto n_vis = get<std::uint32_t>(in, offset);
    const auto n_hid = get<std::uint32_t>(in, offset);
    p.W = Matrix(n_vis, n_hid);
    get_doubles(in, offset, p.W.data, static_cast<std::size_t>(n_vis) * n_hid);
    get_doubles(in, offset, p.vis_bias, n_vis);
    get_doubles(in, offset, p.hid_bias, n_hid);
    return offset;
}

}  // namespace textae

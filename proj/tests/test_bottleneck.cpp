#include <algorithm>
#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "textae/bottleneck.hpp"
#include "textae/errors.hpp"

using namespace textae;

namespace {

// Piecewise-linear SPI curve over dims 10..100: steep slope -0.02 below the
// knee at 40, shallow slope -0.001 above it.
SweepResult knee_fixture() {
    SweepResult r;
    for (std::size_t m = 10; m <= 100; m += 10) {
        r.dims.push_back(m);
        const double spi = m <= 40 ? 0.9 - 0.02 * (static_cast<double>(m) - 10.0)
                                   : 0.3 - 0.001 * (static_cast<double>(m) - 40.0);
        r.spi_values.push_back(spi);
        r.rc_values.push_back(0.0);
        r.sai_values.push_back(0.0);
    }
    return r;
}

}  // namespace

TEST_CASE("two-point slope") {
    CHECK(slope({10, 0.5}, {20, 0.3}) == doctest::Approx(-0.02).epsilon(1e-12));
    CHECK(slope({10, 0.4}, {30, 0.4}) == 0.0);
    CHECK(slope({10, 0.5}, {20, 0.3}) == doctest::Approx(slope({20, 0.3}, {10, 0.5})));
    CHECK_THROWS_AS(slope({10, 0.5}, {10, 0.3}), DegenerateInterval);
}

TEST_CASE("steepness series on synthetic curves") {
    const SweepResult fixture = knee_fixture();
    const auto series = steepness_series(fixture.dims, fixture.spi_values);
    CHECK(series.size() == fixture.dims.size() - 2);

    // knee at 40: slopes -0.02 then -0.001 -> 100*|0.019|/0.02 = 95
    double at40 = -1.0;
    for (const auto& [dim, c] : series)
        if (dim == 40) at40 = c;
    CHECK(at40 == doctest::Approx(95.0).epsilon(1e-9));

    // perfectly linear curve: all zeros
    std::vector<std::size_t> dims{10, 20, 30, 40};
    std::vector<double> linear{0.8, 0.6, 0.4, 0.2};
    for (const auto& [dim, c] : steepness_series(dims, linear))
        CHECK(c == doctest::Approx(0.0).epsilon(1e-9));

    // invariant to adding a constant to all SPI values
    std::vector<double> shifted = fixture.spi_values;
    for (double& v : shifted) v += 0.37;
    const auto series2 = steepness_series(fixture.dims, shifted);
    for (std::size_t i = 0; i < series.size(); ++i)
        CHECK(series2[i].second == doctest::Approx(series[i].second).epsilon(1e-9));

    CHECK_THROWS_AS(steepness_series({10, 20}, {0.5, 0.4}), TooFewPoints);
}

TEST_CASE("critical dimension detection") {
    const auto series = steepness_series(knee_fixture().dims, knee_fixture().spi_values);
    CHECK(critical_dimension(series, 0.8) == 40);

    // two equal peaks: right-most wins
    std::vector<std::pair<std::size_t, double>> peaks{
        {20, 1.0}, {30, 50.0}, {40, 2.0}, {50, 1.0}, {60, 50.0}, {70, 3.0}};
    CHECK(critical_dimension(peaks, 0.8) == 60);

    // tau=1 returns the unique argmax
    std::vector<std::pair<std::size_t, double>> unique_max{{20, 5.0}, {30, 80.0}, {40, 10.0}};
    CHECK(critical_dimension(unique_max, 1.0) == 30);

    std::vector<std::pair<std::size_t, double>> flat{{20, 0.0}, {30, 0.0}};
    CHECK_THROWS_AS(critical_dimension(flat, 0.8), NoPeak);
}

TEST_CASE("quasi-linear curves yield no dominant knee while the spi fixture does") {
    const SweepResult fixture = knee_fixture();
    const CriticalDimReport report = detect_critical_dim(fixture, 0.8);
    CHECK(report.critical_dim == 40);

    // exactly one dominant peak above the threshold
    double max_c = 0.0;
    for (double c : report.steepness) max_c = std::max(max_c, c);
    std::size_t above = 0;
    for (double c : report.steepness)
        if (c >= 0.8 * max_c) ++above;
    CHECK(above == 1);

    // a strictly linear rc/sai-style curve is flat in steepness
    std::vector<std::size_t> dims;
    std::vector<double> linear;
    for (std::size_t m = 10; m <= 100; m += 10) {
        dims.push_back(m);
        linear.push_back(2.0 - 0.01 * static_cast<double>(m));
    }
    CHECK_THROWS_AS(critical_dimension(steepness_series(dims, linear), 0.8), NoPeak);
}

TEST_CASE("sweep csv round trip") {
    const SweepResult fixture = knee_fixture();
    const auto path = std::filesystem::temp_directory_path() / "textae_sweep_test.csv";
    write_sweep_csv(fixture, path.string());
    const SweepResult loaded = read_sweep_csv(path.string());
    CHECK(loaded.dims == fixture.dims);
    for (std::size_t i = 0; i < fixture.dims.size(); ++i)
        CHECK(loaded.spi_values[i] == doctest::Approx(fixture.spi_values[i]).epsilon(1e-9));
    std::filesystem::remove(path);
}

TEST_CASE("desk-scale sweep produces complete, deterministic, resumable results") {
    // 3-cluster synthetic corpus small enough for seconds-scale training
    CorpusSplit corpus;
    corpus.vocabulary.terms = {"t00", "t01", "t02", "t03", "t04", "t05",
                               "t06", "t07", "t08", "t09", "t10", "t11"};
    corpus.vocabulary.stage = VocabStage::Vocab2;
    Rng rng(7);
    auto make_sentence = [&](std::size_t cluster) {
        SentenceVector v;
        for (std::size_t k = 0; k < 4; ++k) {
            const std::size_t idx = cluster * 4 + (rng.below(4));
            if (std::find(v.indices.begin(), v.indices.end(), idx) == v.indices.end())
                v.indices.push_back(idx);
        }
        std::sort(v.indices.begin(), v.indices.end());
        v.values.assign(v.indices.size(), 1);
        v.length_D = static_cast<std::uint32_t>(v.indices.size());
        return v;
    };
    for (std::size_t i = 0; i < 60; ++i) corpus.train.push_back(make_sentence(i % 3));
    for (std::size_t i = 0; i < 15; ++i) corpus.test.push_back(make_sentence(i % 3));

    SweepConfig config;
    config.net.model = ModelKind::bDA;
    config.net.layer_sizes = {8, 0};
    config.net.epochs_pretrain = 5;
    config.net.epochs_finetune = 10;
    config.net.rbm_hyper_binary.batch_size = 20;
    config.net.finetune_batch_size = 20;
    config.dims = {2, 4, 6};
    config.master_seed = 11;
    const auto dir = std::filesystem::temp_directory_path() / "textae_sweep_resume";
    std::filesystem::remove_all(dir);
    config.resume_dir = (dir / "partials").string();

    const SweepResult first = sweep(config, corpus);
    CHECK(first.dims == std::vector<std::size_t>{2, 4, 6});
    CHECK(first.spi_values.size() == 3);
    CHECK(first.rc_values.size() == 3);
    CHECK(first.sai_values.size() == 3);

    // rerun resumes from the partial files and reproduces the same numbers
    const SweepResult second = sweep(config, corpus);
    CHECK(second.spi_values == first.spi_values);
    CHECK(second.rc_values == first.rc_values);
    CHECK(second.sai_values == first.sai_values);

    // fresh run without partials is bit-identical under the same master seed
    std::filesystem::remove_all(dir);
    const SweepResult third = sweep(config, corpus);
    CHECK(third.spi_values == first.spi_values);
    std::filesystem::remove_all(dir);
}

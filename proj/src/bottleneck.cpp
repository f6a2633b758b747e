#include "textae/bottleneck.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "textae/errors.hpp"
#include "textae/io_util.hpp"
#include "textae/rng.hpp"

namespace textae {

double slope(std::pair<double, double> a1, std::pair<double, double> a2) {
    if (a1.first == a2.first) throw DegenerateInterval("slope over a zero-width interval");
    return (a2.second - a1.second) / (a2.first - a1.first);
}

std::vector<std::pair<std::size_t, double>> steepness_series(const std::vector<std::size_t>& dims,
                                                             const std::vector<double>& spi_values,
                                                             bool symmetric) {
    if (dims.size() != spi_values.size()) throw DimensionMismatch("steepness_series dims");
    if (dims.size() < 3) throw TooFewPoints("steepness_series needs at least 3 points");
    constexpr double eps = 1e-12;
    std::vector<std::pair<std::size_t, double>> out;
    for (std::size_t i = 1; i + 1 < dims.size(); ++i) {
        const double s_prev = slope({static_cast<double>(dims[i - 1]), spi_values[i - 1]},
                                    {static_cast<double>(dims[i]), spi_values[i]});
        const double s_next = slope({static_cast<double>(dims[i]), spi_values[i]},
                                    {static_cast<double>(dims[i + 1]), spi_values[i + 1]});
        const double denom =
            symmetric ? 0.5 * (std::abs(s_prev) + std::abs(s_next)) + eps : std::abs(s_prev) + eps;
        out.emplace_back(dims[i], 100.0 * std::abs(s_prev - s_next) / denom);
    }
    return out;
}

std::size_t critical_dimension(const std::vector<std::pair<std::size_t, double>>& steepness,
                               double tau) {
    if (steepness.empty()) throw TooFewPoints("empty steepness series");
    // steepness is a percentage; values this small only arise from rounding
    // noise on a numerically straight curve
    constexpr double kFlat = 1e-9;
    double max_c = 0.0;
    for (const auto& [dim, c] : steepness) max_c = std::max(max_c, c);
    if (max_c <= kFlat) throw NoPeak("flat curve: no critical dimension in range");

    std::size_t best_dim = 0;
    bool found = false;
    for (std::size_t i = 0; i < steepness.size(); ++i) {
        const double c = steepness[i].second;
        const bool left_ok = i == 0 || steepness[i - 1].second <= c;
        const bool right_ok = i + 1 == steepness.size() || steepness[i + 1].second <= c;
        if (!left_ok || !right_ok) continue;          // not a local maximum
        if (c < tau * max_c) continue;                // not a large peak
        if (!found || steepness[i].first > best_dim) best_dim = steepness[i].first;
        found = true;
    }
    if (!found) throw NoPeak("no peak reaches the threshold");
    return best_dim;
}

CriticalDimReport detect_critical_dim(const SweepResult& sweep, double tau, bool symmetric) {
    CriticalDimReport report;
    const auto series = steepness_series(sweep.dims, sweep.spi_values, symmetric);
    for (const auto& [dim, c] : series) {
        report.steepness_dims.push_back(dim);
        report.steepness.push_back(c);
    }
    report.peak_threshold_used = tau;
    report.critical_dim = critical_dimension(series, tau);
    return report;
}

namespace {

struct DimResult {
    std::size_t m = 0;
    double rc = 0.0, spi = 0.0, sai = 0.0;
};

std::string dim_file(const std::string& dir, std::size_t m) {
    return dir + "/dim_" + std::to_string(m) + ".csv";
}

bool try_load_dim(const std::string& dir, std::size_t m, DimResult& out) {
    std::ifstream in(dim_file(dir, m));
    if (!in) return false;
    std::string header, row;
    if (!std::getline(in, header) || !std::getline(in, row)) return false;
    char comma;
    std::istringstream ss(row);
    ss >> out.m >> comma >> out.rc >> comma >> out.spi >> comma >> out.sai;
    return static_cast<bool>(ss) && out.m == m;
}

void store_dim(const std::string& dir, const DimResult& r) {
    std::ostringstream out;
    out << std::setprecision(17);
    out << "m,rc,spi,sai\n" << r.m << ',' << r.rc << ',' << r.spi << ',' << r.sai << '\n';
    atomic_write(dim_file(dir, r.m), out.str());
}

DimResult train_one_dim(const SweepConfig& config, const CorpusSplit& corpus, std::size_t m) {
    NetConfig net_config = config.net;
    net_config.layer_sizes.back() = m;
    net_config.seed = derive_seed(config.master_seed, m);
    Rng rng(net_config.seed);

    const std::size_t n = corpus.vocabulary.size();
    const VisibleBatch train = make_batch(corpus.train, n, net_config.model);
    const VisibleBatch test = make_batch(corpus.test, n, net_config.model);

    AutoencoderNet net = unroll(net_config, pretrain_stack(net_config, train, rng));
    net.vocab_hash = corpus.vocabulary.hash();
    fine_tune(net, train, net_config, rng);

    const MetricsReport report = evaluate(net, test);
    return {m, report.reconstruction_error, report.spi, report.sai};
}

}  // namespace

SweepResult sweep(const SweepConfig& config, const CorpusSplit& corpus) {
    if (config.dims.size() < 3) throw TooFewPoints("sweep needs at least 3 dims");
    if (!std::is_sorted(config.dims.begin(), config.dims.end()))
        throw DimensionMismatch("sweep dims must be ascending");
    if (!config.resume_dir.empty()) std::filesystem::create_directories(config.resume_dir);

    std::vector<DimResult> results(config.dims.size());
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < config.dims.size(); ++i) {
        if (!config.resume_dir.empty() &&
            try_load_dim(config.resume_dir, config.dims[i], results[i]))
            continue;
        pending.push_back(i);
    }

    auto run_index = [&](std::size_t i) {
        results[i] = train_one_dim(config, corpus, config.dims[i]);
        if (!config.resume_dir.empty()) store_dim(config.resume_dir, results[i]);
    };

    const std::size_t jobs = std::max<std::size_t>(1, config.jobs);
    if (jobs == 1 || pending.size() <= 1) {
        for (std::size_t i : pending) run_index(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        for (std::size_t w = 0; w < std::min(jobs, pending.size()); ++w) {
            workers.emplace_back([&] {
                for (std::size_t k = next.fetch_add(1); k < pending.size();
                     k = next.fetch_add(1))
                    run_index(pending[k]);
            });
        }
        for (auto& t : workers) t.join();
    }

    SweepResult out;
    for (std::size_t i = 0; i < config.dims.size(); ++i) {
        out.dims.push_back(results[i].m);
        out.rc_values.push_back(results[i].rc);
        out.spi_values.push_back(results[i].spi);
        out.sai_values.push_back(results[i].sai);
    }
    return out;
}

void write_sweep_csv(const SweepResult& result, const std::string& path) {
    std::ostringstream out;
    out << std::setprecision(17);
    out << "m,rc,spi,sai\n";
    for (std::size_t i = 0; i < result.dims.size(); ++i)
        out << result.dims[i] << ',' << result.rc_values[i] << ',' << result.spi_values[i] << ','
            << result.sai_values[i] << '\n';
    atomic_write(path, out.str());
}

SweepResult read_sweep_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open sweep csv: " + path);
    SweepResult result;
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty sweep csv: " + path);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::size_t m;
        double rc, spi_v, sai_v;
        char comma;
        ss >> m >> comma >> rc >> comma >> spi_v >> comma >> sai_v;
        if (!ss) throw IoError("malformed sweep row: " + line);
        result.dims.push_back(m);
        result.rc_values.push_back(rc);
        result.spi_values.push_back(spi_v);
        result.sai_values.push_back(sai_v);
    }
    return result;
}

void write_critical_dim_report(const CriticalDimReport& report, const std::string& path) {
    std::ostringstream out;
    out << std::setprecision(17);
    out << "m,steepness\n";
    for (std::size_t i = 0; i < report.steepness.size(); ++i)
        out << report.steepness_dims[i] << ',' << report.steepness[i] << '\n';
    out << "critical_dim=" << report.critical_dim << '\n';
    atomic_write(path, out.str());
}

}  // namespace textae

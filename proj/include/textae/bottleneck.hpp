#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "textae/autoencoder.hpp"
#include "textae/metrics.hpp"

namespace textae {

struct SweepResult {
    std::vector<std::size_t> dims;   // ascending bottleneck sizes
    std::vector<double> spi_values;
    std::vector<double> rc_values;
    std::vector<double> sai_values;
};

struct CriticalDimReport {
    std::vector<std::size_t> steepness_dims;  // interior points
    std::vector<double> steepness;
    std::size_t critical_dim = 0;
    double peak_threshold_used = 0.0;
};

// Two-point slope of the SPI curve.
double slope(std::pair<double, double> a1, std::pair<double, double> a2);

// Percentage slope change at each interior point:
// c_i = 100 * |s_prev - s_next| / (|s_prev| + eps). With `symmetric` the
// denominator is the mean of both slope magnitudes instead.
std::vector<std::pair<std::size_t, double>> steepness_series(const std::vector<std::size_t>& dims,
                                                             const std::vector<double>& spi_values,
                                                             bool symmetric = false);

// Right-most local maximum whose steepness reaches tau * max(c). Throws NoPeak
// on an all-zero (flat) series.
std::size_t critical_dimension(const std::vector<std::pair<std::size_t, double>>& steepness,
                               double tau = 0.8);

CriticalDimReport detect_critical_dim(const SweepResult& sweep, double tau = 0.8,
                                      bool symmetric = false);

struct SweepConfig {
    NetConfig net;                        // layer_sizes.back() replaced per dim
    std::vector<std::size_t> dims{10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
    std::uint64_t master_seed = 42;
    std::string resume_dir;               // per-dim partial CSVs live here if set
    std::size_t jobs = 1;
};

// Trains one fresh autoencoder per bottleneck size (seed derived from
// (master_seed, m)) and evaluates the test split. Per-dim results are
// persisted under resume_dir so an interrupted sweep picks up where it
// stopped. Dims may run in parallel (bounded by jobs).
SweepResult sweep(const SweepConfig& config, const CorpusSplit& corpus);

void write_sweep_csv(const SweepResult& result, const std::string& path);
SweepResult read_sweep_csv(const std::string& path);

void write_critical_dim_report(const CriticalDimReport& report, const std::string& path);

}  // namespace textae

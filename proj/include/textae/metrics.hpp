#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "textae/autoencoder.hpp"
#include "textae/kernels.hpp"

namespace textae {

struct Histogram {
    std::vector<double> edges;        // bins+1 edges over [0,1]
    std::vector<std::size_t> counts;  // per-bin, last bin right-inclusive
};

struct MetricsReport {
    std::string model;
    std::string phase;
    std::size_t m = 0;
    double reconstruction_error = 0.0;  // mean cross-entropy per sentence
    double spi = 0.0;
    double sai = 0.0;
    std::size_t p = 0;                  // evaluated sentences
    std::size_t skipped_empty = 0;      // zero-norm inputs excluded from SAI
    Histogram histogram;
};

// u.v / (|u||v|); 0 when either norm is 0.
double cosine(const std::vector<double>& u, const std::vector<double>& v);

// Pairwise cosine similarities of the rows; diagonal forced to exactly 1.
Matrix similarity_matrix(const Matrix& X);

// Mean squared discrepancy of the two similarity matrices, (1/p^2) sum (D-D^)^2.
double spi(const Matrix& X, const Matrix& X_hat);

// Mean cosine between each row and its reconstruction; zero-norm input rows
// are skipped (count reported via the optional out-param).
double sai(const Matrix& X, const Matrix& X_hat, std::size_t* skipped_empty = nullptr);

double reconstruction_error(const AutoencoderNet& net, const VisibleBatch& X);

Histogram cosine_histogram(const Matrix& X, const Matrix& X_hat, std::size_t bins = 20);

// Full report for a test set against a trained net. The reference rows X are
// the binary vectors for bDA and the raw count vectors for rsDA.
MetricsReport evaluate(const AutoencoderNet& net, const VisibleBatch& test, std::size_t bins = 20);

void write_report_json(const MetricsReport& report, const std::string& path);
void write_report_csv(const MetricsReport& report, const std::string& path);

}  // namespace textae

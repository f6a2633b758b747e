#include "textae/metrics.hpp"

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "textae/errors.hpp"
#include "textae/io_util.hpp"

namespace textae {

double cosine(const std::vector<double>& u, const std::vector<double>& v) {
    if (u.size() != v.size()) throw DimensionMismatch("cosine dims");
    double uu = 0.0, vv = 0.0, uv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        uu += u[i] * u[i];
        vv += v[i] * v[i];
        uv += u[i] * v[i];
    }
    if (uu == 0.0 || vv == 0.0) return 0.0;
    // sqrt(uu*vv) rather than sqrt(uu)*sqrt(vv): for u == v this yields
    // uu/uu == 1.0 exactly (sqrt of a rounded square is exact)
    return uv / std::sqrt(uu * vv);
}

Matrix similarity_matrix(const Matrix& X) { return kernels::cosine_similarity_matrix(X); }

double spi(const Matrix& X, const Matrix& X_hat) {
    if (X.rows != X_hat.rows || X.cols != X_hat.cols) throw DimensionMismatch("spi dims");
    const Matrix D = similarity_matrix(X);
    const Matrix D_hat = similarity_matrix(X_hat);
    double sum = 0.0;  // fixed-order reduction for bit-stable results
    for (std::size_t i = 0; i < D.data.size(); ++i) {
        const double d = D.data[i] - D_hat.data[i];
        sum += d * d;
    }
    const double p = static_cast<double>(X.rows);
    return sum / (p * p);
}

double sai(const Matrix& X, const Matrix& X_hat, std::size_t* skipped_empty) {
    if (X.rows != X_hat.rows || X.cols != X_hat.cols) throw DimensionMismatch("sai dims");
    double sum = 0.0;
    std::size_t kept = 0, skipped = 0;
    for (std::size_t r = 0; r < X.rows; ++r) {
        double norm = 0.0;
        for (std::size_t c = 0; c < X.cols; ++c) norm += X(r, c) * X(r, c);
        if (norm == 0.0) {
            ++skipped;
            continue;
        }
        std::vector<double> u(X.row(r), X.row(r) + X.cols);
        std::vector<double> v(X_hat.row(r), X_hat.row(r) + X.cols);
        sum += cosine(u, v);
        ++kept;
    }
    if (skipped_empty) *skipped_empty = skipped;
    if (kept == 0) throw EmptyEvaluationSet("all input rows have zero norm");
    return sum / static_cast<double>(kept);
}

double reconstruction_error(const AutoencoderNet& net, const VisibleBatch& X) {
    return batch_loss(net, X);
}

Histogram cosine_histogram(const Matrix& X, const Matrix& X_hat, std::size_t bins) {
    if (bins < 1) throw DimensionMismatch("histogram needs at least one bin");
    if (X.rows != X_hat.rows || X.cols != X_hat.cols)
        throw DimensionMismatch("cosine_histogram dims");
    Histogram h;
    h.edges.resize(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b)
        h.edges[b] = static_cast<double>(b) / static_cast<double>(bins);
    h.counts.assign(bins, 0);
    for (std::size_t r = 0; r < X.rows; ++r) {
        std::vector<double> u(X.row(r), X.row(r) + X.cols);
        std::vector<double> v(X_hat.row(r), X_hat.row(r) + X.cols);
        const double c = cosine(u, v);
        auto bin = static_cast<std::size_t>(c * static_cast<double>(bins));
        if (bin >= bins) bin = bins - 1;  // right-inclusive last bin
        ++h.counts[bin];
    }
    return h;
}

MetricsReport evaluate(const AutoencoderNet& net, const VisibleBatch& test, std::size_t bins) {
    MetricsReport report;
    report.model = net.model == ModelKind::bDA ? "bda" : "rsda";
    report.phase = net.phase == NetPhase::pretrained ? "pt" : "bp";
    report.m = net.code_dim();
    report.p = test.rows.rows;

    const Matrix recon = reconstruct_batch(net, test);
    report.reconstruction_error = batch_loss(net, test);
    report.spi = spi(test.rows, recon);
    report.sai = sai(test.rows, recon, &report.skipped_empty);
    report.histogram = cosine_histogram(test.rows, recon, bins);
    return report;
}

void write_report_json(const MetricsReport& report, const std::string& path) {
    nlohmann::json j{{"model", report.model},
                     {"phase", report.phase},
                     {"m", report.m},
                     {"rc", report.reconstruction_error},
                     {"spi", report.spi},
                     {"sai", report.sai},
                     {"p", report.p},
                     {"skipped_empty", report.skipped_empty},
                     {"histogram",
                      {{"edges", report.histogram.edges}, {"counts", report.histogram.counts}}}};
    atomic_write(path, j.dump(2) + "\n");
}

void write_report_csv(const MetricsReport& report, const std::string& path) {
    std::ostringstream out;
    out << "metric,value\n";
    out << "rc," << report.reconstruction_error << '\n';
    out << "spi," << report.spi << '\n';
    out << "sai," << report.sai << '\n';
    out << "p," << report.p << '\n';
    out << "skipped_empty," << report.skipped_empty << '\n';
    atomic_write(path, out.str());
}

}  // namespace textae

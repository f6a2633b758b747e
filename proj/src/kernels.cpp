#include "textae/kernels.hpp"

#include <cassert>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace textae::kernels {

namespace {

void affine_forward_row(const Matrix& X, const Matrix& W, const std::vector<double>& bias,
                        const double* row_scale, Matrix& out, std::size_t r) {
    const double scale = row_scale ? row_scale[r] : 1.0;
    double* o = out.row(r);
    for (std::size_t j = 0; j < W.cols; ++j) o[j] = scale * bias[j];
    const double* x = X.row(r);
    for (std::size_t i = 0; i < X.cols; ++i) {
        const double xi = x[i];
        if (xi == 0.0) continue;
        const double* w = W.row(i);
        for (std::size_t j = 0; j < W.cols; ++j) o[j] += xi * w[j];
    }
}

void affine_backward_row(const Matrix& X, const Matrix& W, const std::vector<double>& bias,
                         Matrix& out, std::size_t r) {
    const double* x = X.row(r);
    double* o = out.row(r);
    for (std::size_t i = 0; i < W.rows; ++i) {
        double acc = bias[i];
        const double* w = W.row(i);
        for (std::size_t j = 0; j < W.cols; ++j) acc += x[j] * w[j];
        o[i] = acc;
    }
}

void softmax_row(Matrix& m, std::size_t r) {
    double* p = m.row(r);
    double mx = p[0];
    for (std::size_t j = 1; j < m.cols; ++j) mx = std::max(mx, p[j]);
    double sum = 0.0;
    for (std::size_t j = 0; j < m.cols; ++j) {
        p[j] = std::exp(p[j] - mx);
        sum += p[j];
    }
    for (std::size_t j = 0; j < m.cols; ++j) p[j] /= sum;
}

double dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

}  // namespace

void affine_forward(const Matrix& X, const Matrix& W, const std::vector<double>& bias,
                    const double* row_scale, Matrix& out) {
    assert(X.cols == W.rows && bias.size() == W.cols);
    out = Matrix(X.rows, W.cols);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(X.rows); ++r)
        affine_forward_row(X, W, bias, row_scale, out, static_cast<std::size_t>(r));
}

void affine_backward(const Matrix& X, const Matrix& W, const std::vector<double>& bias,
                     Matrix& out) {
    assert(X.cols == W.cols && bias.size() == W.rows);
    out = Matrix(X.rows, W.rows);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(X.rows); ++r)
        affine_backward_row(X, W, bias, out, static_cast<std::size_t>(r));
}

void sigmoid_inplace(Matrix& m) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(m.data.size()); ++i)
        m.data[i] = 1.0 / (1.0 + std::exp(-m.data[i]));
}

void softmax_rows_inplace(Matrix& m) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(m.rows); ++r)
        softmax_row(m, static_cast<std::size_t>(r));
}

void add_outer_products(const Matrix& A, const Matrix& B, Matrix& G) {
    assert(A.rows == B.rows && G.rows == A.cols && G.cols == B.cols);
    // Each (i,j) cell is owned by one thread; the sum over rows keeps the
    // fixed order r = 0..p-1 so results match the serial kernel exactly.
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(G.rows); ++i) {
        double* g = G.row(static_cast<std::size_t>(i));
        for (std::size_t r = 0; r < A.rows; ++r) {
            const double a = A(r, static_cast<std::size_t>(i));
            if (a == 0.0) continue;
            const double* b = B.row(r);
            for (std::size_t j = 0; j < G.cols; ++j) g[j] += a * b[j];
        }
    }
}

Matrix cosine_similarity_matrix(const Matrix& X) {
    const std::size_t p = X.rows;
    std::vector<double> norms(p);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(p); ++i)
        norms[i] = std::sqrt(dot(X.row(i), X.row(i), X.cols));

    Matrix D(p, p);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(p); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        D(i, i) = 1.0;  // forced, regardless of norm
        for (std::size_t j = i + 1; j < p; ++j) {
            double s = 0.0;
            if (norms[i] > 0.0 && norms[j] > 0.0)
                s = dot(X.row(i), X.row(j), X.cols) / (norms[i] * norms[j]);
            D(i, j) = s;
            D(j, i) = s;
        }
    }
    return D;
}

namespace serial {

void affine_forward(const Matrix& X, const Matrix& W, const std::vector<double>& bias,
                    const double* row_scale, Matrix& out) {
    out = Matrix(X.rows, W.cols);
    for (std::size_t r = 0; r < X.rows; ++r) affine_forward_row(X, W, bias, row_scale, out, r);
}

void affine_backward(const Matrix& X, const Matrix& W, const std::vector<double>& bias,
                     Matrix& out) {
    out = Matrix(X.rows, W.rows);
    for (std::size_t r = 0; r < X.rows; ++r) affine_backward_row(X, W, bias, out, r);
}

void sigmoid_inplace(Matrix& m) {
    for (double& v : m.data) v = 1.0 / (1.0 + std::exp(-v));
}

void softmax_rows_inplace(Matrix& m) {
    for (std::size_t r = 0; r < m.rows; ++r) softmax_row(m, r);
}

void add_outer_products(const Matrix& A, const Matrix& B, Matrix& G) {
    for (std::size_t i = 0; i < G.rows; ++i) {
        double* g = G.row(i);
        for (std::size_t r = 0; r < A.rows; ++r) {
            const double a = A(r, i);
            if (a == 0.0) continue;
            const double* b = B.row(r);
            for (std::size_t j = 0; j < G.cols; ++j) g[j] += a * b[j];
        }
    }
}

Matrix cosine_similarity_matrix(const Matrix& X) {
    const std::size_t p = X.rows;
    std::vector<double> norms(p);
    for (std::size_t i = 0; i < p; ++i) norms[i] = std::sqrt(dot(X.row(i), X.row(i), X.cols));
    Matrix D(p, p);
    for (std::size_t i = 0; i < p; ++i) {
        D(i, i) = 1.0;
        for (std::size_t j = i + 1; j < p; ++j) {
            double s = 0.0;
            if (norms[i] > 0.0 && norms[j] > 0.0)
                s = dot(X.row(i), X.row(j), X.cols) / (norms[i] * norms[j]);
            D(i, j) = s;
            D(j, i) = s;
        }
    }
    return D;
}

}  // namespace serial

}  // namespace textae::kernels

#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace textae {

// Dense row-major matrix. Small enough on purpose; the hot loops live in
// kernels.cpp, not behind an expression-template library.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    double* row(std::size_t r) { return data.data() + r * cols; }
    const double* row(std::size_t r) const { return data.data() + r * cols; }

    bool operator==(const Matrix&) const = default;
};

// OpenMP-parallel kernels. Every kernel is bit-identical to its counterpart in
// kernels::serial for any thread count: parallel loops write disjoint outputs
// and each output element is accumulated in a fixed order.
namespace kernels {

// out[r,:] = row_scale[r] * bias + X[r,:] * W   (row_scale may be null -> 1)
void affine_forward(const Matrix& X, const Matrix& W, const std::vector<double>& bias,
                    const double* row_scale, Matrix& out);

// out[r,:] = bias + X[r,:] * W^T
void affine_backward(const Matrix& X, const Matrix& W, const std::vector<double>& bias,
                     Matrix& out);

void sigmoid_inplace(Matrix& m);

// Row-wise softmax, numerically shifted by the row max.
void softmax_rows_inplace(Matrix& m);

// G += A^T * B  (A: p x n, B: p x m, G: n x m); fixed accumulation order over p.
void add_outer_products(const Matrix& A, const Matrix& B, Matrix& G);

// Pairwise cosine-similarity matrix of the rows of X; diagonal forced to 1,
// zero-norm rows give 0 off-diagonal.
Matrix cosine_similarity_matrix(const Matrix& X);

namespace serial {
void affine_forward(const Matrix& X, const Matrix& W, const std::vector<double>& bias,
                    const double* row_scale, Matrix& out);
void affine_backward(const Matrix& X, const Matrix& W, const std::vector<double>& bias,
                     Matrix& out);
void sigmoid_inplace(Matrix& m);
void softmax_rows_inplace(Matrix& m);
void add_outer_products(const Matrix& A, const Matrix& B, Matrix& G);
Matrix cosine_similarity_matrix(const Matrix& X);
}  // namespace serial

}  // namespace kernels

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace textae

// Timing comparison of the OpenMP kernels against the serial reference, plus
// an exact-equality check on each pair.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "textae/kernels.hpp"
#include "textae/rng.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace textae;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, Rng& rng) {
    Matrix m(r, c);
    for (double& v : m.data) v = rng.normal();
    return m;
}

double time_ms(const std::function<void()>& fn, int reps) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void report(const char* name, double serial_ms, double parallel_ms, bool identical) {
    std::printf("%-24s serial %8.3f ms   openmp %8.3f ms   speedup %5.2fx   identical: %s\n",
                name, serial_ms, parallel_ms, serial_ms / parallel_ms,
                identical ? "yes" : "NO");
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (OpenMP disabled)\n");
#endif

    Rng rng(7);
    const std::size_t batch = 512, n = 2000, m = 500;
    const Matrix X = random_matrix(batch, n, rng);
    const Matrix W = random_matrix(n, m, rng);
    const Matrix H = random_matrix(batch, m, rng);
    const std::vector<double> bias_h(m, 0.1);
    const std::vector<double> bias_v(n, 0.1);
    const int reps = 5;

    {
        Matrix a, b;
        const double ts = time_ms([&] { kernels::serial::affine_forward(X, W, bias_h, nullptr, a); }, reps);
        const double tp = time_ms([&] { kernels::affine_forward(X, W, bias_h, nullptr, b); }, reps);
        report("affine_forward", ts, tp, a == b);
    }
    {
        Matrix a, b;
        const double ts = time_ms([&] { kernels::serial::affine_backward(H, W, bias_v, a); }, reps);
        const double tp = time_ms([&] { kernels::affine_backward(H, W, bias_v, b); }, reps);
        report("affine_backward", ts, tp, a == b);
    }
    {
        Matrix a = X, b = X;
        const double ts = time_ms([&] { kernels::serial::sigmoid_inplace(a); }, reps);
        const double tp = time_ms([&] { kernels::sigmoid_inplace(b); }, reps);
        report("sigmoid", ts, tp, a == b);
    }
    {
        Matrix a = X, b = X;
        const double ts = time_ms([&] { kernels::serial::softmax_rows_inplace(a); }, reps);
        const double tp = time_ms([&] { kernels::softmax_rows_inplace(b); }, reps);
        report("softmax_rows", ts, tp, a == b);
    }
    {
        Matrix a(n, m), b(n, m);
        const double ts = time_ms([&] { kernels::serial::add_outer_products(X, H, a); }, reps);
        const double tp = time_ms([&] { kernels::add_outer_products(X, H, b); }, reps);
        report("add_outer_products", ts, tp, a == b);
    }
    {
        const Matrix S = random_matrix(600, 800, rng);
        Matrix a, b;
        const double ts = time_ms([&] { a = kernels::serial::cosine_similarity_matrix(S); }, reps);
        const double tp = time_ms([&] { b = kernels::cosine_similarity_matrix(S); }, reps);
        report("cosine_similarity", ts, tp, a == b);
    }
    return 0;
}

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "textae/kernels.hpp"
#include "textae/rng.hpp"

namespace textae {

enum class RbmFlavor : std::uint8_t { BinaryBinary = 0, ReplicatedSoftmax = 1 };

struct RbmParams {
    RbmFlavor flavor = RbmFlavor::BinaryBinary;
    Matrix W;                       // n_visible x n_hidden
    std::vector<double> vis_bias;   // a, length n_visible
    std::vector<double> hid_bias;   // b, length n_hidden

    std::size_t n_visible() const { return W.rows; }
    std::size_t n_hidden() const { return W.cols; }

    bool operator==(const RbmParams&) const = default;
};

// Gaussian(0, 0.01) weights, zero biases.
RbmParams init_rbm(std::size_t n_visible, std::size_t n_hidden, RbmFlavor flavor, Rng& rng);

struct CdStats {
    std::size_t epoch = 0;
    double mean_recon_error = 0.0;
    double gradient_norm = 0.0;
};

struct RbmHyper {
    double lr = 0.05;
    double momentum_initial = 0.5;
    double momentum_final = 0.9;
    std::size_t momentum_switch_epoch = 5;  // final momentum from this epoch on
    double weight_decay = 2e-4;
    std::size_t batch_size = 100;

    double momentum_at(std::size_t epoch) const {
        return epoch >= momentum_switch_epoch ? momentum_final : momentum_initial;
    }
};

// A batch of visible states as dense rows. For the replicated-softmax flavor
// `lengths` holds each row's document length D; empty otherwise.
struct VisibleBatch {
    Matrix rows;
    std::vector<double> lengths;

    bool is_count_data() const { return !lengths.empty(); }
};

// Momentum velocity carried across cd1_update calls.
struct CdState {
    Matrix vel_W;
    std::vector<double> vel_vis;
    std::vector<double> vel_hid;

    static CdState zeros(const RbmParams& p);
};

// --- single-state operations ---

double energy_binary(const RbmParams& p, const std::vector<double>& v,
                     const std::vector<double>& h);
double energy_rsm(const RbmParams& p, const std::vector<double>& v_counts, double D,
                  const std::vector<double>& h);

// p(h_j=1|v); hidden bias scaled by D for the replicated-softmax flavor.
std::vector<double> hidden_probs(const RbmParams& p, const std::vector<double>& v, double D = 1.0);
std::vector<double> visible_probs_binary(const RbmParams& p, const std::vector<double>& h);
std::vector<double> visible_softmax_rsm(const RbmParams& p, const std::vector<double>& h);

std::vector<std::uint32_t> sample_visible_multinomial(const std::vector<double>& probs,
                                                      std::uint32_t D, Rng& rng);

// --- training ---

CdStats cd1_update(RbmParams& p, CdState& state, const VisibleBatch& batch, double lr,
                   double momentum, double weight_decay, Rng& rng);

std::vector<CdStats> train_rbm(RbmParams& p, const VisibleBatch& data, std::size_t epochs,
                               const RbmHyper& hyper, Rng& rng);

// Batch hidden probabilities (used when feeding the next RBM up the stack).
Matrix hidden_probs_batch(const RbmParams& p, const VisibleBatch& batch);

// --- serialization: "RBMW" magic, version byte, flavor byte, u32 dims,
//     then row-major W, vis_bias, hid_bias as little-endian f64 ---

void write_rbm(const RbmParams& p, std::string& out);
std::size_t read_rbm(const std::string& in, std::size_t offset, RbmParams& p);

}  // namespace textae

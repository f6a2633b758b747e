#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "textae/corpus.hpp"
#include "textae/rbm.hpp"

namespace textae {

enum class ModelKind : std::uint8_t { bDA = 0, rsDA = 1 };
enum class NetPhase : std::uint8_t { pretrained = 0, finetuned = 1 };

struct NetConfig {
    std::vector<std::size_t> layer_sizes{500, 250, 250, 40};  // last entry = bottleneck m
    ModelKind model = ModelKind::bDA;
    std::size_t epochs_pretrain = 50;
    std::size_t epochs_finetune = 50;
    std::uint64_t seed = 42;

    RbmHyper rbm_hyper_binary{};                       // lr 0.05
    RbmHyper rbm_hyper_rsm{.lr = 0.001};               // count magnitudes inflate gradients
    double finetune_lr_bda = 0.1;
    double finetune_lr_rsda = 0.01;
    double finetune_momentum = 0.9;
    std::size_t finetune_batch_size = 100;

    std::size_t bottleneck_m() const { return layer_sizes.back(); }
    void validate() const;
};

struct DenseLayer {
    Matrix W;                  // in x out, forward = sigmoid/softmax(bias + x W)
    std::vector<double> bias;

    bool operator==(const DenseLayer&) const = default;
};

struct AutoencoderNet {
    ModelKind model = ModelKind::bDA;
    NetPhase phase = NetPhase::pretrained;
    std::vector<RbmParams> stack;      // pretrained RBMs, bottom first
    std::vector<DenseLayer> encoder;   // input -> ... -> code
    std::vector<DenseLayer> decoder;   // code -> ... -> reconstruction
    std::uint64_t seed = 0;
    std::uint64_t vocab_hash = 0;

    std::size_t input_dim() const { return encoder.front().W.rows; }
    std::size_t code_dim() const { return encoder.back().W.cols; }
};

// Dense batch view of a sentence list: binary rows for bDA, count rows plus
// per-row lengths for rsDA. Zero-length sentences keep all-zero rows (D
// treated as 0; their normalized target is the zero vector).
VisibleBatch make_batch(const std::vector<SentenceVector>& sentences, std::size_t n,
                        ModelKind model);

// Greedy layer-wise CD-1 pretraining, bottom RBM on the raw input, upper RBMs
// on the hidden probabilities of the trained layer below.
std::vector<RbmParams> pretrain_stack(const NetConfig& config, const VisibleBatch& train,
                                      Rng& rng);

// Mirror the stack into an encoder/decoder pair; decoder weights start as
// exact transposes and are untied by fine-tuning.
AutoencoderNet unroll(const NetConfig& config, std::vector<RbmParams> stack);

Matrix encode_batch(const AutoencoderNet& net, const VisibleBatch& batch);
Matrix decode_batch(const AutoencoderNet& net, const Matrix& codes);
Matrix reconstruct_batch(const AutoencoderNet& net, const VisibleBatch& batch);

std::vector<double> encode(const AutoencoderNet& net, const SentenceVector& x);
std::vector<double> decode(const AutoencoderNet& net, const std::vector<double>& code);
std::vector<double> reconstruct(const AutoencoderNet& net, const SentenceVector& x);

// Per-sentence reconstruction loss. bDA: full binary cross-entropy. rsDA:
// multinomial cross-entropy against a probability-vector target.
// x_hat entries are clamped to [1e-10, 1-1e-10] before the logs.
double cross_entropy(const std::vector<double>& x_target, const std::vector<double>& x_hat,
                     ModelKind model);

struct NetGradients {
    std::vector<DenseLayer> encoder;
    std::vector<DenseLayer> decoder;
};

// Mean per-sample loss over the batch plus gradients of that mean w.r.t.
// every weight and bias. Exposed so tests can check it against finite
// differences.
double backprop_gradients(const AutoencoderNet& net, const VisibleBatch& batch,
                          NetGradients& grads);

// Loss only (shares the forward path with backprop_gradients).
double batch_loss(const AutoencoderNet& net, const VisibleBatch& batch);

struct FineTuneEpoch {
    std::size_t epoch = 0;
    double loss = 0.0;
    std::int64_t wall_ms = 0;
};

// Minibatch SGD with momentum on the unrolled net. On a non-finite update the
// net is restored to the last completed epoch and NonFiniteUpdate is thrown.
std::vector<FineTuneEpoch> fine_tune(AutoencoderNet& net, const VisibleBatch& train,
                                     const NetConfig& config, Rng& rng);

// Model file: magic/version header, model, phase, seed, vocabulary hash,
// layer sizes, then one weight block per encoder and decoder layer.
void save_net(const AutoencoderNet& net, const std::string& path);
AutoencoderNet load_net(const std::string& path);

void write_training_log(const std::vector<FineTuneEpoch>& log, const std::string& path);

}  // namespace textae

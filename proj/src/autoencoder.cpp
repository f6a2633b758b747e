#include "textae/autoencoder.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <numeric>
#include <sstream>

#include "textae/errors.hpp"
#include "textae/io_util.hpp"

namespace textae {

namespace {

constexpr double kLogClip = 1e-10;

double clip01(double x) { return std::clamp(x, kLogClip, 1.0 - kLogClip); }

bool finite(const Matrix& m) {
    return std::all_of(m.data.begin(), m.data.end(), [](double x) { return std::isfinite(x); });
}

bool finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

void NetConfig::validate() const {
    if (layer_sizes.empty()) throw DimensionMismatch("layer_sizes must be non-empty");
    for (std::size_t s : layer_sizes)
        if (s == 0) throw DimensionMismatch("layer sizes must be >= 1");
}

VisibleBatch make_batch(const std::vector<SentenceVector>& sentences, std::size_t n,
                        ModelKind model) {
    VisibleBatch batch;
    batch.rows = Matrix(sentences.size(), n);
    if (model == ModelKind::rsDA) batch.lengths.resize(sentences.size(), 0.0);
    for (std::size_t r = 0; r < sentences.size(); ++r) {
        const SentenceVector vec =
            model == ModelKind::bDA ? sentences[r].binarized() : sentences[r];
        for (std::size_t k = 0; k < vec.indices.size(); ++k)
            batch.rows(r, vec.indices[k]) = vec.values[k];
        if (model == ModelKind::rsDA) batch.lengths[r] = vec.length_D;
    }
    return batch;
}

std::vector<RbmParams> pretrain_stack(const NetConfig& config, const VisibleBatch& train,
                                      Rng& rng) {
    config.validate();
    std::vector<RbmParams> stack;
    VisibleBatch input = train;
    std::size_t width = train.rows.cols;

    for (std::size_t l = 0; l < config.layer_sizes.size(); ++l) {
        const bool bottom_rsm = l == 0 && config.model == ModelKind::rsDA;
        const RbmFlavor flavor =
            bottom_rsm ? RbmFlavor::ReplicatedSoftmax : RbmFlavor::BinaryBinary;
        const RbmHyper& hyper = bottom_rsm ? config.rbm_hyper_rsm : config.rbm_hyper_binary;

        RbmParams rbm = init_rbm(width, config.layer_sizes[l], flavor, rng);
        train_rbm(rbm, input, config.epochs_pretrain, hyper, rng);

        // feed the layer above with real-valued hidden probabilities
        VisibleBatch next;
        next.rows = hidden_probs_batch(rbm, input);
        input = std::move(next);
        width = config.layer_sizes[l];
        stack.push_back(std::move(rbm));
    }
    return stack;
}

AutoencoderNet unroll(const NetConfig& config, std::vector<RbmParams> stack) {
    AutoencoderNet net;
    net.model = config.model;
    net.phase = NetPhase::pretrained;
    net.seed = config.seed;

    for (const RbmParams& rbm : stack) {
        DenseLayer enc;
        enc.W = rbm.W;
        enc.bias = rbm.hid_bias;
        net.encoder.push_back(std::move(enc));
    }
    for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
        DenseLayer dec;
        dec.W = Matrix(it->W.cols, it->W.rows);
        for (std::size_t i = 0; i < it->W.rows; ++i)
            for (std::size_t j = 0; j < it->W.cols; ++j) dec.W(j, i) = it->W(i, j);
        dec.bias = it->vis_bias;
        net.decoder.push_back(std::move(dec));
    }
    net.stack = std::move(stack);
    return net;
}

namespace {

// Forward pass keeping every activation; act[0] is the raw input rows
// (binary for bDA, counts for rsDA), act[k] the output of layer k-1.
struct Forward {
    std::vector<Matrix> act;
};

Forward forward_pass(const AutoencoderNet& net, const VisibleBatch& batch) {
    if (batch.rows.cols != net.input_dim())
        throw DimensionMismatch("input width does not match the network");
    const bool rsm = net.model == ModelKind::rsDA;
    if (rsm && batch.lengths.size() != batch.rows.rows)
        throw DimensionMismatch("rsDA batch needs per-row lengths");

    Forward f;
    f.act.reserve(net.encoder.size() + net.decoder.size() + 1);
    f.act.push_back(batch.rows);

    for (std::size_t l = 0; l < net.encoder.size(); ++l) {
        // bottom rsDA layer: pre = D*b + counts*W, identical to feeding
        // counts/D with the hidden bias scaled by D
        const double* scale = (l == 0 && rsm) ? batch.lengths.data() : nullptr;
        Matrix out;
        kernels::affine_forward(f.act.back(), net.encoder[l].W, net.encoder[l].bias, scale, out);
        kernels::sigmoid_inplace(out);
        f.act.push_back(std::move(out));
    }
    for (std::size_t l = 0; l < net.decoder.size(); ++l) {
        Matrix out;
        kernels::affine_forward(f.act.back(), net.decoder[l].W, net.decoder[l].bias, nullptr, out);
        if (l + 1 == net.decoder.size() && rsm)
            kernels::softmax_rows_inplace(out);
        else
            kernels::sigmoid_inplace(out);
        f.act.push_back(std::move(out));
    }
    return f;
}

// Loss target: binary rows for bDA, counts normalized by D for rsDA
// (zero-length rows keep the zero vector).
Matrix loss_target(const AutoencoderNet& net, const VisibleBatch& batch) {
    if (net.model == ModelKind::bDA) return batch.rows;
    Matrix t = batch.rows;
    for (std::size_t r = 0; r < t.rows; ++r) {
        const double d = batch.lengths[r];
        if (d <= 0.0) continue;
        double* row = t.row(r);
        for (std::size_t c = 0; c < t.cols; ++c) row[c] /= d;
    }
    return t;
}

double mean_loss(const Matrix& target, const Matrix& output, ModelKind model) {
    double total = 0.0;
    for (std::size_t r = 0; r < target.rows; ++r) {
        const double* t = target.row(r);
        const double* y = output.row(r);
        double e = 0.0;
        if (model == ModelKind::bDA) {
            for (std::size_t c = 0; c < target.cols; ++c) {
                const double yc = clip01(y[c]);
                e -= t[c] * std::log(yc) + (1.0 - t[c]) * std::log(1.0 - yc);
            }
        } else {
            for (std::size_t c = 0; c < target.cols; ++c)
                if (t[c] != 0.0) e -= t[c] * std::log(clip01(y[c]));
        }
        total += e;
    }
    return total / static_cast<double>(target.rows);
}

}  // namespace

Matrix encode_batch(const AutoencoderNet& net, const VisibleBatch& batch) {
    if (batch.rows.cols != net.input_dim())
        throw DimensionMismatch("input width does not match the network");
    const bool rsm = net.model == ModelKind::rsDA;
    Matrix act = batch.rows;
    for (std::size_t l = 0; l < net.encoder.size(); ++l) {
        const double* scale = (l == 0 && rsm) ? batch.lengths.data() : nullptr;
        Matrix out;
        kernels::affine_forward(act, net.encoder[l].W, net.encoder[l].bias, scale, out);
        kernels::sigmoid_inplace(out);
        act = std::move(out);
    }
    return act;
}

Matrix decode_batch(const AutoencoderNet& net, const Matrix& codes) {
    if (codes.cols != net.code_dim()) throw DimensionMismatch("code width does not match");
    const bool rsm = net.model == ModelKind::rsDA;
    Matrix act = codes;
    for (std::size_t l = 0; l < net.decoder.size(); ++l) {
        Matrix out;
        kernels::affine_forward(act, net.decoder[l].W, net.decoder[l].bias, nullptr, out);
        if (l + 1 == net.decoder.size() && rsm)
            kernels::softmax_rows_inplace(out);
        else
            kernels::sigmoid_inplace(out);
        act = std::move(out);
    }
    return act;
}

Matrix reconstruct_batch(const AutoencoderNet& net, const VisibleBatch& batch) {
    return decode_batch(net, encode_batch(net, batch));
}

std::vector<double> encode(const AutoencoderNet& net, const SentenceVector& x) {
    const VisibleBatch batch = make_batch({x}, net.input_dim(), net.model);
    const Matrix codes = encode_batch(net, batch);
    return {codes.data.begin(), codes.data.end()};
}

std::vector<double> decode(const AutoencoderNet& net, const std::vector<double>& code) {
    Matrix codes(1, code.size());
    codes.data = code;
    const Matrix out = decode_batch(net, codes);
    return {out.data.begin(), out.data.end()};
}

std::vector<double> reconstruct(const AutoencoderNet& net, const SentenceVector& x) {
    return decode(net, encode(net, x));
}

double cross_entropy(const std::vector<double>& x_target, const std::vector<double>& x_hat,
                     ModelKind model) {
    if (x_target.size() != x_hat.size()) throw DimensionMismatch("cross_entropy dims");
    if (model == ModelKind::bDA) {
        for (double t : x_target)
            if (t < 0.0 || t > 1.0) throw InvalidTarget("bDA target outside [0,1]");
    } else {
        const double sum = std::accumulate(x_target.begin(), x_target.end(), 0.0);
        const bool empty = std::all_of(x_target.begin(), x_target.end(),
                                       [](double t) { return t == 0.0; });
        if (!empty && std::abs(sum - 1.0) > 1e-9)
            throw InvalidTarget("rsDA target does not sum to 1");
    }
    double e = 0.0;
    for (std::size_t i = 0; i < x_target.size(); ++i) {
        const double y = clip01(x_hat[i]);
        if (model == ModelKind::bDA)
            e -= x_target[i] * std::log(y) + (1.0 - x_target[i]) * std::log(1.0 - y);
        else if (x_target[i] != 0.0)
            e -= x_target[i] * std::log(y);
    }
    return e;
}

double batch_loss(const AutoencoderNet& net, const VisibleBatch& batch) {
    const Forward f = forward_pass(net, batch);
    return mean_loss(loss_target(net, batch), f.act.back(), net.model);
}

double backprop_gradients(const AutoencoderNet& net, const VisibleBatch& batch,
                          NetGradients& grads) {
    const bool rsm = net.model == ModelKind::rsDA;
    const std::size_t L = net.encoder.size();
    const std::size_t B = batch.rows.rows;
    const double inv_b = 1.0 / static_cast<double>(B);

    const Forward f = forward_pass(net, batch);
    const Matrix target = loss_target(net, batch);
    const Matrix& output = f.act.back();
    const double loss = mean_loss(target, output, net.model);

    grads.encoder.assign(L, {});
    grads.decoder.assign(L, {});

    // Output delta is y - t for both heads (sigmoid+BCE, softmax+CE); for
    // softmax rows whose target sums to s != 1 the general form is y*s - t.
    Matrix delta(B, output.cols);
    if (rsm) {
        for (std::size_t r = 0; r < B; ++r) {
            double s = 0.0;
            const double* t = target.row(r);
            for (std::size_t c = 0; c < output.cols; ++c) s += t[c];
            const double* y = output.row(r);
            double* d = delta.row(r);
            for (std::size_t c = 0; c < output.cols; ++c) d[c] = y[c] * s - t[c];
        }
    } else {
        for (std::size_t i = 0; i < delta.data.size(); ++i)
            delta.data[i] = output.data[i] - target.data[i];
    }

    // walk decoder then encoder; layer k consumes activation act[k]
    for (std::size_t k = 2 * L; k >= 1; --k) {
        const bool is_decoder = k > L;
        DenseLayer& g = is_decoder ? grads.decoder[k - L - 1] : grads.encoder[k - 1];
        const DenseLayer& layer = is_decoder ? net.decoder[k - L - 1] : net.encoder[k - 1];
        const Matrix& a_prev = f.act[k - 1];

        g.W = Matrix(layer.W.rows, layer.W.cols);
        kernels::add_outer_products(a_prev, delta, g.W);
        for (double& w : g.W.data) w *= inv_b;

        g.bias.assign(layer.bias.size(), 0.0);
        const bool scaled_bias = k == 1 && rsm;  // pre = D*b + counts*W
        for (std::size_t r = 0; r < B; ++r) {
            const double s = scaled_bias ? batch.lengths[r] : 1.0;
            const double* d = delta.row(r);
            for (std::size_t j = 0; j < g.bias.size(); ++j) g.bias[j] += s * d[j];
        }
        for (double& b : g.bias) b *= inv_b;

        if (k == 1) break;

        Matrix back;
        kernels::affine_backward(delta, layer.W, std::vector<double>(layer.W.rows, 0.0), back);
        for (std::size_t i = 0; i < back.data.size(); ++i) {
            const double a = a_prev.data[i];
            back.data[i] *= a * (1.0 - a);
        }
        delta = std::move(back);
    }
    return loss;
}

namespace {

struct NetSnapshot {
    std::vector<DenseLayer> encoder;
    std::vector<DenseLayer> decoder;
};

bool layers_finite(const std::vector<DenseLayer>& layers) {
    for (const auto& l : layers)
        if (!finite(l.W) || !finite(l.bias)) return false;
    return true;
}

}  // namespace

std::vector<FineTuneEpoch> fine_tune(AutoencoderNet& net, const VisibleBatch& train,
                                     const NetConfig& config, Rng& rng) {
    if (net.phase != NetPhase::pretrained)
        throw std::logic_error("fine_tune expects a pretrained net");
    const double lr =
        net.model == ModelKind::bDA ? config.finetune_lr_bda : config.finetune_lr_rsda;
    const double momentum = config.finetune_momentum;
    const std::size_t n = train.rows.rows;

    NetGradients vel;
    vel.encoder.resize(net.encoder.size());
    vel.decoder.resize(net.decoder.size());
    for (std::size_t l = 0; l < net.encoder.size(); ++l) {
        vel.encoder[l].W = Matrix(net.encoder[l].W.rows, net.encoder[l].W.cols);
        vel.encoder[l].bias.assign(net.encoder[l].bias.size(), 0.0);
        vel.decoder[l].W = Matrix(net.decoder[l].W.rows, net.decoder[l].W.cols);
        vel.decoder[l].bias.assign(net.decoder[l].bias.size(), 0.0);
    }

    NetSnapshot checkpoint{net.encoder, net.decoder};
    std::vector<FineTuneEpoch> log;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    auto apply = [&](DenseLayer& param, DenseLayer& v, const DenseLayer& g) {
        for (std::size_t i = 0; i < param.W.data.size(); ++i) {
            v.W.data[i] = momentum * v.W.data[i] - lr * g.W.data[i];
            param.W.data[i] += v.W.data[i];
        }
        for (std::size_t i = 0; i < param.bias.size(); ++i) {
            v.bias[i] = momentum * v.bias[i] - lr * g.bias[i];
            param.bias[i] += v.bias[i];
        }
    };

    for (std::size_t epoch = 0; epoch < config.epochs_finetune; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        rng.shuffle(order);
        double epoch_loss = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < n; start += config.finetune_batch_size) {
            const std::size_t end = std::min(n, start + config.finetune_batch_size);
            VisibleBatch batch;
            batch.rows = Matrix(end - start, train.rows.cols);
            if (train.is_count_data()) batch.lengths.resize(end - start);
            for (std::size_t r = start; r < end; ++r) {
                std::memcpy(batch.rows.row(r - start), train.rows.row(order[r]),
                            sizeof(double) * train.rows.cols);
                if (train.is_count_data()) batch.lengths[r - start] = train.lengths[order[r]];
            }
            NetGradients grads;
            const double loss = backprop_gradients(net, batch, grads);
            if (!std::isfinite(loss)) {
                net.encoder = checkpoint.encoder;
                net.decoder = checkpoint.decoder;
                throw NonFiniteUpdate("fine_tune: non-finite loss, restored last checkpoint");
            }
            for (std::size_t l = 0; l < net.encoder.size(); ++l) {
                apply(net.encoder[l], vel.encoder[l], grads.encoder[l]);
                apply(net.decoder[l], vel.decoder[l], grads.decoder[l]);
            }
            epoch_loss += loss;
            ++batches;
        }
        if (!layers_finite(net.encoder) || !layers_finite(net.decoder)) {
            net.encoder = checkpoint.encoder;
            net.decoder = checkpoint.decoder;
            throw NonFiniteUpdate("fine_tune: non-finite parameters, restored last checkpoint");
        }
        checkpoint = NetSnapshot{net.encoder, net.decoder};
        const auto t1 = std::chrono::steady_clock::now();
        log.push_back({epoch, epoch_loss / static_cast<double>(batches),
                       std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count()});
    }
    net.phase = NetPhase::finetuned;
    return log;
}

// --- model file ---

namespace {

constexpr char kNetMagic[4] = {'T', 'A', 'E', 'N'};
constexpr std::uint8_t kNetVersion = 1;

template <typename T>
void put(std::string& out, T value) {
    out.append(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(const std::string& in, std::size_t& offset) {
    if (offset + sizeof(T) > in.size()) throw IoError("truncated model file");
    T value;
    std::memcpy(&value, in.data() + offset, sizeof(T));
    offset += sizeof(T);
    return value;
}

void put_layer(std::string& out, const DenseLayer& layer, RbmFlavor flavor) {
    RbmParams block;
    block.flavor = flavor;
    block.W = layer.W;
    block.vis_bias.assign(layer.W.rows, 0.0);
    block.hid_bias = layer.bias;
    write_rbm(block, out);
}

DenseLayer get_layer(const std::string& in, std::size_t& offset) {
    RbmParams block;
    offset = read_rbm(in, offset, block);
    DenseLayer layer;
    layer.W = std::move(block.W);
    layer.bias = std::move(block.hid_bias);
    return layer;
}

}  // namespace

void save_net(const AutoencoderNet& net, const std::string& path) {
    std::string out;
    out.append(kNetMagic, sizeof(kNetMagic));
    put(out, kNetVersion);
    put(out, static_cast<std::uint8_t>(net.model));
    put(out, static_cast<std::uint8_t>(net.phase));
    put(out, net.seed);
    put(out, net.vocab_hash);
    put(out, static_cast<std::uint32_t>(net.encoder.size()));
    put(out, static_cast<std::uint32_t>(net.input_dim()));
    for (const auto& l : net.encoder) put(out, static_cast<std::uint32_t>(l.W.cols));
    const RbmFlavor bottom = net.model == ModelKind::rsDA ? RbmFlavor::ReplicatedSoftmax
                                                          : RbmFlavor::BinaryBinary;
    for (std::size_t l = 0; l < net.encoder.size(); ++l)
        put_layer(out, net.encoder[l], l == 0 ? bottom : RbmFlavor::BinaryBinary);
    for (const auto& l : net.decoder) put_layer(out, l, RbmFlavor::BinaryBinary);
    atomic_write(path, out);
}

AutoencoderNet load_net(const std::string& path) {
    const std::string in = read_file(path);
    std::size_t offset = 0;
    if (in.size() < 4 || std::memcmp(in.data(), kNetMagic, 4) != 0)
        throw IoError("bad model file magic: " + path);
    offset += 4;
    if (get<std::uint8_t>(in, offset) != kNetVersion)
        throw IoError("unsupported model file version");
    AutoencoderNet net;
    net.model = static_cast<ModelKind>(get<std::uint8_t>(in, offset));
    net.phase = static_cast<NetPhase>(get<std::uint8_t>(in, offset));
    net.seed = get<std::uint64_t>(in, offset);
    net.vocab_hash = get<std::uint64_t>(in, offset);
    const auto layers = get<std::uint32_t>(in, offset);
    get<std::uint32_t>(in, offset);  // input width, implied by the first block
    for (std::uint32_t l = 0; l < layers; ++l) get<std::uint32_t>(in, offset);
    for (std::uint32_t l = 0; l < layers; ++l) net.encoder.push_back(get_layer(in, offset));
    for (std::uint32_t l = 0; l < layers; ++l) net.decoder.push_back(get_layer(in, offset));
    return net;
}

void write_training_log(const std::vector<FineTuneEpoch>& log, const std::string& path) {
    std::ostringstream out;
    // wall_ms is kept in memory only; writing it would make reruns with the
    // same seed produce different bytes
    out << "epoch,loss\n";
    for (const auto& e : log) out << e.epoch << ',' << e.loss << '\n';
    atomic_write(path, out.str());
}

}  // namespace textae

#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "textae/autoencoder.hpp"
#include "textae/bottleneck.hpp"
#include "textae/corpus.hpp"
#include "textae/errors.hpp"
#include "textae/io_util.hpp"
#include "textae/metrics.hpp"
#include "textae/rng.hpp"

namespace fs = std::filesystem;
using namespace textae;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

ModelKind parse_model(const std::string& name) {
    if (name == "bda") return ModelKind::bDA;
    if (name == "rsda") return ModelKind::rsDA;
    throw CLI::ValidationError("--model must be bda or rsda");
}

void snapshot_config(const CLI::App& app, const std::string& out_dir, std::uint64_t seed) {
    std::ostringstream snap;
    snap << "# resolved configuration\nseed = " << seed << '\n' << app.config_to_str(true, false);
    atomic_write(out_dir + "/config_snapshot.ini", snap.str());
}

void write_histogram_csv(const Histogram& h, const std::string& path) {
    std::ostringstream out;
    out << "bin_lo,bin_hi,count\n";
    for (std::size_t b = 0; b < h.counts.size(); ++b)
        out << h.edges[b] << ',' << h.edges[b + 1] << ',' << h.counts[b] << '\n';
    atomic_write(path, out.str());
}

// Accepts the full sweep CSV (m,rc,spi,sai) or a bare m,spi curve.
std::pair<std::vector<std::size_t>, std::vector<double>> read_spi_curve(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open SPI csv: " + path);
    std::vector<std::size_t> dims;
    std::vector<double> spi_values;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line.rfind("critical_dim=", 0) == 0) continue;
        if (first && !line.empty() && !std::isdigit(static_cast<unsigned char>(line[0]))) {
            // header row; find the spi column
            first = false;
            continue;
        }
        first = false;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() < 2) throw IoError("malformed SPI row: " + line);
        dims.push_back(std::stoull(cells[0]));
        // 4-column sweep layout keeps spi in the third cell
        spi_values.push_back(std::stod(cells.size() >= 4 ? cells[2] : cells[1]));
    }
    return {dims, spi_values};
}

struct TrainIo {
    CorpusSplit corpus;
};

CorpusSplit load_corpus(const std::string& vocab_path, const std::string& train_path,
                        const std::string& test_path) {
    CorpusSplit corpus;
    corpus.vocabulary = read_vocabulary(vocab_path);
    corpus.train = read_vectors(train_path);
    if (!test_path.empty()) corpus.test = read_vectors(test_path);
    for (const auto& v : corpus.train)
        for (std::size_t idx : v.indices)
            if (idx >= corpus.vocabulary.size())
                throw VocabularyMismatch("vector index exceeds vocabulary size");
    return corpus;
}

int run(int argc, char** argv) {
    CLI::App app{"deep autoencoder toolkit for sentence vectors"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value config file; command-line flags override it");

    std::uint64_t seed = 42;
    app.add_option("--seed", seed, "master random seed")->capture_default_str();

    // ---- preprocess ----
    auto* pre = app.add_subcommand("preprocess", "build vocabulary and sparse vectors");
    std::string pre_input, pre_test_input, pre_out = ".", pre_stopwords;
    std::size_t min_df = 5, min_len = 3;
    bool no_stem = false;
    pre->add_option("--input", pre_input, "training corpus, one sentence per line")->required();
    pre->add_option("--test-input", pre_test_input, "held-out corpus, vectorized against the training vocabulary");
    pre->add_option("--output-dir", pre_out, "output directory")->capture_default_str();
    pre->add_option("--stopwords", pre_stopwords, "stopword file (default: built-in English list)");
    pre->add_option("--min-df", min_df, "minimum sentence frequency per term")->capture_default_str();
    pre->add_option("--min-len", min_len, "minimum term length")->capture_default_str();
    pre->add_flag("--no-stem", no_stem, "skip stemming");

    // ---- train ----
    auto* train = app.add_subcommand("train", "pretrain and fine-tune one autoencoder");
    std::string tr_vectors, tr_vocab, tr_out = ".", tr_model = "bda", tr_layers = "500,250,250";
    std::size_t tr_m = 40, tr_epochs_pre = 50, tr_epochs_ft = 50;
    bool skip_finetune = false;
    train->add_option("--train-vectors", tr_vectors, "sparse vector file")->required();
    train->add_option("--vocab", tr_vocab, "vocabulary file")->required();
    train->add_option("--output-dir", tr_out, "output directory")->capture_default_str();
    train->add_option("--model", tr_model, "bda or rsda")->capture_default_str();
    train->add_option("--layers", tr_layers, "hidden layer widths above the input, comma separated")
        ->capture_default_str();
    train->add_option("--m", tr_m, "bottleneck width")->capture_default_str();
    train->add_option("--epochs-pretrain", tr_epochs_pre, "")->capture_default_str();
    train->add_option("--epochs-finetune", tr_epochs_ft, "")->capture_default_str();
    train->add_flag("--skip-finetune", skip_finetune, "stop after pretraining");

    // ---- evaluate ----
    auto* eval = app.add_subcommand("evaluate", "metrics report for a trained model");
    std::string ev_model, ev_vectors, ev_vocab, ev_out = ".";
    std::size_t ev_bins = 20;
    eval->add_option("--model-file", ev_model, "trained model file")->required();
    eval->add_option("--vectors", ev_vectors, "sparse vector file to evaluate")->required();
    eval->add_option("--vocab", ev_vocab, "vocabulary file")->required();
    eval->add_option("--output-dir", ev_out, "output directory")->capture_default_str();
    eval->add_option("--bins", ev_bins, "histogram bin count")->capture_default_str();

    // ---- sweep ----
    auto* sw = app.add_subcommand("sweep", "train across bottleneck sizes and detect the knee");
    std::string sw_train, sw_test, sw_vocab, sw_out = ".", sw_model = "bda",
                sw_layers = "500,250,250", sw_dims = "10,20,30,40,50,60,70,80,90,100";
    std::size_t sw_epochs_pre = 50, sw_epochs_ft = 50, sw_jobs = 1;
    double sw_tau = 0.8;
    bool sw_symmetric = false;
    sw->add_option("--train-vectors", sw_train, "")->required();
    sw->add_option("--test-vectors", sw_test, "")->required();
    sw->add_option("--vocab", sw_vocab, "")->required();
    sw->add_option("--output-dir", sw_out, "")->capture_default_str();
    sw->add_option("--model", sw_model, "bda or rsda")->capture_default_str();
    sw->add_option("--layers", sw_layers, "hidden widths above the input")->capture_default_str();
    sw->add_option("--dims", sw_dims, "bottleneck sizes, ascending")->capture_default_str();
    sw->add_option("--epochs-pretrain", sw_epochs_pre, "")->capture_default_str();
    sw->add_option("--epochs-finetune", sw_epochs_ft, "")->capture_default_str();
    sw->add_option("--tau", sw_tau, "peak threshold as a fraction of the max steepness")
        ->capture_default_str();
    sw->add_flag("--symmetric", sw_symmetric, "mean-based %diff denominator");
    sw->add_option("--jobs", sw_jobs, "parallel per-dimension trainings")->capture_default_str();

    // ---- critical-dim ----
    auto* cd = app.add_subcommand("critical-dim", "knee detection on an existing SPI curve");
    std::string cd_csv, cd_out = ".";
    double cd_tau = 0.8;
    bool cd_symmetric = false;
    cd->add_option("--spi-csv", cd_csv, "m,spi curve (or a full sweep csv)")->required();
    cd->add_option("--output-dir", cd_out, "")->capture_default_str();
    cd->add_option("--tau", cd_tau, "")->capture_default_str();
    cd->add_flag("--symmetric", cd_symmetric, "");

    CLI11_PARSE(app, argc, argv);

    auto split_sizes = [](const std::string& csv) {
        std::vector<std::size_t> out;
        std::stringstream ss(csv);
        std::string cell;
        while (std::getline(ss, cell, ',')) out.push_back(std::stoull(cell));
        return out;
    };

    if (*pre) {
        fs::create_directories(pre_out);
        const StopwordSet stopwords =
            pre_stopwords.empty() ? default_stopwords() : load_stopwords(pre_stopwords);

        const auto train_lines = read_sentence_file(pre_input);
        std::vector<std::vector<std::string>> train_tokens;
        train_tokens.reserve(train_lines.size());
        for (const auto& line : train_lines)
            train_tokens.push_back(preprocess(line, stopwords, !no_stem));

        const Vocabulary vocab = build_vocabulary(train_tokens, min_df, min_len);
        write_vocabulary(vocab, pre_out + "/vocabulary.txt");

        VectorizeStats stats;
        std::vector<SentenceVector> train_vecs;
        for (const auto& toks : train_tokens)
            train_vecs.push_back(vectorize(toks, vocab, VectorMode::Count, &stats));
        write_vectors(train_vecs, pre_out + "/train_vectors.txt");

        std::size_t test_count = 0;
        if (!pre_test_input.empty()) {
            std::vector<SentenceVector> test_vecs;
            for (const auto& line : read_sentence_file(pre_test_input))
                test_vecs.push_back(
                    vectorize(preprocess(line, stopwords, !no_stem), vocab, VectorMode::Count, &stats));
            test_count = test_vecs.size();
            write_vectors(test_vecs, pre_out + "/test_vectors.txt");
        }

        snapshot_config(app, pre_out, seed);
        std::cout << "vocab1_size=" << vocab.vocab1_size << "\nvocab2_size=" << vocab.size()
                  << "\ntrain_sentences=" << train_vecs.size()
                  << "\ntest_sentences=" << test_count << "\ndropped_oov=" << stats.dropped_oov
                  << "\nempty_after_vectorize=" << stats.empty_sentences << "\n";
        return kExitOk;
    }

    if (*train) {
        fs::create_directories(tr_out);
        const CorpusSplit corpus = load_corpus(tr_vocab, tr_vectors, "");

        NetConfig config;
        config.model = parse_model(tr_model);
        config.layer_sizes = split_sizes(tr_layers);
        config.layer_sizes.push_back(tr_m);
        config.epochs_pretrain = tr_epochs_pre;
        config.epochs_finetune = tr_epochs_ft;
        config.seed = seed;
        config.validate();

        Rng rng(seed);
        const VisibleBatch data =
            make_batch(corpus.train, corpus.vocabulary.size(), config.model);
        AutoencoderNet net = unroll(config, pretrain_stack(config, data, rng));
        net.vocab_hash = corpus.vocabulary.hash();
        save_net(net, tr_out + "/pretrained.model");

        if (!skip_finetune) {
            const auto log = fine_tune(net, data, config, rng);
            write_training_log(log, tr_out + "/training_log.csv");
            save_net(net, tr_out + "/model.model");
        }
        snapshot_config(app, tr_out, seed);
        std::cout << "phase=" << (skip_finetune ? "pretrained" : "finetuned") << "\n";
        return kExitOk;
    }

    if (*eval) {
        fs::create_directories(ev_out);
        const AutoencoderNet net = load_net(ev_model);
        const Vocabulary vocab = read_vocabulary(ev_vocab);
        if (net.vocab_hash != vocab.hash())
            throw VocabularyMismatch("model was trained against a different vocabulary");
        const auto vectors = read_vectors(ev_vectors);
        const VisibleBatch batch = make_batch(vectors, vocab.size(), net.model);

        const MetricsReport report = evaluate(net, batch, ev_bins);
        write_report_json(report, ev_out + "/report.json");
        write_report_csv(report, ev_out + "/report.csv");
        write_histogram_csv(report.histogram, ev_out + "/histogram.csv");
        snapshot_config(app, ev_out, seed);
        std::cout << "model=" << report.model << " phase=" << report.phase << " m=" << report.m
                  << " rc=" << report.reconstruction_error << " spi=" << report.spi
                  << " sai=" << report.sai << "\n";
        return kExitOk;
    }

    if (*sw) {
        fs::create_directories(sw_out);
        const CorpusSplit corpus = load_corpus(sw_vocab, sw_train, sw_test);

        SweepConfig config;
        config.net.model = parse_model(sw_model);
        config.net.layer_sizes = split_sizes(sw_layers);
        config.net.layer_sizes.push_back(0);  // replaced per dim
        config.net.epochs_pretrain = sw_epochs_pre;
        config.net.epochs_finetune = sw_epochs_ft;
        config.dims = split_sizes(sw_dims);
        config.master_seed = seed;
        config.resume_dir = sw_out + "/partials";
        config.jobs = sw_jobs;

        const SweepResult result = sweep(config, corpus);
        write_sweep_csv(result, sw_out + "/sweep.csv");
        snapshot_config(app, sw_out, seed);
        try {
            const CriticalDimReport report = detect_critical_dim(result, sw_tau, sw_symmetric);
            write_critical_dim_report(report, sw_out + "/steepness.csv");
            std::cout << "critical_dim=" << report.critical_dim << "\n";
        } catch (const NoPeak&) {
            atomic_write(sw_out + "/steepness.csv", "m,steepness\ncritical_dim=none\n");
            std::cout << "critical_dim=none\n";
        }
        return kExitOk;
    }

    if (*cd) {
        fs::create_directories(cd_out);
        const auto [dims, spi_values] = read_spi_curve(cd_csv);
        SweepResult curve;
        curve.dims = dims;
        curve.spi_values = spi_values;
        curve.rc_values.assign(dims.size(), 0.0);
        curve.sai_values.assign(dims.size(), 0.0);
        try {
            const CriticalDimReport report = detect_critical_dim(curve, cd_tau, cd_symmetric);
            write_critical_dim_report(report, cd_out + "/steepness.csv");
            std::cout << "critical_dim=" << report.critical_dim << "\n";
        } catch (const NoPeak&) {
            atomic_write(cd_out + "/steepness.csv", "m,steepness\ncritical_dim=none\n");
            std::cout << "critical_dim=none\n";
        }
        snapshot_config(app, cd_out, seed);
        return kExitOk;
    }

    return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const NonFiniteUpdate& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
}

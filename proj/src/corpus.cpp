#include "textae/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "textae/errors.hpp"
#include "textae/io_util.hpp"
#include "textae/stemmer.hpp"

namespace textae {

std::size_t Vocabulary::index_of(const std::string& term) const {
    auto it = std::lower_bound(terms.begin(), terms.end(), term);
    if (it == terms.end() || *it != term) return npos;
    return static_cast<std::size_t>(it - terms.begin());
}

std::uint64_t Vocabulary::hash() const {
    std::uint64_t h = 14695981039346656037ULL;
    auto mix = [&h](char c) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    };
    for (const auto& t : terms) {
        for (char c : t) mix(c);
        mix('\n');
    }
    return h;
}

SentenceVector SentenceVector::binarized() const {
    SentenceVector out;
    out.indices = indices;
    out.values.assign(values.size(), 1);
    out.length_D = static_cast<std::uint32_t>(indices.size());
    return out;
}

std::vector<double> SentenceVector::dense(std::size_t n) const {
    std::vector<double> out(n, 0.0);
    for (std::size_t k = 0; k < indices.size(); ++k) out[indices[k]] = values[k];
    return out;
}

std::vector<std::string> preprocess(const std::string& sentence, const StopwordSet& stopwords,
                                    bool stem) {
    std::vector<std::string> tokens;
    std::string cur;
    auto flush = [&] {
        if (cur.empty()) return;
        std::string tok = cur;
        cur.clear();
        if (stopwords.count(tok)) return;
        if (stem) tok = porter_stem(tok);
        tokens.push_back(std::move(tok));
    };
    for (char raw : sentence) {
        const auto c = static_cast<unsigned char>(raw);
        if (std::isalnum(c))
            cur.push_back(static_cast<char>(std::tolower(c)));
        else
            flush();
    }
    flush();
    return tokens;
}

namespace {

bool is_numeric(const std::string& term) {
    return std::all_of(term.begin(), term.end(),
                       [](unsigned char c) { return std::isdigit(c) != 0; });
}

}  // namespace

Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& train_tokens,
                            std::size_t min_df, std::size_t min_len) {
    std::map<std::string, std::size_t> df;
    for (const auto& toks : train_tokens) {
        std::vector<std::string> uniq(toks);
        std::sort(uniq.begin(), uniq.end());
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
        for (const auto& t : uniq) ++df[t];
    }

    Vocabulary vocab;
    vocab.vocab1_size = df.size();
    for (const auto& [term, count] : df) {
        if (is_numeric(term)) continue;
        if (term.size() < min_len) continue;
        if (count < min_df) continue;
        vocab.terms.push_back(term);
        vocab.doc_freq[term] = count;
    }
    if (vocab.terms.empty()) throw EmptyVocabulary("no term survived vocabulary filtering");
    // std::map iteration already gives sorted, unique terms
    vocab.stage = VocabStage::Vocab2;
    return vocab;
}

SentenceVector vectorize(const std::vector<std::string>& tokens, const Vocabulary& vocab,
                         VectorMode mode, VectorizeStats* stats) {
    std::map<std::size_t, std::uint32_t> counts;
    for (const auto& tok : tokens) {
        const std::size_t idx = vocab.index_of(tok);
        if (idx == Vocabulary::npos) {
            if (stats) ++stats->dropped_oov;
            continue;
        }
        ++counts[idx];
    }
    SentenceVector vec;
    for (const auto& [idx, count] : counts) {
        vec.indices.push_back(idx);
        vec.values.push_back(mode == VectorMode::Binary ? 1u : count);
        vec.length_D += vec.values.back();
    }
    if (stats && vec.empty()) ++stats->empty_sentences;
    return vec;
}

std::vector<std::string> read_sentence_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open corpus file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

void write_vocabulary(const Vocabulary& vocab, const std::string& path) {
    std::ostringstream out;
    for (const auto& t : vocab.terms) out << t << '\n';
    atomic_write(path, out.str());
}

Vocabulary read_vocabulary(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open vocabulary file: " + path);
    Vocabulary vocab;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        vocab.terms.push_back(line);
    }
    if (vocab.terms.empty()) throw EmptyVocabulary("vocabulary file is empty: " + path);
    if (!std::is_sorted(vocab.terms.begin(), vocab.terms.end()))
        throw IoError("vocabulary file is not sorted: " + path);
    vocab.stage = VocabStage::Vocab2;
    vocab.vocab1_size = vocab.terms.size();
    return vocab;
}

void write_vectors(const std::vector<SentenceVector>& vecs, const std::string& path) {
    std::ostringstream out;
    for (std::size_t id = 0; id < vecs.size(); ++id) {
        out << id << '\t';
        const auto& v = vecs[id];
        for (std::size_t k = 0; k < v.indices.size(); ++k) {
            if (k) out << ',';
            out << v.indices[k] << ':' << v.values[k];
        }
        out << '\n';
    }
    atomic_write(path, out.str());
}

std::vector<SentenceVector> read_vectors(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open vector file: " + path);
    std::vector<SentenceVector> vecs;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw IoError("malformed vector line: " + line);
        SentenceVector vec;
        std::size_t pos = tab + 1;
        while (pos < line.size()) {
            auto comma = line.find(',', pos);
            if (comma == std::string::npos) comma = line.size();
            const auto colon = line.find(':', pos);
            if (colon == std::string::npos || colon >= comma)
                throw IoError("malformed vector entry: " + line.substr(pos, comma - pos));
            vec.indices.push_back(std::stoull(line.substr(pos, colon - pos)));
            vec.values.push_back(
                static_cast<std::uint32_t>(std::stoul(line.substr(colon + 1, comma - colon - 1))));
            vec.length_D += vec.values.back();
            pos = comma + 1;
        }
        vecs.push_back(std::move(vec));
    }
    return vecs;
}

}  // namespace textae

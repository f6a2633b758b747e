#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "textae/stopwords.hpp"

namespace textae {

enum class VocabStage { Vocab1, Vocab2 };

struct Vocabulary {
    std::vector<std::string> terms;        // unique, lexicographically sorted
    std::map<std::string, std::size_t> doc_freq;
    VocabStage stage = VocabStage::Vocab1;
    std::size_t vocab1_size = 0;           // size before the term filter

    std::size_t size() const { return terms.size(); }
    // Index of a term, or npos if absent.
    std::size_t index_of(const std::string& term) const;
    std::uint64_t hash() const;            // FNV-1a over the sorted term list

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

enum class VectorMode { Binary, Count };

// Sparse bag-of-words vector for one sentence. Indices are strictly
// increasing; values are positive counts (or 1s in binary mode).
struct SentenceVector {
    std::vector<std::size_t> indices;
    std::vector<std::uint32_t> values;
    std::uint32_t length_D = 0;  // sum of values

    bool empty() const { return indices.empty(); }
    SentenceVector binarized() const;
    std::vector<double> dense(std::size_t n) const;
};

struct CorpusSplit {
    std::vector<SentenceVector> train;
    std::vector<SentenceVector> test;
    Vocabulary vocabulary;
};

struct PreprocessConfig {
    std::size_t min_df = 5;
    std::size_t min_len = 3;
    bool stem = true;
};

// Lowercase, split on non-alphanumeric boundaries, drop stopwords, stem.
std::vector<std::string> preprocess(const std::string& sentence, const StopwordSet& stopwords,
                                    bool stem = true);

// Build the filtered (Vocab2-stage) vocabulary from training token lists.
// Throws EmptyVocabulary when nothing survives the filters.
Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& train_tokens,
                            std::size_t min_df = 5, std::size_t min_len = 3);

struct VectorizeStats {
    std::size_t dropped_oov = 0;
    std::size_t empty_sentences = 0;
};

SentenceVector vectorize(const std::vector<std::string>& tokens, const Vocabulary& vocab,
                         VectorMode mode, VectorizeStats* stats = nullptr);

// --- file formats ---

// One sentence per line, UTF-8.
std::vector<std::string> read_sentence_file(const std::string& path);

// One term per line; line number is the term index.
void write_vocabulary(const Vocabulary& vocab, const std::string& path);
Vocabulary read_vocabulary(const std::string& path);

// `sentence_id<TAB>index:count,index:count,...` per line; empty sentences keep
// their id with an empty payload.
void write_vectors(const std::vector<SentenceVector>& vecs, const std::string& path);
std::vector<SentenceVector> read_vectors(const std::string& path);

}  // namespace textae

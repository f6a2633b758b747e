#include "textae/stopwords.hpp"

#include <fstream>

#include "textae/errors.hpp"

namespace textae {

namespace {

// List v1: the classic short English function-word list used by most IR
// toolkits. Kept in source so the vocabulary is reproducible from the repo
// alone.
const char* const kDefaultStopwords[] = {
    "a", "about", "above", "after", "again", "against", "all", "am", "an", "and", "any", "are",
    "as", "at", "be", "because", "been", "before", "being", "below", "between", "both", "but",
    "by", "cannot", "could", "did", "do", "does", "doing", "down", "during", "each", "few",
    "for", "from", "further", "had", "has", "have", "having", "he", "her", "here", "hers",
    "herself", "him", "himself", "his", "how", "i", "if", "in", "into", "is", "it", "its",
    "itself", "me", "more", "most", "my", "myself", "no", "nor", "not", "of", "off", "on",
    "once", "only", "or", "other", "ought", "our", "ours", "ourselves", "out", "over", "own",
    "same", "she", "should", "so", "some", "such", "than", "that", "the", "their", "theirs",
    "them", "themselves", "then", "there", "these", "they", "this", "those", "through", "to",
    "too", "under", "until", "up", "very", "was", "we", "were", "what", "when", "where",
    "which", "while", "who", "whom", "why", "with", "would", "you", "your", "yours",
    "yourself", "yourselves",
    // common archaic forms, useful for scripture-style corpora
    "thee", "thou", "thy", "thine", "ye", "hath", "shall", "unto",
};

}  // namespace

const StopwordSet& default_stopwords() {
    static const StopwordSet set(std::begin(kDefaultStopwords), std::end(kDefaultStopwords));
    return set;
}

StopwordSet load_stopwords(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open stopword file: " + path);
    StopwordSet set;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        set.insert(line);
    }
    return set;
}

}  // namespace textae

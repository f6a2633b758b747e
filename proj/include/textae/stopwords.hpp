#pragma once

#include <string>
#include <unordered_set>

namespace textae {

using StopwordSet = std::unordered_set<std::string>;

// Built-in English stopword list (v1). Override with load_stopwords().
const StopwordSet& default_stopwords();

// One word per line, '#' comments allowed.
StopwordSet load_stopwords(const std::string& path);

}  // namespace textae

#pragma once

#include <string>

namespace textae {

// Porter's 1980 suffix-stripping algorithm for English. Input must already be
// lowercase; non-alphabetic input is returned unchanged.
std::string porter_stem(const std::string& word);

}  // namespace textae

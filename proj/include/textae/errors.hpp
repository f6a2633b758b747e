#pragma once

#include <stdexcept>
#include <string>

namespace textae {

struct DimensionMismatch : std::runtime_error {
    explicit DimensionMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidLength : std::runtime_error {
    explicit InvalidLength(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidDistribution : std::runtime_error {
    explicit InvalidDistribution(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidTarget : std::runtime_error {
    explicit InvalidTarget(const std::string& what) : std::runtime_error(what) {}
};

struct NonFiniteUpdate : std::runtime_error {
    explicit NonFiniteUpdate(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyVocabulary : std::runtime_error {
    explicit EmptyVocabulary(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyEvaluationSet : std::runtime_error {
    explicit EmptyEvaluationSet(const std::string& what) : std::runtime_error(what) {}
};

struct DegenerateInterval : std::runtime_error {
    explicit DegenerateInterval(const std::string& what) : std::runtime_error(what) {}
};

struct TooFewPoints : std::runtime_error {
    explicit TooFewPoints(const std::string& what) : std::runtime_error(what) {}
};

struct NoPeak : std::runtime_error {
    explicit NoPeak(const std::string& what) : std::runtime_error(what) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

struct VocabularyMismatch : std::runtime_error {
    explicit VocabularyMismatch(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace textae

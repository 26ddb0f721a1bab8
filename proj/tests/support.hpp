#pragma once

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mooc/core_model.hpp"
#include "mooc/discretize.hpp"
#include "mooc/patmine.hpp"

namespace testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("mooc_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

// Test-side generators use std::mt19937 directly; they only need to be
// deterministic within one build, unlike the library's portable Rng.
inline mooc::FeatureSequence random_sequence(std::mt19937& gen, mooc::SequenceKind kind, std::size_t length) {
    const auto symbols = mooc::alphabet(kind);
    std::uniform_int_distribution<std::size_t> pick(0, symbols.size() - 1);
    mooc::FeatureSequence s{kind, {}};
    for (std::size_t i = 0; i < length; ++i) s.symbols.push_back(symbols[pick(gen)]);
    return s;
}

inline mooc::Pattern random_pattern(std::mt19937& gen, mooc::SequenceKind kind, std::size_t max_length) {
    std::uniform_int_distribution<std::size_t> len(1, max_length);
    auto seq = random_sequence(gen, kind, len(gen));
    return {kind, seq.symbols};
}

}  // namespace testing

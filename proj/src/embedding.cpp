#include "verbatim/embedding.hpp"

#include <cmath>

#include "verbatim/words.hpp"

namespace verbatim {

namespace {

std::uint64_t fnv1a64(std::u32string_view data, std::uint64_t seed) {
    std::uint64_t h = 0xCBF29CE484222325ull ^ seed;
    for (char32_t c : data) {
        for (int shift = 0; shift < 32; shift += 8) {
            h ^= (std::uint64_t(c) >> shift) & 0xFF;
            h *= 0x100000001B3ull;
        }
    }
    return h;
}

}  // namespace

HashedTfBackend::HashedTfBackend()
    : id_("tfhash/v1 dim=" + std::to_string(kDim) + " seed=0x9e3779b97f4a7c15") {}

const std::string& HashedTfBackend::id() const { return id_; }

std::uint32_t HashedTfBackend::bucket(std::u32string_view word) const {
    return static_cast<std::uint32_t>(fnv1a64(word, kSeed) % kDim);
}

std::vector<double> HashedTfBackend::embed(std::string_view text) const {
    std::vector<double> v(kDim, 0.0);
    const auto words = split_words_utf8(text);
    for (const auto& w : words) {
        v[bucket(w)] += 1.0;
    }
    double norm2 = 0.0;
    for (double x : v) norm2 += x * x;
    if (norm2 > 0.0) {
        const double inv = 1.0 / std::sqrt(norm2);
        for (double& x : v) x *= inv;
    }
    return v;
}

const HashedTfBackend& default_embedding_backend() {
    static const HashedTfBackend backend;
    return backend;
}

}  // namespace verbatim

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace verbatim {

// Text -> fixed-length real vector. Vectors are comparable only within one
// backend id.
class EmbeddingBackend {
  public:
    virtual ~EmbeddingBackend() = default;
    virtual std::vector<double> embed(std::string_view text) const = 0;
    virtual const std::string& id() const = 0;
};

// Bundled deterministic fallback: L2-normalized hashed term-frequency
// vectors. Fixed dimension and hash seed; changing either is a breaking
// change and bumps the version in the backend id.
class HashedTfBackend final : public EmbeddingBackend {
  public:
    static constexpr std::size_t kDim = 1024;
    static constexpr std::uint64_t kSeed = 0x9E3779B97F4A7C15ull;

    HashedTfBackend();

    std::vector<double> embed(std::string_view text) const override;
    const std::string& id() const override;

    // Bucket assignment for one segmented word; exposed so tests can build
    // hand-computed fixtures free of bucket collisions.
    std::uint32_t bucket(std::u32string_view word) const;

  private:
    std::string id_;
};

const HashedTfBackend& default_embedding_backend();

}  // namespace verbatim

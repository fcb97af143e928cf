#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vithsd::classifier {

inline constexpr std::size_t kDefaultFeatureDim = std::size_t{1} << 18;
inline constexpr std::uint64_t kFeatureHashSeed = 0x5eed'1e5d'42ab'cdefULL;

/// Sparse, L2-normalized bag of hashed features. Entries are sorted by index
/// and unique; an empty text yields no entries.
struct FeatureVector {
    std::size_t dim = kDefaultFeatureDim;
    std::vector<std::pair<std::uint32_t, double>> entries;

    bool empty() const noexcept { return entries.empty(); }
    double norm() const noexcept;
};

/// Seeded 64-bit FNV-1a followed by a splitmix64 finalizer.
std::uint64_t feature_hash(std::string_view key, std::uint64_t seed = kFeatureHashSeed) noexcept;
std::uint32_t feature_bucket(std::string_view key, std::size_t dim) noexcept;

/// Feature keys before hashing, with repeats: character n-grams (n = 1..4,
/// over code points of the whole text) as "c:<gram>", word unigrams as
/// "w:<word>" and adjacent word bigrams as "b:<w1> <w2>".
std::vector<std::string> feature_keys(std::string_view text);

/// Hashes feature_keys(text) into [0, dim), accumulates counts, L2-normalizes.
/// Expects text already passed through preprocess_text.
FeatureVector extract_features(std::string_view text, std::size_t dim = kDefaultFeatureDim);

}  // namespace vithsd::classifier

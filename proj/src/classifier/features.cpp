#include "vithsd/classifier/features.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "vithsd/core/errors.hpp"
#include "vithsd/core/text.hpp"

namespace vithsd::classifier {

double FeatureVector::norm() const noexcept {
    double sq = 0.0;
    for (const auto& [idx, w] : entries) sq += w * w;
    return std::sqrt(sq);
}

std::uint64_t feature_hash(std::string_view key, std::uint64_t seed) noexcept {
    std::uint64_t h = 14695981039346656037ULL ^ seed;
    for (unsigned char c : key) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    h ^= h >> 30;
    h *= 0xbf58476d1ce4e5b9ULL;
    h ^= h >> 27;
    h *= 0x94d049bb133111ebULL;
    h ^= h >> 31;
    return h;
}

std::uint32_t feature_bucket(std::string_view key, std::size_t dim) noexcept {
    return static_cast<std::uint32_t>(feature_hash(key) % dim);
}

std::vector<std::string> feature_keys(std::string_view text) {
    std::vector<std::string> keys;
    if (text.empty()) return keys;

    const auto offsets = code_point_offsets(text);
    const std::size_t points = offsets.size() - 1;
    for (std::size_t n = 1; n <= 4; ++n) {
        for (std::size_t i = 0; i + n <= points; ++i) {
            keys.push_back("c:" + std::string(text.substr(offsets[i], offsets[i + n] - offsets[i])));
        }
    }

    std::vector<std::string_view> words;
    std::size_t pos = 0;
    while (pos < text.size()) {
        while (pos < text.size() && text[pos] == ' ') ++pos;
        std::size_t end = pos;
        while (end < text.size() && text[end] != ' ') ++end;
        if (end > pos) words.push_back(text.substr(pos, end - pos));
        pos = end;
    }
    for (auto w : words) keys.push_back("w:" + std::string(w));
    for (std::size_t i = 0; i + 1 < words.size(); ++i) {
        keys.push_back("b:" + std::string(words[i]) + " " + std::string(words[i + 1]));
    }
    return keys;
}

FeatureVector extract_features(std::string_view text, std::size_t dim) {
    if (dim == 0 || dim > (std::size_t{1} << 32)) {
        raise(ErrorCode::DimensionError, "feature dimension must be in [1, 2^32]");
    }
    FeatureVector fv;
    fv.dim = dim;
    std::unordered_map<std::uint32_t, double> counts;
    for (const auto& key : feature_keys(text)) counts[feature_bucket(key, dim)] += 1.0;
    fv.entries.assign(counts.begin(), counts.end());
    std::sort(fv.entries.begin(), fv.entries.end());
    const double n = fv.norm();
    if (n > 0.0) {
        for (auto& e : fv.entries) e.second /= n;
    }
    return fv;
}

}  // namespace vithsd::classifier

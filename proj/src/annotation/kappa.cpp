#include "vithsd/annotation/kappa.hpp"

#include <algorithm>
#include <cstdint>

#include "vithsd/core/errors.hpp"

namespace vithsd::annotation {

std::optional<double> cohen_kappa(std::span<const int> a, std::span<const int> b) {
    if (a.size() != b.size()) {
        raise(ErrorCode::LengthMismatch,
              "rater sequences have lengths " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
    }
    if (a.empty()) raise(ErrorCode::EmptyInput, "cohen_kappa needs at least one item");

    // Categories are compacted so arbitrary (even negative) codes work.
    std::vector<int> categories(a.begin(), a.end());
    categories.insert(categories.end(), b.begin(), b.end());
    std::sort(categories.begin(), categories.end());
    categories.erase(std::unique(categories.begin(), categories.end()), categories.end());
    auto slot = [&](int code) {
        return static_cast<std::size_t>(std::lower_bound(categories.begin(), categories.end(), code) -
                                        categories.begin());
    };

    std::vector<std::int64_t> margin_a(categories.size(), 0), margin_b(categories.size(), 0);
    std::int64_t agree = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ++margin_a[slot(a[i])];
        ++margin_b[slot(b[i])];
        if (a[i] == b[i]) ++agree;
    }
    const auto n = static_cast<std::int64_t>(a.size());
    std::int64_t chance = 0;  // n^2 * p_e
    for (std::size_t k = 0; k < categories.size(); ++k) chance += margin_a[k] * margin_b[k];
    const std::int64_t denom = n * n - chance;
    if (denom == 0) return std::nullopt;
    return static_cast<double>(n * agree - chance) / static_cast<double>(denom);
}

std::optional<double> fleiss_kappa(const std::vector<std::vector<int>>& counts) {
    if (counts.empty()) raise(ErrorCode::EmptyInput, "fleiss_kappa needs at least one item");
    const std::size_t categories = counts.front().size();
    std::int64_t raters = -1;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const auto& row = counts[i];
        if (row.size() != categories) {
            raise(ErrorCode::RaggedCounts, "item " + std::to_string(i) + " has " + std::to_string(row.size()) +
                                               " categories, expected " + std::to_string(categories));
        }
        std::int64_t sum = 0;
        for (int c : row) {
            if (c < 0) raise(ErrorCode::RaggedCounts, "negative count on item " + std::to_string(i));
            sum += c;
        }
        if (raters < 0) raters = sum;
        if (sum != raters) {
            raise(ErrorCode::RaggedCounts, "item " + std::to_string(i) + " has " + std::to_string(sum) +
                                               " ratings, expected " + std::to_string(raters));
        }
    }
    if (raters < 2) raise(ErrorCode::RaggedCounts, "fleiss_kappa needs at least two raters per item");

    const auto items = static_cast<std::int64_t>(counts.size());
    std::vector<std::int64_t> column(categories, 0);
    std::int64_t pair_agreements = 0;  // sum_i sum_j n_ij (n_ij - 1)
    for (const auto& row : counts) {
        for (std::size_t j = 0; j < categories; ++j) {
            column[j] += row[j];
            pair_agreements += static_cast<std::int64_t>(row[j]) * (row[j] - 1);
        }
    }
    const std::int64_t total = items * raters;
    std::int64_t column_sq = 0;
    for (std::int64_t c : column) column_sq += c * c;
    if (column_sq == total * total) return std::nullopt;

    const double p_bar = static_cast<double>(pair_agreements) /
                         (static_cast<double>(items) * static_cast<double>(raters) * static_cast<double>(raters - 1));
    const double p_e = static_cast<double>(column_sq) / (static_cast<double>(total) * static_cast<double>(total));
    return (p_bar - p_e) / (1.0 - p_e);
}

}  // namespace vithsd::annotation

#pragma once

#include <optional>
#include <span>
#include <vector>

namespace vithsd::annotation {

/// Cohen's kappa for two raters over the same items: (p_o - p_e) / (1 - p_e).
/// Returns nullopt (Undefined) when p_e = 1, i.e. both raters used one and the
/// same category throughout. Throws EmptyInput / LengthMismatch.
std::optional<double> cohen_kappa(std::span<const int> a, std::span<const int> b);

/// Fleiss' kappa over an items x categories count matrix; every row must sum
/// to the same rater count n >= 2. Returns nullopt when expected agreement is 1.
/// Throws EmptyInput / RaggedCounts.
std::optional<double> fleiss_kappa(const std::vector<std::vector<int>>& counts);

}  // namespace vithsd::annotation

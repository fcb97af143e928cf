#pragma once

#include <string>
#include <string_view>

#include "vithsd/core/types.hpp"

namespace vithsd {

/// Parses `[slug#level, slug#level]`. Separators may be commas, whitespace or
/// both; slugs may be aliases. The result is deduplicated and in target order.
TermList parse_label_list(std::string_view text);

/// Canonical printer: `[individuals#hate, groups#offensive]`, `[]` when empty.
std::string format_label_list(const TermList& terms);

/// Listed targets receive their level; the rest are Normal.
LabelVector terms_to_label_vector(const TermList& terms);

/// Drops Normal entries; canonical target order.
TermList label_vector_to_terms(const LabelVector& v);

}  // namespace vithsd

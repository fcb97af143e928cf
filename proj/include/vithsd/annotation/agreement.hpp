#pragma once

#include <span>
#include <string>
#include <vector>

#include "vithsd/annotation/types.hpp"

namespace vithsd::annotation {

/// Pairwise Cohen's kappa per target over co-annotated comments, averaged per
/// target (pairs weighted equally) and then over targets. Undefined kappas
/// are excluded from the means and counted; pairs without shared comments
/// are reported as no-overlap. `roster` fixes pair order; when empty the
/// sorted set of annotators found in `records` is used.
AgreementReport agreement_report(std::span<const AnnotationRecord> records, AgreementMode mode,
                                 const std::vector<std::string>& roster = {});

/// Code used for one level under the given mode.
int agreement_code(HatredLevel level, AgreementMode mode) noexcept;

}  // namespace vithsd::annotation

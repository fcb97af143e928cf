#pragma once

#include <span>
#include <vector>

#include "vithsd/annotation/types.hpp"

namespace vithsd::annotation {

/// Per-target majority over the records of one comment. Ties go to the most
/// severe level (highest code) and set the tie flag. Throws EmptyInput.
VoteResult majority_vote(std::span<const AnnotationRecord> records);

/// Groups records by comment id and votes each group. Output follows the
/// first appearance of each comment id in `records`.
std::vector<VoteResult> vote_all(std::span<const AnnotationRecord> records);

}  // namespace vithsd::annotation

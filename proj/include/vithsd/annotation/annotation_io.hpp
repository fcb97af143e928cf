#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "vithsd/annotation/round.hpp"
#include "vithsd/annotation/types.hpp"

namespace vithsd::annotation {

/// Sheet-layout import: annotator_id, comment_id and five level columns
/// (headers resolved through the target alias table), optional submitted_at.
/// An empty file or a header with no rows throws EmptyInput.
std::vector<AnnotationRecord> load_annotation_records(const std::filesystem::path& path);

void write_annotation_records(const std::filesystem::path& path, const std::vector<AnnotationRecord>& records);

/// Pair x target kappa matrix with a trailing `average` row:
/// `pair,individuals,...,politics,k,overlap`.
std::string agreement_csv(const AgreementReport& report);

/// `comment_id,<five slugs>,ties,support`.
std::string votes_csv(const std::vector<VoteResult>& votes);

nlohmann::json to_json(const AnnotationRecord& r);
AnnotationRecord record_from_json(const nlohmann::json& j);
nlohmann::json to_json(const AgreementReport& r);
nlohmann::json to_json(const VoteResult& v);
nlohmann::json to_json(const GateOutcome& g);

}  // namespace vithsd::annotation

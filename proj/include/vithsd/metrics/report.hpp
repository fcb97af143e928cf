#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "vithsd/metrics/confusion.hpp"
#include "vithsd/metrics/prf.hpp"

namespace vithsd::metrics {

struct EvaluationReport {
    std::string model;
    std::size_t comments = 0;
    PRFReport target_only_micro;
    PRFReport target_only_macro;
    PRFReport target_level_micro;
    PRFReport target_level_macro;
    ConfusionMatrix confusion;
};

/// Both tasks, both aggregations, and the confusion matrices in one pass.
EvaluationReport evaluate(const std::string& model, std::span<const LabelVector> preds,
                          std::span<const LabelVector> golds, unsigned threads = 1);

/// Fixed-width table, one row per aggregation:
///   Model | F1 P R (target only) | F1 P R (target + level)
/// Scores are percentages with two decimals.
std::string format_table(const EvaluationReport& r);

std::string format_confusion(const ConfusionMatrix& m);

/// Reads prediction lines ({"id", "terms": ["slug#level", ...], ...}), the
/// format written by predict and by the streaming sink. ParseError names the line.
std::vector<IdTerms> load_prediction_file(const std::string& path);

/// Aligns predictions to the gold comments by id (AlignmentError on any
/// missing or extra id) and evaluates. This is what `vithsd evaluate` prints.
EvaluationReport evaluate_predictions(const std::string& model, std::span<const IdTerms> preds,
                                      std::span<const LabeledComment> golds, unsigned threads = 1);

nlohmann::json to_json(const PRFReport& r);
nlohmann::json to_json(const ConfusionMatrix& m);
nlohmann::json to_json(const EvaluationReport& r);

}  // namespace vithsd::metrics

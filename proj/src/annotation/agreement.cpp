#include "vithsd/annotation/agreement.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "vithsd/annotation/kappa.hpp"

namespace vithsd::annotation {

int agreement_code(HatredLevel level, AgreementMode mode) noexcept {
    if (mode == AgreementMode::Presence) return level == HatredLevel::Normal ? 0 : 1;
    return code_of(level);
}

AgreementReport agreement_report(std::span<const AnnotationRecord> records, AgreementMode mode,
                                 const std::vector<std::string>& roster) {
    std::vector<std::string> annotators = roster;
    if (annotators.empty()) {
        std::set<std::string> seen;
        for (const auto& r : records) seen.insert(r.annotator_id);
        annotators.assign(seen.begin(), seen.end());
    }

    // annotator -> comment -> labels; later records for the same key win.
    std::map<std::string, std::map<std::string, LabelVector>> by_annotator;
    for (const auto& r : records) by_annotator[r.annotator_id][r.comment_id] = r.labels;

    AgreementReport report;
    report.mode = mode;
    std::array<double, kNumTargets> sums{};
    std::array<std::size_t, kNumTargets> defined{};

    for (std::size_t i = 0; i < annotators.size(); ++i) {
        for (std::size_t j = i + 1; j < annotators.size(); ++j) {
            PairAgreement pair;
            pair.first = annotators[i];
            pair.second = annotators[j];
            const auto& left = by_annotator[pair.first];
            const auto& right = by_annotator[pair.second];

            std::array<std::vector<int>, kNumTargets> seq_a, seq_b;
            for (const auto& [comment, labels] : left) {
                auto it = right.find(comment);
                if (it == right.end()) continue;
                ++pair.overlap;
                for (Target t : kAllTargets) {
                    seq_a[index_of(t)].push_back(agreement_code(labels[t], mode));
                    seq_b[index_of(t)].push_back(agreement_code(it->second[t], mode));
                }
            }
            if (pair.no_overlap()) {
                ++report.no_overlap_pairs;
            } else {
                for (std::size_t t = 0; t < kNumTargets; ++t) {
                    pair.kappa[t] = cohen_kappa(seq_a[t], seq_b[t]);
                    if (pair.kappa[t]) {
                        sums[t] += *pair.kappa[t];
                        ++defined[t];
                    } else {
                        ++report.undefined_count[t];
                    }
                }
            }
            report.pairs.push_back(std::move(pair));
        }
    }

    double overall_sum = 0.0;
    std::size_t overall_n = 0;
    for (std::size_t t = 0; t < kNumTargets; ++t) {
        if (defined[t] == 0) continue;
        report.target_mean[t] = sums[t] / static_cast<double>(defined[t]);
        overall_sum += *report.target_mean[t];
        ++overall_n;
    }
    if (overall_n > 0) report.overall = overall_sum / static_cast<double>(overall_n);
    return report;
}

}  // namespace vithsd::annotation

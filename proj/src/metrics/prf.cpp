#include "vithsd/metrics/prf.hpp"

#include <algorithm>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "vithsd/core/errors.hpp"

namespace vithsd::metrics {

std::string_view task_name(EvalTask t) noexcept {
    return t == EvalTask::TargetOnly ? "target_only" : "target_level";
}

std::string_view aggregation_name(Aggregation a) noexcept { return a == Aggregation::Micro ? "micro" : "macro"; }

PRF prf_from_counts(const Counts& c) noexcept {
    PRF r;
    if (c.predicted > 0) r.precision = static_cast<double>(c.matched) / static_cast<double>(c.predicted);
    if (c.gold > 0) r.recall = static_cast<double>(c.matched) / static_cast<double>(c.gold);
    if (r.precision + r.recall > 0.0) r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
    return r;
}

namespace {

// Dense per-target view of a term set: 0 = absent, else level code.
std::array<int, kNumTargets> dense(const TermList& terms) {
    std::array<int, kNumTargets> d{};
    for (const auto& t : terms) {
        auto& slot = d[index_of(t.target())];
        const int code = code_of(t.level());
        if (slot != 0 && slot != code) {
            raise(ErrorCode::ConflictingTerm, "term set names " + std::string(slug(t.target())) + " twice");
        }
        slot = code;
    }
    return d;
}

void tally(const TermList& pred, const TermList& gold, EvalTask task, TargetCounts& out) {
    const auto p = dense(pred);
    const auto g = dense(gold);
    for (std::size_t t = 0; t < kNumTargets; ++t) {
        const bool has_p = p[t] != 0;
        const bool has_g = g[t] != 0;
        out[t].predicted += has_p;
        out[t].gold += has_g;
        if (has_p && has_g && (task == EvalTask::TargetOnly || p[t] == g[t])) ++out[t].matched;
    }
}

}  // namespace

TargetCounts count_matches(std::span<const TermList> preds, std::span<const TermList> golds, EvalTask task,
                           unsigned threads) {
    if (preds.size() != golds.size()) {
        raise(ErrorCode::AlignmentError, std::to_string(preds.size()) + " predictions for " +
                                             std::to_string(golds.size()) + " gold comments");
    }
    const std::size_t n = preds.size();
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    TargetCounts total{};
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) tally(preds[i], golds[i], task, total);
        return total;
    }
    std::vector<TargetCounts> shards(threads);
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned s = 0; s < threads; ++s) {
        pool.emplace_back([&, s] {
            try {
                const std::size_t lo = s * chunk;
                const std::size_t hi = std::min(n, lo + chunk);
                for (std::size_t i = lo; i < hi; ++i) tally(preds[i], golds[i], task, shards[s]);
            } catch (...) {
                errors[s] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    for (const auto& shard : shards) {
        for (std::size_t t = 0; t < kNumTargets; ++t) total[t] += shard[t];
    }
    return total;
}

PRFReport make_report(const TargetCounts& counts, EvalTask task, Aggregation mode, std::size_t comments) {
    PRFReport r;
    r.task = task;
    r.mode = mode;
    r.comments = comments;
    r.per_target_counts = counts;
    for (std::size_t t = 0; t < kNumTargets; ++t) {
        r.total += counts[t];
        r.per_target[t] = prf_from_counts(counts[t]);
    }
    if (mode == Aggregation::Micro) {
        const PRF m = prf_from_counts(r.total);
        r.precision = m.precision;
        r.recall = m.recall;
        r.f1 = m.f1;
    } else {
        for (const auto& p : r.per_target) {
            r.precision += p.precision;
            r.recall += p.recall;
            r.f1 += p.f1;
        }
        r.precision /= kNumTargets;
        r.recall /= kNumTargets;
        r.f1 /= kNumTargets;
    }
    return r;
}

PRFReport target_only_prf(std::span<const TermList> preds, std::span<const TermList> golds, Aggregation mode,
                          unsigned threads) {
    return make_report(count_matches(preds, golds, EvalTask::TargetOnly, threads), EvalTask::TargetOnly, mode,
                       golds.size());
}

PRFReport target_level_prf(std::span<const TermList> preds, std::span<const TermList> golds, Aggregation mode,
                           unsigned threads) {
    return make_report(count_matches(preds, golds, EvalTask::TargetLevel, threads), EvalTask::TargetLevel, mode,
                       golds.size());
}

namespace {

std::pair<std::vector<TermList>, std::vector<TermList>> checked(std::span<const IdTerms> preds,
                                                                std::span<const IdTerms> golds) {
    if (preds.size() != golds.size()) {
        raise(ErrorCode::AlignmentError, std::to_string(preds.size()) + " predictions for " +
                                             std::to_string(golds.size()) + " gold comments");
    }
    std::pair<std::vector<TermList>, std::vector<TermList>> out;
    out.first.reserve(preds.size());
    out.second.reserve(golds.size());
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (preds[i].id != golds[i].id) {
            raise(ErrorCode::AlignmentError,
                  "position " + std::to_string(i) + ": prediction '" + preds[i].id + "' vs gold '" + golds[i].id + "'");
        }
        out.first.push_back(preds[i].terms);
        out.second.push_back(golds[i].terms);
    }
    return out;
}

}  // namespace

PRFReport target_only_prf(std::span<const IdTerms> preds, std::span<const IdTerms> golds, Aggregation mode) {
    const auto [p, g] = checked(preds, golds);
    return target_only_prf(p, g, mode);
}

PRFReport target_level_prf(std::span<const IdTerms> preds, std::span<const IdTerms> golds, Aggregation mode) {
    const auto [p, g] = checked(preds, golds);
    return target_level_prf(p, g, mode);
}

std::vector<IdTerms> align_by_id(std::span<const IdTerms> preds, std::span<const IdTerms> golds) {
    std::unordered_map<std::string, std::size_t> by_id;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (!by_id.emplace(preds[i].id, i).second) {
            raise(ErrorCode::AlignmentError, "duplicate prediction id '" + preds[i].id + "'");
        }
    }
    std::unordered_set<std::string> seen;
    std::vector<IdTerms> out;
    out.reserve(golds.size());
    for (const auto& g : golds) {
        if (!seen.insert(g.id).second) raise(ErrorCode::AlignmentError, "duplicate gold id '" + g.id + "'");
        const auto it = by_id.find(g.id);
        if (it == by_id.end()) raise(ErrorCode::AlignmentError, "no prediction for '" + g.id + "'");
        out.push_back(preds[it->second]);
    }
    if (preds.size() != golds.size()) {
        for (const auto& p : preds) {
            if (!seen.count(p.id)) raise(ErrorCode::AlignmentError, "prediction '" + p.id + "' has no gold comment");
        }
    }
    return out;
}

}  // namespace vithsd::metrics

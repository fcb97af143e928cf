#include "vithsd/core/labels.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <optional>

#include "vithsd/core/errors.hpp"

namespace vithsd {

namespace {

bool is_separator(char c) { return c == ',' || std::isspace(static_cast<unsigned char>(c)); }

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

TargetLevelTerm parse_term(std::string_view token) {
    const auto hash = token.rfind('#');
    if (hash == std::string_view::npos) {
        raise(ErrorCode::ParseError, "term '" + std::string(token) + "' has no '#'");
    }
    const auto name = token.substr(0, hash);
    const auto level_text = token.substr(hash + 1);
    const auto target = resolve_target(name);
    if (!target) raise(ErrorCode::UnknownTarget, "unknown target slug '" + std::string(name) + "'");
    const auto level = parse_level_name(level_text);
    if (!level || *level == HatredLevel::Normal) {
        raise(ErrorCode::InvalidLevel, "invalid level '" + std::string(level_text) + "' in term '" +
                                           std::string(token) + "'");
    }
    return TargetLevelTerm(*target, *level);
}

}  // namespace

TermList parse_label_list(std::string_view text) {
    auto body = trim(text);
    if (body.size() < 2 || body.front() != '[' || body.back() != ']') {
        raise(ErrorCode::ParseError, "label list must be enclosed in brackets: '" + std::string(text) + "'");
    }
    body = body.substr(1, body.size() - 2);

    std::array<std::optional<HatredLevel>, kNumTargets> seen{};
    std::size_t pos = 0;
    while (pos < body.size()) {
        while (pos < body.size() && is_separator(body[pos])) ++pos;
        std::size_t end = pos;
        while (end < body.size() && !is_separator(body[end])) ++end;
        if (end > pos) {
            const TargetLevelTerm term = parse_term(body.substr(pos, end - pos));
            auto& slot = seen[index_of(term.target())];
            if (slot && *slot != term.level()) {
                raise(ErrorCode::ConflictingTerm,
                      "target '" + std::string(slug(term.target())) + "' listed with levels " +
                          std::string(level_name(*slot)) + " and " + std::string(level_name(term.level())));
            }
            slot = term.level();
        }
        pos = end;
    }

    TermList out;
    for (Target t : kAllTargets) {
        if (const auto& l = seen[index_of(t)]) out.emplace_back(t, *l);
    }
    return out;
}

std::string format_label_list(const TermList& terms) {
    TermList sorted = terms;
    std::sort(sorted.begin(), sorted.end());
    std::string out = "[";
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i > 0) out += ", ";
        out += sorted[i].str();
    }
    out += "]";
    return out;
}

LabelVector terms_to_label_vector(const TermList& terms) {
    LabelVector v;
    std::array<bool, kNumTargets> assigned{};
    for (const auto& term : terms) {
        auto& flag = assigned[index_of(term.target())];
        if (flag) {
            raise(ErrorCode::ConflictingTerm,
                  "target '" + std::string(slug(term.target())) + "' appears more than once");
        }
        flag = true;
        v.set(term.target(), term.level());
    }
    return v;
}

TermList label_vector_to_terms(const LabelVector& v) {
    TermList out;
    for (Target t : kAllTargets) {
        if (v[t] != HatredLevel::Normal) out.emplace_back(t, v[t]);
    }
    return out;
}

}  // namespace vithsd

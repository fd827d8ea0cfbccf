#include <algorithm>
#include <cctype>
#include <set>

#include "a11y/workflows.hpp"

namespace a11y::workflows {

namespace {

std::set<std::string> tokens(std::string_view text) {
    std::set<std::string> out;
    std::string current;
    for (unsigned char c : text) {
        if (std::isalnum(c) || c >= 0x80) {
            current += static_cast<char>(std::tolower(c));
        } else if (!current.empty()) {
            out.insert(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) out.insert(std::move(current));
    return out;
}

// "WCAG 2.1.1 Keyboard" and "2.1.1" name the same criterion.
std::string criterion_key(std::string_view criterion) {
    return rules::normalize_criterion(criterion).value_or(normalize_whitespace(criterion));
}

}  // namespace

std::string normalize_whitespace(std::string_view text) {
    std::string out;
    bool pending_space = false;
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out += ' ';
        pending_space = false;
        out += static_cast<char>(c);
    }
    return out;
}

double token_jaccard(std::string_view a, std::string_view b) {
    const auto ta = tokens(a);
    const auto tb = tokens(b);
    if (ta.empty() && tb.empty()) return 0.0;
    std::size_t shared = 0;
    for (const auto& t : ta) shared += tb.count(t);
    const auto joined = ta.size() + tb.size() - shared;
    return static_cast<double>(shared) / static_cast<double>(joined);
}

bool are_duplicates(const llm::DetectionFinding& a, const llm::DetectionFinding& b, double* score) {
    if (criterion_key(a.criterion) != criterion_key(b.criterion)) return false;
    const auto code_a = normalize_whitespace(a.offending_code);
    if (!code_a.empty() && code_a == normalize_whitespace(b.offending_code)) {
        if (score) *score = 1.0;
        return true;
    }
    const double j = token_jaccard(a.error_description, b.error_description);
    if (score) *score = j;
    return j >= kJaccardThreshold;
}

DedupeOutcome dedupe_findings(const std::vector<llm::DetectionFinding>& findings) {
    DedupeOutcome out;
    for (std::size_t i = 0; i < findings.size(); ++i) {
        bool dropped = false;
        for (std::size_t k = 0; k < out.unique.size(); ++k) {
            double score = 0.0;
            if (are_duplicates(out.unique[k], findings[i], &score)) {
                out.merge_log.push_back({out.kept_indices[k], i, score});
                dropped = true;
                break;
            }
        }
        if (dropped) {
            ++out.duplicates_removed;
            continue;
        }
        out.unique.push_back(findings[i]);
        out.kept_indices.push_back(i);
    }
    return out;
}

}  // namespace a11y::workflows

#include <algorithm>
#include <cctype>
#include <limits>

#include "a11y/evaluator.hpp"

namespace a11y::eval {

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// Minimum-cost assignment of every row to a distinct column (rows <= cols).
// Returns the column chosen for each row.
std::vector<std::size_t> assign(const std::vector<std::vector<long long>>& cost) {
    const std::size_t n = cost.size();
    const std::size_t m = n ? cost[0].size() : 0;
    constexpr long long kInf = std::numeric_limits<long long>::max() / 4;
    std::vector<long long> u(n + 1), v(m + 1);
    std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<long long> minv(m + 1, kInf);
        std::vector<bool> used(m + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = p[j0];
            long long delta = kInf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const long long cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<std::size_t> row_to_col(n, 0);
    for (std::size_t j = 1; j <= m; ++j) {
        if (p[j]) row_to_col[p[j] - 1] = j - 1;
    }
    return row_to_col;
}

std::string criterion_key(std::string_view c) {
    return rules::normalize_criterion(c).value_or(workflows::normalize_whitespace(c));
}

}  // namespace

std::optional<markup::Span> locate(const markup::SourceDocument& doc, const markup::Span& within,
                                   std::string_view needle) {
    const auto pattern = workflows::normalize_whitespace(needle);
    if (pattern.empty()) return std::nullopt;
    const std::string_view text = doc.text();
    for (std::size_t start = within.start; start < within.end; ++start) {
        if (text[start] != pattern[0]) continue;
        std::size_t j = start;
        std::size_t i = 0;
        while (i < pattern.size() && j < within.end) {
            if (pattern[i] == ' ') {
                if (!is_space(text[j])) break;
                while (j < within.end && is_space(text[j])) ++j;
                ++i;
            } else if (pattern[i] == text[j]) {
                ++i;
                ++j;
            } else {
                break;
            }
        }
        if (i == pattern.size()) return doc.span(start, j);
    }
    return std::nullopt;
}

MatchOutcome match_findings(const std::vector<llm::DetectionFinding>& items, const CorpusCase& c,
                            bool exclude_duplicates) {
    MatchOutcome out;
    std::vector<bool> eligible(items.size(), true);
    if (exclude_duplicates) {
        for (std::size_t i = 0; i < items.size(); ++i) {
            for (std::size_t k = 0; k < i; ++k) {
                if (eligible[k] && workflows::are_duplicates(items[k], items[i])) {
                    eligible[i] = false;
                    out.excluded_duplicates.push_back(i);
                    break;
                }
            }
        }
    }

    const auto& seeds = c.seeded_errors;
    const markup::Span whole = c.doc.span(0, c.doc.text().size());
    // edge[i][s]: 0 none, 1 match, 2 match with agreeing criterion.
    std::vector<std::vector<int>> edge(items.size(), std::vector<int>(seeds.size(), 0));
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (!eligible[i]) continue;
        const auto code = workflows::normalize_whitespace(items[i].offending_code);
        auto located = locate(c.doc, c.selection, items[i].offending_code);
        if (!located) located = locate(c.doc, whole, items[i].offending_code);
        const auto crit = criterion_key(items[i].criterion);
        for (std::size_t s = 0; s < seeds.size(); ++s) {
            const bool agrees = !items[i].criterion.empty() && crit == criterion_key(seeds[s].criterion);
            const auto seed_code = workflows::normalize_whitespace(seeds[s].canonical_offending_code);
            const bool contained = !code.empty() && (seed_code.find(code) != std::string::npos ||
                                                     code.find(seed_code) != std::string::npos);
            const bool overlapping = agrees && located && located->overlaps(seeds[s].offending_span);
            if (contained || overlapping) edge[i][s] = agrees ? 2 : 1;
        }
    }

    if (items.empty() || seeds.empty()) return out;
    const bool transpose = items.size() > seeds.size();
    const std::size_t rows = transpose ? seeds.size() : items.size();
    const std::size_t cols = transpose ? items.size() : seeds.size();
    const long long big = static_cast<long long>(rows) + 1;
    std::vector<std::vector<long long>> cost(rows, std::vector<long long>(cols, 0));
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t k = 0; k < cols; ++k) {
            const int e = transpose ? edge[k][r] : edge[r][k];
            cost[r][k] = e == 0 ? 0 : -(big + (e == 2 ? 1 : 0));
        }
    }
    const auto chosen = assign(cost);
    for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t item = transpose ? chosen[r] : r;
        const std::size_t seed = transpose ? r : chosen[r];
        if (edge[item][seed]) out.matches.push_back({item, seed, edge[item][seed] == 2});
    }
    std::sort(out.matches.begin(), out.matches.end(), [](const Match& a, const Match& b) { return a.item < b.item; });
    return out;
}

}  // namespace a11y::eval

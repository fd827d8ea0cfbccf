#include <algorithm>
#include <cctype>
#include <map>
#include <regex>
#include <set>
#include <sstream>

#include "a11y/errors.hpp"
#include "a11y/evaluator.hpp"

namespace a11y::eval {

namespace {

Level worst(Level a, Level b) {
    if (a == Level::NotApplicable) return b;
    if (b == Level::NotApplicable) return a;
    return static_cast<int>(a) < static_cast<int>(b) ? a : b;
}

std::string ratio_text(std::size_t m, std::size_t t) { return std::to_string(m) + "/" + std::to_string(t); }

double ratio(std::size_t m, std::size_t t) { return static_cast<double>(m) / static_cast<double>(t); }

bool usable(const std::optional<llm::ParseResult>& p) { return p && p->ok && p->list_shaped; }

std::vector<llm::DetectionFinding> as_findings(const std::vector<llm::FixSuggestion>& fixes) {
    std::vector<llm::DetectionFinding> out;
    for (const auto& f : fixes) out.push_back({f.error_description, f.offending_code, f.criterion.value_or("")});
    return out;
}

// ---- json-valid -----------------------------------------------------------------

Level parse_level(const llm::ParseResult& p, std::string& detail, std::string_view stage) {
    std::string note;
    Level level;
    if (p.ok && p.stage == llm::ParseStage::WholeText) {
        level = Level::CorrectOk;
        note = "valid JSON";
    } else if (p.ok) {
        level = Level::PartialOk;
        note = "JSON recovered by the " + std::string(llm::to_string(*p.stage)) + " stage";
    } else if (p.readable) {
        level = Level::PartialOk;
        note = "not JSON, but readable labeled text";
    } else {
        level = Level::Incorrect;
        note = "not JSON and not readable";
    }
    if (!detail.empty()) detail += "; ";
    detail += std::string(stage) + ": " + note;
    return level;
}

CriterionResult json_valid(const Response& r) {
    CriterionResult out{"json-valid", Level::NotApplicable, {}, {}};
    if (r.detection) out.level = worst(out.level, parse_level(*r.detection, out.detail, "detection"));
    if (r.fixes) out.level = worst(out.level, parse_level(*r.fixes, out.detail, "fixes"));
    return out;
}

// ---- fields-populated ---------------------------------------------------------

Level fields_level(const llm::ParseResult& p, llm::SchemaId schema, bool empty_is_wrong, std::string& detail,
                   std::string_view stage) {
    auto note = [&](const std::string& s) {
        if (!detail.empty()) detail += "; ";
        detail += std::string(stage) + ": " + s;
    };
    if (!p.list_shaped) {
        note("not a list of records");
        return Level::Incorrect;
    }
    if (p.records.empty() && empty_is_wrong) {
        note("no records");
        return Level::Incorrect;
    }
    Level level = Level::CorrectOk;
    for (std::size_t i = 0; i < p.records.size(); ++i) {
        const auto& rec = p.records[i];
        const auto label = "record " + std::to_string(i + 1);
        if (!rec.is_object) {
            note(label + " is not an object");
            return Level::Incorrect;
        }
        for (const auto& [field, required] : llm::schema_fields(schema)) {
            if (rec.populated(field)) continue;
            if (required) {
                note(label + " lacks required " + field);
                return Level::Incorrect;
            }
            note(label + " lacks " + field);
            level = Level::PartialOk;
        }
        for (const auto& extra : rec.extra_fields) {
            note(label + " has additional field " + extra);
            level = Level::PartialOk;
        }
    }
    if (level == Level::CorrectOk) note("all fields populated");
    return level;
}

CriterionResult fields_populated(const Response& r, UseCase use_case) {
    CriterionResult out{"fields-populated", Level::NotApplicable, {}, {}};
    if (r.detection && r.detection->ok) {
        out.level = worst(out.level, fields_level(*r.detection, llm::SchemaId::Findings, false, out.detail, "detection"));
    }
    if (r.fixes && r.fixes->ok) {
        const auto schema = use_case == UseCase::FixWithAI ? llm::SchemaId::Fixes : llm::SchemaId::ChainFixes;
        out.level = worst(out.level, fields_level(*r.fixes, schema, true, out.detail, "fixes"));
    }
    if (out.level == Level::NotApplicable) out.detail = "no parsed response";
    return out;
}

// ---- code checks ------------------------------------------------------------------

struct Token {
    std::string text;
    std::size_t offset;
};

std::vector<Token> tokens_of(std::string_view text, std::size_t base) {
    static const std::regex kToken("[A-Za-z0-9_$]+");
    std::vector<Token> out;
    for (std::cregex_iterator it(text.data(), text.data() + text.size(), kToken), end; it != end; ++it) {
        out.push_back({it->str(), base + static_cast<std::size_t>(it->position())});
    }
    return out;
}

struct ExcludedRange {
    std::size_t start;
    std::size_t end;
};

bool semantic_attribute(std::string_view name) {
    std::string lower;
    for (char ch : name) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return lower.rfind("aria-", 0) == 0 || lower == "role" || lower == "tabindex" || lower == "autofocus" ||
           lower == "alt" || lower == "lang" || lower == "title";
}

// Regions a fix may legitimately rewrite: tag names of seeded elements, whole
// seeded attributes, and accessibility attributes anywhere.
std::vector<ExcludedRange> rewritable(const CorpusCase& c, const markup::ElementTree& tree) {
    std::vector<ExcludedRange> out;
    markup::walk(tree, [&](const markup::ElementNode& el, const auto&) {
        for (const auto& a : el.attributes) {
            if (semantic_attribute(a.name)) out.push_back({a.span.start, a.span.end});
        }
    });
    for (const auto& seed : c.seeded_errors) {
        bool element = false;
        markup::walk(tree, [&](const markup::ElementNode& el, const auto&) {
            if (el.span != seed.offending_span && el.open_tag_span != seed.offending_span) return;
            element = true;
            const auto open = el.open_tag_span.start + 1;
            out.push_back({open, open + el.tag.size()});
            if (el.close_tag_span) {
                const auto close = el.close_tag_span->start + 2;
                out.push_back({close, close + el.tag.size()});
            }
        });
        if (!element) out.push_back({seed.offending_span.start, seed.offending_span.end});
    }
    return out;
}

struct FixScope {
    markup::Span span;
    std::string code;
};

FixScope scope_of(const llm::FixSuggestion& fix, const CorpusCase& c, const Response& r) {
    auto located = locate(c.doc, r.code_span, fix.offending_code);
    const auto span = located.value_or(r.code_span);
    return {span, markup::slice(c.doc, span)};
}

struct FragmentCheck {
    std::size_t warnings = 0;
    std::map<std::string, std::size_t> rule_counts;
    bool encoding_ok = true;
};

FragmentCheck check_fragment(const CorpusCase& c, const std::string& code) {
    FragmentCheck out;
    try {
        const auto doc = markup::SourceDocument::from_text(c.doc.path(), code, c.doc.flavor());
        const auto tree = markup::parse_document(doc);
        out.warnings = tree.warnings.size();
        for (const auto& d : rules::run_rules(tree, doc)) ++out.rule_counts[d.rule_id];
    } catch (const EncodingError&) {
        out.encoding_ok = false;
    }
    return out;
}

CriterionResult code_integrity(const Response& r, const CorpusCase& c, const std::vector<llm::FixSuggestion>& fixes) {
    CriterionResult out{"code-integrity", Level::CorrectOk, {}, {}};
    const auto tree = markup::parse_document(c.doc);
    const auto excluded = rewritable(c, tree);
    for (std::size_t i = 0; i < fixes.size(); ++i) {
        const auto scope = scope_of(fixes[i], c, r);
        std::set<std::string> kept;
        for (const auto& t : tokens_of(fixes[i].fixed_code, 0)) kept.insert(t.text);
        std::set<std::string> missing;
        for (const auto& t : tokens_of(scope.code, scope.span.start)) {
            const bool rewritable_token = std::any_of(excluded.begin(), excluded.end(), [&](const ExcludedRange& e) {
                return t.offset >= e.start && t.offset + t.text.size() <= e.end;
            });
            if (!rewritable_token && !kept.count(t.text)) missing.insert(t.text);
        }
        if (missing.empty()) continue;
        out.level = Level::Incorrect;
        std::string list;
        for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
        out.detail += (out.detail.empty() ? "" : "; ") + ("fix " + std::to_string(i + 1) + " drops " + list);
    }
    if (out.level == Level::CorrectOk) out.detail = "every fix keeps the original code";
    return out;
}

CriterionResult no_new_syntax_break(const Response& r, const CorpusCase& c,
                                    const std::vector<llm::FixSuggestion>& fixes) {
    CriterionResult out{"no-new-syntax-break", Level::CorrectOk, {}, {}};
    for (std::size_t i = 0; i < fixes.size(); ++i) {
        const auto scope = scope_of(fixes[i], c, r);
        const auto before = check_fragment(c, scope.code);
        const auto after = check_fragment(c, fixes[i].fixed_code);
        if (!after.encoding_ok || after.warnings > before.warnings) {
            out.level = Level::Incorrect;
            out.detail += (out.detail.empty() ? "" : "; ") + ("fix " + std::to_string(i + 1) + " has " +
                                                              std::to_string(after.warnings) + " parse problems, the " +
                                                              "original " + std::to_string(before.warnings));
        }
    }
    if (out.level == Level::CorrectOk) out.detail = "fixed code parses as well as the original";
    return out;
}

CriterionResult no_new_a11y_issues(const Response& r, const CorpusCase& c,
                                   const std::vector<llm::FixSuggestion>& fixes) {
    CriterionResult out{"no-new-a11y-issues", Level::CorrectOk, {}, {}};
    for (std::size_t i = 0; i < fixes.size(); ++i) {
        const auto scope = scope_of(fixes[i], c, r);
        const auto before = check_fragment(c, scope.code);
        const auto after = check_fragment(c, fixes[i].fixed_code);
        for (const auto& [rule, n] : after.rule_counts) {
            const auto it = before.rule_counts.find(rule);
            if (n > (it == before.rule_counts.end() ? 0 : it->second)) {
                out.level = Level::Incorrect;
                out.detail += (out.detail.empty() ? "" : "; ") + ("fix " + std::to_string(i + 1) + " introduces " + rule);
            }
        }
    }
    if (out.level == Level::CorrectOk) out.detail = "no rule fires more often after the fixes";
    return out;
}

CriterionResult issues_resolved(const Response& r, const CorpusCase& c, const std::vector<llm::FixSuggestion>& fixes) {
    CriterionResult out{"issues-resolved", Level::NotApplicable, {}, {}};
    const auto tree = markup::parse_document(c.doc);
    std::vector<rules::Diagnostic> in_scope;
    for (const auto& d : rules::run_rules(tree, c.doc)) {
        if (r.code_span.contains(d.span)) in_scope.push_back(d);
    }
    if (in_scope.empty()) {
        out.detail = "no linter diagnostics in the analyzed code";
        return out;
    }
    std::vector<FixScope> scopes;
    std::vector<FragmentCheck> before, after;
    for (const auto& f : fixes) {
        scopes.push_back(scope_of(f, c, r));
        before.push_back(check_fragment(c, scopes.back().code));
        after.push_back(check_fragment(c, f.fixed_code));
    }
    std::size_t resolved = 0;
    for (const auto& d : in_scope) {
        for (std::size_t i = 0; i < fixes.size(); ++i) {
            if (!scopes[i].span.contains(d.span)) continue;
            if (after[i].rule_counts[d.rule_id] < before[i].rule_counts[d.rule_id]) {
                ++resolved;
                break;
            }
        }
    }
    out.measured = ratio(resolved, in_scope.size());
    out.detail = ratio_text(resolved, in_scope.size()) + " linter diagnostics resolved";
    out.level = resolved == 0 ? Level::Incorrect
                : resolved == in_scope.size() ? Level::CorrectOk
                                              : Level::PartialOk;
    return out;
}

// ---- ratios ---------------------------------------------------------------------

std::string describe(const MatchOutcome& m, const std::vector<llm::DetectionFinding>& items, const CorpusCase& c) {
    std::string out;
    for (const auto& match : m.matches) {
        out += "; item " + std::to_string(match.item + 1) + " -> " + c.seeded_errors[match.seed].rule_id;
        if (match.criterion_agrees) out += " (criterion agrees)";
    }
    for (auto d : m.excluded_duplicates) out += "; item " + std::to_string(d + 1) + " duplicates an earlier item";
    (void)items;
    return out;
}

CriterionResult relevance_ratio(const std::vector<llm::DetectionFinding>& items, const MatchOutcome& m,
                                const CorpusCase& c) {
    CriterionResult out{"relevance-ratio", Level::NotApplicable, {}, {}};
    if (items.empty()) {
        out.detail = "nothing reported";
        return out;
    }
    out.level = relevance_level(m.matches.size(), items.size());
    out.measured = ratio(m.matches.size(), items.size());
    out.detail = ratio_text(m.matches.size(), items.size()) + " reported items match a seeded error" +
                 describe(m, items, c);
    return out;
}

CriterionResult detection_recall(const MatchOutcome& m, const CorpusCase& c) {
    CriterionResult out{"detection-recall", Level::NotApplicable, {}, {}};
    if (c.seeded_errors.empty()) {
        out.detail = "no seeded errors";
        return out;
    }
    out.level = recall_level(m.matches.size(), c.seeded_errors.size());
    out.measured = ratio(m.matches.size(), c.seeded_errors.size());
    out.detail = ratio_text(m.matches.size(), c.seeded_errors.size()) + " seeded errors detected";
    return out;
}

CriterionResult misidentify_clean(const std::vector<llm::DetectionFinding>& items, const CorpusCase& c) {
    CriterionResult out{"misidentify-clean", Level::NotApplicable, "case has seeded errors", {}};
    if (!c.clean) return out;
    out.level = items.empty() ? Level::CorrectOk : Level::Incorrect;
    out.detail = items.empty() ? "clean code reported clean"
                               : std::to_string(items.size()) + " findings reported on clean code";
    return out;
}

CriterionResult criterion_valid(const std::vector<llm::DetectionFinding>& items, const MatchOutcome& m,
                                const CorpusCase& c) {
    CriterionResult out{"criterion-valid", Level::NotApplicable, {}, {}};
    if (items.empty()) {
        out.detail = "nothing reported";
        return out;
    }
    out.level = Level::CorrectOk;
    std::map<std::size_t, std::size_t> seed_of;
    for (const auto& match : m.matches) seed_of[match.item] = match.seed;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto label = "item " + std::to_string(i + 1);
        const auto id = rules::normalize_criterion(items[i].criterion);
        std::string problem;
        if (!id) {
            problem = "no criterion";
        } else if (!rules::find_criterion(*id)) {
            problem = "criterion " + *id + " is not in WCAG 2.2";
        } else if (auto it = seed_of.find(i);
                   it != seed_of.end() && *id != c.seeded_errors[it->second].criterion) {
            problem = "criterion " + *id + " differs from " + c.seeded_errors[it->second].criterion;
        }
        if (problem.empty()) continue;
        out.level = Level::PartialOk;
        out.detail += (out.detail.empty() ? "" : "; ") + (label + ": " + problem);
    }
    if (out.level == Level::CorrectOk) out.detail = "every criterion exists and agrees";
    return out;
}

CriterionResult duplicate_free(const std::vector<llm::DetectionFinding>& items) {
    CriterionResult out{"duplicate-free", Level::NotApplicable, {}, {}};
    if (items.empty()) {
        out.detail = "nothing reported";
        return out;
    }
    const auto d = workflows::dedupe_findings(items);
    out.measured = ratio(d.unique.size(), items.size());
    out.level = d.duplicates_removed ? Level::PartialOk : Level::CorrectOk;
    out.detail = std::to_string(d.duplicates_removed) + " duplicate findings";
    return out;
}

CriterionResult human(std::string id, std::string note) {
    return {std::move(id), Level::NotApplicable, std::move(note), {}};
}

CriterionResult not_applicable(std::string id, std::string note) {
    return {std::move(id), Level::NotApplicable, std::move(note), {}};
}

}  // namespace

Level recall_level(std::size_t matched, std::size_t total) {
    if (total == 0) return Level::NotApplicable;
    if (2 * matched <= total) return Level::Incorrect;
    if (5 * matched > 4 * total) return Level::CorrectOk;
    return Level::PartialOk;
}

Level relevance_level(std::size_t matched, std::size_t total) {
    if (total == 0) return Level::NotApplicable;
    if (2 * matched < total) return Level::Incorrect;
    if (5 * matched > 4 * total) return Level::CorrectOk;
    return Level::PartialOk;
}

std::vector<CriterionResult> check_criteria(const Response& response, const CorpusCase& c, UseCase use_case) {
    std::vector<CriterionResult> out;
    out.push_back(json_valid(response));
    out.push_back(fields_populated(response, use_case));

    const bool have_fixes = usable(response.fixes);
    const auto fixes = have_fixes ? response.fixes->fixes() : std::vector<llm::FixSuggestion>{};
    const std::string no_fixes = "no parsed fixes";
    if (have_fixes) {
        out.push_back(code_integrity(response, c, fixes));
        out.push_back(no_new_syntax_break(response, c, fixes));
        out.push_back(no_new_a11y_issues(response, c, fixes));
        out.push_back(issues_resolved(response, c, fixes));
    } else {
        for (auto id : {"code-integrity", "no-new-syntax-break", "no-new-a11y-issues", "issues-resolved"}) {
            out.push_back(not_applicable(id, no_fixes));
        }
    }

    if (use_case == UseCase::FixWithAI) {
        if (have_fixes) {
            // Suggestions are alternatives for the same diagnostics, so
            // repeats are not treated as duplicates.
            auto items = as_findings(fixes);
            // A suggestion that quotes no code refers to the code it was given.
            for (auto& item : items) {
                if (workflows::normalize_whitespace(item.offending_code).empty()) {
                    item.offending_code = markup::slice(c.doc, response.code_span);
                }
            }
            out.push_back(relevance_ratio(items, match_findings(items, c, false), c));
        } else {
            out.push_back(not_applicable("relevance-ratio", no_fixes));
        }
    } else {
        if (usable(response.detection)) {
            const auto items = response.detection->findings();
            const auto unique_matches = match_findings(items, c, true);
            out.push_back(relevance_ratio(items, unique_matches, c));
            out.push_back(detection_recall(unique_matches, c));
            out.push_back(misidentify_clean(items, c));
            out.push_back(criterion_valid(items, unique_matches, c));
            out.push_back(duplicate_free(items));
        } else {
            for (auto id : {"relevance-ratio", "detection-recall", "misidentify-clean", "criterion-valid",
                            "duplicate-free"}) {
                out.push_back(not_applicable(id, "no parsed findings"));
            }
        }
    }
    out.push_back(human("contextual-relevance", "needs human judgment"));
    out.push_back(human("logical-errors", "needs human judgment"));
    return out;
}

Verdict classify(std::vector<CriterionResult> criteria, UseCase use_case) {
    std::size_t applicable = 0;
    std::size_t correct = 0;
    bool incorrect = false;
    for (const auto& c : criteria) {
        if (c.level == Level::NotApplicable) continue;
        ++applicable;
        correct += c.level == Level::CorrectOk;
        incorrect = incorrect || c.level == Level::Incorrect;
    }
    if (applicable == 0) throw EvaluationError("no criterion is applicable");
    Classification cls = incorrect                  ? Classification::Incorrect
                         : 2 * correct > applicable ? Classification::Correct
                                                    : Classification::PartiallyCorrect;
    return {cls, std::move(criteria), use_case};
}

Response response_of(const workflows::FixWithAiResult& result) {
    return {std::nullopt, result.parse, result.source_span};
}

Response response_of(const workflows::CheckAndFixResult& result) {
    return {result.detect_parse, result.chain_parse, result.report.metadata.selection};
}

std::string_view to_string(Level level) {
    switch (level) {
        case Level::Incorrect: return "Incorrect";
        case Level::PartialOk: return "PartialOk";
        case Level::CorrectOk: return "CorrectOk";
        case Level::NotApplicable: return "NotApplicable";
    }
    return "unknown";
}

std::string_view to_string(Classification c) {
    switch (c) {
        case Classification::Correct: return "Correct";
        case Classification::PartiallyCorrect: return "PartiallyCorrect";
        case Classification::Incorrect: return "Incorrect";
    }
    return "unknown";
}

std::string_view to_string(UseCase u) {
    return u == UseCase::FixWithAI ? "FixWithAI" : "CheckAndFixWithAI";
}

UseCase use_case_from_string(std::string_view name) {
    if (name == "fix" || name == "FixWithAI") return UseCase::FixWithAI;
    if (name == "check" || name == "CheckAndFixWithAI") return UseCase::CheckAndFixWithAI;
    throw ConfigError("unknown use case '" + std::string(name) + "' (expected fix or check)");
}

}  // namespace a11y::eval

#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "a11y/markup.hpp"

namespace a11y::rules {

// ---- WCAG 2.2 success criteria ---------------------------------------------

enum class Level { A, AA, AAA };
enum class WcagVersion { V2_0, V2_1, V2_2 };

struct WcagCriterion {
    std::string_view id;  // dotted number, e.g. "2.1.1"
    std::string_view name;
    Level level;
    WcagVersion version_introduced;
};

std::string_view to_string(Level level);

// Every WCAG 2.2 success criterion (4.1.1 was removed in 2.2 and is absent).
std::span<const WcagCriterion> wcag_criteria();
const WcagCriterion* find_criterion(std::string_view id);

// Pulls the first "x.y.z" token out of free text such as "WCAG 2.1.1 Keyboard".
std::optional<std::string> normalize_criterion(std::string_view text);

// ---- ARIA 1.2 vocabulary ----------------------------------------------------

bool is_valid_role(std::string_view role);
bool is_interactive_role(std::string_view role);
bool is_aria_property(std::string_view name);

// ---- Rule catalog -----------------------------------------------------------

enum class Applicability { NativeOnly, All };
enum class Severity { Error, Warning };

struct RuleDescriptor {
    std::string_view id;
    std::string_view summary;  // may contain {tag}, {attr}, {value}
    std::vector<std::string_view> wcag_criteria;
    Applicability applicability;
    std::string_view doc_url;
};

struct Diagnostic {
    std::string rule_id;
    std::string message;
    markup::Span span;
    std::string wcag_criterion;
    Severity severity = Severity::Error;

    friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

using Ancestry = std::span<const markup::ElementNode* const>;
using Checker = std::vector<Diagnostic> (*)(const markup::ElementNode&, Ancestry,
                                            const markup::SourceDocument&);

struct Rule {
    RuleDescriptor descriptor;
    Checker check;
};

std::span<const Rule> catalog();
const RuleDescriptor* find_rule(std::string_view id);
std::set<std::string> all_rule_ids();

// Runs the enabled rules over every element. Output is sorted by span start,
// then rule id. Throws ConfigError for an unknown id in `enabled`.
std::vector<Diagnostic> run_rules(const markup::ElementTree& tree, const markup::SourceDocument& doc,
                                  const std::set<std::string>& enabled);

std::vector<Diagnostic> run_rules(const markup::ElementTree& tree, const markup::SourceDocument& doc);

}  // namespace a11y::rules

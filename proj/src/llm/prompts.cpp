#include <algorithm>
#include <cctype>

#include "a11y/errors.hpp"
#include "a11y/llm.hpp"

namespace a11y::llm {

namespace {

std::string dump(const Json& j) { return j.dump(2, ' ', false, Json::error_handler_t::replace); }

}  // namespace

std::string render_diagnostics(const std::vector<rules::Diagnostic>& diagnostics) {
    Json list = Json::array();
    for (const auto& d : diagnostics) {
        list.push_back({
            {"rule_id", d.rule_id},
            {"criterion", d.wcag_criterion},
            {"message", d.message},
            {"start", {{"line", d.span.start_line}, {"column", d.span.start_col}}},
            {"end", {{"line", d.span.end_line}, {"column", d.span.end_col}}},
        });
    }
    return dump(list);
}

std::string render_findings(const std::vector<DetectionFinding>& findings) {
    Json list = Json::array();
    for (const auto& f : findings) {
        list.push_back({
            {"error_description", f.error_description},
            {"offending_code", f.offending_code},
            {"criterion", f.criterion},
        });
    }
    return dump(list);
}

std::string render_records(const std::vector<Record>& records) {
    Json list = Json::array();
    for (const auto& r : records) list.push_back(r.raw);
    return dump(list);
}

std::string build_fix_prompt(const TemplateSet& templates, std::string_view code,
                             const std::vector<rules::Diagnostic>& diagnostics) {
    if (diagnostics.empty()) throw PreconditionError("a fix prompt needs at least one diagnostic");
    return templates.get(TemplateId::FixPrompt)
        .render({{"code", std::string(code)}, {"diagnostics", render_diagnostics(diagnostics)}});
}

std::string build_detect_prompt(const TemplateSet& templates, std::string_view code) {
    const bool blank = std::all_of(code.begin(), code.end(), [](unsigned char c) { return std::isspace(c); });
    if (blank) throw PreconditionError("cannot analyze an empty selection");
    return templates.get(TemplateId::DetectPrompt).render({{"code", std::string(code)}});
}

std::string build_chain_fix_prompt(const TemplateSet& templates, std::string_view code,
                                   const std::vector<Record>& findings) {
    return templates.get(TemplateId::ChainFixPrompt)
        .render({{"code", std::string(code)}, {"findings", render_records(findings)}});
}

std::string build_chain_fix_prompt(const TemplateSet& templates, std::string_view code,
                                   const std::vector<DetectionFinding>& findings) {
    return templates.get(TemplateId::ChainFixPrompt)
        .render({{"code", std::string(code)}, {"findings", render_findings(findings)}});
}

}  // namespace a11y::llm

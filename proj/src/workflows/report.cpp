#include "a11y/workflows.hpp"
#include "internal.hpp"

namespace a11y::workflows {

namespace fs = std::filesystem;

namespace {

void append_lines(std::string& out, std::string_view indent, std::string_view text) {
    std::size_t pos = 0;
    while (true) {
        const auto nl = text.find('\n', pos);
        auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        out += line.empty() ? std::string_view() : indent;
        out += line;
        out += '\n';
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
}

void text_field(std::string& out, std::string_view label, std::string_view value) {
    if (value.find('\n') == std::string_view::npos) {
        out += "   ";
        out += label;
        out += ": ";
        out += value;
        out += '\n';
        return;
    }
    out += "   ";
    out += label;
    out += ":\n";
    append_lines(out, "     ", value);
}

void code_field(std::string& out, std::string_view label, std::string_view value) {
    out += "   ";
    out += label;
    out += ":\n";
    if (value.empty()) {
        out += "     (none)\n";
        return;
    }
    append_lines(out, "     ", value);
}

void numbered(std::string& out, std::size_t index, std::string_view description) {
    const auto first_nl = description.find('\n');
    out += std::to_string(index + 1);
    out += ". Error: ";
    out += description.substr(0, first_nl);
    out += '\n';
    if (first_nl != std::string_view::npos) append_lines(out, "   ", description.substr(first_nl + 1));
}

void render_fix(std::string& out, std::size_t index, const llm::FixSuggestion& fix) {
    numbered(out, index, fix.error_description);
    code_field(out, "Offending code", fix.offending_code);
    if (fix.criterion) text_field(out, "Criterion", *fix.criterion);
    text_field(out, "Fix", fix.fix_description);
    code_field(out, "Fixed code", fix.fixed_code);
}

std::string span_label(const markup::Span& s) {
    return std::to_string(s.start_line) + ":" + std::to_string(s.start_col) + "-" + std::to_string(s.end_line) + ":" +
           std::to_string(s.end_col);
}

fs::path output_path(const markup::SourceDocument& doc, const WorkflowOptions& options, std::string_view suffix) {
    const fs::path source(doc.path());
    const auto name = source.stem().string() + std::string(suffix);
    if (options.output_dir) return *options.output_dir / name;
    return source.parent_path() / name;
}

}  // namespace

namespace detail {

std::string file_name(const markup::SourceDocument& doc) { return fs::path(doc.path()).filename().string(); }

}  // namespace detail

std::string_view to_string(ReportStatus status) {
    switch (status) {
        case ReportStatus::Complete: return "complete";
        case ReportStatus::DetectFailed: return "detect-failed";
        case ReportStatus::ChainFailed: return "fix-failed";
        case ReportStatus::Cancelled: return "cancelled";
    }
    return "unknown";
}

fs::path sidecar_path_for(const markup::SourceDocument& doc, const WorkflowOptions& options) {
    return output_path(doc, options, ".a11y-fix.txt");
}

fs::path report_path_for(const markup::SourceDocument& doc, const WorkflowOptions& options) {
    return output_path(doc, options, ".a11y-report.txt");
}

std::string render_report(const A11yReport& report) {
    const auto& meta = report.metadata;
    std::string out = "ACCESSIBILITY REPORT\n";
    out += "Document: " + meta.document + "\n";
    out += "Selection: " + span_label(meta.selection) + "\n";
    out += "Model: " + meta.model + "\n";
    out += "Timestamp: " + meta.timestamp + "\n";
    out += "Status: " + std::string(to_string(report.status)) + "\n";
    if (meta.dedupe) {
        out += "Dedupe: on, " + std::to_string(meta.duplicates_removed) + " duplicate finding" +
               (meta.duplicates_removed == 1 ? "" : "s") + " removed\n";
    } else {
        out += "Dedupe: off\n";
    }
    out += "Orphan fixes: ";
    if (meta.orphan_fixes.empty()) out += "none";
    for (std::size_t i = 0; i < meta.orphan_fixes.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(meta.orphan_fixes[i] + 1);
    }
    out += "\n\n== CODE ==\n";
    out += report.code_section;
    if (!report.code_section.empty() && report.code_section.back() != '\n') out += '\n';

    out += "\n== ERRORS ==\n";
    if (report.status == ReportStatus::DetectFailed) {
        out += "not available: the detection response could not be parsed\n";
    } else if (report.errors_section.empty()) {
        out += "none found\n";
    }
    for (std::size_t i = 0; i < report.errors_section.size(); ++i) {
        const auto& e = report.errors_section[i];
        if (i) out += '\n';
        numbered(out, i, e.error_description);
        code_field(out, "Offending code", e.offending_code);
        text_field(out, "Criterion", e.criterion.empty() ? "(not given)" : e.criterion);
    }

    out += "\n== FIXES ==\n";
    switch (report.status) {
        case ReportStatus::DetectFailed: out += "not available: no errors to fix\n"; break;
        case ReportStatus::ChainFailed: out += "not available: the fix response could not be parsed\n"; break;
        case ReportStatus::Cancelled: out += "not available: the request was cancelled\n"; break;
        case ReportStatus::Complete:
            if (report.fixes_section.empty()) out += "none found\n";
            break;
    }
    for (std::size_t i = 0; i < report.fixes_section.size(); ++i) {
        if (i) out += '\n';
        render_fix(out, i, report.fixes_section[i]);
    }

    if (report.raw_detect_response) {
        out += "\n== RAW DETECTION RESPONSE ==\n";
        out += *report.raw_detect_response;
        if (report.raw_detect_response->empty() || report.raw_detect_response->back() != '\n') out += '\n';
    }
    if (report.raw_chain_response) {
        out += "\n== RAW FIX RESPONSE ==\n";
        out += *report.raw_chain_response;
        if (report.raw_chain_response->empty() || report.raw_chain_response->back() != '\n') out += '\n';
    }
    return out;
}

std::string render_sidecar(const markup::SourceDocument& doc, const FixWithAiResult& result) {
    std::string out = "FIX SUGGESTIONS\n";
    out += "Document: " + detail::file_name(doc) + "\n";
    out += "Code: " + span_label(result.source_span) + "\n";
    out += "Model: " + result.exchange.model + "\n";
    out += "Timestamp: " + result.exchange.timestamp + "\n";
    out += "Diagnostics:\n";
    for (const auto& d : result.diagnostics) {
        out += "  " + span_label(d.span) + " " + d.rule_id + " (" + d.wcag_criterion + ")\n";
    }
    if (!result.ok()) {
        out += "\nRAW RESPONSE (unparseable)\n";
        out += result.exchange.raw_response;
        if (result.exchange.raw_response.empty() || result.exchange.raw_response.back() != '\n') out += '\n';
        return out;
    }
    out += "Annotation: " + result.annotation_id + "\n\n";
    if (result.suggestions.empty()) out += "No fix suggestions were returned.\n";
    for (std::size_t i = 0; i < result.suggestions.size(); ++i) {
        if (i) out += '\n';
        render_fix(out, i, result.suggestions[i]);
    }
    return out;
}

}  // namespace a11y::workflows

// Regenerates corpus/cases/*/fixtures from the scripted model answers in
// corpus/cases/*/script. Every prompt the CLI, the evaluator or the language
// server can send for a case is issued once, so the replay provider can
// answer all of them.
//
// With --golden it also writes the expected CLI and language server outputs
// for the Tooltip case to <corpus-dir>/golden/01-tooltip.
//
//   record_fixtures <corpus-dir> [--golden]

#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "a11y/errors.hpp"
#include "a11y/evaluator.hpp"
#include "a11y/workflows.hpp"

namespace fs = std::filesystem;
using namespace a11y;

namespace {

constexpr std::string_view kTimestamp = "2024-06-01T12:00:00Z";

std::string read_script(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

llm::ScriptedProvider scripted(const fs::path& script, bool dedupe) {
    return llm::ScriptedProvider(
        [script, dedupe](const llm::CompletionRequest& r) {
            switch (r.template_id) {
                case llm::TemplateId::DetectPrompt: return read_script(script / "detect.txt");
                case llm::TemplateId::ChainFixPrompt:
                    if (!dedupe && fs::exists(script / "chain_fix.no-dedupe.txt")) {
                        return read_script(script / "chain_fix.no-dedupe.txt");
                    }
                    return read_script(script / "chain_fix.txt");
                case llm::TemplateId::FixPrompt: return read_script(script / "fix.txt");
            }
            return std::string();
        },
        std::string(kTimestamp));
}

using DiagnosticSet = std::vector<rules::Diagnostic>;

std::string set_key(const DiagnosticSet& set) {
    std::string key;
    for (const auto& d : set) key += d.rule_id + "@" + std::to_string(d.span.start) + "-" + std::to_string(d.span.end) + ";";
    return key;
}

// Every diagnostic subset a front end can hand to the fix workflow.
std::vector<DiagnosticSet> fix_sets(const eval::CorpusCase& c, const DiagnosticSet& all) {
    std::vector<DiagnosticSet> sets;
    std::set<std::string> seen;
    auto add = [&](DiagnosticSet s) {
        if (!s.empty() && seen.insert(set_key(s)).second) sets.push_back(std::move(s));
    };
    auto overlapping = [&](const markup::Span& probe) {
        DiagnosticSet s;
        for (const auto& d : all) {
            if (d.span.overlaps(probe)) s.push_back(d);
        }
        return s;
    };
    add(overlapping(c.selection));
    add(all);
    for (const auto& d : all) add(overlapping(d.span));
    for (std::uint32_t line = 1; line <= c.doc.line_starts().size(); ++line) {
        DiagnosticSet s;
        for (const auto& d : all) {
            if (d.span.start_line <= line && d.span.end_line >= line) s.push_back(d);
        }
        add(std::move(s));
    }
    return sets;
}

std::size_t record_case(const eval::CorpusCase& c) {
    const auto script = c.dir / "script";
    const auto out = c.dir / "fixtures";
    fs::remove_all(out);
    fs::create_directories(out);

    workflows::WorkflowOptions options;
    options.write_files = false;

    const auto whole = c.doc.span(0, c.doc.text().size());
    for (bool dedupe : {true, false}) {
        auto inner = scripted(script, dedupe);
        llm::RecordingProvider recorder(inner, out);
        options.dedupe = dedupe;
        workflows::run_check_and_fix(c.doc, c.selection, recorder, options);
        workflows::run_check_and_fix(c.doc, whole, recorder, options);
    }

    options.dedupe = true;
    const auto tree = markup::parse_document(c.doc);
    const auto all = rules::run_rules(tree, c.doc);
    auto inner = scripted(script, true);
    llm::RecordingProvider recorder(inner, out);
    for (const auto& set : fix_sets(c, all)) workflows::run_fix_with_ai(c.doc, set, recorder, options);

    return static_cast<std::size_t>(std::distance(fs::directory_iterator(out), fs::directory_iterator{}));
}

// Annotated source, sidecar and report for the Tooltip case, produced by the
// workflows against the freshly recorded fixtures.
void write_golden(const eval::CorpusCase& c, const fs::path& corpus) {
    const auto dir = corpus / "golden" / c.id;
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto source = dir / "Tooltip.js";
    fs::copy_file(c.dir / "input.js", source);

    llm::ReplayProvider replay(c.dir / "fixtures");
    workflows::WorkflowOptions options;
    const auto doc = markup::SourceDocument::load(source.string());
    workflows::run_check_and_fix(doc, doc.span(c.selection.start, c.selection.end), replay, options);

    const auto tree = markup::parse_document(doc);
    options.insert_annotation = true;
    workflows::run_fix_with_ai(doc, rules::run_rules(tree, doc), replay, options);
    fs::rename(source, dir / "Tooltip.annotated.js");
}

}  // namespace

int main(int argc, char** argv) {
    const bool golden = argc == 3 && std::string_view(argv[2]) == "--golden";
    if (argc != 2 && !golden) {
        std::cerr << "usage: record_fixtures <corpus-dir> [--golden]\n";
        return 2;
    }
    try {
        for (const auto& c : eval::load_corpus(argv[1])) {
            std::cout << c.id << ": " << record_case(c) << " fixtures\n";
            if (golden && c.id == "01-tooltip") write_golden(c, argv[1]);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

#include <algorithm>
#include <fstream>

#include "a11y/errors.hpp"
#include "a11y/evaluator.hpp"

namespace a11y::eval {

namespace fs = std::filesystem;

namespace {

markup::Span read_span(const llm::Json& j, const markup::SourceDocument& doc, const std::string& what) {
    const auto start = j.at("start").get<std::size_t>();
    const auto end = j.at("end").get<std::size_t>();
    if (start > end || end > doc.text().size()) throw ConfigError(what + " lies outside " + doc.path());
    return doc.span(start, end);
}

}  // namespace

CorpusCase CorpusCase::load(const fs::path& dir) {
    std::ifstream in(dir / "case.json", std::ios::binary);
    if (!in) throw ConfigError("cannot read " + (dir / "case.json").string());
    const auto meta = llm::Json::parse(in, nullptr, false);
    if (meta.is_discarded() || !meta.is_object()) throw ConfigError((dir / "case.json").string() + " is not JSON");
    try {
        auto doc = markup::SourceDocument::load((dir / meta.at("input").get<std::string>()).string());
        auto selection = read_span(meta.at("selection"), doc, "selection");
        CorpusCase c{meta.at("id").get<std::string>(), std::move(doc), selection, {}, meta.value("clean", false), dir};
        for (const auto& s : meta.value("seeded_errors", llm::Json::array())) {
            SeededError seed{s.at("rule_id").get<std::string>(), s.at("criterion").get<std::string>(),
                             read_span(s.at("offending_span"), c.doc, "seeded error"),
                             s.at("canonical_offending_code").get<std::string>()};
            if (workflows::normalize_whitespace(markup::slice(c.doc, seed.offending_span)) !=
                workflows::normalize_whitespace(seed.canonical_offending_code)) {
                throw ConfigError("seeded error " + seed.rule_id + " in " + c.id +
                                  " does not match the code at its span");
            }
            c.seeded_errors.push_back(std::move(seed));
        }
        if (c.clean && !c.seeded_errors.empty()) throw ConfigError("clean case " + c.id + " has seeded errors");
        return c;
    } catch (const llm::Json::exception& e) {
        throw ConfigError((dir / "case.json").string() + ": " + e.what());
    }
}

std::vector<CorpusCase> load_corpus(const fs::path& root) {
    const auto base = fs::is_directory(root / "cases") ? root / "cases" : root;
    if (!fs::is_directory(base)) throw ConfigError("corpus directory not found: " + root.string());
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(base)) {
        if (entry.is_directory() && fs::exists(entry.path() / "case.json")) dirs.push_back(entry.path());
    }
    std::sort(dirs.begin(), dirs.end());
    std::vector<CorpusCase> cases;
    for (const auto& d : dirs) cases.push_back(CorpusCase::load(d));
    return cases;
}

}  // namespace a11y::eval

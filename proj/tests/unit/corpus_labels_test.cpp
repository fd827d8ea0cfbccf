#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <tuple>

#include <nlohmann/json.hpp>

#include "a11y/markup.hpp"
#include "a11y/rules.hpp"

using namespace a11y;
namespace fs = std::filesystem;
using Label = std::tuple<int, int, std::string>;

namespace {

nlohmann::json read_json(const fs::path& p) {
    std::ifstream in(p);
    return nlohmann::json::parse(in);
}

std::vector<fs::path> case_dirs() {
    std::vector<fs::path> dirs;
    for (const auto& e : fs::directory_iterator(fs::path(A11Y_CORPUS_DIR) / "cases")) dirs.push_back(e.path());
    std::sort(dirs.begin(), dirs.end());
    return dirs;
}

std::multiset<Label> labels_of(const nlohmann::json& meta) {
    std::multiset<Label> out;
    for (const auto& d : meta["expected_diagnostics"]) {
        out.emplace(d["line"].get<int>(), d["col"].get<int>(), d["rule_id"].get<std::string>());
    }
    return out;
}

}  // namespace

TEST(CorpusLabels, ThirtyCases) { EXPECT_EQ(case_dirs().size(), 30u); }

TEST(CorpusLabels, EngineMatchesHandLabels) {
    for (const auto& dir : case_dirs()) {
        const auto meta = read_json(dir / "case.json");
        auto doc = markup::SourceDocument::load((dir / meta["input"].get<std::string>()).string());
        auto tree = markup::parse_document(doc);
        std::multiset<Label> got;
        for (const auto& d : rules::run_rules(tree, doc)) {
            got.emplace(d.span.start_line, d.span.start_col, d.rule_id);
        }
        EXPECT_EQ(got, labels_of(meta)) << dir.filename();
    }
}

// The hand labels agree with the recorded reference linter run, up to the
// rule mapping and the documented differences.
TEST(CorpusLabels, LabelsAgreeWithReferenceLinter) {
    const auto reference = read_json(fs::path(A11Y_CORPUS_DIR) / "reference" / "jsx-a11y.json");
    const auto map = read_json(fs::path(A11Y_CORPUS_DIR) / "reference" / "rule-map.json");
    std::set<std::string> unmapped;
    for (const auto& r : map["without_reference_rule"]) unmapped.insert(r.get<std::string>());

    std::size_t compared = 0;
    for (const auto& dir : case_dirs()) {
        const auto id = dir.filename().string();
        if (!reference["cases"].contains(id)) continue;
        ++compared;
        std::multiset<Label> expected;
        for (const auto& l : labels_of(read_json(dir / "case.json"))) {
            if (!unmapped.count(std::get<2>(l))) expected.insert(l);
        }
        std::multiset<Label> ref;
        for (const auto& m : reference["cases"][id]) {
            const auto rule = m["rule"].get<std::string>();
            ASSERT_TRUE(map["rules"].contains(rule)) << rule;
            ref.emplace(m["line"].get<int>(), m["col"].get<int>(), map["rules"][rule].get<std::string>());
        }
        for (const auto& diff : map["known_differences"]) {
            if (diff["case"] != id) continue;
            for (const auto& m : diff["reference_only"]) {
                auto it = ref.find(Label{m["line"].get<int>(), m["col"].get<int>(), m["rule"].get<std::string>()});
                ASSERT_NE(it, ref.end()) << id;
                ref.erase(it);
            }
        }
        EXPECT_EQ(expected, ref) << id;
    }
    EXPECT_EQ(compared, 24u);
}

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "a11y/cli.hpp"
#include "a11y/errors.hpp"

using namespace a11y;
using namespace a11y::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kCorpus = A11Y_CORPUS_DIR;
const fs::path kTooltip = kCorpus / "cases" / "01-tooltip";

std::string read(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("a11y_cli_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

struct Run {
    int code;
    std::string out;
    std::string err;
};

template <typename Fn>
Run capture(Fn&& fn) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = fn(Streams{out, err});
    return {code, out.str(), err.str()};
}

CommonOptions tooltip_options(const fs::path& out_dir) {
    CommonOptions o;
    o.fixtures = {kTooltip / "fixtures"};
    o.out_dir = out_dir;
    return o;
}

fs::path tooltip_copy(const fs::path& dir) {
    fs::copy_file(kTooltip / "input.js", dir / "Tooltip.js", fs::copy_options::overwrite_existing);
    return dir / "Tooltip.js";
}

int shell(const std::string& command) {
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Cli, ParsePosition) {
    const auto p = parse_position("12:4");
    EXPECT_EQ(p.line, 12u);
    EXPECT_EQ(p.col, 4u);
    EXPECT_THROW(parse_position("0:4"), ConfigError);
    EXPECT_THROW(parse_position("12"), ConfigError);
    EXPECT_THROW(parse_position("a:b"), ConfigError);
    EXPECT_THROW(parse_position("3:"), ConfigError);
}

TEST(Cli, ScanExitCodes) {
    const auto dir = scratch("scan");
    const auto tooltip = tooltip_copy(dir);
    const auto flagged = capture([&](Streams io) { return cmd_scan({tooltip.string()}, {}, io); });
    EXPECT_EQ(flagged.code, kFindings);
    EXPECT_EQ(flagged.out, tooltip.string() +
                               ":13:6 click-events-have-key-events [WCAG 2.1.1] Visible, non-interactive elements "
                               "with click handlers must have at least one keyboard listener\n" +
                               tooltip.string() +
                               ":13:6 no-noninteractive-element-interactions [WCAG 4.1.2] Non-interactive elements "
                               "should not be assigned mouse or keyboard event listeners\n");

    const auto clean_path = (kCorpus / "cases" / "03-img-with-alt-clean" / "input.jsx").string();
    const auto clean = capture([&](Streams io) { return cmd_scan({clean_path}, {}, io); });
    EXPECT_EQ(clean.code, kOk);
    EXPECT_EQ(clean.out, "");

    const auto missing = capture([&](Streams io) { return cmd_scan({(dir / "nope.jsx").string()}, {}, io); });
    EXPECT_EQ(missing.code, kError);
    EXPECT_NE(missing.err.find("nope.jsx"), std::string::npos);

    // A missing file does not stop the others.
    const auto mixed =
        capture([&](Streams io) { return cmd_scan({(dir / "nope.jsx").string(), tooltip.string()}, {}, io); });
    EXPECT_EQ(mixed.code, kError);
    EXPECT_EQ(mixed.out, flagged.out);
}

TEST(Cli, ScanKeepsInputOrderAndMirrorsJson) {
    std::vector<std::string> paths;
    for (const auto& entry : fs::directory_iterator(kCorpus / "cases")) {
        for (const auto& f : fs::directory_iterator(entry.path())) {
            if (f.path().stem() == "input") paths.push_back(f.path().string());
        }
    }
    std::sort(paths.begin(), paths.end());
    CommonOptions serial;
    serial.jobs = 1;
    CommonOptions parallel;
    parallel.jobs = 8;
    const auto a = capture([&](Streams io) { return cmd_scan(paths, serial, io); });
    const auto b = capture([&](Streams io) { return cmd_scan(paths, parallel, io); });
    EXPECT_EQ(a.code, kFindings);
    EXPECT_EQ(a.out, b.out);

    parallel.json = true;
    const auto j = capture([&](Streams io) { return cmd_scan(paths, parallel, io); });
    const auto parsed = llm::Json::parse(j.out);
    std::size_t lines = std::count(a.out.begin(), a.out.end(), '\n');
    EXPECT_EQ(parsed["diagnostics"].size(), lines);
    EXPECT_TRUE(parsed["errors"].empty());
}

TEST(Cli, RuleFilterAndUnknownRule) {
    const auto dir = scratch("rules");
    const auto tooltip = tooltip_copy(dir);
    CommonOptions one;
    one.rules = "click-events-have-key-events";
    const auto r = capture([&](Streams io) { return cmd_scan({tooltip.string()}, one, io); });
    EXPECT_EQ(r.code, kFindings);
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 1);
    CommonOptions bad;
    bad.rules = "no-such-rule";
    const auto e = capture([&](Streams io) { return cmd_scan({tooltip.string()}, bad, io); });
    EXPECT_EQ(e.code, kError);
    EXPECT_NE(e.err.find("unknown rule id 'no-such-rule'"), std::string::npos);
}

TEST(Cli, FixLineAndAll) {
    const auto dir = scratch("fix");
    const auto tooltip = tooltip_copy(dir);
    const auto options = tooltip_options(dir / "out");

    const auto none = capture([&](Streams io) { return cmd_fix(tooltip.string(), {1, false}, options, io); });
    EXPECT_EQ(none.code, kError);
    EXPECT_EQ(none.err, "error: no diagnostics at line 1\n");

    const auto line = capture([&](Streams io) { return cmd_fix(tooltip.string(), {13, false}, options, io); });
    EXPECT_EQ(line.code, kOk) << line.err;
    const auto golden = read(kCorpus / "golden" / "01-tooltip" / "Tooltip.annotated.js");
    const auto source = read(tooltip);
    EXPECT_EQ(source, read(kTooltip / "input.js"));
    const auto preview = line.out.substr(0, line.out.find("sidecar: "));
    // The preview is exactly the block the annotated golden file gained after line 13.
    std::size_t line14 = 0;
    for (int i = 0; i < 13; ++i) line14 = source.find('\n', line14) + 1;
    EXPECT_EQ(source.substr(0, line14) + preview + source.substr(line14), golden);
    EXPECT_NE(line.out.find("sidecar: " + (dir / "out" / "Tooltip.a11y-fix.txt").string()), std::string::npos);

    const auto all = capture([&](Streams io) { return cmd_fix(tooltip.string(), {std::nullopt, true}, options, io); });
    EXPECT_EQ(all.code, kOk);
    EXPECT_EQ(all.out, line.out);

    const auto both = capture([&](Streams io) { return cmd_fix(tooltip.string(), {13, true}, options, io); });
    EXPECT_EQ(both.code, kError);
    const auto neither = capture([&](Streams io) { return cmd_fix(tooltip.string(), {}, options, io); });
    EXPECT_EQ(neither.code, kError);
}

TEST(Cli, CheckPrintsReportPath) {
    const auto dir = scratch("check");
    const auto tooltip = tooltip_copy(dir);
    auto options = tooltip_options(dir / "out");
    const auto r = capture([&](Streams io) { return cmd_check(tooltip.string(), "12:4", "15:10", options, io); });
    EXPECT_EQ(r.code, kFindings) << r.err;
    const auto report_path = dir / "out" / "Tooltip.a11y-report.txt";
    EXPECT_EQ(r.out, report_path.string() + "\n");
    const auto report = read(report_path);
    EXPECT_EQ(report.substr(0, report.find("Timestamp:")),
              "ACCESSIBILITY REPORT\nDocument: Tooltip.js\nSelection: 12:4-15:10\nModel: codellama\n");
    EXPECT_EQ(report, read(kCorpus / "golden" / "01-tooltip" / "Tooltip.a11y-report.txt"));
    EXPECT_EQ(read(tooltip), read(kTooltip / "input.js"));

    options.no_dedupe = true;
    options.json = true;
    const auto j = capture([&](Streams io) { return cmd_check(tooltip.string(), "12:4", "15:10", options, io); });
    const auto parsed = llm::Json::parse(j.out);
    EXPECT_EQ(parsed["errors"], 4);
    EXPECT_EQ(parsed["status"], "complete");

    // No recorded answer for this selection.
    const auto miss = capture([&](Streams io) { return cmd_check(tooltip.string(), "12:5", "15:10", options, io); });
    EXPECT_EQ(miss.code, kError);
    EXPECT_NE(miss.err.find("no replay fixture"), std::string::npos);

    const auto reversed = capture([&](Streams io) { return cmd_check(tooltip.string(), "15:10", "12:4", options, io); });
    EXPECT_EQ(reversed.code, kError);
}

TEST(Cli, EvalIsDeterministicAndReportsIncorrect) {
    const auto dir = scratch("eval");
    auto run = [&](const std::string& name) {
        CommonOptions o;
        o.out_dir = dir / name;
        return capture([&](Streams io) { return cmd_eval(kCorpus.string(), {}, o, io); });
    };
    const auto first = run("a");
    const auto second = run("b");
    EXPECT_EQ(first.code, kFindings) << first.err;
    EXPECT_EQ(first.out, second.out);
    EXPECT_EQ(read(dir / "a" / "results.json"), read(dir / "b" / "results.json"));
    EXPECT_EQ(read(dir / "a" / "summary.txt"), read(dir / "b" / "summary.txt"));
    EXPECT_EQ(first.out, read(dir / "a" / "summary.txt"));

    CommonOptions missing;
    missing.out_dir = dir / "c";
    const auto bad = capture([&](Streams io) { return cmd_eval((dir / "nowhere").string(), {}, missing, io); });
    EXPECT_EQ(bad.code, kError);
}

TEST(Cli, EvalWithUnusableFixturesMarksErrors) {
    const auto dir = scratch("eval_err");
    CommonOptions o;
    o.out_dir = dir / "out";
    o.fixtures = {dir};  // empty: every model call misses
    const auto r = capture(
        [&](Streams io) { return cmd_eval(kCorpus.string(), {eval::UseCase::FixWithAI}, o, io); });
    EXPECT_EQ(r.code, kError);
    EXPECT_NE(r.err.find("could not be evaluated"), std::string::npos);
}

TEST(Cli, ConfigInitShowAndLayering) {
    const auto dir = scratch("config");
    const auto init = capture([&](Streams io) { return cmd_config_init(dir, io); });
    EXPECT_EQ(init.code, kOk);
    const auto again = capture([&](Streams io) { return cmd_config_init(dir, io); });
    EXPECT_EQ(again.code, kError);

    CommonOptions o;
    o.config = dir / "a11y-forge.toml";
    auto cfg = resolve_config(o, dir);
    EXPECT_EQ(cfg.fixtures, (std::vector<fs::path>{dir / "fixtures"}));
    EXPECT_EQ(cfg.debounce, std::chrono::milliseconds(300));

    // Discovered from the working directory; flags beat the environment.
    ::setenv("A11Y_FORGE_ENDPOINT", "http://env:1", 1);
    cfg = resolve_config({}, dir);
    EXPECT_EQ(cfg.endpoint, "http://env:1");
    o.endpoint = "http://flag:2";
    o.no_dedupe = true;
    o.provider = "live";
    cfg = resolve_config(o, dir);
    ::unsetenv("A11Y_FORGE_ENDPOINT");
    EXPECT_EQ(cfg.endpoint, "http://flag:2");
    EXPECT_FALSE(cfg.dedupe);
    EXPECT_EQ(cfg.provider, config::ProviderKind::Live);

    o.provider = "cloud";
    EXPECT_THROW(resolve_config(o, dir), ConfigError);

    CommonOptions show;
    show.config = dir / "a11y-forge.toml";
    show.json = true;
    const auto shown = capture([&](Streams io) { return cmd_config_show(show, io); });
    EXPECT_EQ(shown.code, kOk);
    EXPECT_EQ(llm::Json::parse(shown.out)["lsp"]["debounce_ms"], 300);
}

TEST(CliBinary, ExitCodesThroughMain) {
    const std::string bin = A11Y_CLI_PATH;
    const auto dir = scratch("binary");
    const auto tooltip = tooltip_copy(dir);
    const auto quiet = " >" + (dir / "out.txt").string() + " 2>" + (dir / "err.txt").string();
    EXPECT_EQ(shell(bin + " scan " + tooltip.string() + quiet), 1);
    EXPECT_EQ(shell(bin + " scan " + (kCorpus / "cases" / "22-html-clean" / "input.html").string() + quiet), 0);
    EXPECT_EQ(shell(bin + " scan " + (dir / "missing.jsx").string() + quiet), 2);
    EXPECT_EQ(shell(bin + " --bogus" + quiet), 2);
    EXPECT_EQ(shell(bin + " fix " + tooltip.string() + " --line 2 --fixtures " + (kTooltip / "fixtures").string() + quiet),
              2);
    EXPECT_EQ(read(dir / "err.txt"), "error: no diagnostics at line 2\n");
    EXPECT_EQ(shell(bin + " fix " + tooltip.string() + " --line 13 --out-dir " + (dir / "o").string() +
                    " --fixtures " + (kTooltip / "fixtures").string() + quiet),
              0);
    EXPECT_EQ(shell(bin + " check " + tooltip.string() + " --from 12:4 --to 15:10 --json --out-dir " +
                    (dir / "o").string() + " --fixtures " + (kTooltip / "fixtures").string() + quiet),
              1);
    EXPECT_EQ(llm::Json::parse(read(dir / "out.txt"))["errors"], 2);
    EXPECT_EQ(shell(bin + " eval " + kCorpus.string() + " --use-case sideways" + quiet), 2);
    EXPECT_EQ(shell(bin + " scan --fixtures " + (kTooltip / "fixtures").string() + " --fixtures " + dir.string() + " " +
                    tooltip.string() + quiet),
              1);
    EXPECT_EQ(read(dir / "out.txt").substr(0, tooltip.string().size()), tooltip.string());
}

#include <gtest/gtest.h>

#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <unistd.h>

#include "a11y/errors.hpp"
#include "a11y/lsp.hpp"

using namespace a11y;
using namespace a11y::lsp;
namespace fs = std::filesystem;

namespace {

const fs::path kTooltip = fs::path(A11Y_CORPUS_DIR) / "cases" / "01-tooltip";
const fs::path kGolden = fs::path(A11Y_CORPUS_DIR) / "golden" / "01-tooltip";

std::string read(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("a11y_lsp_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

config::EngineConfig replay_config(const fs::path& out_dir, std::chrono::milliseconds debounce = {}) {
    config::EngineConfig cfg;
    cfg.fixtures = {kTooltip / "fixtures"};
    cfg.output_dir = out_dir;
    cfg.debounce = debounce;
    return cfg;
}

// Blocks every request until released or cancelled.
class GateProvider : public llm::Provider {
public:
    std::string name() const override { return "gate"; }
    llm::CompletionResponse generate(const llm::CompletionRequest&, std::stop_token stop) override {
        std::unique_lock lock(mutex_);
        ++entered_;
        cv_.notify_all();
        cv_.wait(lock, stop, [&] { return open_; });
        if (stop.stop_requested()) throw CancelledError();
        return {"[]", "gate", "2024-06-01T12:00:00Z"};
    }
    void wait_entered(int n) {
        std::unique_lock lock(mutex_);
        cv_.wait(lock, [&] { return entered_ >= n; });
    }
    void open() {
        std::lock_guard lock(mutex_);
        open_ = true;
        cv_.notify_all();
    }

private:
    std::mutex mutex_;
    std::condition_variable_any cv_;
    int entered_ = 0;
    bool open_ = false;
};

// Drives a server in-process and collects what it sends.
class Client {
public:
    explicit Client(config::EngineConfig cfg) : server_(std::make_unique<Server>(std::move(cfg))) { attach(); }
    Client(config::EngineConfig cfg, llm::Provider& provider)
        : server_(std::make_unique<Server>(std::move(cfg), provider)) {
        attach();
    }

    Server& server() { return *server_; }

    int request(const std::string& method, Json params) {
        const int id = next_id_++;
        server_->handle({{"jsonrpc", "2.0"}, {"id", id}, {"method", method}, {"params", std::move(params)}});
        return id;
    }
    void notify(const std::string& method, Json params) {
        server_->handle({{"jsonrpc", "2.0"}, {"method", method}, {"params", std::move(params)}});
    }

    Json response(int id) {
        std::unique_lock lock(mutex_);
        const bool got = cv_.wait_for(lock, std::chrono::seconds(20), [&] { return find(id) != nullptr; });
        if (!got) return {{"missing", id}};
        return *find(id);
    }

    std::vector<Json> notifications(const std::string& method) {
        std::lock_guard lock(mutex_);
        std::vector<Json> out;
        for (const auto& m : messages_) {
            if (m.value("method", "") == method) out.push_back(m);
        }
        return out;
    }

    void initialize() { response(request("initialize", {{"capabilities", Json::object()}})); }

    void open(const std::string& uri, const std::string& text, const std::string& language = "javascriptreact") {
        notify("textDocument/didOpen",
               {{"textDocument", {{"uri", uri}, {"languageId", language}, {"version", 1}, {"text", text}}}});
    }

private:
    void attach() {
        server_->set_writer([this](const Json& m) {
            std::lock_guard lock(mutex_);
            messages_.push_back(m);
            cv_.notify_all();
        });
    }
    const Json* find(int id) const {
        for (const auto& m : messages_) {
            if (m.contains("id") && m["id"] == id && !m.contains("method")) return &m;
        }
        return nullptr;
    }

    std::mutex mutex_;
    std::condition_variable cv_;
    std::vector<Json> messages_;
    int next_id_ = 1;
    std::unique_ptr<Server> server_;
};

Json range(std::uint32_t l1, std::uint32_t c1, std::uint32_t l2, std::uint32_t c2) {
    return {{"start", {{"line", l1}, {"character", c1}}}, {"end", {{"line", l2}, {"character", c2}}}};
}

// Independent UTF-16 model of a line/character position.
std::size_t utf16_offset_oracle(const std::string& text, std::uint32_t line, std::uint32_t character) {
    std::size_t i = 0;
    for (std::uint32_t l = 0; l < line; ++l) {
        const auto nl = text.find('\n', i);
        if (nl == std::string::npos) return text.size();
        i = nl + 1;
    }
    std::uint32_t units = 0;
    while (i < text.size() && text[i] != '\n' && !(text[i] == '\r' && i + 1 < text.size() && text[i + 1] == '\n')) {
        const auto c = static_cast<unsigned char>(text[i]);
        const std::size_t len = c < 0x80 ? 1 : c < 0xE0 ? 2 : c < 0xF0 ? 3 : 4;
        const std::uint32_t w = len == 4 ? 2 : 1;
        if (units + w > character) break;
        units += w;
        i += len;
    }
    return i;
}

}  // namespace

// ---- framing ----------------------------------------------------------------------

TEST(LspFraming, RoundTripsMessages) {
    std::stringstream pipe;
    write_message(pipe, {{"jsonrpc", "2.0"}, {"method", "a"}, {"params", {{"text", "é😀"}}}});
    write_message(pipe, {{"jsonrpc", "2.0"}, {"id", 2}, {"result", nullptr}});
    const auto first = read_message(pipe);
    ASSERT_TRUE(first);
    EXPECT_EQ(Json::parse(*first)["params"]["text"], "é😀");
    const auto second = read_message(pipe);
    ASSERT_TRUE(second);
    EXPECT_EQ(Json::parse(*second)["id"], 2);
    EXPECT_FALSE(read_message(pipe));
}

TEST(LspFraming, HeadersAreCaseInsensitiveAndOthersIgnored) {
    std::stringstream in("content-length: 2\r\nContent-Type: application/vscode-jsonrpc; charset=utf-8\r\n\r\n{}");
    const auto body = read_message(in);
    ASSERT_TRUE(body);
    EXPECT_EQ(*body, "{}");
}

TEST(LspFraming, RejectsMalformedInput) {
    std::stringstream no_length("Content-Type: x\r\n\r\n{}");
    EXPECT_THROW(read_message(no_length), FormatError);
    std::stringstream bad_length("Content-Length: 1x\r\n\r\n{}");
    EXPECT_THROW(read_message(bad_length), FormatError);
    std::stringstream truncated("Content-Length: 10\r\n\r\n{}");
    EXPECT_THROW(read_message(truncated), FormatError);
    std::stringstream no_colon("garbage\r\n\r\n");
    EXPECT_THROW(read_message(no_colon), FormatError);
}

// ---- positions --------------------------------------------------------------------

TEST(LspPositions, CountsUtf16CodeUnits) {
    const std::string text = "aé😀b\r\nxyz";
    const auto doc = markup::SourceDocument::from_text("a.jsx", text, markup::Flavor::Jsx);
    EXPECT_EQ(offset_of(doc, {0, 0}), 0u);
    EXPECT_EQ(offset_of(doc, {0, 2}), 3u);  // after "aé"
    EXPECT_EQ(offset_of(doc, {0, 4}), 7u);  // after the surrogate pair
    EXPECT_EQ(offset_of(doc, {0, 3}), 3u);  // inside the pair snaps back
    EXPECT_EQ(offset_of(doc, {0, 99}), 8u);  // clamps before "\r\n"
    EXPECT_EQ(offset_of(doc, {1, 1}), 11u);
    EXPECT_EQ(offset_of(doc, {7, 0}), text.size());
    EXPECT_EQ(position_of(doc, 7), (Position{0, 4}));
    EXPECT_EQ(position_of(doc, 11), (Position{1, 1}));
}

TEST(LspPositions, RandomProbesAgreeWithOracle) {
    std::mt19937_64 rng(7);
    const std::vector<std::string> pieces = {"a", "<", " ", "\n", "\r\n", "é", "中", "😀", "{x}", "\t"};
    for (int round = 0; round < 300; ++round) {
        std::string text;
        const int n = std::uniform_int_distribution<int>(0, 40)(rng);
        for (int i = 0; i < n; ++i) text += pieces[rng() % pieces.size()];
        const auto doc = markup::SourceDocument::from_text("p.jsx", text, markup::Flavor::Jsx);
        for (int probe = 0; probe < 20; ++probe) {
            const Position pos{static_cast<std::uint32_t>(rng() % 6), static_cast<std::uint32_t>(rng() % 12)};
            const auto offset = offset_of(doc, pos);
            ASSERT_EQ(offset, utf16_offset_oracle(text, pos.line, pos.character)) << text;
            ASSERT_EQ(offset_of(doc, position_of(doc, offset)), offset) << text;
        }
    }
}

TEST(LspPositions, RandomEditsMatchDirectSplicing) {
    std::mt19937_64 rng(11);
    const std::vector<std::string> pieces = {"div", "\n", "é", "😀", " ", "\r\n", "<a>"};
    std::string text = "<div>\n  é😀\r\n</div>\n";
    for (int round = 0; round < 500; ++round) {
        Position a{static_cast<std::uint32_t>(rng() % 8), static_cast<std::uint32_t>(rng() % 10)};
        Position b{static_cast<std::uint32_t>(rng() % 8), static_cast<std::uint32_t>(rng() % 10)};
        std::string insert;
        for (auto k = rng() % 3; k > 0; --k) insert += pieces[rng() % pieces.size()];
        auto x = utf16_offset_oracle(text, a.line, a.character);
        auto y = utf16_offset_oracle(text, b.line, b.character);
        if (x > y) std::swap(x, y);
        const auto expected = text.substr(0, x) + insert + text.substr(y);
        const Json change{{"range", range(a.line, a.character, b.line, b.character)}, {"text", insert}};
        text = apply_change(text, "e.jsx", change);
        ASSERT_EQ(text, expected);
    }
    EXPECT_EQ(apply_change(text, "e.jsx", {{"text", "whole"}}), "whole");
}

TEST(LspPositions, FileUrisRoundTrip) {
    EXPECT_EQ(uri_to_path("file:///tmp/a%20b/T%C3%A9.jsx"), "/tmp/a b/Té.jsx");
    EXPECT_EQ(uri_to_path(path_to_uri("/tmp/a b/Té#1.jsx")), "/tmp/a b/Té#1.jsx");
    EXPECT_EQ(path_to_uri("/x/y.jsx"), "file:///x/y.jsx");
}

// ---- server -----------------------------------------------------------------------

TEST(LspServer, RejectsRequestsBeforeInitializeAndAfterShutdown) {
    Client c(replay_config(scratch("lifecycle")));
    EXPECT_EQ(c.response(c.request("textDocument/codeAction", Json::object()))["error"]["code"], -32002);
    const auto init = c.response(c.request("initialize", Json::object()));
    const auto& caps = init["result"]["capabilities"];
    EXPECT_EQ(caps["textDocumentSync"]["change"], 2);
    EXPECT_EQ(caps["executeCommandProvider"]["commands"],
              Json::array({std::string(kFixCommand), std::string(kCheckCommand)}));
    EXPECT_EQ(c.response(c.request("nope", Json::object()))["error"]["code"], -32601);
    EXPECT_EQ(c.response(c.request("textDocument/codeAction", Json::object()))["error"]["code"], -32602);
    EXPECT_TRUE(c.response(c.request("shutdown", nullptr))["result"].is_null());
    EXPECT_EQ(c.response(c.request("textDocument/codeAction", Json::object()))["error"]["code"], -32600);
    EXPECT_FALSE(c.server().handle({{"jsonrpc", "2.0"}, {"method", "exit"}}));
}

TEST(LspServer, TooltipSessionMatchesGoldenAnnotation) {
    const auto dir = scratch("tooltip");
    const auto path = dir / "Tooltip.js";
    fs::copy_file(kTooltip / "input.js", path);
    const auto text = read(path);
    const auto uri = path_to_uri(path.string());

    Client c(replay_config(dir));
    c.initialize();
    c.open(uri, text);
    const auto published = c.notifications("textDocument/publishDiagnostics");
    ASSERT_EQ(published.size(), 1u);
    const auto& diags = published[0]["params"]["diagnostics"];
    ASSERT_EQ(diags.size(), 2u);
    EXPECT_EQ(diags[0]["code"], "2.1.1");
    EXPECT_EQ(diags[1]["code"], "4.1.2");
    EXPECT_EQ(diags[0]["range"]["start"], (Json{{"line", 12}, {"character", 6}}));
    EXPECT_EQ(diags[0]["data"]["rule_id"], "click-events-have-key-events");

    const auto actions =
        c.response(c.request("textDocument/codeAction", {{"textDocument", {{"uri", uri}}},
                                                         {"range", diags[0]["range"]},
                                                         {"context", {{"diagnostics", diags}}}}))["result"];
    ASSERT_GE(actions.size(), 1u);
    EXPECT_EQ(actions[0]["title"], std::string(kFixActionTitle));
    EXPECT_EQ(actions[0]["diagnostics"].size(), 2u);

    const auto& command = actions[0]["command"];
    const auto result = c.response(c.request(
        "workspace/executeCommand", {{"command", command["command"]}, {"arguments", command["arguments"]}}));
    ASSERT_TRUE(result.contains("result")) << result.dump();
    const auto& edits = result["result"]["edit"]["changes"][uri];
    ASSERT_EQ(edits.size(), 1u);
    const auto edited = apply_change(text, path.string(), {{"range", edits[0]["range"]}, {"text", edits[0]["newText"]}});
    EXPECT_EQ(edited, read(kGolden / "Tooltip.annotated.js"));
    EXPECT_EQ(read(path), text);  // the server never writes the buffer's file
    EXPECT_TRUE(fs::exists(result["result"]["sidecar"].get<std::string>()));
}

TEST(LspServer, CodeActionsDependOnRange) {
    const auto dir = scratch("actions");
    const auto uri = path_to_uri((dir / "Tooltip.js").string());
    Client c(replay_config(dir));
    c.initialize();
    c.open(uri, read(kTooltip / "input.js"));
    auto actions = [&](Json r) {
        return c.response(c.request("textDocument/codeAction", {{"textDocument", {{"uri", uri}}}, {"range", r}}))["result"];
    };
    EXPECT_TRUE(actions(range(0, 0, 0, 0)).empty());
    const auto clean_selection = actions(range(0, 0, 2, 0));
    ASSERT_EQ(clean_selection.size(), 1u);
    EXPECT_EQ(clean_selection[0]["title"], std::string(kCheckActionTitle));
    const auto both = actions(range(11, 0, 15, 0));
    ASSERT_EQ(both.size(), 2u);
    EXPECT_EQ(both[0]["kind"], "quickfix");
    EXPECT_EQ(both[1]["kind"], "refactor.rewrite");
}

TEST(LspServer, CheckCommandWritesReportAndLeavesSourceAlone) {
    const auto dir = scratch("check");
    const auto path = dir / "Tooltip.js";
    fs::copy_file(kTooltip / "input.js", path);
    const auto uri = path_to_uri(path.string());
    Client c(replay_config(dir / "out"));
    c.initialize();
    c.open(uri, read(path));
    const auto result = c.response(c.request(
        "workspace/executeCommand",
        {{"command", std::string(kCheckCommand)}, {"arguments", {{{"uri", uri}, {"range", range(11, 4, 14, 10)}}}}}));
    ASSERT_TRUE(result.contains("result")) << result.dump();
    EXPECT_EQ(result["result"]["status"], "complete");
    const auto report = read(result["result"]["report"].get<std::string>());
    EXPECT_NE(report.find("Selection: 12:4-15:10"), std::string::npos);
    EXPECT_EQ(read(path), read(kTooltip / "input.js"));

    const auto empty = c.response(c.request(
        "workspace/executeCommand",
        {{"command", std::string(kCheckCommand)}, {"arguments", {{{"uri", uri}, {"range", range(3, 2, 3, 2)}}}}}));
    EXPECT_EQ(empty["error"]["code"], -32602);
}

TEST(LspServer, FixWithoutDiagnosticsOrDocumentIsRejected) {
    const auto dir = scratch("reject");
    const auto uri = path_to_uri((dir / "Tooltip.js").string());
    Client c(replay_config(dir));
    c.initialize();
    auto exec = [&](const std::string& u, Json r) {
        return c.response(c.request("workspace/executeCommand",
                                    {{"command", std::string(kFixCommand)}, {"arguments", {{{"uri", u}, {"range", r}}}}}));
    };
    EXPECT_EQ(exec(uri, range(12, 6, 12, 6))["error"]["code"], -32602);  // not open
    c.open(uri, read(kTooltip / "input.js"));
    EXPECT_EQ(exec(uri, range(0, 0, 0, 3))["error"]["code"], -32602);
    const auto unknown = c.response(c.request("workspace/executeCommand", {{"command", "a11y.other"}}));
    EXPECT_EQ(unknown["error"]["code"], -32602);
}

TEST(LspServer, MissingProviderIsReportedOnExecute) {
    const auto dir = scratch("noprovider");
    config::EngineConfig cfg;  // replay without fixtures
    cfg.debounce = {};
    const auto uri = path_to_uri((dir / "Tooltip.js").string());
    Client c(cfg);
    c.initialize();
    c.open(uri, read(kTooltip / "input.js"));
    EXPECT_EQ(c.notifications("textDocument/publishDiagnostics")[0]["params"]["diagnostics"].size(), 2u);
    const auto r = c.response(c.request(
        "workspace/executeCommand",
        {{"command", std::string(kFixCommand)}, {"arguments", {{{"uri", uri}, {"range", range(12, 6, 12, 7)}}}}}));
    EXPECT_EQ(r["error"]["code"], -32803);
    EXPECT_NE(r["error"]["message"].get<std::string>().find("no model provider"), std::string::npos);
}

TEST(LspServer, SecondCommandIsRejectedAndEditCancelsFirst) {
    const auto dir = scratch("inflight");
    const auto uri = path_to_uri((dir / "Tooltip.js").string());
    GateProvider gate;
    Client c(replay_config(dir), gate);
    c.initialize();
    c.open(uri, read(kTooltip / "input.js"));
    const Json args{{{"uri", uri}, {"range", range(12, 6, 12, 7)}}};
    const auto first = c.request("workspace/executeCommand", {{"command", std::string(kFixCommand)}, {"arguments", args}});
    gate.wait_entered(1);
    const auto second = c.response(
        c.request("workspace/executeCommand", {{"command", std::string(kFixCommand)}, {"arguments", args}}));
    EXPECT_EQ(second["error"]["code"], -32803);
    EXPECT_NE(second["error"]["message"].get<std::string>().find("already in flight"), std::string::npos);

    c.notify("textDocument/didChange", {{"textDocument", {{"uri", uri}, {"version", 2}}},
                                        {"contentChanges", {{{"range", range(0, 0, 0, 0)}, {"text", "\n"}}}}});
    EXPECT_EQ(c.response(first)["error"]["code"], -32800);
    c.server().wait_idle();

    // The document is free again once the cancelled request answered.
    gate.open();
    const auto again = c.response(c.request(
        "workspace/executeCommand",
        {{"command", std::string(kFixCommand)}, {"arguments", {{{"uri", uri}, {"range", range(13, 6, 13, 7)}}}}}));
    EXPECT_TRUE(again.contains("result")) << again.dump();
}

TEST(LspServer, CancelRequestStopsCommand) {
    const auto dir = scratch("cancel");
    const auto uri = path_to_uri((dir / "Tooltip.js").string());
    GateProvider gate;
    Client c(replay_config(dir), gate);
    c.initialize();
    c.open(uri, read(kTooltip / "input.js"));
    const auto id = c.request("workspace/executeCommand",
                              {{"command", std::string(kFixCommand)},
                               {"arguments", {{{"uri", uri}, {"range", range(12, 6, 12, 7)}}}}});
    gate.wait_entered(1);
    c.notify("$/cancelRequest", {{"id", id}});
    EXPECT_EQ(c.response(id)["error"]["code"], -32800);
}

TEST(LspServer, DebounceCoalescesBurstsOfChanges) {
    const auto dir = scratch("debounce");
    const auto uri = path_to_uri((dir / "Tooltip.js").string());
    Client c(replay_config(dir, std::chrono::milliseconds(150)));
    c.initialize();
    c.open(uri, read(kTooltip / "input.js"));
    EXPECT_EQ(c.server().recompute_count(), 1u);
    for (int v = 2; v <= 21; ++v) {
        c.notify("textDocument/didChange", {{"textDocument", {{"uri", uri}, {"version", v}}},
                                            {"contentChanges", {{{"range", range(0, 0, 0, 0)}, {"text", " "}}}}});
    }
    c.server().wait_idle();
    EXPECT_EQ(c.server().recompute_count(), 2u);
    const auto published = c.notifications("textDocument/publishDiagnostics");
    ASSERT_EQ(published.size(), 2u);
    EXPECT_EQ(published.back()["params"]["version"], 21);
    // The flagged div moved with the edits on line 0 only.
    EXPECT_EQ(published.back()["params"]["diagnostics"][0]["range"]["start"]["line"], 12);
}

TEST(LspServer, ZeroDebouncePublishesEveryVersion) {
    const auto dir = scratch("nodebounce");
    const auto uri = path_to_uri((dir / "Tooltip.js").string());
    Client c(replay_config(dir));
    c.initialize();
    c.open(uri, read(kTooltip / "input.js"));
    c.notify("textDocument/didChange",
             {{"textDocument", {{"uri", uri}, {"version", 2}}}, {"contentChanges", {{{"text", "<div onClick={f} />\n"}}}}});
    const auto published = c.notifications("textDocument/publishDiagnostics");
    ASSERT_EQ(published.size(), 2u);
    EXPECT_EQ(published[1]["params"]["diagnostics"].size(), 2u);
    c.notify("textDocument/didClose", {{"textDocument", {{"uri", uri}}}});
    const auto after = c.notifications("textDocument/publishDiagnostics");
    ASSERT_EQ(after.size(), 3u);
    EXPECT_TRUE(after[2]["params"]["diagnostics"].empty());
}

TEST(LspServer, RunLoopSpeaksFramedProtocol) {
    const auto dir = scratch("loop");
    std::stringstream in;
    write_message(in, {{"jsonrpc", "2.0"}, {"id", 1}, {"method", "initialize"}, {"params", Json::object()}});
    in << "Content-Length: 5\r\n\r\n{nope";
    write_message(in, {{"jsonrpc", "2.0"}, {"id", 2}, {"method", "shutdown"}});
    write_message(in, {{"jsonrpc", "2.0"}, {"method", "exit"}});
    std::stringstream out;
    Server server(replay_config(dir));
    EXPECT_TRUE(server.run(in, out));
    std::vector<Json> replies;
    while (auto body = read_message(out)) replies.push_back(Json::parse(*body));
    ASSERT_EQ(replies.size(), 3u);
    EXPECT_EQ(replies[0]["id"], 1);
    EXPECT_EQ(replies[1]["error"]["code"], -32700);
    EXPECT_EQ(replies[2]["id"], 2);
}

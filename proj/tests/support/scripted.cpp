#include "scripted.hpp"

#include <fstream>
#include <sstream>

namespace a11y::testkit {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

llm::ScriptedProvider scripted_provider(const std::filesystem::path& case_dir, bool dedupe) {
    return llm::ScriptedProvider([case_dir, dedupe](const llm::CompletionRequest& r) {
        const auto script = case_dir / "script";
        switch (r.template_id) {
            case llm::TemplateId::DetectPrompt: return read_file(script / "detect.txt");
            case llm::TemplateId::ChainFixPrompt:
                return read_file(script / (dedupe ? "chain_fix.txt" : "chain_fix.no-dedupe.txt"));
            case llm::TemplateId::FixPrompt: return read_file(script / "fix.txt");
        }
        return std::string();
    });
}

}  // namespace a11y::testkit

#pragma once

#include <filesystem>
#include <string>

#include "a11y/llm.hpp"

namespace a11y::testkit {

std::string read_file(const std::filesystem::path& path);

// Answers each template with the matching file from `<case_dir>/script`.
// The chain stage reads chain_fix.no-dedupe.txt when `dedupe` is off.
llm::ScriptedProvider scripted_provider(const std::filesystem::path& case_dir, bool dedupe = true);

}  // namespace a11y::testkit

#include "thresholds.hpp"

#include <stdexcept>

namespace a11y::testkit {

using eval::Level;

Level recall_oracle(std::size_t m, std::size_t t) {
    const double r = static_cast<double>(m) / static_cast<double>(t);
    if (r <= 0.5) return Level::Incorrect;
    if (r <= 0.8) return Level::PartialOk;
    return Level::CorrectOk;
}

Level relevance_oracle(std::size_t m, std::size_t t) {
    const double r = static_cast<double>(m) / static_cast<double>(t);
    if (r < 0.5) return Level::Incorrect;
    if (r <= 0.8) return Level::PartialOk;
    return Level::CorrectOk;
}

eval::CorpusCase synthetic_case(std::size_t n) {
    std::string text;
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    for (std::size_t i = 0; i < n; ++i) {
        const auto el = "<button id=\"b" + std::to_string(i) + "\">x" + std::to_string(i) + "</button>";
        spans.emplace_back(text.size(), text.size() + el.size());
        text += el + "\n";
    }
    auto doc = markup::SourceDocument::from_text("synthetic.jsx", text);
    const auto all = doc.span(0, text.size());
    eval::CorpusCase c{"synthetic", std::move(doc), all, {}, false, {}};
    for (std::size_t i = 0; i < n; ++i) {
        const auto span = c.doc.span(spans[i].first, spans[i].second);
        c.seeded_errors.push_back({"synthetic-rule", "4.1.2", span, markup::slice(c.doc, span)});
    }
    return c;
}

std::string detection_payload(const eval::CorpusCase& c, std::size_t matched, std::size_t noise) {
    auto list = llm::Json::array();
    for (std::size_t i = 0; i < matched; ++i) {
        list.push_back({{"error_description", "Problem " + std::to_string(i) + " on button b" + std::to_string(i)},
                        {"offending_code", c.seeded_errors[i].canonical_offending_code},
                        {"criterion", "4.1.2"}});
    }
    for (std::size_t k = 0; k < noise; ++k) {
        list.push_back({{"error_description", "Unrelated styling remark " + std::to_string(k)},
                        {"offending_code", "<p>noise " + std::to_string(k) + "</p>"},
                        {"criterion", "1.4.3"}});
    }
    return list.dump();
}

Level level_for(const eval::CorpusCase& c, std::size_t matched, std::size_t noise, std::string_view id) {
    eval::Response r{llm::parse_structured(detection_payload(c, matched, noise), llm::SchemaId::Findings),
                     std::nullopt, c.selection};
    for (const auto& result : eval::check_criteria(r, c, eval::UseCase::CheckAndFixWithAI)) {
        if (result.criterion_id == id) return result.level;
    }
    throw std::out_of_range(std::string(id));
}

}  // namespace a11y::testkit

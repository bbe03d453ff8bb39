#pragma once

#include <string>
#include <string_view>

namespace respdisp {

/// Version tag of the embedded prompt templates (assets/prompts/*_v1.txt).
inline constexpr std::string_view kPromptTemplateVersion = "v1";

/// Raw templates with their `{placeholder}` markers.
std::string_view opinion_template();
std::string_view trivia_template();
std::string_view grading_template();

/// Opinion question asked repeatedly to measure dispersion. `{category}`
/// occurs twice. Throws DomainError for an empty category.
std::string build_opinion_prompt(std::string_view category);

/// Trivia question prompt (collected once per item at seed 0, temperature 0).
std::string build_trivia_prompt(std::string_view category, std::string_view question);

/// Yes/No judge prompt. Values are embedded verbatim, without escaping.
std::string build_grading_prompt(std::string_view category, std::string_view question,
                                 std::string_view answer_key, std::string_view response_text);

}  // namespace respdisp

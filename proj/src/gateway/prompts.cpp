#include "respdisp/gateway/prompts.hpp"

#include "respdisp/errors.hpp"
#include "respdisp/prompt_assets.hpp"
#include "respdisp/text.hpp"

namespace respdisp {

namespace {

void require_non_empty(std::string_view value, const char* what) {
  if (value.empty()) throw DomainError(std::string(what) + " must not be empty");
}

}  // namespace

std::string_view opinion_template() { return prompt_assets::opinion_v1; }
std::string_view trivia_template() { return prompt_assets::trivia_v1; }
std::string_view grading_template() { return prompt_assets::grading_v1; }

std::string build_opinion_prompt(std::string_view category) {
  require_non_empty(category, "category");
  return text::fill_template(opinion_template(), {{"category", category}});
}

std::string build_trivia_prompt(std::string_view category, std::string_view question) {
  require_non_empty(category, "category");
  require_non_empty(question, "question");
  return text::fill_template(trivia_template(), {{"category", category}, {"question", question}});
}

std::string build_grading_prompt(std::string_view category, std::string_view question,
                                 std::string_view answer_key, std::string_view response_text) {
  require_non_empty(category, "category");
  require_non_empty(question, "question");
  require_non_empty(answer_key, "answer key");
  require_non_empty(response_text, "response");
  return text::fill_template(grading_template(), {{"category", category},
                                                  {"question", question},
                                                  {"answer_key_answer", answer_key},
                                                  {"response", response_text}});
}

}  // namespace respdisp

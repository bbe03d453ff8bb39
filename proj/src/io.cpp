#include "respdisp/io.hpp"

#include "respdisp/errors.hpp"
#include "respdisp/jsonl.hpp"

namespace respdisp {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string dump_line(const ordered_json& j) {
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
}

std::string non_empty(const nlohmann::json& j, const char* field) {
  std::string value = j.at(field).get<std::string>();
  if (value.empty()) throw ParseError(std::string("field \"") + field + "\" is empty", 0);
  return value;
}

template <typename T, typename Encode>
void write_lines(const std::filesystem::path& path, std::span<const T> rows, Encode encode) {
  std::string out;
  for (const auto& row : rows) out += dump_line(encode(row));
  jsonl::write_file_atomic(path, out);
}

template <typename Decode>
auto read_lines(const std::filesystem::path& path, Decode decode) {
  std::vector<decltype(decode(nlohmann::json{}))> rows;
  if (!std::filesystem::exists(path)) throw ParseError("missing input file " + path.string(), 0);
  jsonl::for_each_line(path, [&](std::string_view line, std::size_t line_no) {
    try {
      rows.push_back(decode(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string() + ": " + e.what(), line_no);
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ": " + e.what(), line_no);
    }
  });
  return rows;
}

}  // namespace

ordered_json to_json(const TriviaItem& item) {
  ordered_json j;
  j["id"] = item.id;
  j["category"] = item.category;
  j["question"] = item.question;
  j["answer"] = item.answer_key;
  return j;
}

TriviaItem trivia_item_from_json(const nlohmann::json& j) {
  return {non_empty(j, "id"), non_empty(j, "category"), non_empty(j, "question"), non_empty(j, "answer")};
}

ordered_json to_json(const GradeRecord& g) {
  ordered_json j;
  j["question_id"] = g.question_id;
  j["model_id"] = g.model_id;
  j["category"] = g.category;
  j["response_text"] = g.response_text;
  j["grader"] = to_string(g.grader);
  j["verdict"] = to_string(g.verdict);
  return j;
}

GradeRecord grade_from_json(const nlohmann::json& j) {
  GradeRecord g;
  g.question_id = non_empty(j, "question_id");
  g.model_id = non_empty(j, "model_id");
  g.category = j.at("category").get<std::string>();
  g.response_text = j.at("response_text").get<std::string>();
  const auto grader = parse_grader(j.at("grader").get<std::string>());
  const auto verdict = parse_verdict(j.at("verdict").get<std::string>());
  if (!grader || !verdict) throw ParseError("unknown grader or verdict", 0);
  if (*verdict == Verdict::held_out && *grader != Grader::human) {
    throw ParseError("held_out verdict is only valid for human grades", 0);
  }
  g.grader = *grader;
  g.verdict = *verdict;
  return g;
}

ordered_json to_json(const CategoryAccuracy& acc) {
  ordered_json j;
  j["model_id"] = acc.model_id;
  j["category"] = acc.category;
  j["n_graded"] = acc.n_graded;
  j["n_correct"] = acc.n_correct;
  j["accuracy"] = acc.accuracy;
  return j;
}

CategoryAccuracy accuracy_from_json(const nlohmann::json& j) {
  CategoryAccuracy acc;
  acc.model_id = non_empty(j, "model_id");
  acc.category = non_empty(j, "category");
  acc.n_graded = j.at("n_graded").get<std::size_t>();
  acc.n_correct = j.at("n_correct").get<std::size_t>();
  if (acc.n_graded == 0 || acc.n_correct > acc.n_graded) throw ParseError("inconsistent accuracy counts", 0);
  acc.accuracy = static_cast<double>(acc.n_correct) / static_cast<double>(acc.n_graded);
  return acc;
}

ordered_json to_json(const DispersionResult& r) {
  ordered_json j;
  j["model_id"] = r.model_id;
  j["category"] = r.category;
  j["embedding_kind"] = to_string(r.embedding_kind);
  j["threshold"] = r.threshold;
  j["count"] = r.count;
  j["n_responses"] = r.n_responses;
  j["variance"] = r.convention == VarianceConvention::squared ? "squared" : "raw";
  j["centered"] = r.centered;
  j["spectrum"] = r.spectrum.sigmas;
  return j;
}

DispersionResult dispersion_from_json(const nlohmann::json& j) {
  DispersionResult r;
  r.model_id = non_empty(j, "model_id");
  r.category = non_empty(j, "category");
  const auto kind = parse_embedding_kind(j.at("embedding_kind").get<std::string>());
  if (!kind) throw ParseError("unknown embedding_kind", 0);
  r.embedding_kind = *kind;
  r.threshold = j.at("threshold").get<double>();
  r.count = j.at("count").get<std::size_t>();
  r.n_responses = j.at("n_responses").get<std::size_t>();
  r.convention = j.value("variance", std::string("squared")) == "raw" ? VarianceConvention::raw
                                                                    : VarianceConvention::squared;
  r.centered = j.value("centered", false);
  r.spectrum.sigmas = j.at("spectrum").get<std::vector<double>>();
  if (r.count == 0 || r.count > r.n_responses) throw ParseError("dispersion count out of range", 0);
  return r;
}

void write_grades(const std::filesystem::path& path, std::span<const GradeRecord> grades) {
  write_lines(path, grades, [](const GradeRecord& g) { return to_json(g); });
}

std::vector<GradeRecord> read_grades(const std::filesystem::path& path) { return read_lines(path, grade_from_json); }

void write_accuracies(const std::filesystem::path& path, std::span<const CategoryAccuracy> rows) {
  write_lines(path, rows, [](const CategoryAccuracy& a) { return to_json(a); });
}

std::vector<CategoryAccuracy> read_accuracies(const std::filesystem::path& path) {
  return read_lines(path, accuracy_from_json);
}

void write_dispersions(const std::filesystem::path& path, std::span<const DispersionResult> rows) {
  write_lines(path, rows, [](const DispersionResult& r) { return to_json(r); });
}

std::vector<DispersionResult> read_dispersions(const std::filesystem::path& path) {
  return read_lines(path, dispersion_from_json);
}

}  // namespace respdisp

#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include <json.hpp>

#include "respdisp/dispersion.hpp"
#include "respdisp/qa_bench.hpp"

// JSON shapes of the on-disk files. Every writer uses a fixed key order so
// outputs are byte-stable.
namespace respdisp {

nlohmann::ordered_json to_json(const TriviaItem& item);
TriviaItem trivia_item_from_json(const nlohmann::json& j);

nlohmann::ordered_json to_json(const GradeRecord& grade);
GradeRecord grade_from_json(const nlohmann::json& j);

nlohmann::ordered_json to_json(const CategoryAccuracy& acc);
CategoryAccuracy accuracy_from_json(const nlohmann::json& j);

nlohmann::ordered_json to_json(const DispersionResult& result);
DispersionResult dispersion_from_json(const nlohmann::json& j);

/// Whole-file helpers; writers replace the file atomically.
void write_grades(const std::filesystem::path& path, std::span<const GradeRecord> grades);
std::vector<GradeRecord> read_grades(const std::filesystem::path& path);
void write_accuracies(const std::filesystem::path& path, std::span<const CategoryAccuracy> rows);
std::vector<CategoryAccuracy> read_accuracies(const std::filesystem::path& path);
void write_dispersions(const std::filesystem::path& path, std::span<const DispersionResult> rows);
std::vector<DispersionResult> read_dispersions(const std::filesystem::path& path);

}  // namespace respdisp

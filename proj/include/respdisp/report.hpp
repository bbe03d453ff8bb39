#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "respdisp/analysis.hpp"

namespace respdisp {

using ShortNameFn = std::function<std::string(const std::string& model_id)>;

/// Per-category rankings and rank correlations.
struct CategoryTable {
  struct Row {
    std::string model_id;
    std::optional<double> accuracy;
    std::optional<double> accuracy_rank;
    std::optional<std::size_t> rss;
    std::optional<double> rss_rank;
    std::optional<std::size_t> remote;
    std::optional<double> remote_rank;
  };
  std::string category;
  std::vector<Row> rows;  // ordered by accuracy rank, then model id
  std::optional<double> acc_vs_rss;
  std::optional<double> acc_vs_remote;
  std::optional<double> rss_vs_remote;
};

std::vector<CategoryTable> category_tables(std::span<const DispersionResult> dispersions,
                                           std::span<const CategoryAccuracy> accuracies);

/// Grid points shown as columns of the summary: those equal to 0, 0.05 or
/// 0.10, or the whole grid when none of them is present.
std::vector<std::size_t> highlighted_columns(std::span<const double> grid);

std::string render_summary_markdown(const UseCaseReport& report, std::span<const CategoryTable> tables,
                                    const std::string& remote_model_name);

std::string render_category_markdown(std::span<const CategoryTable> tables, const ShortNameFn& short_name);

}  // namespace respdisp

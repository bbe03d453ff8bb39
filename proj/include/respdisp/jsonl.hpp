#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <string>
#include <string_view>

namespace respdisp::jsonl {

/// Calls `on_line(text, line_number)` for every non-blank line. Missing files
/// read as empty. With `torn_tail_bytes` set, a final line without its newline
/// is treated as an interrupted append: it is skipped with a warning and its
/// length reported (0 if none). Otherwise it is an ordinary line.
void for_each_line(const std::filesystem::path& path,
                   const std::function<void(std::string_view, std::size_t)>& on_line,
                   std::size_t* torn_tail_bytes = nullptr);

/// Append-only line writer. Each `append` writes one line and flushes before
/// returning; safe to call from several threads. Opening cuts off a torn
/// final line left by an interrupted writer.
class Appender {
 public:
  explicit Appender(std::filesystem::path path);
  void append(std::string_view line);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::mutex mutex_;
  std::ofstream out_;
};

/// Writes `content` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

}  // namespace respdisp::jsonl

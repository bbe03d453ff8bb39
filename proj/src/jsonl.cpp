#include "respdisp/jsonl.hpp"

#include <sstream>

#include <spdlog/spdlog.h>

#include "respdisp/errors.hpp"

namespace respdisp::jsonl {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void for_each_line(const fs::path& path, const std::function<void(std::string_view, std::size_t)>& on_line,
                   std::size_t* torn_tail_bytes) {
  if (torn_tail_bytes) *torn_tail_bytes = 0;
  if (!fs::exists(path)) return;
  const std::string content = read_file(path);

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    ++line_no;
    std::size_t nl = content.find('\n', pos);
    if (nl == std::string::npos && torn_tail_bytes) {
      spdlog::warn("{}: ignoring unterminated final line {} (interrupted write)", path.string(), line_no);
      *torn_tail_bytes = content.size() - pos;
      return;
    }
    if (nl == std::string::npos) nl = content.size();
    std::string_view line(content.data() + pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") != std::string_view::npos) on_line(line, line_no);
    pos = nl + 1;
  }
}

Appender::Appender(fs::path path) : path_(std::move(path)) {
  if (path_.has_parent_path()) fs::create_directories(path_.parent_path());
  std::size_t torn = 0;
  if (fs::exists(path_)) {
    for_each_line(path_, [](std::string_view, std::size_t) {}, &torn);
    if (torn > 0) fs::resize_file(path_, fs::file_size(path_) - torn);
  }
  out_.open(path_, std::ios::binary | std::ios::app);
  if (!out_) throw Error("cannot open " + path_.string() + " for appending");
}

void Appender::append(std::string_view line) {
  std::lock_guard lock(mutex_);
  out_.write(line.data(), static_cast<std::streamsize>(line.size()));
  out_.put('\n');
  out_.flush();
  if (!out_) throw Error("write to " + path_.string() + " failed");
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw Error("write to " + tmp.string() + " failed");
  }
  fs::rename(tmp, path);
}

}  // namespace respdisp::jsonl

#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "vident/errors.hpp"
#include "vident/hashing.hpp"

namespace vident {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw DataError("short write to " + path);
}

inline std::vector<std::string> split_lines(std::string_view content) {
  std::vector<std::string> lines;
  size_t pos = 0;
  while (pos < content.size()) {
    size_t nl = content.find('\n', pos);
    if (nl == std::string_view::npos) {
      lines.emplace_back(content.substr(pos));
      break;
    }
    size_t end = nl;
    if (end > pos && content[end - 1] == '\r') --end;
    lines.emplace_back(content.substr(pos, end - pos));
    pos = nl + 1;
  }
  return lines;
}

inline uint64_t file_checksum(const std::string& path) { return fnv1a64(read_file(path)); }

}  // namespace vident

#pragma once

// Small text-format helpers shared by the model readers and the CLI.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "perfect/errors.hpp"

namespace perfect::io {

/// Whitespace-split tokens of each non-blank line, with '#' comments removed.
struct Line {
  int number = 0;
  std::vector<std::string> tokens;
};

inline std::vector<Line> tokenize(std::istream& in) {
  std::vector<Line> lines;
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ss(raw);
    Line line{number, {}};
    for (std::string tok; ss >> tok;) line.tokens.push_back(tok);
    if (!line.tokens.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

inline double to_double(const Line& line, std::size_t i) {
  try {
    std::size_t used = 0;
    const double v = std::stod(line.tokens.at(i), &used);
    if (used != line.tokens[i].size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ModelError("line " + std::to_string(line.number) + ": expected a number in field " +
                     std::to_string(i + 1));
  }
}

inline long to_index(const Line& line, std::size_t i) {
  try {
    std::size_t used = 0;
    const long v = std::stol(line.tokens.at(i), &used);
    if (used != line.tokens[i].size() || v < 0) throw std::invalid_argument("bad index");
    return v;
  } catch (const std::exception&) {
    throw ModelError("line " + std::to_string(line.number) +
                     ": expected a nonnegative integer in field " + std::to_string(i + 1));
  }
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open " + path.string());
  return in;
}

/// Writes through a sibling temporary and renames it into place, so a failed
/// run never leaves a truncated file behind.
inline void atomic_write(const std::filesystem::path& path,
                         const std::function<void(std::ostream&)>& body) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ParameterError("cannot write " + tmp.string());
    try {
      body(out);
    } catch (...) {
      out.close();
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw;
    }
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw ParameterError("write failed: " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace perfect::io

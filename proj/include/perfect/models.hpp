#pragma once

// Built-in models selectable by name from the command line.
//   pumps  - ten-pump failure-rate hierarchy as an autogamma field
//   gridN  - N x N torus of unit springs, upper-left site pinned

#include <cctype>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>

#include "perfect/autogamma.hpp"
#include "perfect/autonormal.hpp"
#include "perfect/io.hpp"

namespace perfect::models {

/// Gelfand-Smith pump data: failures s_i over t_i thousand hours, with
/// lambda_i ~ Gamma(1.802, beta) and beta ~ Gamma(0.1, 1.0). Sites 0-9 are
/// the lambda_i, site 10 is beta.
inline constexpr const char* kPumpsField =
    "site 0 6.802 94.32\nsite 1 2.802 15.72\nsite 2 6.802 62.88\nsite 3 15.802 125.76\n"
    "site 4 4.802 5.24\nsite 5 20.802 31.44\nsite 6 2.802 1.048\nsite 7 2.802 1.048\n"
    "site 8 5.802 2.096\nsite 9 23.802 10.48\nsite 10 18.12 1.0\n"
    "pair 0 10 1\npair 1 10 1\npair 2 10 1\npair 3 10 1\npair 4 10 1\n"
    "pair 5 10 1\npair 6 10 1\npair 7 10 1\npair 8 10 1\npair 9 10 1\n";

inline autogamma::GammaField pumps() {
  std::istringstream in(kPumpsField);
  return autogamma::read_field(in);
}

/// N for names of the form "gridN".
inline std::optional<std::size_t> grid_size(const std::string& name) {
  if (name.size() <= 4 || name.compare(0, 4, "grid") != 0) return std::nullopt;
  for (std::size_t k = 4; k < name.size(); ++k) {
    if (!std::isdigit(static_cast<unsigned char>(name[k]))) return std::nullopt;
  }
  return static_cast<std::size_t>(std::stoul(name.substr(4)));
}

/// A field file path, or the name "pumps".
inline autogamma::GammaField load_field(const std::string& spec) {
  if (std::filesystem::exists(spec)) {
    auto in = io::open_input(spec);
    return autogamma::read_field(in);
  }
  if (spec == "pumps") return pumps();
  throw ModelError("unknown autogamma model '" + spec + "' (not a file, and not 'pumps')");
}

/// A graph file path, or a name "gridN".
inline autonormal::InteractionGraph load_graph(const std::string& spec) {
  if (std::filesystem::exists(spec)) {
    auto in = io::open_input(spec);
    return autonormal::read_graph(in);
  }
  if (const auto n = grid_size(spec)) return autonormal::InteractionGraph::grid(*n, *n, 1.0, true);
  throw ModelError("unknown autonormal model '" + spec + "' (not a file, and not 'gridN')");
}

}  // namespace perfect::models

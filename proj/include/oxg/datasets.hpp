#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "oxg/errors.hpp"

namespace oxg {

struct Dataset {
  std::vector<double> observations;
  std::string name;

  std::size_t size() const noexcept { return observations.size(); }
};

namespace detail {

// Strengths of 1.5 cm glass fibres (Smith and Naylor, 1987), in printed order.
inline constexpr std::array<double, 63> glass_fibres = {
    0.55, 0.93, 1.25, 1.36, 1.49, 1.52, 1.58, 1.61, 1.64, 1.68, 1.73, 1.81, 2.00,
    0.74, 1.04, 1.27, 1.39, 1.49, 1.53, 1.59, 1.61, 1.66, 1.68, 1.76, 1.82, 2.01,
    0.77, 1.11, 1.28, 1.42, 1.50, 1.54, 1.60, 1.62, 1.66, 1.69, 1.76, 1.84, 2.24,
    0.81, 1.13, 1.29, 1.48, 1.50, 1.55, 1.61, 1.62, 1.66, 1.70, 1.77, 1.84, 0.84,
    1.24, 1.30, 1.48, 1.51, 1.55, 1.61, 1.63, 1.67, 1.70, 1.78, 1.89};

// Plasma concentrations of indomethacin (mcg/ml), in printed order.
inline constexpr std::array<double, 66> indometh = {
    1.50, 0.94, 0.78, 0.48, 0.37, 0.19, 0.12, 0.11, 0.08, 0.07, 0.05, 2.03, 1.63, 0.71,
    0.70, 0.64, 0.36, 0.32, 0.20, 0.25, 0.12, 0.08, 2.72, 1.49, 1.16, 0.80, 0.80, 0.39,
    0.22, 0.12, 0.11, 0.08, 0.08, 1.85, 1.39, 1.02, 0.89, 0.59, 0.40, 0.16, 0.11, 0.10,
    0.07, 0.07, 2.05, 1.04, 0.81, 0.39, 0.30, 0.23, 0.13, 0.11, 0.08, 0.10, 0.06, 2.31,
    1.44, 1.03, 0.84, 0.64, 0.42, 0.24, 0.17, 0.13, 0.10, 0.09};

inline bool is_separator(char c) {
  return c == ' ' || c == '\t' || c == ',' || c == ';' || c == '\r';
}

}  // namespace detail

inline std::vector<std::string> builtin_dataset_names() { return {"glass-fibres", "indometh"}; }

inline bool is_builtin_dataset(std::string_view name) {
  return name == "glass-fibres" || name == "indometh";
}

inline Dataset builtin_dataset(std::string_view name) {
  if (name == "glass-fibres") {
    return {{detail::glass_fibres.begin(), detail::glass_fibres.end()}, "glass-fibres"};
  }
  if (name == "indometh") {
    return {{detail::indometh.begin(), detail::indometh.end()}, "indometh"};
  }
  throw data_error("unknown built-in dataset '" + std::string(name) + "'");
}

/// Reads numbers separated by whitespace, commas or semicolons. Text after
/// '#' on a line is ignored. Any other token is rejected with its line and
/// column (both 1-based).
inline Dataset parse_dataset(std::istream& in, std::string name) {
  Dataset d{{}, std::move(name)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::size_t i = 0;
    while (i < line.size()) {
      if (detail::is_separator(line[i])) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < line.size() && !detail::is_separator(line[j])) ++j;
      const char* first = line.data() + i;
      const char* last = line.data() + j;
      if (*first == '+') ++first;
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
        throw data_error(d.name + ":" + std::to_string(lineno) + ":" + std::to_string(i + 1) +
                         ": not a finite number: '" + line.substr(i, j - i) + "'");
      }
      d.observations.push_back(v);
      i = j;
    }
  }
  if (d.observations.empty()) throw data_error(d.name + ": no observations");
  return d;
}

/// A built-in dataset name or a path to a numeric text file.
inline Dataset ingest(const std::string& source) {
  if (is_builtin_dataset(source)) return builtin_dataset(source);
  std::ifstream f(source);
  if (!f) throw data_error("cannot open data file '" + source + "'");
  return parse_dataset(f, source);
}

}  // namespace oxg

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "opuc/measures.hpp"
#include "opuc/types.hpp"

namespace opuc::cli {

/// Shortest decimal that reads back to the same double.
std::string format_double(double value);

/// Alpha file: either one `re,im` pair per line (blank lines and `#` comments
/// skipped), or JSON holding a list of [re, im] pairs, bare or under "alphas".
VerblunskySequence parse_alphas(std::string_view text);
VerblunskySequence load_alphas(const std::filesystem::path& path);

/// Measure file: YAML (JSON is accepted as a subset) with optional keys
/// `atoms: [[theta, weight], ...]` and `ac_grid: [w_0, ..., w_{G-1}]`.
MeasureSpec parse_measure(std::string_view text);
MeasureSpec load_measure(const std::filesystem::path& path);

/// "re,im" or "re".
Complex parse_complex(std::string_view text);

std::string read_file(const std::filesystem::path& path);

}  // namespace opuc::cli

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "opuc/measures.hpp"

namespace opuc::cli {

enum class Command { insert, simon, decay, oracle_compare, verify };
enum class Format { csv, json };

struct AlphaFileSource {
  std::filesystem::path path;
};
struct CatalogSource {
  std::string name;
  CatalogParams params;
};
struct MeasureFileSource {
  std::filesystem::path path;
};
using Source = std::variant<std::monostate, AlphaFileSource, CatalogSource, MeasureFileSource>;

struct RunConfig {
  Command command = Command::insert;
  Source source;
  double omega = 0.0;
  double gamma = 0.5;
  std::size_t n_max = 0;
  Format format = Format::csv;
  std::optional<std::filesystem::path> output;
  std::uint64_t seed = 424242;
  bool serial = false;
};

/// Exit statuses.
namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int internal = 1;
inline constexpr int parameter = 2;
inline constexpr int parse = 3;
inline constexpr int insufficient_data = 4;
inline constexpr int verification = 5;
inline constexpr int oracle_degeneracy = 6;
}  // namespace exit_code

/// Names the environment variable holding the default output directory.
inline constexpr const char* kOutputDirEnv = "OPUC_OUTPUT_DIR";

int exit_code_for(ErrorKind kind);

/// One-line diagnostic: `opuc: error kind=<kind> exit=<code> message="<text>"`.
std::string diagnostic(ErrorKind kind, const std::string& message);

/// Builds a RunConfig from argv. Usage errors throw Error(parse) or
/// Error(parameter); `--help` is reported through the returned flag.
struct ParsedArgs {
  std::optional<RunConfig> config;
  std::string help_text;
};
ParsedArgs parse_args(int argc, const char* const* argv);

/// Executes the command. The artifact goes to config.output (resolved
/// against $OPUC_OUTPUT_DIR when relative) or to `out`; nothing is written
/// when the command fails before producing it. Diagnostics go to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Convenience wrapper used by main and tests.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// The artifact text a command would emit, or an Error.
std::string render(const RunConfig& config, int& status);

}  // namespace opuc::cli

#include "io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "json.hpp"

namespace opuc::cli {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(std::string_view text, std::string_view context) {
  const auto t = trim(text);
  double value = 0.0;
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  if (!t.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (t.empty() || ec != std::errc{} || ptr != end) {
    throw Error(ErrorKind::parse, std::string(context) + ": '" + std::string(t) + "' is not a number");
  }
  return value;
}

Complex pair_from_json(const nlohmann::json& j, std::size_t index) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw Error(ErrorKind::parse, "alpha entry " + std::to_string(index) + " is not a [re, im] pair");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

Complex parse_complex(std::string_view text) {
  const auto comma = text.find(',');
  if (comma == std::string_view::npos) return {parse_number(text, "complex value"), 0.0};
  return {parse_number(text.substr(0, comma), "real part"),
          parse_number(text.substr(comma + 1), "imaginary part")};
}

VerblunskySequence parse_alphas(std::string_view text) {
  const auto body = trim(text);
  std::vector<Complex> coeffs;
  if (!body.empty() && (body.front() == '[' || body.front() == '{')) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::parse, std::string("alpha JSON: ") + e.what());
    }
    const nlohmann::json* list = &doc;
    if (doc.is_object()) {
      if (!doc.contains("alphas")) throw Error(ErrorKind::parse, "alpha JSON object has no \"alphas\" key");
      list = &doc["alphas"];
    }
    if (!list->is_array()) throw Error(ErrorKind::parse, "alphas must be a list of [re, im] pairs");
    for (std::size_t i = 0; i < list->size(); ++i) coeffs.push_back(pair_from_json((*list)[i], i));
  } else {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      auto eol = text.find('\n', pos);
      if (eol == std::string_view::npos) eol = text.size();
      const auto line = trim(text.substr(pos, eol - pos));
      ++line_no;
      pos = eol + 1;
      if (line.empty() || line.front() == '#') continue;
      const auto comma = line.find(',');
      if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
        throw Error(ErrorKind::parse, "line " + std::to_string(line_no) + ": expected re,im");
      }
      const std::string where = "line " + std::to_string(line_no);
      coeffs.emplace_back(parse_number(line.substr(0, comma), where),
                          parse_number(line.substr(comma + 1), where));
    }
  }
  return VerblunskySequence(std::move(coeffs));
}

MeasureSpec parse_measure(std::string_view text) {
  std::vector<Atom> atoms;
  std::vector<double> grid;
  try {
    const YAML::Node doc = YAML::Load(std::string(text));
    if (!doc.IsMap()) throw Error(ErrorKind::parse, "measure file must be a mapping");
    if (const auto node = doc["atoms"]) {
      if (!node.IsSequence()) throw Error(ErrorKind::parse, "atoms must be a list of [theta, weight]");
      for (const auto& a : node) {
        if (!a.IsSequence() || a.size() != 2) {
          throw Error(ErrorKind::parse, "each atom must be [theta, weight]");
        }
        atoms.push_back({a[0].as<double>(), a[1].as<double>()});
      }
    }
    if (const auto node = doc["ac_grid"]) {
      if (!node.IsSequence()) throw Error(ErrorKind::parse, "ac_grid must be a list of samples");
      for (const auto& w : node) grid.push_back(w.as<double>());
    }
    for (const auto& kv : doc) {
      const auto key = kv.first.as<std::string>();
      if (key != "atoms" && key != "ac_grid") {
        throw Error(ErrorKind::parse, "unknown measure field '" + key + "'");
      }
    }
  } catch (const YAML::Exception& e) {
    throw Error(ErrorKind::parse, std::string("measure file: ") + e.what());
  }
  if (atoms.empty() && grid.empty()) {
    throw Error(ErrorKind::parse, "measure file needs atoms, ac_grid, or both");
  }
  return MeasureSpec(std::move(atoms), std::move(grid));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::parse, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

VerblunskySequence load_alphas(const std::filesystem::path& path) {
  return parse_alphas(read_file(path));
}

MeasureSpec load_measure(const std::filesystem::path& path) {
  return parse_measure(read_file(path));
}

}  // namespace opuc::cli

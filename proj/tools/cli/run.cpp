#include "run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "io.hpp"
#include "json.hpp"
#include "opuc/insertion.hpp"
#include "opuc/oracle.hpp"
#include "opuc/verify.hpp"

namespace opuc::cli {
namespace {

using nlohmann::json;

constexpr const char* kSchemaVersion = "1";

// Per-path tolerances for oracle-compare.
constexpr double kSimonTolerance = 1e-10;
constexpr double kGeronimusTolerance = 1e-9;
constexpr double kDeterminantTolerance = 1e-8;
constexpr double kMomentTolerance = 1e-7;

const char* command_name(Command c) {
  switch (c) {
    case Command::insert: return "insert";
    case Command::simon: return "simon";
    case Command::decay: return "decay";
    case Command::oracle_compare: return "oracle-compare";
    case Command::verify: return "verify";
  }
  return "?";
}

/// Everything a measure-driven command needs from its source.
struct LoadedSource {
  VerblunskySequence alphas;
  std::function<MomentSequence(std::size_t)> moments;
};

LoadedSource load_source(const RunConfig& config) {
  const std::size_t count = config.n_max + 1;
  LoadedSource s;
  if (const auto* f = std::get_if<AlphaFileSource>(&config.source)) {
    s.alphas = load_alphas(f->path);
    const auto alphas = s.alphas;
    s.moments = [alphas](std::size_t k) { return moments_from_alphas(alphas, k); };
  } else if (const auto* c = std::get_if<CatalogSource>(&config.source)) {
    const auto entry = catalog(c->name, c->params);
    s.alphas = entry.alphas(count);
    s.moments = [entry](std::size_t k) { return entry.moments(k); };
  } else if (const auto* m = std::get_if<MeasureFileSource>(&config.source)) {
    const auto measure = load_measure(m->path);
    const auto oracle = alphas_from_moments(moments(measure, count), config.n_max);
    if (oracle.alphas.size() < count) {
      throw Error(ErrorKind::insufficient_data,
                  "measure has " + std::to_string(oracle.alphas.size()) +
                      " Verblunsky coefficients before its terminator; " + std::to_string(count) +
                      " needed");
    }
    s.alphas = oracle.alphas;
    s.moments = [measure](std::size_t k) { return moments(measure, k); };
  } else {
    throw Error(ErrorKind::parameter, "no input source given");
  }
  return s;
}

json header(const RunConfig& config, const PointMassSpec& mass) {
  return json{{"schema", std::string("opuc.") + command_name(config.command) + "/" + kSchemaVersion},
              {"omega", mass.omega()},
              {"gamma", mass.gamma()},
              {"n_max", config.n_max}};
}

std::string csv_preamble(const RunConfig& config) {
  return std::string("# opuc.") + command_name(config.command) + "/" + kSchemaVersion + "\n";
}

std::string render_table(const RunConfig& config, const PointMassSpec& mass,
                         const InsertionResult& r) {
  const auto& nu = r.alphas_nu;
  if (config.format == Format::json) {
    json doc = header(config, mass);
    json rows = json::array();
    json pairs = json::array();
    for (std::size_t n = 0; n < nu.size(); ++n) {
      if (config.command == Command::decay) {
        rows.push_back({{"n", n}, {"abs", std::abs(nu[n])}});
      } else {
        rows.push_back({{"n", n},
                        {"re", nu[n].real()},
                        {"im", nu[n].imag()},
                        {"abs", std::abs(nu[n])},
                        {"kernel_diag", r.diagnostics[n].kernel_diag}});
      }
      pairs.push_back({nu[n].real(), nu[n].imag()});
    }
    doc["rows"] = std::move(rows);
    doc["alphas"] = std::move(pairs);
    return doc.dump(2) + "\n";
  }
  std::ostringstream s;
  s << csv_preamble(config);
  if (config.command == Command::decay) {
    s << "n,abs\n";
    for (std::size_t n = 0; n < nu.size(); ++n) s << n << ',' << format_double(std::abs(nu[n])) << '\n';
  } else {
    s << "n,re,im,abs,kernel_diag\n";
    for (std::size_t n = 0; n < nu.size(); ++n) {
      s << n << ',' << format_double(nu[n].real()) << ',' << format_double(nu[n].imag()) << ','
        << format_double(std::abs(nu[n])) << ',' << format_double(r.diagnostics[n].kernel_diag)
        << '\n';
    }
  }
  return s.str();
}

struct PathColumn {
  const char* name;
  double tolerance;
  std::vector<std::optional<double>> diffs;
  double worst() const {
    double w = 0.0;
    for (const auto& d : diffs)
      if (d) w = std::max(w, *d);
    return w;
  }
  std::size_t compared() const {
    return static_cast<std::size_t>(std::count_if(diffs.begin(), diffs.end(), [](auto& d) { return d.has_value(); }));
  }
};

std::string render_oracle_compare(const RunConfig& config, const PointMassSpec& mass,
                                  const LoadedSource& src, int& status) {
  const std::size_t n_max = config.n_max;
  const auto fast = insert_point_mass(src.alphas, mass, n_max).alphas_nu;
  const auto simon = insert_point_mass_simon(src.alphas, mass, n_max).alphas_nu;

  PathColumn simon_col{"simon", kSimonTolerance, {}};
  PathColumn geronimus_col{"geronimus", kGeronimusTolerance, {}};
  PathColumn determinant_col{"determinant", kDeterminantTolerance, {}};
  PathColumn moment_col{"moments", kMomentTolerance, {}};

  // Oracles stop at their depth cap; alpha_n(d nu) needs degree n + 1.
  const std::size_t oracle_top = std::min(n_max, kOracleMaxDegree - 1);
  VerblunskySequence from_moments;
  {
    const auto mu = src.moments(oracle_top + 1);
    from_moments = alphas_from_moments(moments_of_nu(mu, mass), oracle_top).alphas;
  }

  for (std::size_t n = 0; n <= n_max; ++n) {
    simon_col.diffs.push_back(std::abs(fast[n] - simon[n]));
    const Complex at_zero = perturbed_monic_value(src.alphas, mass, n + 1, 0.0);
    geronimus_col.diffs.push_back(std::abs(fast[n] + std::conj(at_zero)));
    if (n <= oracle_top) {
      determinant_col.diffs.push_back(std::abs(fast[n] - verblunsky_via_determinant(src.alphas, mass, n + 1)));
    } else {
      determinant_col.diffs.emplace_back();
    }
    if (n < from_moments.size()) {
      moment_col.diffs.push_back(std::abs(fast[n] - from_moments[n]));
    } else {
      moment_col.diffs.emplace_back();
    }
  }

  const std::vector<const PathColumn*> cols{&simon_col, &geronimus_col, &determinant_col, &moment_col};
  bool ok = true;
  for (const auto* c : cols) ok = ok && c->worst() <= c->tolerance;
  status = ok ? exit_code::ok : exit_code::verification;

  if (config.format == Format::json) {
    json doc = header(config, mass);
    json rows = json::array();
    for (std::size_t n = 0; n <= n_max; ++n) {
      json row{{"n", n}, {"re", fast[n].real()}, {"im", fast[n].imag()}};
      for (const auto* c : cols) row[c->name] = c->diffs[n] ? json(*c->diffs[n]) : json(nullptr);
      rows.push_back(std::move(row));
    }
    json summary = json::object();
    for (const auto* c : cols) {
      summary[c->name] = {{"max_abs_diff", c->worst()},
                          {"tolerance", c->tolerance},
                          {"degrees_compared", c->compared()},
                          {"pass", c->worst() <= c->tolerance}};
    }
    doc["rows"] = std::move(rows);
    doc["summary"] = std::move(summary);
    doc["pass"] = ok;
    return doc.dump(2) + "\n";
  }
  std::ostringstream s;
  s << csv_preamble(config) << "n,re,im";
  for (const auto* c : cols) s << ',' << c->name;
  s << '\n';
  for (std::size_t n = 0; n <= n_max; ++n) {
    s << n << ',' << format_double(fast[n].real()) << ',' << format_double(fast[n].imag());
    for (const auto* c : cols) {
      s << ',';
      if (c->diffs[n]) s << format_double(*c->diffs[n]);
    }
    s << '\n';
  }
  for (const auto* c : cols) {
    s << "# max," << c->name << ',' << format_double(c->worst()) << ",tolerance,"
      << format_double(c->tolerance) << ',' << (c->worst() <= c->tolerance ? "pass" : "fail") << '\n';
  }
  return s.str();
}

std::string render_verify(const RunConfig& config, int& status) {
  const auto results = verify::run_all(config.seed, !config.serial);
  const bool ok = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
  status = ok ? exit_code::ok : exit_code::verification;
  if (config.format == Format::json) {
    json doc{{"schema", std::string("opuc.verify/") + kSchemaVersion}, {"seed", config.seed}};
    json suites = json::array();
    for (const auto& r : results) {
      suites.push_back({{"suite", r.name},
                        {"pass", r.passed},
                        {"worst", r.worst},
                        {"tolerance", r.tolerance},
                        {"detail", r.detail}});
    }
    doc["suites"] = std::move(suites);
    doc["pass"] = ok;
    return doc.dump(2) + "\n";
  }
  std::ostringstream s;
  s << "# opuc.verify/" << kSchemaVersion << "\nsuite,status,worst,tolerance,detail\n";
  for (const auto& r : results) {
    s << r.name << ',' << (r.passed ? "pass" : "fail") << ',' << format_double(r.worst) << ','
      << format_double(r.tolerance) << ",\"" << r.detail << "\"\n";
  }
  return s.str();
}

std::filesystem::path resolve_output(const std::filesystem::path& p) {
  if (p.is_absolute()) return p;
  if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0') {
    return std::filesystem::path(dir) / p;
  }
  return p;
}

void add_common_options(CLI::App* app, std::string& alphas, std::string& catalog_name,
                        std::string& param_a, std::vector<std::string>& atoms, std::string& measure,
                        std::optional<double>& omega, std::optional<double>& omega_degrees,
                        std::optional<double>& gamma, std::optional<std::size_t>& n_max,
                        std::string& format, std::string& output) {
  app->add_option("--alphas", alphas, "Verblunsky coefficient file (re,im lines or JSON)");
  app->add_option("--catalog", catalog_name,
                  "catalog measure: lebesgue | single-coefficient | constant-coefficient | atomic");
  app->add_option("--a", param_a, "catalog coefficient a as re,im");
  app->add_option("--atom", atoms, "catalog atom as theta,weight (repeatable)");
  app->add_option("--measure", measure, "measure file with atoms and/or ac_grid");
  app->add_option("--omega", omega, "angle of the inserted atom, radians");
  app->add_option("--omega-degrees", omega_degrees, "angle of the inserted atom, degrees");
  app->add_option("--gamma", gamma, "weight of the inserted atom, in (0, 1)");
  app->add_option("--n-max", n_max, "highest perturbed coefficient index");
  app->add_option("--format", format, "csv | json")->capture_default_str();
  app->add_option("--output", output, "output path (relative paths resolve against $OPUC_OUTPUT_DIR)");
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_coefficient:
    case ErrorKind::parameter:
    case ErrorKind::resolution: return exit_code::parameter;
    case ErrorKind::parse: return exit_code::parse;
    case ErrorKind::insufficient_data: return exit_code::insufficient_data;
    case ErrorKind::oracle_degeneracy: return exit_code::oracle_degeneracy;
    case ErrorKind::numeric_range: return exit_code::internal;
  }
  return exit_code::internal;
}

std::string diagnostic(ErrorKind kind, const std::string& message) {
  std::string flat = message;
  std::replace(flat.begin(), flat.end(), '\n', ' ');
  std::replace(flat.begin(), flat.end(), '"', '\'');
  return "opuc: error kind=" + std::string(to_string(kind)) +
         " exit=" + std::to_string(exit_code_for(kind)) + " message=\"" + flat + "\"";
}

ParsedArgs parse_args(int argc, const char* const* argv) {
  CLI::App app{"Verblunsky coefficients under point-mass insertion", "opuc"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string alphas, catalog_name, param_a, measure, format = "csv", output;
  std::vector<std::string> atoms;
  std::optional<double> omega, omega_degrees, gamma;
  std::optional<std::size_t> n_max;
  std::uint64_t seed = cfg.seed;
  bool serial = false;

  struct Sub {
    Command command;
    const char* name;
    const char* help;
  };
  const Sub subs[] = {
      {Command::insert, "insert", "perturbed coefficients by the closed-form update"},
      {Command::simon, "simon", "perturbed coefficients by the summation formula"},
      {Command::decay, "decay", "moduli of the perturbed coefficients"},
      {Command::oracle_compare, "oracle-compare", "per-degree differences between all routes"},
  };
  for (const auto& s : subs) {
    auto* sub = app.add_subcommand(s.name, s.help);
    add_common_options(sub, alphas, catalog_name, param_a, atoms, measure, omega, omega_degrees,
                       gamma, n_max, format, output);
  }
  auto* verify_cmd = app.add_subcommand("verify", "run the invariant suites");
  verify_cmd->add_option("--seed", seed, "base seed for the random cases")->capture_default_str();
  verify_cmd->add_flag("--serial", serial, "run suites one after another");
  verify_cmd->add_option("--format", format, "csv | json")->capture_default_str();
  verify_cmd->add_option("--output", output, "output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    return {std::nullopt, app.help()};
  } catch (const CLI::ParseError& e) {
    throw Error(ErrorKind::parse, e.what());
  }

  if (verify_cmd->parsed()) {
    cfg.command = Command::verify;
  } else {
    for (const auto& s : subs) {
      if (app.got_subcommand(s.name)) cfg.command = s.command;
    }
  }

  if (format == "csv") {
    cfg.format = Format::csv;
  } else if (format == "json") {
    cfg.format = Format::json;
  } else {
    throw Error(ErrorKind::parameter, "format must be csv or json, got '" + format + "'");
  }
  if (!output.empty()) cfg.output = output;
  cfg.seed = seed;
  cfg.serial = serial;
  if (cfg.command == Command::verify) return {cfg, {}};

  int sources = 0;
  if (!alphas.empty()) {
    cfg.source = AlphaFileSource{alphas};
    ++sources;
  }
  if (!catalog_name.empty()) {
    CatalogParams params;
    if (!param_a.empty()) params.a = parse_complex(param_a);
    for (const auto& a : atoms) {
      const Complex tw = parse_complex(a);
      params.atoms.push_back({tw.real(), tw.imag()});
    }
    cfg.source = CatalogSource{catalog_name, params};
    ++sources;
  } else if (!param_a.empty() || !atoms.empty()) {
    throw Error(ErrorKind::parameter, "--a and --atom only apply to --catalog");
  }
  if (!measure.empty()) {
    cfg.source = MeasureFileSource{measure};
    ++sources;
  }
  if (sources != 1) {
    throw Error(ErrorKind::parameter, "exactly one of --alphas, --catalog, --measure is required");
  }
  if (omega && omega_degrees) throw Error(ErrorKind::parameter, "give --omega or --omega-degrees, not both");
  if (omega_degrees) omega = *omega_degrees * std::numbers::pi / 180.0;
  if (!omega) throw Error(ErrorKind::parameter, "--omega (or --omega-degrees) is required");
  if (!gamma) throw Error(ErrorKind::parameter, "--gamma is required");
  if (!n_max) throw Error(ErrorKind::parameter, "--n-max is required");
  cfg.omega = *omega;
  cfg.gamma = *gamma;
  cfg.n_max = *n_max;
  [[maybe_unused]] const PointMassSpec validated(cfg.omega, cfg.gamma);
  return {cfg, {}};
}

std::string render(const RunConfig& config, int& status) {
  status = exit_code::ok;
  if (config.command == Command::verify) return render_verify(config, status);
  const PointMassSpec mass(config.omega, config.gamma);
  const LoadedSource src = load_source(config);
  switch (config.command) {
    case Command::insert:
    case Command::decay: return render_table(config, mass, insert_point_mass(src.alphas, mass, config.n_max));
    case Command::simon: return render_table(config, mass, insert_point_mass_simon(src.alphas, mass, config.n_max));
    case Command::oracle_compare: return render_oracle_compare(config, mass, src, status);
    case Command::verify: break;
  }
  return {};
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  int status = exit_code::ok;
  std::string artifact;
  try {
    artifact = render(config, status);
  } catch (const Error& e) {
    err << diagnostic(e.kind(), e.what()) << '\n';
    return exit_code_for(e.kind());
  }
  if (config.output) {
    const auto path = resolve_output(*config.output);
    std::ofstream f(path, std::ios::binary);
    if (!f) {
      err << diagnostic(ErrorKind::parameter, "cannot write " + path.string()) << '\n';
      return exit_code::parameter;
    }
    f << artifact;
  } else {
    out << artifact;
  }
  if (status == exit_code::verification) {
    err << "opuc: error kind=verification exit=" << exit_code::verification
        << " message=\"one or more checks exceeded tolerance\"\n";
  }
  return status;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  try {
    const auto parsed = parse_args(argc, argv);
    if (!parsed.config) {
      out << parsed.help_text;
      return exit_code::ok;
    }
    return run(*parsed.config, out, err);
  } catch (const Error& e) {
    err << diagnostic(e.kind(), e.what()) << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "opuc: error kind=internal exit=1 message=\"" << e.what() << "\"\n";
    return exit_code::internal;
  }
}

}  // namespace opuc::cli

// Prints one PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cli/run.hpp"
#include "opuc/insertion.hpp"
#include "opuc/measures.hpp"
#include "opuc/oracle.hpp"
#include "opuc/random.hpp"
#include "opuc/verify.hpp"

using namespace opuc;

namespace {

constexpr std::uint64_t kSeed = 424242;

struct Outcome {
  bool passed;
  std::string detail;
};

struct Worst {
  double value = 0.0;
  bool broken = false;
  void observe(double r) {
    if (!std::isfinite(r)) broken = true;
    value = std::max(value, r);
  }
  bool within(double tol) const { return !broken && value <= tol; }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Outcome measured(const Worst& w, double tol, double seconds = -1.0, double budget = -1.0) {
  const bool in_time = budget < 0.0 || seconds <= budget;
  std::string d = "worst " + fmt(w.value) + " (tol " + fmt(tol) + ")";
  if (budget >= 0.0) d += ", " + fmt(seconds) + " s (budget " + fmt(budget) + " s)";
  return {w.within(tol) && in_time, d};
}

VerblunskySequence zeros(std::size_t n) { return VerblunskySequence(std::vector<Complex>(n)); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome lebesgue_closed_form() {
  const auto t0 = std::chrono::steady_clock::now();
  random::Engine rng(kSeed + 1);
  Worst w;
  const auto alphas = zeros(101);
  std::vector<Complex> c(12, Complex{});
  c[0] = 1.0;
  const MomentSequence lebesgue(c);
  for (int trial = 0; trial < 10; ++trial) {
    const auto mass = random::mass(rng);
    const auto nu = insert_point_mass(alphas, mass, 100).alphas_nu;
    for (std::size_t n = 0; n <= 100; ++n) {
      const Complex closed = std::pow(std::conj(mass.zeta()), static_cast<int>(n + 1)) /
                             (mass.odds() + static_cast<double>(n + 1));
      w.observe(std::abs(nu[n] - closed));
    }
    // Spot check against the moment oracle.
    const auto oracle = alphas_from_moments(moments_of_nu(lebesgue, mass), 10);
    for (std::size_t n = 0; n <= 10; ++n) w.observe(std::abs(nu[n] - oracle.alphas[n]));
  }
  return measured(w, 1e-12, seconds_since(t0), 1.0);
}

Outcome path_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  random::Engine rng(kSeed + 2);
  Worst w;
  for (int trial = 0; trial < 100; ++trial) {
    const auto alphas = random::sequence(rng, 51, 0.8);
    const auto mass = random::mass(rng);
    const auto fast = insert_point_mass(alphas, mass, 49).alphas_nu;
    const auto simon = insert_point_mass_simon(alphas, mass, 49).alphas_nu;
    for (std::size_t n = 0; n <= 49; ++n) w.observe(std::abs(fast[n] - simon[n]));
  }
  return measured(w, 1e-10, seconds_since(t0), 5.0);
}

Outcome determinant_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  random::Engine rng(kSeed + 3);
  Worst w;
  for (int trial = 0; trial < 25; ++trial) {
    const auto alphas = random::sequence(rng, 16, 0.7);
    const auto mass = random::mass(rng, 0.1, 0.9);
    const auto fast = insert_point_mass(alphas, mass, 15).alphas_nu;
    for (std::size_t n = 1; n <= 16; ++n) w.observe(std::abs(verblunsky_via_determinant(alphas, mass, n) - fast[n - 1]));
  }
  return measured(w, 1e-8, seconds_since(t0), 10.0);
}

Outcome moment_loop() {
  const auto t0 = std::chrono::steady_clock::now();
  random::Engine rng(kSeed + 4);
  Worst w;
  std::size_t compared = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto count = static_cast<std::size_t>(2 + rng() % 9);
    const auto measure = random::atomic_measure(rng, count);
    const PointMassSpec mass(random::angle_away_from(rng, measure, 0.1), random::uniform(rng, 0.1, 0.9));
    const auto mu = moments(measure, count + 1);
    const auto base = alphas_from_moments(mu, count);
    const auto nu = alphas_from_moments(moments_of_nu(mu, mass), count).alphas;
    if (!base.terminator || base.alphas.empty() || nu.size() < base.alphas.size()) {
      w.broken = true;
      continue;
    }
    const auto fast = insert_point_mass(base.alphas, mass, base.alphas.size() - 1).alphas_nu;
    for (std::size_t n = 0; n < fast.size(); ++n) {
      w.observe(std::abs(fast[n] - nu[n]));
      ++compared;
    }
  }
  auto out = measured(w, 1e-7, seconds_since(t0), 10.0);
  out.detail += ", " + std::to_string(compared) + " degrees";
  return out;
}

Outcome geronimus() {
  random::Engine rng(kSeed + 5);
  Worst w;
  for (int trial = 0; trial < 5; ++trial) {
    const auto alphas = random::sequence(rng, 21, 0.8);
    const auto mass = random::mass(rng);
    const auto nu = insert_point_mass(alphas, mass, 20).alphas_nu;
    for (int p = 0; p < 20; ++p) {
      const Complex z = random::in_disk(rng, 0.9);
      const auto family = eval_family(nu, z, 20);
      for (std::size_t n = 0; n <= 20; ++n) w.observe(std::abs(perturbed_monic_value(alphas, mass, n, z) - family[n].phi));
    }
  }
  return measured(w, 1e-9);
}

Outcome block_determinant() {
  random::Engine rng(kSeed + 6);
  Worst w;
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = static_cast<Eigen::Index>(1 + trial % 8);
    Matrix a(n, n);
    Vector v(n);
    RowVector row(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      v(j) = random::in_disk(rng, 1.0);
      row(j) = random::in_disk(rng, 1.0);
      for (Eigen::Index k = 0; k < n; ++k) a(j, k) = random::in_disk(rng, 1.0);
    }
    const Complex beta = random::in_disk(rng, 1.0);
    Matrix full(n + 1, n + 1);
    full << a, v, row, beta;
    const Complex direct = full.fullPivLu().determinant();
    w.observe(std::abs(block_det(a, v, row, beta) - direct) / std::abs(direct));
  }
  return measured(w, 1e-9);
}

Outcome rank_one() {
  random::Engine rng(kSeed + 7);
  Worst identity;
  Worst inverse;
  for (std::size_t n = 1; n <= 12; ++n) {
    for (int trial = 0; trial < 10; ++trial) {
      // The M M^-1 residual scales with eps * cond(M), cond(M) = 1 + gamma K / (1 - gamma).
      const auto alphas = random::sequence(rng, n, 0.5);
      const auto mass = random::mass(rng);
      const auto s = rank_one_structure(alphas, mass, n);
      const auto size = static_cast<Eigen::Index>(n);
      identity.observe((rank_one_matrix(s) * rank_one_inverse(s) - Matrix::Identity(size, size)).cwiseAbs().maxCoeff());
      const Matrix a = gram_matrix(alphas, mass, n).entries;
      const Matrix generic = a.partialPivLu().solve(Matrix::Identity(size, size));
      inverse.observe((gram_inverse_via_rank_one(alphas, mass, n) - generic).cwiseAbs().maxCoeff() /
                      generic.cwiseAbs().maxCoeff());
    }
  }
  const auto a = measured(identity, 1e-12);
  const auto b = measured(inverse, 1e-10);
  return {a.passed && b.passed, "M*M^-1 " + a.detail + "; A^-1 " + b.detail};
}

Outcome invariants() {
  using Fn = verify::SuiteResult (*)(std::uint64_t);
  const Fn suites[] = {verify::norm_product,  verify::circle_modulus, verify::reversed_at_zero,
                       verify::cd_agreement,  verify::nontriviality,  verify::rotation_covariance};
  bool ok = true;
  std::ostringstream d;
  for (auto fn : suites) {
    const auto r = fn(kSeed + 8);
    ok = ok && r.passed;
    d << (d.tellp() > 0 ? "; " : "") << r.name << ' ' << (r.passed ? "ok" : "FAILED") << ' ' << fmt(r.worst);
  }
  return {ok, d.str()};
}

Outcome performance() {
  constexpr std::size_t n = 1'000'000;
  random::Engine rng(kSeed + 9);
  std::vector<Complex> raw(n);
  for (std::size_t j = 0; j < n; ++j) raw[j] = random::in_disk(rng, 0.5 / static_cast<double>(j + 1));
  const VerblunskySequence alphas(std::move(raw));
  const auto mass = random::mass(rng);
  const auto t0 = std::chrono::steady_clock::now();
  const auto nu = insert_point_mass(alphas, mass, n - 1).alphas_nu;
  const double elapsed = seconds_since(t0);
  bool inside = nu.size() == n;
  for (const auto& v : nu) inside = inside && std::abs(v) < 1.0;
  return {inside && elapsed <= 5.0, std::to_string(n) + " coefficients in " + fmt(elapsed) + " s (budget 5 s)"};
}

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli_run(std::vector<std::string> args) {
  args.insert(args.begin(), "opuc");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

Outcome cli_conformance() {
  std::vector<std::string> failures;

  const auto insert = cli_run({"insert", "--catalog", "lebesgue", "--omega", "0", "--gamma", "0.5", "--n-max", "2",
                               "--format", "csv"});
  {
    std::istringstream in(insert.out);
    std::string line;
    std::vector<double> moduli;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#' || line[0] == 'n') continue;
      std::vector<std::string> cells;
      std::istringstream cs(line);
      std::string cell;
      while (std::getline(cs, cell, ',')) cells.push_back(cell);
      if (cells.size() == 5) moduli.push_back(std::stod(cells[3]));
    }
    const double expected[] = {0.5, 1.0 / 3.0, 0.25};
    bool ok = insert.code == 0 && moduli.size() == 3;
    for (std::size_t j = 0; ok && j < 3; ++j) ok = std::abs(moduli[j] - expected[j]) <= 1e-12;
    if (!ok) failures.push_back("insert example");
  }

  const auto compare = cli_run({"oracle-compare", "--catalog", "lebesgue", "--omega", "0", "--gamma", "0.5",
                                "--n-max", "10"});
  {
    bool ok = compare.code == 0;
    std::istringstream in(compare.out);
    std::string line;
    bool saw_max = false;
    while (std::getline(in, line)) {
      if (line.rfind("# max,", 0) != 0) continue;
      saw_max = true;
      // # max,<path>,<value>,tolerance,<tol>,<status>
      const auto first = line.find(',', 6);
      const auto second = line.find(',', first + 1);
      ok = ok && std::stod(line.substr(first + 1, second - first - 1)) <= 1e-10;
    }
    if (!ok || !saw_max) failures.push_back("oracle-compare example");
  }

  const auto bad = cli_run({"insert", "--catalog", "lebesgue", "--omega", "0", "--gamma", "1.5", "--n-max", "2"});
  if (bad.code != cli::exit_code::parameter || !bad.out.empty() || bad.err.find("kind=parameter") == std::string::npos) {
    failures.push_back("gamma 1.5 example");
  }

  const auto verify = cli_run({"verify"});
  if (verify.code != 0) failures.push_back("verify exit " + std::to_string(verify.code));

  std::string d = failures.empty() ? "3 examples and verify ok" : "failed:";
  for (const auto& f : failures) d += " " + f + ";";
  return {failures.empty(), d};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria{
      {1, "lebesgue-closed-form", lebesgue_closed_form},
      {2, "closed-form-vs-summation", path_equivalence},
      {3, "determinant-oracle", determinant_oracle},
      {4, "moment-oracle-loop", moment_loop},
      {5, "monic-value-consistency", geronimus},
      {6, "bordered-determinant", block_determinant},
      {7, "rank-one-inverse", rank_one},
      {8, "invariant-suite", invariants},
      {9, "streaming-performance", performance},
      {10, "cli-conformance", cli_conformance},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.passed) ++failed;
    std::cout << (o.passed ? "PASS" : "FAIL") << " criterion " << c.id << " " << c.name << ": " << o.detail << '\n';
  }
  std::cout << (failed == 0 ? "all criteria pass" : std::to_string(failed) + " criteria failed") << '\n';
  return failed == 0 ? 0 : 1;
}

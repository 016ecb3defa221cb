#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "opuc/oracle.hpp"
#include "opuc/types.hpp"

namespace opuc {

struct Atom {
  double theta;
  double weight;
};

/// Angles closer than this are one atom.
inline constexpr double kAtomMergeTolerance = 1e-12;
/// Allowed deviation of the total mass from one.
inline constexpr double kNormalizationTolerance = 1e-12;

/// Probability measure on the circle: atoms plus an optional absolutely
/// continuous density sampled at theta_g = 2 pi g / G (density with respect
/// to d theta, integrated by the periodic trapezoid rule).
class MeasureSpec {
 public:
  MeasureSpec(std::vector<Atom> atoms, std::vector<double> ac_grid)
      : atoms_(canonical_atoms(std::move(atoms))), ac_grid_(std::move(ac_grid)) {
    for (double w : ac_grid_) {
      if (!std::isfinite(w) || w < 0.0) {
        throw Error(ErrorKind::parameter, "absolutely continuous samples must be finite and >= 0");
      }
    }
    if (atoms_.empty() && ac_grid_.empty()) {
      throw Error(ErrorKind::parameter, "measure needs atoms, an ac_grid, or both");
    }
    const double mass = total_mass();
    if (std::abs(mass - 1.0) > kNormalizationTolerance) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "total mass " << mass << " differs from 1";
      throw Error(ErrorKind::parameter, msg.str());
    }
  }

  static MeasureSpec uniform(std::size_t grid_size) {
    return MeasureSpec({}, std::vector<double>(grid_size, 1.0 / (2.0 * std::numbers::pi)));
  }

  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  const std::vector<double>& ac_grid() const noexcept { return ac_grid_; }

  double ac_mass() const {
    if (ac_grid_.empty()) return 0.0;
    double sum = 0.0;
    for (double w : ac_grid_) sum += w;
    return sum * 2.0 * std::numbers::pi / static_cast<double>(ac_grid_.size());
  }

  double total_mass() const {
    double sum = ac_mass();
    for (const auto& a : atoms_) sum += a.weight;
    return sum;
  }

 private:
  static std::vector<Atom> canonical_atoms(std::vector<Atom> atoms) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (auto& a : atoms) {
      if (!std::isfinite(a.theta) || !std::isfinite(a.weight) || !(a.weight > 0.0)) {
        throw Error(ErrorKind::parameter, "atoms need a finite angle and a positive weight");
      }
      a.theta = canonical_angle(a.theta);
    }
    std::sort(atoms.begin(), atoms.end(), [](const Atom& x, const Atom& y) { return x.theta < y.theta; });
    std::vector<Atom> merged;
    for (const auto& a : atoms) {
      if (!merged.empty() && a.theta - merged.back().theta <= kAtomMergeTolerance) {
        merged.back().weight += a.weight;
      } else {
        merged.push_back(a);
      }
    }
    // 0 and 2 pi - epsilon are the same point.
    if (merged.size() > 1 && merged.front().theta + two_pi - merged.back().theta <= kAtomMergeTolerance) {
      merged.front().weight += merged.back().weight;
      merged.pop_back();
    }
    return merged;
  }

  std::vector<Atom> atoms_;
  std::vector<double> ac_grid_;
};

/// c_0..c_{k_max}: atoms summed exactly, the density by the periodic
/// trapezoid rule. The grid must have at least 4 k_max samples.
inline MomentSequence moments(const MeasureSpec& measure, std::size_t k_max) {
  const auto& grid = measure.ac_grid();
  if (!grid.empty() && grid.size() < 4 * k_max) {
    throw Error(ErrorKind::resolution, "ac_grid of " + std::to_string(grid.size()) +
                                           " samples is too coarse for moments through c_" +
                                           std::to_string(k_max) + " (need >= " +
                                           std::to_string(4 * k_max) + ")");
  }
  std::vector<Complex> c(k_max + 1, Complex{0.0, 0.0});
  for (std::size_t k = 0; k <= k_max; ++k) {
    const double kd = static_cast<double>(k);
    for (const auto& a : measure.atoms()) c[k] += a.weight * std::polar(1.0, -kd * a.theta);
    if (!grid.empty()) {
      const double g_size = static_cast<double>(grid.size());
      const double step = 2.0 * std::numbers::pi / g_size;
      Complex sum{0.0, 0.0};
      for (std::size_t g = 0; g < grid.size(); ++g) {
        // Reduce k g mod G before forming the angle so large k stay accurate.
        const double phase = static_cast<double>((k * g) % grid.size()) * step;
        sum += grid[g] * std::polar(1.0, -phase);
      }
      c[k] += sum * step;
    }
  }
  return MomentSequence(std::move(c));
}

/// (1 - gamma) mu + gamma delta_omega, merging with an existing atom at omega.
inline MeasureSpec mix_in_atom(const MeasureSpec& measure, const PointMassSpec& mass) {
  const double keep = 1.0 - mass.gamma();
  std::vector<Atom> atoms = measure.atoms();
  for (auto& a : atoms) a.weight *= keep;
  atoms.push_back({mass.omega(), mass.gamma()});
  std::vector<double> grid = measure.ac_grid();
  for (auto& w : grid) w *= keep;
  return MeasureSpec(std::move(atoms), std::move(grid));
}

/// Moments c_0..c_{k_max} of the measure with the given Verblunsky
/// coefficients. Runs the Szego recursion on coefficient vectors and reads
/// each new moment off <1, Phi_{n+1}> = 0. Needs k_max coefficients; O(k_max^2).
inline MomentSequence moments_from_alphas(const VerblunskySequence& alphas, std::size_t k_max) {
  detail::require_coefficients(alphas, k_max, "moments_from_alphas");
  std::vector<Complex> c{Complex{1.0, 0.0}};
  std::vector<Complex> monic{Complex{1.0, 0.0}};  // coefficients of Phi_n, lowest degree first
  c.reserve(k_max + 1);
  for (std::size_t n = 0; n < k_max; ++n) {
    const Complex alpha_bar = std::conj(alphas[n]);
    std::vector<Complex> next(n + 2, Complex{0.0, 0.0});
    for (std::size_t k = 0; k <= n + 1; ++k) {
      if (k >= 1) next[k] += monic[k - 1];
      if (k <= n) next[k] -= alpha_bar * std::conj(monic[n - k]);
    }
    // sum_k b_k conj(c_k) = 0 with b_{n+1} = 1.
    Complex acc{0.0, 0.0};
    for (std::size_t k = 0; k <= n; ++k) acc += next[k] * std::conj(c[k]);
    c.push_back(-std::conj(acc));
    monic = std::move(next);
  }
  return MomentSequence(std::move(c));
}

struct CatalogParams {
  std::optional<Complex> a;
  std::vector<Atom> atoms;
};

/// Named test measure. Sequence-defined entries generate their coefficients
/// and derive moments from them; atomic entries start from exact moments.
class CatalogEntry {
 public:
  using Generator = std::function<Complex(std::size_t)>;

  CatalogEntry(std::string name, std::string description, Generator generator)
      : name_(std::move(name)), description_(std::move(description)), source_(std::move(generator)) {}
  CatalogEntry(std::string name, std::string description, MeasureSpec measure)
      : name_(std::move(name)), description_(std::move(description)), source_(std::move(measure)) {}

  const std::string& name() const noexcept { return name_; }
  const std::string& description() const noexcept { return description_; }
  bool is_atomic() const noexcept { return std::holds_alternative<MeasureSpec>(source_); }

  /// alpha_0..alpha_{count-1}. Atomic entries go through the moment oracle and
  /// fail with insufficient-data past their terminator.
  VerblunskySequence alphas(std::size_t count) const {
    if (const auto* gen = std::get_if<Generator>(&source_)) {
      std::vector<Complex> out;
      out.reserve(count);
      for (std::size_t j = 0; j < count; ++j) out.push_back((*gen)(j));
      return VerblunskySequence(std::move(out));
    }
    if (count == 0) return {};
    const auto& measure = std::get<MeasureSpec>(source_);
    const auto oracle = alphas_from_moments(opuc::moments(measure, count), count - 1);
    if (oracle.alphas.size() < count) {
      throw Error(ErrorKind::insufficient_data,
                  name_ + " has only " + std::to_string(oracle.alphas.size()) +
                      " Verblunsky coefficients before its terminator; " + std::to_string(count) +
                      " requested");
    }
    return oracle.alphas;
  }

  MomentSequence moments(std::size_t k_max) const {
    if (const auto* m = std::get_if<MeasureSpec>(&source_)) return opuc::moments(*m, k_max);
    return moments_from_alphas(alphas(k_max), k_max);
  }

  /// The measure itself, for atomic entries.
  const MeasureSpec* measure() const { return std::get_if<MeasureSpec>(&source_); }

 private:
  std::string name_;
  std::string description_;
  std::variant<Generator, MeasureSpec> source_;
};

inline CatalogEntry catalog(std::string_view name, const CatalogParams& params = {}) {
  auto need_a = [&]() {
    if (!params.a) throw Error(ErrorKind::parameter, std::string(name) + " needs a coefficient a");
    VerblunskySequence::check(*params.a, 0);
    return *params.a;
  };
  if (name == "lebesgue") {
    return {"lebesgue", "normalized arc length; alpha_j = 0", [](std::size_t) { return Complex{}; }};
  }
  if (name == "single-coefficient") {
    const Complex a = need_a();
    return {"single-coefficient", "alpha = (a, 0, 0, ...)",
            [a](std::size_t j) { return j == 0 ? a : Complex{}; }};
  }
  if (name == "constant-coefficient") {
    const Complex a = need_a();
    return {"constant-coefficient", "alpha_j = a for all j", [a](std::size_t) { return a; }};
  }
  if (name == "atomic") {
    if (params.atoms.empty()) throw Error(ErrorKind::parameter, "atomic needs at least one atom");
    return {"atomic", "finite sum of point masses", MeasureSpec(params.atoms, {})};
  }
  throw Error(ErrorKind::parameter, "unknown catalog entry '" + std::string(name) + "'");
}

}  // namespace opuc

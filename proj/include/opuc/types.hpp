#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <sstream>
#include <utility>
#include <vector>

#include "opuc/error.hpp"

namespace opuc {

using Complex = std::complex<double>;

/// Verblunsky coefficients alpha_0 .. alpha_{N-1} of a nontrivial probability
/// measure on the unit circle. Every coefficient is finite with modulus
/// strictly below one; an empty sequence stands for the Lebesgue truncation.
class VerblunskySequence {
 public:
  VerblunskySequence() = default;

  explicit VerblunskySequence(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
    for (std::size_t j = 0; j < coeffs_.size(); ++j) check(coeffs_[j], j);
  }

  /// Throws ErrorKind::invalid_coefficient unless |alpha| < 1 and alpha is finite.
  static void check(Complex alpha, std::size_t index) {
    if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag()) || !(std::abs(alpha) < 1.0)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "coefficient " << index << " = (" << alpha.real() << "," << alpha.imag()
          << ") must be finite with modulus < 1";
      throw Error(ErrorKind::invalid_coefficient, msg.str());
    }
  }

  std::size_t size() const noexcept { return coeffs_.size(); }
  bool empty() const noexcept { return coeffs_.empty(); }
  const Complex& operator[](std::size_t j) const { return coeffs_[j]; }
  std::span<const Complex> coefficients() const noexcept { return coeffs_; }
  auto begin() const noexcept { return coeffs_.begin(); }
  auto end() const noexcept { return coeffs_.end(); }

  /// Prefix alpha_0 .. alpha_{count-1}.
  VerblunskySequence truncated(std::size_t count) const {
    if (count > coeffs_.size()) {
      throw Error(ErrorKind::insufficient_data, "cannot truncate to " + std::to_string(count) +
                                                    " coefficients; only " +
                                                    std::to_string(coeffs_.size()) + " available");
    }
    VerblunskySequence out;
    out.coeffs_.assign(coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(count));
    return out;
  }

  friend bool operator==(const VerblunskySequence&, const VerblunskySequence&) = default;

 private:
  std::vector<Complex> coeffs_;
};

inline double canonical_angle(double theta) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(theta, two_pi);
  if (r < 0.0) r += two_pi;
  if (r >= two_pi) r = 0.0;
  return r;
}

/// A point zeta = e^{i omega} on the unit circle, always built from its angle.
class UnitCirclePoint {
 public:
  UnitCirclePoint() = default;
  explicit UnitCirclePoint(double omega) : omega_(canonical_angle(omega)) {
    if (!std::isfinite(omega)) throw Error(ErrorKind::parameter, "angle must be finite");
  }

  double omega() const noexcept { return omega_; }
  Complex zeta() const { return std::polar(1.0, omega_); }

 private:
  double omega_ = 0.0;
};

/// Smallest distance from the ends of (0, 1) accepted for a mixing weight.
inline constexpr double kGammaMargin = 1e-12;

/// Atom inserted as d nu = (1 - gamma) d mu + gamma delta_omega.
class PointMassSpec {
 public:
  PointMassSpec(double omega, double gamma) : location_(omega), gamma_(gamma) {
    if (!std::isfinite(gamma) || !(gamma > kGammaMargin) || !(gamma < 1.0 - kGammaMargin)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "gamma = " << gamma << " must lie in (1e-12, 1 - 1e-12)";
      throw Error(ErrorKind::parameter, msg.str());
    }
  }

  double omega() const noexcept { return location_.omega(); }
  double gamma() const noexcept { return gamma_; }
  Complex zeta() const { return location_.zeta(); }
  /// (1 - gamma) / gamma, the constant part of the insertion denominators.
  double odds() const noexcept { return (1.0 - gamma_) / gamma_; }

 private:
  UnitCirclePoint location_;
  double gamma_;
};

}  // namespace opuc

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "opuc/error.hpp"
#include "opuc/types.hpp"

namespace opuc {

/// Point evaluation of the monic family at a fixed z, advanced one degree at a
/// time by the Szego recursion.
///
/// phi and phi_star are the monic values Phi_n(z), Phi_n^*(z). Orthonormal
/// values are obtained by dividing by the running norm ||Phi_n||.
/// kernel_diag is sum_{j<=n} |phi_j(z)|^2, which is K_n(z) on the circle.
struct SzegoState {
  std::size_t degree = 0;
  Complex z{0.0, 0.0};
  Complex phi{1.0, 0.0};
  Complex phi_star{1.0, 0.0};
  double norm = 1.0;
  double kernel_diag = 1.0;

  /// Degree-zero state: Phi_0 = Phi_0^* = 1, ||Phi_0|| = 1, K_0 = 1.
  static SzegoState start(Complex z) {
    SzegoState s;
    s.z = z;
    return s;
  }

  Complex orthonormal() const { return phi / norm; }
  Complex orthonormal_star() const { return phi_star / norm; }
};

/// One step of the Szego recursion:
///   Phi_{n+1}(z)   = z Phi_n(z) - conj(alpha_n) Phi_n^*(z)
///   Phi_{n+1}^*(z) = Phi_n^*(z) - alpha_n z Phi_n(z)
///   ||Phi_{n+1}||  = ||Phi_n|| (1 - |alpha_n|^2)^{1/2}
inline SzegoState advance(SzegoState state, Complex alpha) {
  VerblunskySequence::check(alpha, state.degree);
  SzegoState next;
  next.degree = state.degree + 1;
  next.z = state.z;
  const Complex z_phi = state.z * state.phi;
  next.phi = z_phi - std::conj(alpha) * state.phi_star;
  next.phi_star = state.phi_star - alpha * z_phi;
  next.norm = state.norm * std::sqrt(1.0 - std::norm(alpha));
  next.kernel_diag = state.kernel_diag + std::norm(next.phi) / (next.norm * next.norm);
  if (!std::isfinite(next.kernel_diag) || !std::isfinite(next.phi.real()) ||
      !std::isfinite(next.phi.imag()) || !(next.norm > 0.0)) {
    throw Error(ErrorKind::numeric_range,
                "Szego recursion left the double range at degree " + std::to_string(next.degree));
  }
  return next;
}

namespace detail {

inline void require_coefficients(const VerblunskySequence& alphas, std::size_t needed,
                                 const char* what) {
  if (needed > alphas.size()) {
    throw Error(ErrorKind::insufficient_data,
                std::string(what) + " needs " + std::to_string(needed) +
                    " Verblunsky coefficients, got " + std::to_string(alphas.size()));
  }
}

}  // namespace detail

/// Snapshots at degrees 0..n_max.
inline std::vector<SzegoState> eval_family(const VerblunskySequence& alphas, Complex z,
                                           std::size_t n_max) {
  detail::require_coefficients(alphas, n_max, "eval_family");
  std::vector<SzegoState> out;
  out.reserve(n_max + 1);
  out.push_back(SzegoState::start(z));
  for (std::size_t n = 0; n < n_max; ++n) out.push_back(advance(out.back(), alphas[n]));
  return out;
}

/// ||Phi_n|| for n = 0..n_max as a running product of (1 - |alpha_j|^2)^{1/2}.
inline std::vector<double> norms(const VerblunskySequence& alphas, std::size_t n_max) {
  detail::require_coefficients(alphas, n_max, "norms");
  std::vector<double> out;
  out.reserve(n_max + 1);
  out.push_back(1.0);
  for (std::size_t n = 0; n < n_max; ++n) {
    out.push_back(out.back() * std::sqrt(1.0 - std::norm(alphas[n])));
  }
  return out;
}

/// K_n(x, y) = sum_{j<=n} conj(phi_j(x)) phi_j(y).
///
/// value is always the direct sum. closed_form holds the Christoffel-Darboux
/// two-term expression when 1 - conj(x) y is not (numerically) zero.
struct KernelPair {
  Complex value;
  std::optional<Complex> closed_form;
};

/// Below this |1 - conj(x) y| only the summation path is used.
inline constexpr double kCdSingularity = 1e-12;

inline KernelPair cd_kernel(const VerblunskySequence& alphas, Complex x, Complex y,
                            std::size_t n) {
  detail::require_coefficients(alphas, n, "cd_kernel");
  SzegoState sx = SzegoState::start(x);
  SzegoState sy = SzegoState::start(y);
  Complex sum{1.0, 0.0};
  for (std::size_t j = 0; j < n; ++j) {
    sx = advance(sx, alphas[j]);
    sy = advance(sy, alphas[j]);
    sum += std::conj(sx.orthonormal()) * sy.orthonormal();
  }
  KernelPair out{sum, std::nullopt};
  const Complex xy = std::conj(x) * y;
  const Complex gap = 1.0 - xy;
  if (std::abs(gap) > kCdSingularity) {
    out.closed_form = (std::conj(sx.orthonormal_star()) * sy.orthonormal_star() -
                       xy * std::conj(sx.orthonormal()) * sy.orthonormal()) /
                      gap;
  }
  return out;
}

}  // namespace opuc

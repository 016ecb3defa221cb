#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "opuc/szego.hpp"
#include "opuc/types.hpp"

namespace opuc {

/// Per-degree by-products of a point-mass insertion.
struct InsertionDiagnostics {
  double kernel_diag;   // K_n(zeta)
  double denominator;   // (1 - gamma)/gamma + K_n(zeta)
  Complex correction;   // alpha_n(d nu) - alpha_n
};

struct InsertionResult {
  VerblunskySequence alphas_nu;
  std::vector<InsertionDiagnostics> diagnostics;
};

/// Running quantities of the summation route.
struct SimonAuxiliary {
  double q;             // (1 - gamma) + gamma K_n(zeta)
  Complex running_sum;  // sum_{j<=n} alpha_{j-1} phi_j(zeta) / ||Phi_j||, alpha_{-1} = -1
};

struct SimonInsertionResult : InsertionResult {
  std::vector<SimonAuxiliary> auxiliary;
};

struct DecayRow {
  std::size_t n;
  double modulus;
};

namespace detail {

inline void require_insertion_budget(const VerblunskySequence& alphas, std::size_t n_max) {
  // alpha_n(d nu) uses alpha_0..alpha_n and nothing beyond.
  require_coefficients(alphas, n_max + 1, "point-mass insertion");
}

inline VerblunskySequence finish(std::vector<Complex> out) {
  for (std::size_t n = 0; n < out.size(); ++n) {
    if (!std::isfinite(out[n].real()) || !std::isfinite(out[n].imag())) {
      throw Error(ErrorKind::numeric_range,
                  "perturbed coefficient " + std::to_string(n) + " is not finite");
    }
  }
  return VerblunskySequence(std::move(out));
}

}  // namespace detail

/// Verblunsky coefficients alpha_0(d nu) .. alpha_{n_max}(d nu) of
/// d nu = (1 - gamma) d mu + gamma delta_omega, given those of d mu:
///
///   alpha_n(d nu) = alpha_n + (1 - |alpha_n|^2)^{1/2} conj(phi_{n+1}(zeta)) phi_n^*(zeta)
///                             / ((1 - gamma)/gamma + K_n(zeta))
///
/// One Szego state at zeta is advanced in lockstep with the output, so the
/// whole pass costs O(n_max).
inline InsertionResult insert_point_mass(const VerblunskySequence& alphas,
                                         const PointMassSpec& mass, std::size_t n_max) {
  detail::require_insertion_budget(alphas, n_max);
  const double odds = mass.odds();
  std::vector<Complex> out;
  InsertionResult result;
  out.reserve(n_max + 1);
  result.diagnostics.reserve(n_max + 1);

  SzegoState state = SzegoState::start(mass.zeta());
  for (std::size_t n = 0; n <= n_max; ++n) {
    const Complex alpha = alphas[n];
    const SzegoState next = advance(state, alpha);
    const double denominator = odds + state.kernel_diag;
    const Complex correction = std::sqrt(1.0 - std::norm(alpha)) *
                               std::conj(next.orthonormal()) * state.orthonormal_star() /
                               denominator;
    out.push_back(alpha + correction);
    result.diagnostics.push_back({state.kernel_diag, denominator, correction});
    state = next;
  }
  result.alphas_nu = detail::finish(std::move(out));
  return result;
}

/// Same coefficients by the summation formula
///
///   alpha_n(d nu) = alpha_n - q_n^{-1} gamma conj(phi_{n+1}(zeta))
///                   * sum_{j<=n} alpha_{j-1} (||Phi_{n+1}|| / ||Phi_j||) phi_j(zeta)
///
/// with alpha_{-1} = -1. The sum is carried without the ||Phi_{n+1}|| factor
/// and multiplied by it at emission, so the pass is O(n_max).
inline SimonInsertionResult insert_point_mass_simon(const VerblunskySequence& alphas,
                                                    const PointMassSpec& mass,
                                                    std::size_t n_max) {
  detail::require_insertion_budget(alphas, n_max);
  const double gamma = mass.gamma();
  std::vector<Complex> out;
  SimonInsertionResult result;
  out.reserve(n_max + 1);
  result.diagnostics.reserve(n_max + 1);
  result.auxiliary.reserve(n_max + 1);

  SzegoState state = SzegoState::start(mass.zeta());
  Complex running_sum{0.0, 0.0};
  Complex previous_alpha{-1.0, 0.0};
  for (std::size_t n = 0; n <= n_max; ++n) {
    running_sum += previous_alpha * state.orthonormal() / state.norm;
    const Complex alpha = alphas[n];
    const SzegoState next = advance(state, alpha);
    const double q = (1.0 - gamma) + gamma * state.kernel_diag;
    const Complex correction =
        -(gamma / q) * std::conj(next.orthonormal()) * (next.norm * running_sum);
    out.push_back(alpha + correction);
    result.diagnostics.push_back({state.kernel_diag, mass.odds() + state.kernel_diag, correction});
    result.auxiliary.push_back({q, running_sum});
    previous_alpha = alpha;
    state = next;
  }
  result.alphas_nu = detail::finish(std::move(out));
  return result;
}

/// Phi_n(z, d nu) by the polynomial-level update
///
///   Phi_n(z, d nu) = Phi_n(z) - Phi_n(zeta) K_{n-1}(zeta, z) / ((1 - gamma)/gamma + K_{n-1}(zeta))
///
/// where K_{n-1}(zeta, z) = sum_{j<n} conj(phi_j(zeta)) phi_j(z) is the
/// kernel taken as a polynomial in z.
inline Complex perturbed_monic_value(const VerblunskySequence& alphas, const PointMassSpec& mass,
                                     std::size_t n, Complex z) {
  detail::require_coefficients(alphas, n, "perturbed_monic_value");
  if (n == 0) return Complex{1.0, 0.0};
  SzegoState at_z = SzegoState::start(z);
  SzegoState at_zeta = SzegoState::start(mass.zeta());
  Complex kernel{1.0, 0.0};
  for (std::size_t j = 0; j + 1 < n; ++j) {
    at_z = advance(at_z, alphas[j]);
    at_zeta = advance(at_zeta, alphas[j]);
    kernel += std::conj(at_zeta.orthonormal()) * at_z.orthonormal();
  }
  const double kernel_diag = at_zeta.kernel_diag;
  at_z = advance(at_z, alphas[n - 1]);
  at_zeta = advance(at_zeta, alphas[n - 1]);
  return at_z.phi - at_zeta.phi * kernel / (mass.odds() + kernel_diag);
}

inline std::vector<DecayRow> decay_table(const VerblunskySequence& alphas,
                                         const PointMassSpec& mass, std::size_t n_max) {
  const InsertionResult r = insert_point_mass(alphas, mass, n_max);
  std::vector<DecayRow> rows;
  rows.reserve(r.alphas_nu.size());
  for (std::size_t n = 0; n < r.alphas_nu.size(); ++n) rows.push_back({n, std::abs(r.alphas_nu[n])});
  return rows;
}

}  // namespace opuc

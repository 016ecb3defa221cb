#pragma once

// Slow reference computations used to cross-check the streaming insertion
// formulas: bordered determinants over the Gram matrix of the old monic
// family in the new inner product, the rank-one structure of that matrix,
// and a Toeplitz Gram-Schmidt driven by trigonometric moments.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "opuc/szego.hpp"
#include "opuc/types.hpp"

namespace opuc {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RowVector = Eigen::RowVectorXcd;

/// Deepest degree the determinant and moment oracles accept in double precision.
inline constexpr std::size_t kOracleMaxDegree = 20;
/// Largest ratio of LU pivot moduli tolerated before an oracle refuses.
inline constexpr double kOraclePivotRatio = 1e12;
/// |alpha| this close to 1 marks the end of a finitely supported measure.
inline constexpr double kTerminatorTolerance = 1e-8;

namespace detail {

inline void require_oracle_depth(std::size_t n) {
  if (n > kOracleMaxDegree) {
    throw Error(ErrorKind::parameter, "oracle depth " + std::to_string(n) + " exceeds the cap of " +
                                          std::to_string(kOracleMaxDegree));
  }
}

/// LU with partial pivoting that refuses matrices whose pivots spread over
/// more than kOraclePivotRatio.
inline Eigen::PartialPivLU<Matrix> conditioned_lu(const Matrix& a, const char* what) {
  Eigen::PartialPivLU<Matrix> lu(a);
  if (a.rows() == 0) return lu;
  const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
  const double largest = pivots.maxCoeff();
  const double smallest = pivots.minCoeff();
  if (!(smallest > 0.0) || !(largest / smallest <= kOraclePivotRatio) || !std::isfinite(largest)) {
    std::ostringstream msg;
    msg << what << ": pivot ratio " << (smallest > 0.0 ? largest / smallest : INFINITY)
        << " exceeds " << kOraclePivotRatio;
    throw Error(ErrorKind::oracle_degeneracy, msg.str());
  }
  return lu;
}

}  // namespace detail

/// Determinant by pivoted LU, refusing ill-conditioned input. The empty
/// matrix has determinant one.
inline Complex checked_determinant(const Matrix& a) {
  if (a.rows() == 0) return Complex{1.0, 0.0};
  return detail::conditioned_lu(a, "checked_determinant").determinant();
}

/// Gram matrix of Phi_0..Phi_{n-1}(d mu) in the d nu inner product, stored
/// transposed relative to beta: entries(j, k) = beta_{kj} = <Phi_k, Phi_j>_{d nu}
///   = (1 - gamma) ||Phi_k||^2 delta_{kj} + gamma conj(Phi_k(zeta)) Phi_j(zeta).
struct GramMatrix {
  Matrix entries;
  std::size_t size() const { return static_cast<std::size_t>(entries.rows()); }
};

inline GramMatrix gram_matrix(const VerblunskySequence& alphas, const PointMassSpec& mass,
                              std::size_t n) {
  detail::require_coefficients(alphas, n == 0 ? 0 : n - 1, "gram_matrix");
  const double gamma = mass.gamma();
  const auto family = eval_family(alphas, mass.zeta(), n == 0 ? 0 : n - 1);
  GramMatrix g{Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n))};
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      Complex entry = gamma * std::conj(family[k].phi) * family[j].phi;
      if (j == k) entry += (1.0 - gamma) * family[k].norm * family[k].norm;
      g.entries(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = entry;
    }
  }
  return g;
}

/// det [[A, v], [w, beta]] = det(A) (beta - w A^{-1} v), without forming the
/// bordered matrix.
inline Complex block_det(const Matrix& a, const Vector& v, const RowVector& w, Complex beta) {
  if (a.rows() != a.cols() || v.size() != a.rows() || w.size() != a.rows()) {
    throw Error(ErrorKind::parameter, "block_det: shape mismatch");
  }
  if (a.rows() == 0) return beta;
  const auto lu = detail::conditioned_lu(a, "block_det");
  const Vector solved = lu.solve(v);
  const Complex correction = (w * solved)(0, 0);
  return lu.determinant() * (beta - correction);
}

/// M = (1 - gamma) I + gamma K_{n-1}(zeta) P_phi with P_phi the orthogonal
/// projection onto phi = (phi_0(zeta), ..., phi_{n-1}(zeta)).
struct RankOneStructure {
  double gamma;
  double kernel_diag;
  std::vector<Complex> phi;
};

inline RankOneStructure rank_one_structure(const VerblunskySequence& alphas,
                                           const PointMassSpec& mass, std::size_t n) {
  if (n == 0) throw Error(ErrorKind::parameter, "rank_one_structure needs n >= 1");
  const auto family = eval_family(alphas, mass.zeta(), n - 1);
  RankOneStructure s{mass.gamma(), family.back().kernel_diag, {}};
  s.phi.reserve(n);
  for (const auto& state : family) s.phi.push_back(state.orthonormal());
  return s;
}

namespace detail {

inline Matrix projection(const std::vector<Complex>& phi) {
  const Vector v = Eigen::Map<const Vector>(phi.data(), static_cast<Eigen::Index>(phi.size()));
  const double length2 = v.squaredNorm();
  if (!(length2 > 0.0)) throw Error(ErrorKind::parameter, "kernel vector is zero");
  return v * v.adjoint() / length2;
}

}  // namespace detail

inline Matrix rank_one_matrix(const RankOneStructure& s) {
  const auto n = static_cast<Eigen::Index>(s.phi.size());
  return (1.0 - s.gamma) * Matrix::Identity(n, n) +
         (s.gamma * s.kernel_diag) * detail::projection(s.phi);
}

/// M^{-1} = (1 - gamma)^{-1} (I - P_phi) + ((1 - gamma) + gamma K_{n-1})^{-1} P_phi,
/// assembled as (1 - gamma)^{-1} I - c phi phi^H so the two projector terms
/// never cancel against each other.
inline Matrix rank_one_inverse(const RankOneStructure& s) {
  if (!(s.gamma > 0.0 && s.gamma < 1.0)) throw Error(ErrorKind::parameter, "gamma outside (0, 1)");
  const auto n = static_cast<Eigen::Index>(s.phi.size());
  const Vector v = Eigen::Map<const Vector>(s.phi.data(), n);
  const double length2 = v.squaredNorm();
  if (!(length2 > 0.0)) throw Error(ErrorKind::parameter, "kernel vector is zero");
  const double keep = 1.0 - s.gamma;
  const double q = keep + s.gamma * s.kernel_diag;
  // 1/keep - 1/q = gamma K / (keep q)
  const double c = s.gamma * s.kernel_diag / (keep * q * length2);
  Matrix inv = -c * (v * v.adjoint());
  inv.diagonal().array() += 1.0 / keep;
  return inv;
}

/// D = diag(||Phi_0||, ..., ||Phi_{n-1}||).
inline Matrix norm_diagonal(const VerblunskySequence& alphas, std::size_t n) {
  const auto ns = norms(alphas, n == 0 ? 0 : n - 1);
  Matrix d = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) d(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = ns[j];
  return d;
}

/// A^{-1} assembled as D^{-1} M^{-1} D^{-1}.
inline Matrix gram_inverse_via_rank_one(const VerblunskySequence& alphas,
                                        const PointMassSpec& mass, std::size_t n) {
  const Matrix d = norm_diagonal(alphas, n);
  const Matrix d_inv = d.diagonal().cwiseInverse().asDiagonal();
  return d_inv * rank_one_inverse(rank_one_structure(alphas, mass, n)) * d_inv;
}

namespace detail {

/// Rows 0..n-1 of the bordered matrix, row j holding the products with Phi_j:
/// (j, k) -> beta_{jk} = <Phi_j, Phi_k>_{d nu}, k = 0..n.
inline Matrix beta_rows(const std::vector<SzegoState>& family, double gamma, std::size_t n) {
  Matrix b(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n + 1));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k <= n; ++k) {
      Complex entry = gamma * std::conj(family[j].phi) * family[k].phi;
      if (j == k) entry += (1.0 - gamma) * family[j].norm * family[j].norm;
      b(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = entry;
    }
  }
  return b;
}

}  // namespace detail

/// alpha_{n-1}(d nu) as det(C) / det(A), where C borders A = [beta_{kj}] with
/// the column (beta_{n0}, ..., beta_{n,n-1}) and the row (-1, alpha_0, ..., alpha_{n-1}).
/// O(n^3).
inline Complex verblunsky_via_determinant(const VerblunskySequence& alphas,
                                          const PointMassSpec& mass, std::size_t n) {
  if (n == 0) throw Error(ErrorKind::parameter, "verblunsky_via_determinant needs n >= 1");
  detail::require_oracle_depth(n);
  detail::require_coefficients(alphas, n, "verblunsky_via_determinant");
  const auto family = eval_family(alphas, mass.zeta(), n);
  const Matrix beta = detail::beta_rows(family, mass.gamma(), n);
  const auto size = static_cast<Eigen::Index>(n);

  // Conjugating these rows turns beta_{jk} into beta_{kj}.
  Matrix c(size + 1, size + 1);
  c.topRows(size) = beta.conjugate();
  c(size, 0) = -1.0;
  for (std::size_t k = 1; k <= n; ++k) c(size, static_cast<Eigen::Index>(k)) = alphas[k - 1];

  const Complex det_a = checked_determinant(Matrix(c.topLeftCorner(size, size)));
  const Complex det_c = Eigen::PartialPivLU<Matrix>(c).determinant();
  return det_c / det_a;
}

/// Phi_n(z, d nu) as the bordered determinant with bottom row
/// (Phi_0(z), ..., Phi_n(z)) over D^{(n-1)}.
inline Complex monic_value_via_determinant(const VerblunskySequence& alphas,
                                           const PointMassSpec& mass, std::size_t n, Complex z) {
  if (n == 0) return Complex{1.0, 0.0};
  detail::require_oracle_depth(n);
  detail::require_coefficients(alphas, n, "monic_value_via_determinant");
  const auto at_zeta = eval_family(alphas, mass.zeta(), n);
  const auto at_z = eval_family(alphas, z, n);
  const auto size = static_cast<Eigen::Index>(n);

  Matrix c(size + 1, size + 1);
  c.topRows(size) = detail::beta_rows(at_zeta, mass.gamma(), n);
  for (std::size_t k = 0; k <= n; ++k) c(size, static_cast<Eigen::Index>(k)) = at_z[k].phi;

  const Complex det_top = checked_determinant(Matrix(c.topLeftCorner(size, size)));
  return Eigen::PartialPivLU<Matrix>(c).determinant() / det_top;
}

/// Trigonometric moments c_0..c_K, c_k = int e^{-ik theta} d mu. Negative
/// indices are served by c_{-k} = conj(c_k).
class MomentSequence {
 public:
  MomentSequence() : c_{Complex{1.0, 0.0}} {}

  explicit MomentSequence(std::vector<Complex> c) : c_(std::move(c)) {
    if (c_.empty()) throw Error(ErrorKind::parameter, "moment sequence needs c_0");
    if (std::abs(c_[0] - 1.0) > 1e-12) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "c_0 = (" << c_[0].real() << "," << c_[0].imag() << ") but a probability measure has c_0 = 1";
      throw Error(ErrorKind::parameter, msg.str());
    }
    for (const auto& v : c_) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw Error(ErrorKind::parameter, "moments must be finite");
      }
    }
  }

  /// Largest stored index K.
  std::size_t max_index() const noexcept { return c_.size() - 1; }
  std::size_t size() const noexcept { return c_.size(); }

  Complex at(std::ptrdiff_t k) const {
    const auto idx = static_cast<std::size_t>(k < 0 ? -k : k);
    if (idx >= c_.size()) {
      throw Error(ErrorKind::insufficient_data, "moment c_" + std::to_string(k) + " not available");
    }
    return k < 0 ? std::conj(c_[idx]) : c_[idx];
  }

  std::span<const Complex> values() const noexcept { return c_; }

  /// Toeplitz matrix T_{jk} = c_{j-k} = <z^j, z^k>, size x size.
  Matrix toeplitz(std::size_t size) const {
    Matrix t(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(size));
    for (std::size_t j = 0; j < size; ++j) {
      for (std::size_t k = 0; k < size; ++k) {
        t(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
            at(static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(k));
      }
    }
    return t;
  }

 private:
  std::vector<Complex> c_;
};

struct MomentOracleResult {
  VerblunskySequence alphas;
  std::vector<double> norms;          // ||Phi_0|| .. ||Phi_{alphas.size()}||
  std::optional<Complex> terminator;  // unit-modulus alpha of a finitely supported measure
};

/// Monic Phi_n by solving the normal equations sum_k c_{j-k} b_k = -c_{j-n},
/// j < n, then alpha_{n-1} = -conj(Phi_n(0)). Returns alpha_0..alpha_{n_max},
/// stopping early at a terminator.
inline MomentOracleResult alphas_from_moments(const MomentSequence& moments, std::size_t n_max) {
  detail::require_oracle_depth(n_max);
  if (moments.max_index() < n_max + 1) {
    throw Error(ErrorKind::insufficient_data,
                "alphas_from_moments needs moments through c_" + std::to_string(n_max + 1));
  }
  MomentOracleResult out;
  std::vector<Complex> alphas;
  out.norms.push_back(1.0);
  for (std::size_t n = 1; n <= n_max + 1; ++n) {
    const Matrix t = moments.toeplitz(n + 1);
    const auto size = static_cast<Eigen::Index>(n);
    const Matrix system = t.topLeftCorner(size, size);
    const Vector rhs = -t.col(size).head(size);

    Eigen::LDLT<Matrix> ldlt(system);
    const Eigen::VectorXd d = ldlt.vectorD().real();
    if (ldlt.info() != Eigen::Success || !(d.minCoeff() > 0.0) ||
        !(d.maxCoeff() / d.minCoeff() <= kOraclePivotRatio)) {
      throw Error(ErrorKind::oracle_degeneracy,
                  "moment Toeplitz matrix of size " + std::to_string(n) +
                      " is not safely positive definite");
    }
    Vector monic(size + 1);
    monic.head(size) = ldlt.solve(rhs);
    monic(size) = 1.0;

    const Complex alpha = -std::conj(monic(0));
    if (std::abs(alpha) > 1.0 + kTerminatorTolerance) {
      throw Error(ErrorKind::oracle_degeneracy,
                  "moments give |alpha_" + std::to_string(n - 1) + "| > 1; not a positive measure");
    }
    if (std::abs(alpha) >= 1.0 - kTerminatorTolerance) {
      out.terminator = alpha;
      break;
    }
    const double norm2 = (t.row(size) * monic)(0, 0).real();
    if (!(norm2 > 0.0)) {
      throw Error(ErrorKind::oracle_degeneracy, "non-positive norm at degree " + std::to_string(n));
    }
    alphas.push_back(alpha);
    out.norms.push_back(std::sqrt(norm2));
  }
  out.alphas = VerblunskySequence(std::move(alphas));
  return out;
}

/// c_k(d nu) = (1 - gamma) c_k(d mu) + gamma e^{-ik omega}.
inline MomentSequence moments_of_nu(const MomentSequence& moments, const PointMassSpec& mass) {
  const double gamma = mass.gamma();
  std::vector<Complex> c(moments.size());
  for (std::size_t k = 0; k < c.size(); ++k) {
    c[k] = (1.0 - gamma) * moments.values()[k] +
           gamma * std::polar(1.0, -static_cast<double>(k) * mass.omega());
  }
  c[0] = Complex{1.0, 0.0};
  return MomentSequence(std::move(c));
}

}  // namespace opuc

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "opuc/insertion.hpp"
#include "opuc/measures.hpp"
#include "opuc/oracle.hpp"
#include "opuc/random.hpp"
#include "support/brute_force.hpp"

using namespace opuc;

namespace {

VerblunskySequence zeros(std::size_t n) { return VerblunskySequence(std::vector<Complex>(n)); }

/// Coefficients of a degree <= n polynomial from its values at the (n+1)-th roots of unity.
brute::Poly interpolate(const std::function<Complex(Complex)>& f, std::size_t n) {
  const std::size_t m = n + 1;
  brute::Poly coeffs(m, Complex{0.0, 0.0});
  for (std::size_t j = 0; j < m; ++j) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(m);
    const Complex value = f(std::polar(1.0, theta));
    for (std::size_t k = 0; k < m; ++k) {
      coeffs[k] += value * std::polar(1.0, -theta * static_cast<double>(k)) / static_cast<double>(m);
    }
  }
  return coeffs;
}

}  // namespace

TEST(PointMassSpec, GammaRange) {
  for (double bad : {0.0, 1.0, -0.1, 1.5, 1e-13, 1.0 - 1e-13, std::nan("")}) {
    try {
      PointMassSpec(0.0, bad);
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::parameter);
    }
  }
  EXPECT_NO_THROW(PointMassSpec(0.0, 1e-8));
  EXPECT_DOUBLE_EQ(PointMassSpec(0.0, 0.25).odds(), 3.0);
}

TEST(InsertPointMass, LebesgueAtOneMatchesGramSchmidt) {
  const auto r = insert_point_mass(zeros(3), PointMassSpec(0.0, 0.5), 2);
  const auto expected = brute::alphas(brute::lebesgue_plus_atom(0.0, 0.5), 3);
  ASSERT_EQ(r.alphas_nu.size(), 3u);
  for (std::size_t n = 0; n < 3; ++n) {
    EXPECT_NEAR(r.alphas_nu[n].real(), 1.0 / static_cast<double>(n + 2), 1e-15);
    EXPECT_LT(std::abs(r.alphas_nu[n] - expected[n]), 1e-14);
  }
}

TEST(InsertPointMass, LebesgueClosedFormAnyAngle) {
  random::Engine rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    const auto mass = random::mass(rng);
    const auto r = insert_point_mass(zeros(11), mass, 10);
    const auto brute_alphas = brute::alphas(brute::lebesgue_plus_atom(mass.omega(), mass.gamma()), 11);
    for (std::size_t n = 0; n <= 10; ++n) {
      const Complex closed = std::pow(std::conj(mass.zeta()), static_cast<int>(n + 1)) /
                             (mass.odds() + static_cast<double>(n + 1));
      EXPECT_LT(std::abs(r.alphas_nu[n] - closed), 1e-14);
      EXPECT_LT(std::abs(r.alphas_nu[n] - brute_alphas[n]), 1e-11);
      EXPECT_NEAR(r.diagnostics[n].kernel_diag, static_cast<double>(n + 1), 1e-13);
    }
  }
}

TEST(InsertPointMass, SingleCoefficientSequence) {
  const VerblunskySequence alphas({0.5, 0.0, 0.0});
  const PointMassSpec mass(0.0, 0.5);
  const auto r = insert_point_mass(alphas, mass, 2);
  EXPECT_NEAR(r.alphas_nu[0].real(), 0.75, 1e-15);
  EXPECT_NEAR(r.alphas_nu[0].imag(), 0.0, 1e-15);

  // Gram-Schmidt on the moments of d nu, built from moments of d mu.
  const auto mu = moments_from_alphas(VerblunskySequence({0.5, 0.0, 0.0, 0.0, 0.0}), 5);
  const auto inner = brute::from_moments([&](long k) {
    return 0.5 * mu.at(k) + 0.5;  // omega = 0
  });
  const auto expected = brute::alphas(inner, 3);
  for (std::size_t n = 0; n < 3; ++n) EXPECT_LT(std::abs(r.alphas_nu[n] - expected[n]), 1e-13);
}

TEST(InsertPointMass, Errors) {
  try {
    insert_point_mass(zeros(3), PointMassSpec(0.0, 0.5), 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::insufficient_data);
  }
  EXPECT_NO_THROW(insert_point_mass(zeros(4), PointMassSpec(0.0, 0.5), 3));
}

TEST(InsertPointMass, DiagnosticsAndNontriviality) {
  random::Engine rng(22);
  for (int trial = 0; trial < 50; ++trial) {
    const auto alphas = random::sequence(rng, 61, 0.95);
    const auto mass = random::mass(rng, 1e-6, 1.0 - 1e-6);
    const auto r = insert_point_mass(alphas, mass, 60);
    const auto family = eval_family(alphas, mass.zeta(), 61);
    for (std::size_t n = 0; n <= 60; ++n) {
      EXPECT_LT(std::abs(r.alphas_nu[n]), 1.0);
      const auto& d = r.diagnostics[n];
      EXPECT_GE(d.denominator, mass.odds() + 1.0);
      EXPECT_DOUBLE_EQ(d.denominator, mass.odds() + d.kernel_diag);
      EXPECT_LT(std::abs(r.alphas_nu[n] - alphas[n] - d.correction), 1e-15);
      const double bound = std::sqrt(1.0 - std::norm(alphas[n])) *
                           std::abs(family[n + 1].orthonormal()) *
                           std::abs(family[n].orthonormal_star()) / d.kernel_diag;
      EXPECT_LE(std::abs(d.correction), bound * (1.0 + 1e-12));
    }
  }
}

TEST(InsertPointMass, RotationCovarianceOnLebesgue) {
  random::Engine rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const double omega = random::angle(rng);
    const double gamma = random::uniform(rng, 0.05, 0.95);
    const auto rotated = insert_point_mass(zeros(101), PointMassSpec(omega, gamma), 100).alphas_nu;
    const auto base = insert_point_mass(zeros(101), PointMassSpec(0.0, gamma), 100).alphas_nu;
    for (std::size_t n = 0; n <= 100; ++n) {
      const Complex expected = std::polar(1.0, -static_cast<double>(n + 1) * omega) * base[n];
      EXPECT_LT(std::abs(rotated[n] - expected), 1e-12);
    }
  }
}

TEST(InsertPointMass, RepeatedInsertionComposes) {
  // (1-g2)((1-g1) mu + g1 delta) + g2 delta = (1-g) mu + g delta with g = g1 + g2 - g1 g2.
  random::Engine rng(24);
  for (int trial = 0; trial < 20; ++trial) {
    const auto alphas = random::sequence(rng, 31, 0.7);
    const double omega = random::angle(rng);
    const double g1 = random::uniform(rng, 0.05, 0.6);
    const double g2 = random::uniform(rng, 0.05, 0.6);
    const auto once = insert_point_mass(alphas, PointMassSpec(omega, g1), 30).alphas_nu;
    const auto twice = insert_point_mass(once, PointMassSpec(omega, g2), 30).alphas_nu;
    const auto direct = insert_point_mass(alphas, PointMassSpec(omega, g1 + g2 - g1 * g2), 30).alphas_nu;
    for (std::size_t n = 0; n <= 30; ++n) EXPECT_LT(std::abs(twice[n] - direct[n]), 1e-10);
  }
}

TEST(InsertPointMassSimon, DegreeZeroAndLebesgue) {
  random::Engine rng(25);
  for (int trial = 0; trial < 5; ++trial) {
    const auto mass = random::mass(rng);
    const auto r = insert_point_mass_simon(zeros(1), mass, 0);
    EXPECT_LT(std::abs(r.alphas_nu[0] - mass.gamma() * std::conj(mass.zeta())), 1e-15);
  }
  const auto r = insert_point_mass_simon(zeros(2), PointMassSpec(0.0, 0.5), 1);
  EXPECT_NEAR(r.alphas_nu[1].real(), 1.0 / 3.0, 1e-15);
}

TEST(InsertPointMassSimon, AgreesWithClosedForm) {
  random::Engine rng(26);
  for (int trial = 0; trial < 100; ++trial) {
    const auto alphas = random::sequence(rng, 51, 0.8);
    const auto mass = random::mass(rng);
    const auto fast = insert_point_mass(alphas, mass, 49);
    const auto simon = insert_point_mass_simon(alphas, mass, 49);
    ASSERT_EQ(simon.auxiliary.size(), 50u);
    for (std::size_t n = 0; n < 50; ++n) {
      EXPECT_LE(std::abs(fast.alphas_nu[n] - simon.alphas_nu[n]), 1e-10);
      EXPECT_NEAR(simon.auxiliary[n].q, mass.gamma() * fast.diagnostics[n].denominator,
                  1e-12 * simon.auxiliary[n].q);
      if (n > 0) {
        EXPECT_GE(simon.auxiliary[n].q, simon.auxiliary[n - 1].q);
      }
    }
  }
}

TEST(PerturbedMonicValue, Examples) {
  const PointMassSpec mass(0.0, 0.5);
  EXPECT_NEAR(perturbed_monic_value(zeros(1), mass, 1, 0.0).real(), -0.5, 1e-15);
  EXPECT_NEAR(perturbed_monic_value(zeros(1), mass, 1, Complex{0.3, 0.1}).real(), 0.3 - 0.5, 1e-15);
  EXPECT_EQ(perturbed_monic_value(zeros(0), mass, 0, Complex{0.3, 0.1}), Complex(1.0, 0.0));
  EXPECT_NEAR(perturbed_monic_value(VerblunskySequence({0.5}), mass, 1, 0.0).real(), -0.75, 1e-15);
  try {
    perturbed_monic_value(zeros(1), mass, 2, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::insufficient_data);
  }
}

TEST(PerturbedMonicValue, MatchesRecursionOnPerturbedSequence) {
  random::Engine rng(27);
  for (int trial = 0; trial < 5; ++trial) {
    const auto alphas = random::sequence(rng, 21, 0.8);
    const auto mass = random::mass(rng);
    const auto nu = insert_point_mass(alphas, mass, 20).alphas_nu;
    for (int p = 0; p < 20; ++p) {
      const Complex z = random::in_disk(rng, 0.9);
      const auto family = eval_family(nu, z, 21);
      for (std::size_t n = 0; n <= 20; ++n) {
        EXPECT_LE(std::abs(perturbed_monic_value(alphas, mass, n, z) - family[n].phi), 1e-9);
      }
    }
    for (std::size_t n = 1; n <= 21; ++n) {
      EXPECT_LT(std::abs(nu[n - 1] + std::conj(perturbed_monic_value(alphas, mass, n, 0.0))), 1e-12);
    }
  }
}

TEST(PerturbedMonicValue, KernelOrientationFromOrthogonality) {
  // The adopted kernel sum_j conj(phi_j(zeta)) phi_j(z) gives a polynomial
  // orthogonal to lower degrees in d nu; the literal sum_j conj(phi_j(z)) phi_j(zeta)
  // does not.
  const double omega = 1.1;
  const double gamma = 0.4;
  const PointMassSpec mass(omega, gamma);
  const auto inner = brute::lebesgue_plus_atom(omega, gamma);
  const auto alphas = zeros(6);
  const std::size_t n = 4;

  const auto adopted = interpolate([&](Complex z) { return perturbed_monic_value(alphas, mass, n, z); }, n);
  const auto literal = interpolate(
      [&](Complex z) {
        const Complex zeta = mass.zeta();
        const Complex kernel = cd_kernel(alphas, z, zeta, n - 1).value;
        const double diag = cd_kernel(alphas, zeta, zeta, n - 1).value.real();
        return std::pow(z, static_cast<int>(n)) - std::pow(zeta, static_cast<int>(n)) * kernel / (mass.odds() + diag);
      },
      n);

  double adopted_worst = 0.0;
  double literal_worst = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    brute::Poly monomial(j + 1, Complex{0.0, 0.0});
    monomial[j] = 1.0;
    adopted_worst = std::max(adopted_worst, std::abs(inner(monomial, adopted)));
    literal_worst = std::max(literal_worst, std::abs(inner(monomial, literal)));
  }
  EXPECT_LT(adopted_worst, 1e-12);
  EXPECT_GT(literal_worst, 1e-3);
}

TEST(DecayTable, Rows) {
  const auto rows = decay_table(zeros(3), PointMassSpec(0.0, 0.5), 2);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1].n, 1u);
  EXPECT_NEAR(rows[0].modulus, 0.5, 1e-15);
  EXPECT_NEAR(rows[1].modulus, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(rows[2].modulus, 0.25, 1e-15);
  EXPECT_NEAR(decay_table(VerblunskySequence({0.5, 0.0}), PointMassSpec(0.0, 0.5), 1)[0].modulus, 0.75, 1e-15);
}

TEST(DecayTable, SmallMassIsContinuous) {
  // |correction| <= gamma / (1 - gamma) |phi_{n+1}(zeta)| |phi_n^*(zeta)|, so the
  // 1e-6 closeness holds where the orthonormal values stay moderate.
  random::Engine rng(28);
  const PointMassSpec tiny(random::angle(rng), 1e-8);
  std::vector<VerblunskySequence> inputs{zeros(41), VerblunskySequence({0.5, 0.0, 0.0, 0.0})};
  for (int j = 0; j < 5; ++j) inputs.push_back(random::sequence(rng, 21, 0.3));
  for (const auto& alphas : inputs) {
    const auto rows = decay_table(alphas, tiny, alphas.size() - 1);
    for (const auto& row : rows) EXPECT_NEAR(row.modulus, std::abs(alphas[row.n]), 1e-6);
  }
}

TEST(DecayTable, SmallMassCorrectionBound) {
  random::Engine rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const auto alphas = random::sequence(rng, 41, 0.8);
    const PointMassSpec tiny(random::angle(rng), 1e-8);
    const auto family = eval_family(alphas, tiny.zeta(), 40);
    const auto rows = decay_table(alphas, tiny, 39);
    for (const auto& row : rows) {
      const double bound = 1e-8 / (1.0 - 1e-8) * std::abs(family[row.n + 1].orthonormal()) *
                           std::abs(family[row.n].orthonormal_star());
      EXPECT_LE(std::abs(row.modulus - std::abs(alphas[row.n])), bound * (1.0 + 1e-9) + 1e-15);
    }
  }
}

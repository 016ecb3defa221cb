#pragma once

// Self-check suites run by `opuc verify`. Each suite draws seeded random
// inputs, compares two independent routes, and reports the worst residual
// against a fixed tolerance.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <future>
#include <sstream>
#include <string>
#include <vector>

#include "opuc/insertion.hpp"
#include "opuc/measures.hpp"
#include "opuc/oracle.hpp"
#include "opuc/random.hpp"
#include "opuc/szego.hpp"

namespace opuc::verify {

struct SuiteResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

namespace detail {

struct Tracker {
  double worst = 0.0;
  bool violated = false;
  void observe(double residual) {
    if (!std::isfinite(residual)) violated = true;
    worst = std::max(worst, residual);
  }
  void require(bool ok) {
    if (!ok) violated = true;
  }
};

inline SuiteResult finish(std::string name, const Tracker& t, double tolerance) {
  SuiteResult r;
  r.name = std::move(name);
  r.worst = t.worst;
  r.tolerance = tolerance;
  r.passed = !t.violated && t.worst <= tolerance;
  return r;
}

inline double relative(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

inline double relative(Complex a, Complex b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

}  // namespace detail

inline SuiteResult norm_product(std::uint64_t seed) {
  random::Engine rng(seed);
  detail::Tracker t;
  for (int trial = 0; trial < 20; ++trial) {
    const auto alphas = random::sequence(rng, 200, 0.9);
    SzegoState s = SzegoState::start(random::in_disk(rng, 1.0));
    double product = 1.0;
    for (std::size_t n = 0; n < alphas.size(); ++n) {
      s = advance(s, alphas[n]);
      product *= 1.0 - std::norm(alphas[n]);
      t.observe(detail::relative(s.norm * s.norm, product));
    }
  }
  return detail::finish("norm-product", t, 1e-12);
}

inline constexpr Complex kExactCirclePoints[] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};

inline SuiteResult circle_modulus(std::uint64_t seed) {
  random::Engine rng(seed);
  detail::Tracker t;
  for (int trial = 0; trial < 20; ++trial) {
    // Only +-1 and +-i lie exactly on the circle in binary; elsewhere
    // |Phi^*|^2 - |Phi|^2 = (1 - |z|^2) ||Phi_n||^2 K_{n-1}(z) is genuinely
    // nonzero for the rounded z. Random phases in alpha cover all angles.
    const auto alphas = random::sequence(rng, 200, 0.9);
    SzegoState s = SzegoState::start(kExactCirclePoints[trial % 4]);
    for (std::size_t n = 0; n < alphas.size(); ++n) {
      s = advance(s, alphas[n]);
      t.observe(detail::relative(std::abs(s.phi), std::abs(s.phi_star)));
    }
  }
  return detail::finish("circle-modulus", t, 1e-12);
}

inline SuiteResult reversed_at_zero(std::uint64_t seed) {
  random::Engine rng(seed);
  detail::Tracker t;
  for (int trial = 0; trial < 20; ++trial) {
    const auto alphas = random::sequence(rng, 200, 0.9);
    SzegoState s = SzegoState::start(Complex{0.0, 0.0});
    for (std::size_t n = 0; n < alphas.size(); ++n) {
      s = advance(s, alphas[n]);
      t.observe(detail::relative(s.orthonormal_star(), Complex{1.0 / s.norm, 0.0}));
    }
  }
  return detail::finish("reversed-at-zero", t, 1e-12);
}

inline SuiteResult cd_agreement(std::uint64_t seed) {
  random::Engine rng(seed);
  detail::Tracker t;
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = static_cast<std::size_t>(rng() % 51);
    const auto alphas = random::sequence(rng, n, 0.9);
    const Complex x = random::in_disk(rng, 0.95);
    const Complex y = random::in_disk(rng, 0.95);
    const auto k = cd_kernel(alphas, x, y, n);
    t.require(k.closed_form.has_value());
    if (k.closed_form) t.observe(detail::relative(*k.closed_form, k.value));
  }
  return detail::finish("cd-agreement", t, 1e-10);
}

inline SuiteResult kernel_monotone(std::uint64_t seed) {
  random::Engine rng(seed);
  detail::Tracker t;
  for (int trial = 0; trial < 20; ++trial) {
    const auto family = eval_family(random::sequence(rng, 100, 0.9),
                                    std::polar(1.0, random::angle(rng)), 100);
    t.require(family.front().kernel_diag >= 1.0);
    for (std::size_t n = 1; n < family.size(); ++n) {
      t.require(family[n].kernel_diag >= family[n - 1].kernel_diag);
      if (std::abs(family[n].phi) > 0.0) t.require(family[n].kernel_diag > family[n - 1].kernel_diag);
    }
  }
  return detail::finish("kernel-monotone", t, 0.0);
}

inline SuiteResult path_equivalence(std::uint64_t seed) {
  random::Engine rng(seed);
  detail::Tracker t;
  for (int trial = 0; trial < 100; ++trial) {
    const auto alphas = random::sequence(rng, 51, 0.8);
    const auto mass = random::mass(rng);
    const auto fast = insert_point_mass(alphas, mass, 49);
    const auto simon = insert_point_mass_simon(alphas, mass, 49);
    for (std::size_t n = 0; n < 50; ++n) t.observe(std::abs(fast.alphas_nu[n] - simon.alphas_nu[n]));
  }
  return detail::finish("path-equivalence", t, 1e-10);
}

inline SuiteResult geronimus_consistency(std::uint64_t seed) {
  random::Engine rng(seed);
  detail::Tracker t;
  for (int trial = 0; trial < 5; ++trial) {
    const auto alphas = random::sequence(rng, 21, 0.8);
    const auto mass = random::mass(rng);
    const auto nu = insert_point_mass(alphas, mass, 19).alphas_nu;
    for (int p = 0; p < 20; ++p) {
      const Complex z = random::in_disk(rng, 0.9);
      const auto family = eval_family(nu, z, 20);
      for (std::size_t n = 0; n <= 20; ++n) {
        t.observe(std::abs(perturbed_monic_value(alphas, mass, n, z) - family[n].phi));
      }
    }
  }
  return detail::finish("geronimus-consistency", t, 1e-9);
}

inline SuiteResult zero_extraction(std::uint64_t seed) {
  random::Engine rng(seed);
  detail::Tracker t;
  for (int trial = 0; trial < 20; ++trial) {
    const auto alphas = random::sequence(rng, 21, 0.8);
    const auto mass = random::mass(rng);
    const auto nu = insert_point_mass(alphas, mass, 20).alphas_nu;
    for (std::size_t n = 1; n <= 21; ++n) {
      t.observe(std::abs(nu[n - 1] + std::conj(perturbed_monic_value(alphas, mass, n, 0.0))));
    }
  }
  return detail::finish("zero-extraction", t, 1e-10);
}

inline SuiteResult nontriviality(std::uint64_t seed) {
  random::Engine rng(seed);
  detail::Tracker t;
  for (int trial = 0; trial < 50; ++trial) {
    const auto alphas = random::sequence(rng, 101, 0.95);
    const auto mass = random::mass(rng, 1e-6, 1.0 - 1e-6);
    const auto r = insert_point_mass(alphas, mass, 100);
    for (std::size_t n = 0; n < r.alphas_nu.size(); ++n) {
      t.require(std::abs(r.alphas_nu[n]) < 1.0);
      t.require(r.diagnostics[n].denominator >= mass.odds() + 1.0);
    }
  }
  return detail::finish("nontriviality", t, 0.0);
}

inline SuiteResult rotation_covariance(std::uint64_t seed) {
  random::Engine rng(seed);
  detail::Tracker t;
  const VerblunskySequence lebesgue(std::vector<Complex>(101));
  for (int trial = 0; trial < 10; ++trial) {
    const double omega = random::angle(rng);
    const double gamma = random::uniform(rng, 0.05, 0.95);
    const auto rotated = insert_point_mass(lebesgue, PointMassSpec(omega, gamma), 100).alphas_nu;
    const auto base = insert_point_mass(lebesgue, PointMassSpec(0.0, gamma), 100).alphas_nu;
    for (std::size_t n = 0; n <= 100; ++n) {
      const Complex expected = std::polar(1.0, -static_cast<double>(n + 1) * omega) * base[n];
      t.observe(std::abs(rotated[n] - expected));
    }
  }
  return detail::finish("rotation-covariance", t, 1e-12);
}

inline SuiteResult block_det_identity(std::uint64_t seed) {
  random::Engine rng(seed);
  detail::Tracker t;
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = static_cast<Eigen::Index>(1 + trial % 8);
    Matrix a(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = 0; k < n; ++k) a(j, k) = random::in_disk(rng, 1.0);
    a += static_cast<double>(n) * Matrix::Identity(n, n);
    Vector v(n);
    RowVector w(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      v(j) = random::in_disk(rng, 1.0);
      w(j) = random::in_disk(rng, 1.0);
    }
    const Complex beta = random::in_disk(rng, 2.0);
    Matrix c(n + 1, n + 1);
    c << a, v, w, beta;
    t.observe(detail::relative(block_det(a, v, w, beta), c.determinant()));
  }
  return detail::finish("block-det", t, 1e-9);
}

inline SuiteResult rank_one(std::uint64_t seed) {
  random::Engine rng(seed);
  detail::Tracker identity;
  detail::Tracker inverse;
  for (std::size_t n = 1; n <= 12; ++n) {
    for (int trial = 0; trial < 5; ++trial) {
      // kappa(M) = 1 + gamma K / (1 - gamma) sets the floor of the residual.
      const auto alphas = random::sequence(rng, n, 0.5);
      const auto mass = random::mass(rng);
      const auto s = rank_one_structure(alphas, mass, n);
      const Matrix m = rank_one_matrix(s);
      const auto size = static_cast<Eigen::Index>(n);
      identity.observe((m * rank_one_inverse(s) - Matrix::Identity(size, size)).cwiseAbs().maxCoeff());
      const Matrix a = gram_matrix(alphas, mass, n).entries;
      const Matrix generic = a.partialPivLu().solve(Matrix::Identity(size, size));
      const Matrix factored = gram_inverse_via_rank_one(alphas, mass, n);
      inverse.observe((factored - generic).cwiseAbs().maxCoeff() / generic.cwiseAbs().maxCoeff());
    }
  }
  SuiteResult r = detail::finish("rank-one-inverse", identity, 1e-12);
  const SuiteResult r2 = detail::finish("", inverse, 1e-10);
  r.passed = r.passed && r2.passed;
  std::ostringstream d;
  d << "M*M^-1 residual " << identity.worst << " (tol 1e-12); A^-1 residual " << inverse.worst
    << " (tol 1e-10)";
  r.detail = d.str();
  return r;
}

inline SuiteResult determinant_oracle(std::uint64_t seed) {
  random::Engine rng(seed);
  detail::Tracker t;
  for (int trial = 0; trial < 25; ++trial) {
    const auto alphas = random::sequence(rng, 16, 0.7);
    const auto mass = random::mass(rng, 0.1, 0.9);
    const auto nu = insert_point_mass(alphas, mass, 15).alphas_nu;
    for (std::size_t n = 1; n <= 16; ++n) {
      t.observe(std::abs(verblunsky_via_determinant(alphas, mass, n) - nu[n - 1]));
    }
  }
  return detail::finish("determinant-oracle", t, 1e-8);
}

inline SuiteResult moment_loop(std::uint64_t seed) {
  random::Engine rng(seed);
  detail::Tracker t;
  for (int trial = 0; trial < 10; ++trial) {
    const auto count = static_cast<std::size_t>(2 + rng() % 9);
    const auto measure = random::atomic_measure(rng, count);
    const PointMassSpec mass(random::angle_away_from(rng, measure, 0.1),
                             random::uniform(rng, 0.1, 0.9));
    const auto mu = moments(measure, count + 1);
    const auto base = alphas_from_moments(mu, count);
    t.require(base.terminator.has_value());
    if (base.alphas.empty()) continue;
    const auto fast = insert_point_mass(base.alphas, mass, base.alphas.size() - 1).alphas_nu;
    const auto nu = alphas_from_moments(moments_of_nu(mu, mass), count).alphas;
    t.require(nu.size() >= fast.size());
    for (std::size_t n = 0; n < std::min(fast.size(), nu.size()); ++n) {
      t.observe(std::abs(fast[n] - nu[n]));
    }
  }
  return detail::finish("moment-loop", t, 1e-7);
}

inline SuiteResult catalog_consistency(std::uint64_t seed) {
  random::Engine rng(seed);
  detail::Tracker t;
  std::vector<CatalogEntry> entries{catalog("lebesgue")};
  for (int j = 0; j < 3; ++j) {
    entries.push_back(catalog("single-coefficient", {random::in_disk(rng, 0.7), {}}));
    entries.push_back(catalog("constant-coefficient", {random::in_disk(rng, 0.5), {}}));
  }
  for (const auto& entry : entries) {
    const auto expected = entry.alphas(11);
    const auto recovered = alphas_from_moments(entry.moments(11), 10).alphas;
    t.require(recovered.size() == 11);
    for (std::size_t n = 0; n < std::min<std::size_t>(11, recovered.size()); ++n) {
      t.observe(std::abs(recovered[n] - expected[n]));
    }
  }
  return detail::finish("catalog-consistency", t, 1e-8);
}

inline SuiteResult mixture_moments(std::uint64_t seed) {
  random::Engine rng(seed);
  detail::Tracker t;
  for (int trial = 0; trial < 20; ++trial) {
    const auto atomic = random::atomic_measure(rng, 1 + rng() % 6);
    std::vector<Atom> atoms = atomic.atoms();
    for (auto& a : atoms) a.weight *= 0.5;
    const MeasureSpec measure(atoms, std::vector<double>(64, 0.5 / (2.0 * std::numbers::pi)));
    const auto mass = random::mass(rng);
    const auto direct = moments(mix_in_atom(measure, mass), 16);
    const auto via_moments = moments_of_nu(moments(measure, 16), mass);
    t.observe(std::abs(direct.at(0) - 1.0));
    for (std::size_t k = 0; k <= 16; ++k) {
      t.observe(std::abs(direct.values()[k] - via_moments.values()[k]));
    }
  }
  return detail::finish("mixture-moments", t, 1e-13);
}

/// All suites, in a fixed order. Suites run concurrently when `parallel`.
inline std::vector<SuiteResult> run_all(std::uint64_t seed = 424242, bool parallel = true) {
  struct Suite {
    const char* name;
    SuiteResult (*run)(std::uint64_t);
  };
  static constexpr Suite suites[] = {
      {"norm-product", norm_product},
      {"circle-modulus", circle_modulus},
      {"reversed-at-zero", reversed_at_zero},
      {"cd-agreement", cd_agreement},
      {"kernel-monotone", kernel_monotone},
      {"path-equivalence", path_equivalence},
      {"geronimus-consistency", geronimus_consistency},
      {"zero-extraction", zero_extraction},
      {"nontriviality", nontriviality},
      {"rotation-covariance", rotation_covariance},
      {"block-det", block_det_identity},
      {"rank-one-inverse", rank_one},
      {"determinant-oracle", determinant_oracle},
      {"moment-loop", moment_loop},
      {"catalog-consistency", catalog_consistency},
      {"mixture-moments", mixture_moments},
  };
  auto guarded = [](Suite suite, std::uint64_t s) {
    try {
      return suite.run(s);
    } catch (const std::exception& e) {
      SuiteResult r;
      r.name = suite.name;
      r.detail = std::string("exception: ") + e.what();
      return r;
    }
  };
  std::vector<SuiteResult> results;
  if (parallel) {
    std::vector<std::future<SuiteResult>> pending;
    for (std::size_t i = 0; i < std::size(suites); ++i) {
      pending.push_back(std::async(std::launch::async, guarded, suites[i], seed + i));
    }
    for (auto& f : pending) results.push_back(f.get());
  } else {
    for (std::size_t i = 0; i < std::size(suites); ++i) results.push_back(guarded(suites[i], seed + i));
  }
  return results;
}

}  // namespace opuc::verify

#pragma once

// Seeded generators for property checks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "opuc/measures.hpp"
#include "opuc/types.hpp"

namespace opuc::random {

using Engine = std::mt19937_64;

inline double uniform(Engine& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double angle(Engine& rng) { return uniform(rng, 0.0, 2.0 * std::numbers::pi); }

/// Uniform in the closed disk of the given radius.
inline Complex in_disk(Engine& rng, double radius) {
  return std::polar(radius * std::sqrt(uniform(rng, 0.0, 1.0)), angle(rng));
}

inline VerblunskySequence sequence(Engine& rng, std::size_t length, double max_modulus) {
  std::vector<Complex> out;
  out.reserve(length);
  for (std::size_t j = 0; j < length; ++j) out.push_back(in_disk(rng, max_modulus));
  return VerblunskySequence(std::move(out));
}

/// gamma drawn from [lo, hi] inside (0, 1).
inline PointMassSpec mass(Engine& rng, double lo = 0.05, double hi = 0.95) {
  return PointMassSpec(angle(rng), uniform(rng, lo, hi));
}

/// Atomic probability measure with `count` atoms at jittered, well separated
/// angles and weights bounded away from zero.
inline MeasureSpec atomic_measure(Engine& rng, std::size_t count) {
  const double slot = 2.0 * std::numbers::pi / static_cast<double>(count);
  const double offset = angle(rng);
  std::vector<Atom> atoms;
  double total = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    const double w = uniform(rng, 0.2, 1.0);
    atoms.push_back({offset + slot * (static_cast<double>(j) + uniform(rng, -0.25, 0.25)), w});
    total += w;
  }
  for (auto& a : atoms) a.weight /= total;
  // Renormalize against roundoff in the sum.
  double sum = 0.0;
  for (std::size_t j = 0; j + 1 < atoms.size(); ++j) sum += atoms[j].weight;
  atoms.back().weight = 1.0 - sum;
  return MeasureSpec(std::move(atoms), {});
}

/// Angle at least `clearance` radians from every atom of the measure.
inline double angle_away_from(Engine& rng, const MeasureSpec& measure, double clearance) {
  for (;;) {
    const double omega = angle(rng);
    bool clear = true;
    for (const auto& a : measure.atoms()) {
      double d = std::abs(omega - a.theta);
      d = std::min(d, 2.0 * std::numbers::pi - d);
      if (d < clearance) clear = false;
    }
    if (clear) return omega;
  }
}

}  // namespace opuc::random

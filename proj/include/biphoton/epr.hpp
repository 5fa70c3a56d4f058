#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "biphoton/errors.hpp"

namespace biphoton::epr {

/// One correlated draw in natural units (hbar = 1).
struct PairSample {
  double x1 = 0.0;
  double x2 = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
};

/// Pairs share an exact total momentum of zero; positions are independent.
struct StateOne {
  double momentum_spread = 1.0;    // of the shared p, across pairs
  double position_spread = 1000.0; // per particle
};

/// Pairs share an exact position offset x0; momenta are independent.
struct StateTwo {
  double offset = 1.0;             // x0
  double position_spread = 1000.0; // of the shared x, across pairs
  double momentum_spread = 1000.0; // per particle
};

/// Exact 50/50 alternation between the two classical states.
struct StateThree {
  StateOne one;
  StateTwo two;
};

/// Gaussian surrogate of the entangled regime: narrow p1+p2 and x1-x2,
/// wide singles.
struct EntangledGaussian {
  double sum_spread = 0.01;    // of p1+p2
  double diff_spread = 0.01;   // of x1-x2 about x0
  double single_spread = 1.0;  // per-particle marginals
  double offset = 0.0;         // x0
};

using ClassicalPairModel = std::variant<StateOne, StateTwo, StateThree, EntangledGaussian>;

void validate(const ClassicalPairModel& model);

/// Deterministic counter-based sampling: pair k depends only on (seed, k),
/// so batches may be generated in parallel or in any order.
std::vector<PairSample> sample_pairs(const ClassicalPairModel& model, std::size_t n,
                                     std::uint64_t seed);

/// Sample spreads plus both inequality verdicts.
struct SpreadReport {
  double dp1 = 0.0, dp2 = 0.0, dx1 = 0.0, dx2 = 0.0;
  double dsum_p = 0.0;  // spread of p1+p2
  double ddiff_x = 0.0; // spread of x1-x2
  bool classical_inequality = false; // both sums exceed the per-particle max
  bool epr_inequality = false;       // both sums beat the per-particle min
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

SpreadReport evaluate_inequalities(const std::vector<PairSample>& samples);

/// Analytic product Delta(x1+x2) * Delta(p1+p2) of the Gaussian surrogate's
/// sampled spreads; the conjugate-pair bound requires it to be >= 1 for a
/// quantum-consistent parameter set.
double conjugate_spread_product(const EntangledGaussian& model);

} // namespace biphoton::epr

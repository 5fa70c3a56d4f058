#include "biphoton/epr.hpp"

#include <cmath>

#include "biphoton/units.hpp"

namespace biphoton::epr {

namespace {

// splitmix64: the per-pair counter stream.
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

struct PairRng {
  std::uint64_t state;
  PairRng(std::uint64_t seed, std::uint64_t pair_index)
      : state(mix(seed ^ (pair_index * 0xd1342543de82ef95ull + 0x2545f4914f6cdd1dull))) {}

  double uniform() { // (0, 1)
    state = mix(state);
    return (static_cast<double>(state >> 11) + 0.5) * 0x1.0p-53;
  }

  // Box-Muller; one draw per call keeps the stream layout obvious.
  double normal() {
    const double u = uniform();
    const double v = uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * pi * v);
  }
};

PairSample draw_state_one(const StateOne& m, PairRng& rng) {
  PairSample s;
  const double p = m.momentum_spread * rng.normal();
  s.p1 = p;
  s.p2 = -p; // exact: p1 + p2 = 0
  s.x1 = m.position_spread * rng.normal();
  s.x2 = m.position_spread * rng.normal();
  return s;
}

PairSample draw_state_two(const StateTwo& m, PairRng& rng) {
  PairSample s;
  const double x = m.position_spread * rng.normal();
  s.x1 = x;
  s.x2 = x - m.offset; // exact: x1 - x2 = x0
  s.p1 = m.momentum_spread * rng.normal();
  s.p2 = m.momentum_spread * rng.normal();
  return s;
}

} // namespace

void validate(const ClassicalPairModel& model) {
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, StateOne>) {
          if (!(m.momentum_spread > 0.0) || !(m.position_spread > 0.0))
            throw InvalidModel("state-one spreads must be positive");
          if (m.position_spread * m.momentum_spread < 1.0)
            throw InvalidModel("state one violates the per-particle bound dx*dp >= 1");
        } else if constexpr (std::is_same_v<T, StateTwo>) {
          if (!(m.momentum_spread > 0.0) || !(m.position_spread > 0.0))
            throw InvalidModel("state-two spreads must be positive");
          if (m.position_spread * m.momentum_spread < 1.0)
            throw InvalidModel("state two violates the per-particle bound dx*dp >= 1");
        } else if constexpr (std::is_same_v<T, StateThree>) {
          validate(ClassicalPairModel(m.one));
          validate(ClassicalPairModel(m.two));
        } else {
          if (!(m.sum_spread > 0.0) || !(m.diff_spread > 0.0) || !(m.single_spread > 0.0))
            throw InvalidModel("entangled-surrogate spreads must be positive");
          if (!(m.sum_spread < m.single_spread) || !(m.diff_spread < m.single_spread))
            throw InvalidModel("entangled surrogate requires narrow sums: "
                               "sum and diff spreads below the single-particle spread");
        }
      },
      model);
}

std::vector<PairSample> sample_pairs(const ClassicalPairModel& model, std::size_t n,
                                     std::uint64_t seed) {
  if (n < 1) throw InvalidModel("need at least one pair");
  validate(model);
  std::vector<PairSample> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    PairRng rng(seed, k);
    out[k] = std::visit(
        [&rng, k](const auto& m) -> PairSample {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, StateOne>) {
            return draw_state_one(m, rng);
          } else if constexpr (std::is_same_v<T, StateTwo>) {
            return draw_state_two(m, rng);
          } else if constexpr (std::is_same_v<T, StateThree>) {
            // exact alternation keeps the mixture at 50/50 for every n
            return (k % 2 == 0) ? draw_state_one(m.one, rng) : draw_state_two(m.two, rng);
          } else {
            PairSample s;
            const double sum_p = m.sum_spread * rng.normal();
            const double diff_x = m.offset + m.diff_spread * rng.normal();
            s.p1 = m.single_spread * rng.normal();
            s.p2 = sum_p - s.p1;
            s.x1 = m.single_spread * rng.normal();
            s.x2 = s.x1 - diff_x;
            return s;
          }
        },
        model);
  }
  return out;
}

namespace {

double sample_std(const std::vector<double>& v) {
  const std::size_t n = v.size();
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(n - 1));
}

} // namespace

SpreadReport evaluate_inequalities(const std::vector<PairSample>& samples) {
  if (samples.size() < 2) throw InsufficientSamples("need at least two pairs");
  const std::size_t n = samples.size();
  std::vector<double> p1(n), p2(n), x1(n), x2(n), sp(n), dx(n);
  for (std::size_t k = 0; k < n; ++k) {
    p1[k] = samples[k].p1;
    p2[k] = samples[k].p2;
    x1[k] = samples[k].x1;
    x2[k] = samples[k].x2;
    sp[k] = samples[k].p1 + samples[k].p2;
    dx[k] = samples[k].x1 - samples[k].x2;
  }
  SpreadReport r;
  r.dp1 = sample_std(p1);
  r.dp2 = sample_std(p2);
  r.dx1 = sample_std(x1);
  r.dx2 = sample_std(x2);
  r.dsum_p = sample_std(sp);
  r.ddiff_x = sample_std(dx);
  r.classical_inequality =
      r.dsum_p > std::max(r.dp1, r.dp2) && r.ddiff_x > std::max(r.dx1, r.dx2);
  r.epr_inequality = r.dsum_p < std::min(r.dp1, r.dp2) && r.ddiff_x < std::min(r.dx1, r.dx2);
  r.samples = n;
  return r;
}

double conjugate_spread_product(const EntangledGaussian& model) {
  // x1 + x2 = 2 x1 - (x1 - x2): independent terms in the sampler
  const double dxsum = std::sqrt(4.0 * model.single_spread * model.single_spread +
                                 model.diff_spread * model.diff_spread);
  return dxsum * model.sum_spread;
}

} // namespace biphoton::epr

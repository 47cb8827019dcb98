#pragma once

// The referee. A SWAP test on registers rho and sigma passes with probability
// (1 + tr(rho sigma)) / 2. With stakes +1 on pass and -1 on failure, player I
// expects
//
//   (+1) p + (-1)(1 - p) = 2p - 1 = tr(rho sigma),
//
// so the expected payoff of a round is exactly the overlap, and the value of
// each game (in payoff units) is the optimal Haar-averaged fidelity. Player II
// receives the negation.

#include <random>

#include "qgames/core.hpp"

namespace qgames {

inline double pass_probability(const DensityOperator& rho, const DensityOperator& sigma) {
  if (rho.dim() != sigma.dim()) throw ShapeError("SWAP test: dimension mismatch");
  return (1.0 + overlap(rho, sigma)) / 2.0;
}

inline double expected_payoff(const DensityOperator& rho, const DensityOperator& sigma) {
  return 2.0 * pass_probability(rho, sigma) - 1.0;
}

/// One refereed round: +1 on pass, -1 otherwise.
template <class Urbg>
int sample_outcome(const DensityOperator& rho, const DensityOperator& sigma, Urbg& gen) {
  const double p = pass_probability(rho, sigma);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  return uniform(gen) < p ? 1 : -1;
}

inline int sample_outcome(const DensityOperator& rho, const DensityOperator& sigma,
                          const RandomStream& stream) {
  auto gen = stream.engine();
  return sample_outcome(rho, sigma, gen);
}

}  // namespace qgames

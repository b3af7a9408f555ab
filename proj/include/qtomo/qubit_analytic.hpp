#pragma once
// Closed-form single-qubit model comparison for the three-block X, Y, Z
// experiment with N shots per block.
//
// Standard model: one state for all blocks. Alternative model: one state per
// block, which always reproduces the observed frequencies exactly.
// When R = |(X, Y, Z)| <= 1 both fit perfectly with three parameters and the
// scores tie. When R > 1 the standard-model maximum is a pure state (two
// parameters) and the score difference has the closed form implemented by
// delta_aic_exact.

#include <array>
#include <cstdint>
#include <optional>
#include <span>

#include "qtomo/likelihood.hpp"
#include "qtomo/qstate.hpp"

namespace qtomo::qubit {

struct QubitSummary {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  std::int64_t n = 1;  // shots per block

  double radius() const;
  double average(Pauli p) const;
};

// Requires exactly three single-qubit blocks measuring X, Y and Z (in any
// order) with the same number of shots.
QubitSummary summarize(const ExperimentRecord& r);

double radius(double x, double y, double z);

// Pooled (+, -) counts per axis, index 0..2 for X, Y, Z.
struct AxisTally {
  double n_plus = 0.0;
  double n_minus = 0.0;
  double total() const { return n_plus + n_minus; }
};
using AxisTallies = std::array<AxisTally, 3>;

AxisTallies tally_axes(std::span<const BlockData> blocks);
AxisTallies tally_summary(const QubitSummary& s);

// Log-likelihood of Bloch vector b given pooled tallies.
LogLikelihood tally_loglik(const AxisTallies& t, const BlochVector& b);

// Exact maximizer of the likelihood over the Bloch ball. Inside the ball it is
// the vector of pooled averages; otherwise it solves the stationarity
// condition grad = lambda * r on the unit sphere by nested bisection.
BlochVector bloch_ball_mle(const AxisTallies& t);

// (X, Y, Z) / R when R > 1, else (X, Y, Z).
BlochVector normalized_average_estimate(const QubitSummary& s);

// Standard-model estimate: the normalized-average state refined to the exact
// maximum, keeping whichever has the higher likelihood.
DensityMatrix standard_mle_qubit(const QubitSummary& s);

// Omega_s - Omega_a. Zero for R < 1. For R >= 1 the closed form
//   1 + N sum_M [ 1/2 ln((1 - M^2/R^2)/(1 - M^2))
//                 + M/2 ln((R + M)(1 - M) / ((R - M)(1 + M))) ]
// with the standard-model likelihood taken at the normalized-average state.
double delta_aic_exact(const QubitSummary& s);
// True when some |M| = 1, where the closed form is replaced by its limit.
bool uses_limiting_form(const QubitSummary& s);

// Quadratic expansion 1 - N sum_M (R - 1)^2 M^2 / (2 (1 - M^2)); zero for R < 1.
double delta_aic_taylor(const QubitSummary& s);
// (R - 1)^2 <= factor * (1 - M^2) for every axis.
bool taylor_regime(const QubitSummary& s, double factor = 0.1);

// C = 1 / sqrt(sum_M M^2 / (2 (1 - M^2))). nullopt when every M is zero (no
// constraint); 0 when some |M| = 1.
std::optional<double> consistency_threshold(double x, double y, double z);
// (R - 1) <= C / sqrt(N).
bool consistent_by_threshold(const QubitSummary& s);

}  // namespace qtomo::qubit

#pragma once
// Numerical maximum-likelihood state estimation.
//
// Two engines:
//  * rho_r_rho: fixed-point iteration rho <- R rho R / Tr(R rho R), diluted to
//    (I + eps R) rho (I + eps R) with eps halved whenever the plain step fails
//    to raise the likelihood. Positivity is preserved by construction.
//  * fit_tied_states: several states whose Pauli components are either shared
//    between all of them or free per state, fitted jointly by a log-det barrier
//    path-following Newton method.

#include <cstddef>
#include <span>
#include <vector>

#include "qtomo/likelihood.hpp"
#include "qtomo/qstate.hpp"

namespace qtomo::mle {

struct RhoROptions {
  double tolerance = 1e-10;  // stop when the per-iteration lnL gain drops below this
  int max_iterations = 100000;
  bool record_trace = false;
};

struct RhoRResult {
  DensityMatrix state;
  double loglik = 0.0;
  int iterations = 0;
  bool converged = false;
  bool monotone = true;       // lnL never decreased between iterates
  std::vector<double> trace;  // lnL after every accepted iterate (if recorded)
};

// Joint MLE of a single state over all blocks.
RhoRResult rho_r_rho(std::span<const BlockData> blocks, std::size_t n_qubits, const RhoROptions& opts = {});

struct TiedStateProblem {
  std::size_t n_qubits = 1;
  std::span<const BlockData> blocks;
  std::vector<int> group_of_block;  // group id 0..n_groups-1 per block
  std::size_t n_groups = 1;
  // shared[c] for every component of pauli_basis(n_qubits).
  std::vector<bool> shared;
};

struct TiedStateResult {
  std::vector<DensityMatrix> states;  // one per group
  double loglik = 0.0;
  double duality_gap_bound = 0.0;  // loglik is within this of the true maximum
  bool converged = false;
};

TiedStateResult fit_tied_states(const TiedStateProblem& problem);

// Log-likelihood of one state against a set of blocks.
LogLikelihood state_loglik(const DensityMatrix& rho, std::span<const BlockData> blocks);

}  // namespace qtomo::mle

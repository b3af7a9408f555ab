#pragma once
// Synthetic tomography experiments from a drifting source.
//
// The source emits p |psi_phi><psi_phi| + (1 - p) I/2 with Bloch vector
// (p cos phi, p sin phi, 0); phi performs a Gaussian random walk, one step per
// shot. Two-qubit sources emit the product of two copies driven by the same
// angle.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qtomo/likelihood.hpp"
#include "qtomo/models.hpp"
#include "qtomo/qstate.hpp"

namespace qtomo::sim {

struct SourceConfig {
  double p = 0.9;
  double phi0 = 0.0;
  double sigma_step = 0.0;
  std::uint64_t seed = 1;
  int n_qubits = 1;
};

void validate_config(const SourceConfig& cfg);

enum class Ordering { Blocked, Randomized };

std::string to_string(Ordering o);
Ordering ordering_from_string(const std::string& s);

struct ScheduledBlock {
  MeasurementSetting setting;
  std::int64_t shots = 0;
};

struct Schedule {
  std::vector<ScheduledBlock> blocks;
  Ordering ordering = Ordering::Blocked;

  std::int64_t total_shots() const;
};

// Parses "X:500,Y:500" (or "XY:200,..." for two qubits).
Schedule parse_schedule(const std::string& spec, Ordering ordering = Ordering::Blocked);
// X, Y, Z, X, Y, Z with 500 shots each, blocked.
Schedule drift_schedule();
// The nine two-qubit Pauli pairs XX, XY, ..., ZZ with `shots` each.
Schedule two_qubit_schedule(std::int64_t shots);

struct DriftTrajectory {
  std::vector<double> phi;  // one angle per shot
};

DensityMatrix source_state(double phi, double p);
// State emitted at angle phi for an n-qubit source.
DensityMatrix source_state(double phi, double p, int n_qubits);

DriftTrajectory drift_walk(const SourceConfig& cfg, std::int64_t n_shots);

// Each shot k samples an outcome from the source state at phi_k under the
// setting assigned to it. Blocked schedules assign settings block by block;
// randomized schedules shuffle the per-shot block assignment while the drift
// stays time-ordered. Counts are aggregated per scheduled block.
ExperimentRecord run_experiment(const SourceConfig& cfg, const Schedule& sched);

// Samples `shots` outcomes from a fixed state.
template <class Rng>
BlockData sample_block(const DensityMatrix& rho, const MeasurementSetting& s, std::int64_t shots, Rng& rng);

// Derives an independent seed for stream `index` from a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

struct PowerResult {
  int n_trials = 0;
  int n_inconsistent = 0;
  double fraction = 0.0;
  double std_error = 0.0;  // binomial standard error of the fraction
};

// Runs n_trials independent experiments (seeds derived from cfg.seed), fits
// every model and counts INCONSISTENT verdicts. The model set must contain
// exactly one standard model.
PowerResult monte_carlo_power(const SourceConfig& cfg, const Schedule& sched, const std::vector<ModelSpec>& models,
                              int n_trials, unsigned threads = 0);

// Standard, per-block, and the two-halves models with none or Z shared.
std::vector<ModelSpec> drift_model_set(std::size_t n_blocks);

template <class Rng>
BlockData sample_block(const DensityMatrix& rho, const MeasurementSetting& s, std::int64_t shots, Rng& rng) {
  const std::vector<double> p = born_probabilities(rho, s);
  std::discrete_distribution<std::size_t> dist(p.begin(), p.end());
  BlockData b{s, std::vector<std::int64_t>(p.size(), 0), 0};
  for (std::int64_t i = 0; i < shots; ++i) ++b.counts[dist(rng)];
  return b;
}

}  // namespace qtomo::sim

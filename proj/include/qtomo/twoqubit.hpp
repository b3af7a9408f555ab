#pragma once
// Two-qubit tomography with the nine Pauli-pair settings: bookkeeping of the
// repeatedly estimated marginals, the joint maximum-likelihood state, and
// alternative models aimed at the least consistent repeated estimates.

#include <array>
#include <cstdint>
#include <map>
#include <vector>

#include "qtomo/likelihood.hpp"
#include "qtomo/mle.hpp"
#include "qtomo/models.hpp"

namespace qtomo::twoqubit {

// XX, XY, XZ, YX, ..., ZZ.
std::vector<MeasurementSetting> enumerate_settings();

struct SettingAverages {
  double correlator = 0.0;  // e.g. <X (x) Y>
  double marginal_a = 0.0;  // first qubit, e.g. <X (x) I>
  double marginal_b = 0.0;  // second qubit, e.g. <I (x) Y>
};

SettingAverages per_setting_averages(const BlockData& b);

struct Estimate {
  MeasurementSetting setting;
  double value = 0.0;
  std::int64_t shots = 0;
};

// observable -> every (setting, estimate) that determines it.
using MultiplicityTable = std::map<PauliString, std::vector<Estimate>>;

// Requires the record to hold each of the nine settings exactly once.
MultiplicityTable multiplicity_table(const ExperimentRecord& r);

struct ScanEntry {
  PauliString observable;
  double max_z = 0.0;
};

// |m1 - m2| / sqrt((1 - m1^2)/N1 + (1 - m2^2)/N2) for one pair of estimates.
double pair_z_score(const Estimate& a, const Estimate& b);

// Largest pairwise z-score of every observable estimated at least twice,
// sorted descending.
std::vector<ScanEntry> inconsistency_scan(const MultiplicityTable& t);

// Entries with max_z above the threshold.
std::vector<ScanEntry> flag_inconsistent(const std::vector<ScanEntry>& scan, double z_threshold = 3.0);

struct JointMleResult {
  DensityMatrix state;
  double loglik = 0.0;
  int iterations = 0;
  bool converged = false;
  bool monotone = true;
  bool rank_deficient = false;  // some eigenvalue below 1e-8
  std::vector<double> trace;
};

// Single-state MLE over the whole nine-setting record by the diluted
// R rho R iteration.
JointMleResult joint_mle(const ExperimentRecord& r, const mle::RhoROptions& opts = {});

// The standard model, the per-setting model, and one model per flagged
// observable in which that observable is free per setting group and every
// other component is shared.
std::vector<ModelSpec> build_alternative_models(const ExperimentRecord& r, const std::vector<ScanEntry>& flagged);

}  // namespace qtomo::twoqubit

#pragma once
// Candidate models, fitting, parameter counting and AIC ranking.
//
// Scores follow the convention Omega = ln L - K: higher is better, and the
// weight of model k relative to k' is exp(Omega_k - Omega_k').

#include <optional>
#include <string>
#include <vector>

#include "qtomo/likelihood.hpp"
#include "qtomo/qstate.hpp"

namespace qtomo {

// A partition of the blocks into groups, each described by its own state.
// With a mask, every listed component is shared by all groups and every other
// component is free per group; without one the groups are independent.
struct ModelSpec {
  std::string name;
  std::vector<int> grouping;  // group id per block, ids 0..n_groups-1
  std::optional<std::vector<PauliString>> shared;

  std::size_t n_groups() const;
  bool is_standard() const { return n_groups() == 1; }
};

ModelSpec standard_model(std::size_t n_blocks);
ModelSpec per_block_model(std::size_t n_blocks);
// One group per distinct measurement setting.
ModelSpec per_setting_model(const ExperimentRecord& r);
// Blocks split into a first and second half, with the given shared components
// (nullopt for two independent states).
ModelSpec halves_model(std::size_t n_blocks, std::optional<std::vector<PauliString>> shared);

// Throws std::invalid_argument if the grouping does not cover the record or
// the group ids are not contiguous.
void validate_spec(const ModelSpec& spec, const ExperimentRecord& r);

enum class FitEngine {
  Auto,     // closed forms where they exist, numerical fits elsewhere
  Numeric,  // barrier-method fit for every model
};

struct FittedModel {
  ModelSpec spec;
  std::vector<DensityMatrix> estimates;  // indexed by group id
  double loglik = 0.0;
  int k = 0;
  double omega = 0.0;
  std::int64_t n_samples = 0;
  std::string method;  // which fitting path produced the estimates

  bool is_standard() const { return spec.is_standard(); }
  // AICc score; nullopt when n_samples <= K + 1.
  std::optional<double> omega_c() const;
};

double aic(double loglik, int k);
// Omega - K(K+1)/(n - K - 1); throws std::invalid_argument if n <= K + 1.
double aicc(double loglik, int k, std::int64_t n_samples);

// K = 2dr - r^2 - 1 for a d-dimensional state of numerical rank r.
int count_parameters(const DensityMatrix& estimate, double rank_threshold = 1e-8);
// Single group: the rank rule on its estimate. Several groups: one parameter
// per data-determined component, counted once if shared and once per group
// if free.
int count_parameters(const ModelSpec& spec, const ExperimentRecord& r, const std::vector<DensityMatrix>& estimates);

// Components of `basis` that some block of the group determines.
std::vector<std::vector<bool>> determined_components(const ModelSpec& spec, const ExperimentRecord& r);

FittedModel fit_model(const ModelSpec& spec, const ExperimentRecord& r, FitEngine engine = FitEngine::Auto);

// w_k = exp(Omega_k - max) / sum_j exp(Omega_j - max).
std::vector<double> akaike_weights(const std::vector<double>& omegas);

enum class Scoring { Aic, Aicc };
enum class Verdict { Consistent, Inconsistent };

std::string to_string(Verdict v);

struct AicReport {
  std::vector<FittedModel> fitted;  // best first
  std::vector<double> scores;       // the score used for ranking, aligned with fitted
  std::vector<double> deltas;       // best score minus each score
  std::vector<double> weights;
  Scoring scoring = Scoring::Aic;
  Verdict verdict = Verdict::Consistent;
  std::size_t standard_index = 0;  // position of the standard model in fitted
};

// Ranks by score descending; scores within 1e-9 count as tied, and ties go
// to the smaller K and then to the standard model. The verdict is consistent
// iff the standard model scores at least as well as every alternative.
AicReport rank_models(std::vector<FittedModel> fitted, Scoring scoring = Scoring::Aic);

// Weighted mixture of each model's predicted outcome distribution. A model's
// prediction uses the estimate of group `group` (default: the first group).
std::vector<double> model_averaged_prediction(const AicReport& report, const MeasurementSetting& setting,
                                              std::size_t group = 0);

}  // namespace qtomo

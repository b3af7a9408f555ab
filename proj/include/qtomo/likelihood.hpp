#pragma once
// Count records and multinomial log-likelihoods (natural log).

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qtomo/qstate.hpp"

namespace qtomo {

// Raised when a model assigns zero probability to an observed outcome.
class ImpossibleData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A log-likelihood in nats, or the marker that the data are impossible under
// the evaluated distribution. Sums propagate the marker.
class LogLikelihood {
 public:
  constexpr LogLikelihood() = default;
  constexpr explicit LogLikelihood(double v) : value_(v) {}
  static constexpr LogLikelihood impossible() {
    LogLikelihood l;
    l.impossible_ = true;
    return l;
  }

  bool is_impossible() const { return impossible_; }
  // Throws ImpossibleData when the marker is set.
  double value() const {
    if (impossible_) throw ImpossibleData("observed data have zero probability under the model");
    return value_;
  }

  LogLikelihood& operator+=(const LogLikelihood& o) {
    impossible_ = impossible_ || o.impossible_;
    value_ += o.value_;
    return *this;
  }
  friend LogLikelihood operator+(LogLikelihood a, const LogLikelihood& b) { return a += b; }

 private:
  double value_ = 0.0;
  bool impossible_ = false;
};

struct BlockData {
  MeasurementSetting setting;
  std::vector<std::int64_t> counts;  // indexed by outcome, see MeasurementSetting
  int order_index = 0;

  std::int64_t total() const;
  std::vector<double> frequencies() const;
  friend bool operator==(const BlockData&, const BlockData&) = default;
};

// Checks count-vector size, nonnegativity and N >= 1.
void validate_block(const BlockData& b);

struct ExperimentMetadata {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> schedule;
  std::optional<double> p;
  std::optional<double> drift_sigma;
  std::optional<double> phi0;
  std::string notes;
  friend bool operator==(const ExperimentMetadata&, const ExperimentMetadata&) = default;
};

struct ExperimentRecord {
  int n_qubits = 1;
  std::vector<BlockData> blocks;  // sorted by order_index
  ExperimentMetadata metadata;

  std::int64_t total_shots() const;
  friend bool operator==(const ExperimentRecord&, const ExperimentRecord&) = default;
};

// Throws std::invalid_argument on gaps in order_index, mixed qubit counts or
// malformed blocks.
void validate_record(const ExperimentRecord& r);

// Observable averages a block determines, paired with the observable.
struct ObservableAverage {
  PauliString observable;
  double value = 0.0;
};

// (n+ - n-)/N for every observable the setting determines. For a single
// qubit block there is exactly one entry.
std::vector<ObservableAverage> empirical_averages(const BlockData& b);

// Sum n_o ln p_o with 0 ln 0 = 0; impossible if n_o > 0 where p_o = 0.
LogLikelihood multinomial_loglik(std::span<const std::int64_t> counts, std::span<const double> probs);

// Maximum over all outcome distributions: -N H(f) at the empirical
// frequencies f.
double block_max_loglik(const BlockData& b);

// Shannon entropy of (f, 1-f) in nats.
double binary_entropy(double f);

}  // namespace qtomo

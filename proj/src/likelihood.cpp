#include "qtomo/likelihood.hpp"

#include <cmath>
#include <numeric>

namespace qtomo {

std::int64_t BlockData::total() const { return std::accumulate(counts.begin(), counts.end(), std::int64_t{0}); }

std::vector<double> BlockData::frequencies() const {
  const double n = static_cast<double>(total());
  std::vector<double> f(counts.size());
  for (std::size_t o = 0; o < counts.size(); ++o) f[o] = static_cast<double>(counts[o]) / n;
  return f;
}

void validate_block(const BlockData& b) {
  if (b.counts.size() != b.setting.n_outcomes()) {
    throw std::invalid_argument("block counts do not match the setting's outcome space");
  }
  for (auto c : b.counts) {
    if (c < 0) throw std::invalid_argument("negative outcome count");
  }
  if (b.total() < 1) throw std::invalid_argument("empty measurement block");
}

std::int64_t ExperimentRecord::total_shots() const {
  std::int64_t n = 0;
  for (const auto& b : blocks) n += b.total();
  return n;
}

void validate_record(const ExperimentRecord& r) {
  if (r.n_qubits != 1 && r.n_qubits != 2) throw std::invalid_argument("n_qubits must be 1 or 2");
  if (r.blocks.empty()) throw std::invalid_argument("experiment record has no blocks");
  for (std::size_t i = 0; i < r.blocks.size(); ++i) {
    const auto& b = r.blocks[i];
    if (b.order_index != static_cast<int>(i)) {
      throw std::invalid_argument("order_index values must be 0..len-1 in order");
    }
    if (static_cast<int>(b.setting.n_qubits()) != r.n_qubits) {
      throw std::invalid_argument("block setting does not match n_qubits");
    }
    validate_block(b);
  }
}

std::vector<ObservableAverage> empirical_averages(const BlockData& b) {
  validate_block(b);
  const double n = static_cast<double>(b.total());
  std::vector<ObservableAverage> out;
  for (const PauliString& obs : observables_of(b.setting)) {
    double s = 0.0;
    for (std::size_t o = 0; o < b.counts.size(); ++o) {
      s += obs.eigenvalue(o) * static_cast<double>(b.counts[o]);
    }
    out.push_back({obs, s / n});
  }
  return out;
}

LogLikelihood multinomial_loglik(std::span<const std::int64_t> counts, std::span<const double> probs) {
  if (counts.size() != probs.size()) {
    throw std::invalid_argument("counts and probabilities differ in length");
  }
  LogLikelihood total(0.0);
  for (std::size_t o = 0; o < counts.size(); ++o) {
    if (counts[o] < 0) throw std::invalid_argument("negative outcome count");
    if (counts[o] == 0) continue;
    if (!(probs[o] > 0.0)) return LogLikelihood::impossible();
    total += LogLikelihood(static_cast<double>(counts[o]) * std::log(probs[o]));
  }
  return total;
}

double block_max_loglik(const BlockData& b) {
  validate_block(b);
  const std::vector<double> f = b.frequencies();
  return multinomial_loglik(b.counts, f).value();
}

double binary_entropy(double f) {
  double h = 0.0;
  if (f > 0.0) h -= f * std::log(f);
  if (f < 1.0) h -= (1.0 - f) * std::log(1.0 - f);
  return h;
}

}  // namespace qtomo

#pragma once

#include <random>
#include <string>
#include <vector>

#include "qtomo/likelihood.hpp"
#include "qtomo/simulator.hpp"

namespace testing {

struct Counts {
  std::string setting;
  std::vector<std::int64_t> counts;
};

inline qtomo::ExperimentRecord make_record(const std::vector<Counts>& blocks) {
  qtomo::ExperimentRecord r;
  r.n_qubits = static_cast<int>(blocks.front().setting.size());
  int i = 0;
  for (const auto& b : blocks) r.blocks.push_back({qtomo::MeasurementSetting::parse(b.setting), b.counts, i++});
  return r;
}

// Three blocks X, Y, Z with N shots each and the given averages, rounded to
// the nearest achievable count.
inline qtomo::ExperimentRecord qubit_record(double x, double y, double z, std::int64_t n) {
  auto plus = [n](double m) { return static_cast<std::int64_t>(std::llround(n * (1 + m) / 2)); };
  return make_record({{"X", {plus(x), n - plus(x)}}, {"Y", {plus(y), n - plus(y)}}, {"Z", {plus(z), n - plus(z)}}});
}

inline qtomo::DensityMatrix random_state(std::size_t dim, std::mt19937_64& rng, std::size_t rank = 0) {
  std::normal_distribution<double> g;
  if (rank == 0) rank = dim;
  qtomo::Matrix a(dim, rank);
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = qtomo::Complex(g(rng), g(rng));
  return qtomo::DensityMatrix::from_unnormalized(a * a.adjoint());
}

// Each setting sampled from rho with `shots` shots.
inline qtomo::ExperimentRecord sample_record(const qtomo::DensityMatrix& rho, const std::vector<std::string>& settings,
                                             std::int64_t shots, std::mt19937_64& rng) {
  qtomo::ExperimentRecord r;
  r.n_qubits = static_cast<int>(rho.n_qubits());
  int i = 0;
  for (const auto& s : settings) {
    qtomo::BlockData b = qtomo::sim::sample_block(rho, qtomo::MeasurementSetting::parse(s), shots, rng);
    b.order_index = i++;
    r.blocks.push_back(std::move(b));
  }
  return r;
}

inline const std::vector<std::string> kNineSettings{"XX", "XY", "XZ", "YX", "YY", "YZ", "ZX", "ZY", "ZZ"};

}  // namespace testing

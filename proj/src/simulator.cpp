#include "qtomo/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <unsupported/Eigen/KroneckerProduct>

namespace qtomo::sim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Stream ids under one experiment seed.
constexpr std::uint64_t kWalkStream = 0;
constexpr std::uint64_t kOrderStream = 1;
constexpr std::uint64_t kOutcomeStream = 2;

void validate_schedule(const Schedule& sched, int n_qubits) {
  if (sched.blocks.empty()) throw std::invalid_argument("schedule has no blocks");
  for (const auto& b : sched.blocks) {
    if (b.shots < 1) throw std::invalid_argument("every block needs at least one shot");
    if (static_cast<int>(b.setting.n_qubits()) != n_qubits) {
      throw std::invalid_argument("block setting " + b.setting.label() + " does not match the source");
    }
  }
}

}  // namespace

void validate_config(const SourceConfig& cfg) {
  if (!(cfg.p >= 0.0 && cfg.p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
  if (!(cfg.sigma_step >= 0.0)) throw std::invalid_argument("drift sigma must be nonnegative");
  if (!std::isfinite(cfg.phi0)) throw std::invalid_argument("phi0 must be finite");
  if (cfg.n_qubits != 1 && cfg.n_qubits != 2) throw std::invalid_argument("sources have one or two qubits");
}

std::string to_string(Ordering o) { return o == Ordering::Blocked ? "blocked" : "randomized"; }

Ordering ordering_from_string(const std::string& s) {
  if (s == "blocked") return Ordering::Blocked;
  if (s == "randomized") return Ordering::Randomized;
  throw std::invalid_argument("schedule must be 'blocked' or 'randomized', got '" + s + "'");
}

std::int64_t Schedule::total_shots() const {
  std::int64_t n = 0;
  for (const auto& b : blocks) n += b.shots;
  return n;
}

Schedule parse_schedule(const std::string& spec, Ordering ordering) {
  Schedule out{{}, ordering};
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == item.size()) {
      throw std::invalid_argument("block '" + item + "' is not of the form SETTING:SHOTS");
    }
    std::size_t used = 0;
    const std::string count = item.substr(colon + 1);
    long long shots = 0;
    try {
      shots = std::stoll(count, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad shot count in '" + item + "'");
    }
    if (used != count.size() || shots < 1) throw std::invalid_argument("bad shot count in '" + item + "'");
    out.blocks.push_back({MeasurementSetting::parse(item.substr(0, colon)), shots});
  }
  if (out.blocks.empty()) throw std::invalid_argument("empty block list");
  return out;
}

Schedule drift_schedule() { return parse_schedule("X:500,Y:500,Z:500,X:500,Y:500,Z:500"); }

Schedule two_qubit_schedule(std::int64_t shots) {
  Schedule out;
  for (Pauli a : {Pauli::X, Pauli::Y, Pauli::Z}) {
    for (Pauli b : {Pauli::X, Pauli::Y, Pauli::Z}) out.blocks.push_back({MeasurementSetting({a, b}), shots});
  }
  return out;
}

DensityMatrix source_state(double phi, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
  return DensityMatrix(bloch_to_density({p * std::cos(phi), p * std::sin(phi), 0.0}).matrix());
}

DensityMatrix source_state(double phi, double p, int n_qubits) {
  const DensityMatrix one = source_state(phi, p);
  if (n_qubits == 1) return one;
  if (n_qubits != 2) throw std::invalid_argument("sources have one or two qubits");
  return DensityMatrix::from_unnormalized(Eigen::kroneckerProduct(one.matrix(), one.matrix()).eval());
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

DriftTrajectory drift_walk(const SourceConfig& cfg, std::int64_t n_shots) {
  validate_config(cfg);
  if (n_shots < 1) throw std::invalid_argument("a trajectory needs at least one shot");
  std::mt19937_64 rng(derive_seed(cfg.seed, kWalkStream));
  std::normal_distribution<double> step(0.0, 1.0);
  DriftTrajectory t;
  t.phi.resize(static_cast<std::size_t>(n_shots));
  t.phi[0] = cfg.phi0;
  for (std::size_t k = 1; k < t.phi.size(); ++k) t.phi[k] = t.phi[k - 1] + cfg.sigma_step * step(rng);
  return t;
}

ExperimentRecord run_experiment(const SourceConfig& cfg, const Schedule& sched) {
  validate_config(cfg);
  validate_schedule(sched, cfg.n_qubits);
  const std::int64_t total = sched.total_shots();
  const DriftTrajectory traj = drift_walk(cfg, total);

  std::vector<std::uint32_t> block_of_shot;
  block_of_shot.reserve(static_cast<std::size_t>(total));
  for (std::size_t b = 0; b < sched.blocks.size(); ++b) {
    block_of_shot.insert(block_of_shot.end(), static_cast<std::size_t>(sched.blocks[b].shots),
                         static_cast<std::uint32_t>(b));
  }
  if (sched.ordering == Ordering::Randomized) {
    std::mt19937_64 order_rng(derive_seed(cfg.seed, kOrderStream));
    std::shuffle(block_of_shot.begin(), block_of_shot.end(), order_rng);
  }

  ExperimentRecord rec;
  rec.n_qubits = cfg.n_qubits;
  for (std::size_t b = 0; b < sched.blocks.size(); ++b) {
    rec.blocks.push_back({sched.blocks[b].setting, std::vector<std::int64_t>(sched.blocks[b].setting.n_outcomes(), 0),
                          static_cast<int>(b)});
  }

  std::mt19937_64 rng(derive_seed(cfg.seed, kOutcomeStream));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const auto n = static_cast<std::size_t>(cfg.n_qubits);
  for (std::size_t k = 0; k < block_of_shot.size(); ++k) {
    const double bloch[3] = {cfg.p * std::cos(traj.phi[k]), cfg.p * std::sin(traj.phi[k]), 0.0};
    BlockData& blk = rec.blocks[block_of_shot[k]];
    // Product source: every qubit is sampled independently.
    std::size_t outcome = 0;
    for (std::size_t q = 0; q < n; ++q) {
      const double component = bloch[static_cast<int>(blk.setting.axes()[q] == Pauli::X   ? 0
                                                      : blk.setting.axes()[q] == Pauli::Y ? 1
                                                                                          : 2)];
      const bool minus = unif(rng) >= 0.5 * (1.0 + component);
      outcome = (outcome << 1) | (minus ? 1U : 0U);
    }
    ++blk.counts[outcome];
  }

  rec.metadata.seed = cfg.seed;
  rec.metadata.schedule = to_string(sched.ordering);
  rec.metadata.p = cfg.p;
  rec.metadata.drift_sigma = cfg.sigma_step;
  rec.metadata.phi0 = cfg.phi0;
  return rec;
}

PowerResult monte_carlo_power(const SourceConfig& cfg, const Schedule& sched, const std::vector<ModelSpec>& models,
                              int n_trials, unsigned threads) {
  if (n_trials < 1) throw std::invalid_argument("need at least one trial");
  validate_config(cfg);
  validate_schedule(sched, cfg.n_qubits);
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(n_trials));

  auto worker = [&](unsigned id) {
    int hits = 0;
    for (int t = static_cast<int>(id); t < n_trials; t += static_cast<int>(threads)) {
      SourceConfig trial_cfg = cfg;
      trial_cfg.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(t));
      const ExperimentRecord rec = run_experiment(trial_cfg, sched);
      std::vector<FittedModel> fitted;
      for (const ModelSpec& m : models) fitted.push_back(fit_model(m, rec));
      if (rank_models(std::move(fitted)).verdict == Verdict::Inconsistent) ++hits;
    }
    return hits;
  };

  std::vector<std::future<int>> jobs;
  for (unsigned id = 1; id < threads; ++id) jobs.push_back(std::async(std::launch::async, worker, id));
  int hits = worker(0);
  for (auto& j : jobs) hits += j.get();

  PowerResult res;
  res.n_trials = n_trials;
  res.n_inconsistent = hits;
  res.fraction = static_cast<double>(hits) / n_trials;
  res.std_error = std::sqrt(res.fraction * (1.0 - res.fraction) / n_trials);
  return res;
}

std::vector<ModelSpec> drift_model_set(std::size_t n_blocks) {
  return {standard_model(n_blocks), per_block_model(n_blocks), halves_model(n_blocks, std::nullopt),
          halves_model(n_blocks, std::vector<PauliString>{PauliString("Z")})};
}

}  // namespace qtomo::sim

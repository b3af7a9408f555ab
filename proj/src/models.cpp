#include "qtomo/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

#include "qtomo/mle.hpp"
#include "qtomo/qubit_analytic.hpp"

namespace qtomo {

namespace {

constexpr double kTieTol = 1e-9;

std::vector<std::vector<BlockData>> blocks_by_group(const ModelSpec& spec, const ExperimentRecord& r) {
  std::vector<std::vector<BlockData>> out(spec.n_groups());
  for (std::size_t i = 0; i < r.blocks.size(); ++i) out[spec.grouping[i]].push_back(r.blocks[i]);
  return out;
}

// Outcome frequencies pooled over blocks that all use one setting.
std::vector<double> pooled_frequencies(const std::vector<BlockData>& blocks) {
  std::vector<double> n(blocks.front().counts.size(), 0.0);
  double total = 0.0;
  for (const BlockData& b : blocks) {
    for (std::size_t o = 0; o < n.size(); ++o) n[o] += static_cast<double>(b.counts[o]);
    total += static_cast<double>(b.total());
  }
  for (double& v : n) v /= total;
  return n;
}

bool single_setting(const std::vector<BlockData>& blocks) {
  return std::all_of(blocks.begin(), blocks.end(),
                     [&](const BlockData& b) { return b.setting == blocks.front().setting; });
}

DensityMatrix diagonal_state(const MeasurementSetting& s, const std::vector<double>& freqs) {
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << s.n_qubits());
  Matrix m = Matrix::Zero(d, d);
  for (std::size_t o = 0; o < freqs.size(); ++o) m += freqs[o] * outcome_projector(s, o);
  return DensityMatrix::from_unnormalized(m);
}

// Per-block fitted probabilities and estimates for one group.
struct GroupFit {
  DensityMatrix estimate;
  // Set when the fitted distribution of every block is known exactly
  // (closed forms); otherwise probabilities come from the estimate.
  std::optional<std::vector<std::vector<double>>> block_probs;
  std::string method;
};

GroupFit fit_group_closed_form(const std::vector<BlockData>& blocks) {
  const std::vector<double> f = pooled_frequencies(blocks);
  return {diagonal_state(blocks.front().setting, f), std::vector<std::vector<double>>(blocks.size(), f),
          "closed-form"};
}

GroupFit fit_group_bloch_ball(const std::vector<BlockData>& blocks) {
  const qubit::AxisTallies t = qubit::tally_axes(blocks);
  const BlochVector b = qubit::bloch_ball_mle(t);
  DensityMatrix est = project_positive_eigenspace(bloch_to_density(b));
  if (b.norm() >= 1.0) return {std::move(est), std::nullopt, "bloch-ball"};
  // Interior maximum: each block's fitted distribution is its axis's pooled
  // frequencies.
  std::vector<std::vector<double>> probs;
  for (const BlockData& blk : blocks) {
    const auto a = static_cast<std::size_t>(blk.setting.axes()[0] == Pauli::X ? 0
                                            : blk.setting.axes()[0] == Pauli::Y ? 1
                                                                                : 2);
    probs.push_back({t[a].n_plus / t[a].total(), t[a].n_minus / t[a].total()});
  }
  return {std::move(est), std::move(probs), "bloch-ball"};
}

GroupFit fit_group_rho_r_rho(const std::vector<BlockData>& blocks, std::size_t n_qubits) {
  mle::RhoRResult res = mle::rho_r_rho(blocks, n_qubits);
  return {std::move(res.state), std::nullopt, "rho-r-rho"};
}

std::vector<bool> shared_mask(const ModelSpec& spec, std::size_t n_qubits) {
  const std::vector<PauliString> basis = pauli_basis(n_qubits);
  std::vector<bool> mask(basis.size(), spec.is_standard());
  if (spec.shared) {
    for (const PauliString& p : *spec.shared) {
      const auto it = std::find(basis.begin(), basis.end(), p);
      if (it == basis.end()) throw std::invalid_argument("shared component " + p.str() + " is not in the basis");
      mask[static_cast<std::size_t>(it - basis.begin())] = true;
    }
  }
  return mask;
}

}  // namespace

std::size_t ModelSpec::n_groups() const {
  if (grouping.empty()) return 0;
  return static_cast<std::size_t>(*std::max_element(grouping.begin(), grouping.end())) + 1;
}

ModelSpec standard_model(std::size_t n_blocks) { return {"standard", std::vector<int>(n_blocks, 0), std::nullopt}; }

ModelSpec per_block_model(std::size_t n_blocks) {
  ModelSpec m{"per-block", std::vector<int>(n_blocks), std::nullopt};
  for (std::size_t i = 0; i < n_blocks; ++i) m.grouping[i] = static_cast<int>(i);
  return m;
}

ModelSpec per_setting_model(const ExperimentRecord& r) {
  ModelSpec m{"per-setting", {}, std::nullopt};
  std::map<MeasurementSetting, int> ids;
  for (const BlockData& b : r.blocks) {
    const auto [it, inserted] = ids.try_emplace(b.setting, static_cast<int>(ids.size()));
    m.grouping.push_back(it->second);
  }
  return m;
}

ModelSpec halves_model(std::size_t n_blocks, std::optional<std::vector<PauliString>> shared) {
  if (n_blocks < 2) throw std::invalid_argument("halves model needs at least two blocks");
  ModelSpec m{"halves", std::vector<int>(n_blocks), std::move(shared)};
  for (std::size_t i = 0; i < n_blocks; ++i) m.grouping[i] = i < n_blocks / 2 ? 0 : 1;
  if (m.shared) {
    m.name += ":shared=";
    for (std::size_t i = 0; i < m.shared->size(); ++i) m.name += (i ? "+" : "") + (*m.shared)[i].str();
  }
  return m;
}

void validate_spec(const ModelSpec& spec, const ExperimentRecord& r) {
  if (spec.grouping.size() != r.blocks.size()) {
    throw std::invalid_argument("model '" + spec.name + "' does not assign every block to a group");
  }
  std::set<int> ids(spec.grouping.begin(), spec.grouping.end());
  if (*ids.begin() != 0 || static_cast<std::size_t>(*ids.rbegin()) + 1 != ids.size()) {
    throw std::invalid_argument("model '" + spec.name + "' has non-contiguous group ids");
  }
  if (spec.shared) {
    for (const PauliString& p : *spec.shared) {
      if (static_cast<int>(p.n_qubits()) != r.n_qubits) {
        throw std::invalid_argument("shared component " + p.str() + " does not match the record");
      }
    }
  }
}

std::optional<double> FittedModel::omega_c() const {
  if (n_samples <= static_cast<std::int64_t>(k) + 1) return std::nullopt;
  return aicc(loglik, k, n_samples);
}

double aic(double loglik, int k) {
  if (k < 0) throw std::invalid_argument("parameter count must be nonnegative");
  return loglik - static_cast<double>(k);
}

double aicc(double loglik, int k, std::int64_t n_samples) {
  if (n_samples <= static_cast<std::int64_t>(k) + 1) {
    throw std::invalid_argument("AICc needs more samples than K + 1");
  }
  const double kd = static_cast<double>(k);
  return aic(loglik, k) - kd * (kd + 1.0) / (static_cast<double>(n_samples) - kd - 1.0);
}

int count_parameters(const DensityMatrix& estimate, double rank_threshold) {
  const int d = static_cast<int>(estimate.dim());
  const int r = estimate.rank(rank_threshold);
  return 2 * d * r - r * r - 1;
}

std::vector<std::vector<bool>> determined_components(const ModelSpec& spec, const ExperimentRecord& r) {
  const std::vector<PauliString> basis = pauli_basis(static_cast<std::size_t>(r.n_qubits));
  std::vector<std::vector<bool>> out(spec.n_groups(), std::vector<bool>(basis.size(), false));
  for (std::size_t i = 0; i < r.blocks.size(); ++i) {
    for (std::size_t c = 0; c < basis.size(); ++c) {
      if (basis[c].measured_by(r.blocks[i].setting)) out[spec.grouping[i]][c] = true;
    }
  }
  return out;
}

int count_parameters(const ModelSpec& spec, const ExperimentRecord& r, const std::vector<DensityMatrix>& estimates) {
  if (spec.is_standard()) return count_parameters(estimates.front());
  const auto det = determined_components(spec, r);
  const std::vector<bool> shared = shared_mask(spec, static_cast<std::size_t>(r.n_qubits));
  int k = 0;
  for (std::size_t c = 0; c < shared.size(); ++c) {
    int groups = 0;
    for (const auto& g : det) groups += g[c] ? 1 : 0;
    k += shared[c] ? (groups > 0 ? 1 : 0) : groups;
  }
  return k;
}

FittedModel fit_model(const ModelSpec& spec, const ExperimentRecord& r, FitEngine engine) {
  validate_record(r);
  validate_spec(spec, r);
  const auto n_qubits = static_cast<std::size_t>(r.n_qubits);
  const auto groups = blocks_by_group(spec, r);

  std::vector<GroupFit> fits;
  const bool tied = spec.shared.has_value() && !spec.is_standard();
  if (engine == FitEngine::Numeric || tied) {
    mle::TiedStateProblem pr;
    pr.n_qubits = n_qubits;
    pr.blocks = r.blocks;
    pr.group_of_block = spec.grouping;
    pr.n_groups = spec.n_groups();
    pr.shared = shared_mask(spec, n_qubits);
    mle::TiedStateResult res = mle::fit_tied_states(pr);
    for (auto& s : res.states) fits.push_back({std::move(s), std::nullopt, "barrier"});
  } else {
    for (const auto& g : groups) {
      if (!spec.is_standard() && single_setting(g)) {
        fits.push_back(fit_group_closed_form(g));
      } else if (n_qubits == 1) {
        fits.push_back(fit_group_bloch_ball(g));
      } else {
        fits.push_back(fit_group_rho_r_rho(g, n_qubits));
      }
    }
  }

  FittedModel out{spec, {}, 0.0, 0, 0.0, r.total_shots(), fits.front().method};
  LogLikelihood lnl(0.0);
  for (std::size_t gi = 0; gi < groups.size(); ++gi) {
    const auto& g = groups[gi];
    for (std::size_t bi = 0; bi < g.size(); ++bi) {
      if (fits[gi].block_probs) {
        lnl += multinomial_loglik(g[bi].counts, (*fits[gi].block_probs)[bi]);
      } else {
        lnl += multinomial_loglik(g[bi].counts, born_probabilities(fits[gi].estimate, g[bi].setting));
      }
    }
  }
  for (auto& f : fits) out.estimates.push_back(std::move(f.estimate));
  out.loglik = lnl.value();
  out.k = count_parameters(spec, r, out.estimates);
  out.omega = aic(out.loglik, out.k);
  return out;
}

std::vector<double> akaike_weights(const std::vector<double>& omegas) {
  if (omegas.empty()) throw std::invalid_argument("no scores to weight");
  const double top = *std::max_element(omegas.begin(), omegas.end());
  std::vector<double> w(omegas.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::exp(omegas[i] - top);
    sum += w[i];
  }
  for (double& v : w) v /= sum;
  return w;
}

std::string to_string(Verdict v) { return v == Verdict::Consistent ? "CONSISTENT" : "INCONSISTENT"; }

AicReport rank_models(std::vector<FittedModel> fitted, Scoring scoring) {
  if (fitted.empty()) throw std::invalid_argument("no models to rank");
  const auto n_std = std::count_if(fitted.begin(), fitted.end(), [](const FittedModel& m) { return m.is_standard(); });
  if (n_std != 1) throw std::invalid_argument("exactly one standard model is required for ranking");

  auto score_of = [&](const FittedModel& m) {
    if (scoring == Scoring::Aic) return m.omega;
    const auto c = m.omega_c();
    if (!c) throw std::invalid_argument("AICc undefined for model '" + m.spec.name + "' (too few samples)");
    return *c;
  };

  std::vector<std::pair<double, FittedModel>> rows;
  for (auto& m : fitted) {
    const double s = score_of(m);
    rows.emplace_back(s, std::move(m));
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  // Reorder near-ties: smaller K first, then the standard model.
  auto prefer = [](const auto& a, const auto& b) {
    if (a.second.k != b.second.k) return a.second.k < b.second.k;
    return a.second.is_standard() && !b.second.is_standard();
  };
  for (bool swapped = true; swapped;) {
    swapped = false;
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
      if (std::abs(rows[i].first - rows[i + 1].first) < kTieTol && prefer(rows[i + 1], rows[i])) {
        std::swap(rows[i], rows[i + 1]);
        swapped = true;
      }
    }
  }

  AicReport rep;
  rep.scoring = scoring;
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& [s, m] : rows) best = std::max(best, s);
  double best_alt = -std::numeric_limits<double>::infinity();
  double std_score = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rep.scores.push_back(rows[i].first);
    rep.deltas.push_back(std::max(0.0, best - rows[i].first));
    if (rows[i].second.is_standard()) {
      rep.standard_index = i;
      std_score = rows[i].first;
    } else {
      best_alt = std::max(best_alt, rows[i].first);
    }
    rep.fitted.push_back(std::move(rows[i].second));
  }
  rep.weights = akaike_weights(rep.scores);
  rep.verdict = std_score >= best_alt - kTieTol ? Verdict::Consistent : Verdict::Inconsistent;
  return rep;
}

std::vector<double> model_averaged_prediction(const AicReport& report, const MeasurementSetting& setting,
                                              std::size_t group) {
  if (report.fitted.empty()) throw std::invalid_argument("empty report");
  std::vector<double> mix(setting.n_outcomes(), 0.0);
  for (std::size_t k = 0; k < report.fitted.size(); ++k) {
    const auto& est = report.fitted[k].estimates;
    const DensityMatrix& rho = est[std::min(group, est.size() - 1)];
    const std::vector<double> p = born_probabilities(rho, setting);
    for (std::size_t o = 0; o < p.size(); ++o) mix[o] += report.weights[k] * p[o];
  }
  return mix;
}

}  // namespace qtomo

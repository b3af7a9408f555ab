#include "qtomo/twoqubit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace qtomo::twoqubit {

namespace {

void require_complete_settings(const ExperimentRecord& r, bool exactly_once) {
  if (r.n_qubits != 2) throw std::invalid_argument("two-qubit analysis needs a two-qubit record");
  const std::vector<MeasurementSetting> all = enumerate_settings();
  std::multiset<MeasurementSetting> seen;
  for (const BlockData& b : r.blocks) seen.insert(b.setting);
  for (const auto& s : all) {
    const auto n = seen.count(s);
    if (n == 0 || (exactly_once && n != 1)) {
      throw std::invalid_argument("record does not contain the nine Pauli-pair settings exactly once (setting " +
                                  s.label() + ")");
    }
  }
  if (exactly_once && r.blocks.size() != all.size()) {
    throw std::invalid_argument("record holds blocks outside the nine Pauli-pair settings");
  }
}

}  // namespace

std::vector<MeasurementSetting> enumerate_settings() {
  std::vector<MeasurementSetting> out;
  for (Pauli a : {Pauli::X, Pauli::Y, Pauli::Z}) {
    for (Pauli b : {Pauli::X, Pauli::Y, Pauli::Z}) out.emplace_back(std::vector<Pauli>{a, b});
  }
  return out;
}

SettingAverages per_setting_averages(const BlockData& b) {
  if (b.setting.n_qubits() != 2) throw std::invalid_argument("per-setting averages need a two-qubit block");
  validate_block(b);
  const double n = static_cast<double>(b.total());
  const auto& c = b.counts;
  const double pp = static_cast<double>(c[0]);
  const double pm = static_cast<double>(c[1]);
  const double mp = static_cast<double>(c[2]);
  const double mm = static_cast<double>(c[3]);
  return {(pp - pm - mp + mm) / n, (pp + pm - mp - mm) / n, (pp - pm + mp - mm) / n};
}

MultiplicityTable multiplicity_table(const ExperimentRecord& r) {
  require_complete_settings(r, true);
  MultiplicityTable t;
  for (const BlockData& b : r.blocks) {
    const SettingAverages avg = per_setting_averages(b);
    const char a = to_char(b.setting.axes()[0]);
    const char c = to_char(b.setting.axes()[1]);
    const std::int64_t n = b.total();
    t[PauliString(std::string{a, c})].push_back({b.setting, avg.correlator, n});
    t[PauliString(std::string{a, 'I'})].push_back({b.setting, avg.marginal_a, n});
    t[PauliString(std::string{'I', c})].push_back({b.setting, avg.marginal_b, n});
  }
  return t;
}

double pair_z_score(const Estimate& a, const Estimate& b) {
  const double diff = std::abs(a.value - b.value);
  if (diff == 0.0) return 0.0;
  const double var = (1.0 - a.value * a.value) / static_cast<double>(a.shots) +
                     (1.0 - b.value * b.value) / static_cast<double>(b.shots);
  if (var <= 0.0) return std::numeric_limits<double>::infinity();
  return diff / std::sqrt(var);
}

std::vector<ScanEntry> inconsistency_scan(const MultiplicityTable& t) {
  std::vector<ScanEntry> out;
  for (const auto& [obs, estimates] : t) {
    if (estimates.size() < 2) continue;
    double z = 0.0;
    for (std::size_t i = 0; i < estimates.size(); ++i) {
      for (std::size_t j = i + 1; j < estimates.size(); ++j) z = std::max(z, pair_z_score(estimates[i], estimates[j]));
    }
    out.push_back({obs, z});
  }
  std::stable_sort(out.begin(), out.end(), [](const ScanEntry& a, const ScanEntry& b) { return a.max_z > b.max_z; });
  return out;
}

std::vector<ScanEntry> flag_inconsistent(const std::vector<ScanEntry>& scan, double z_threshold) {
  std::vector<ScanEntry> out;
  std::copy_if(scan.begin(), scan.end(), std::back_inserter(out),
               [&](const ScanEntry& e) { return e.max_z > z_threshold; });
  return out;
}

JointMleResult joint_mle(const ExperimentRecord& r, const mle::RhoROptions& opts) {
  validate_record(r);
  require_complete_settings(r, false);
  mle::RhoROptions o = opts;
  o.record_trace = true;
  mle::RhoRResult res = mle::rho_r_rho(r.blocks, 2, o);
  const bool deficient = res.state.eigenvalues().minCoeff() < 1e-8;
  return {std::move(res.state), res.loglik, res.iterations, res.converged, res.monotone, deficient,
          std::move(res.trace)};
}

std::vector<ModelSpec> build_alternative_models(const ExperimentRecord& r, const std::vector<ScanEntry>& flagged) {
  std::vector<ModelSpec> out{standard_model(r.blocks.size()), per_setting_model(r)};
  const std::vector<PauliString> basis = pauli_basis(static_cast<std::size_t>(r.n_qubits));
  for (const ScanEntry& e : flagged) {
    std::vector<PauliString> shared;
    std::copy_if(basis.begin(), basis.end(), std::back_inserter(shared),
                 [&](const PauliString& p) { return p != e.observable; });
    ModelSpec m = per_setting_model(r);
    m.name = "per-setting:free=" + e.observable.str();
    m.shared = std::move(shared);
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace qtomo::twoqubit

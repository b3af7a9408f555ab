// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "qtomo/io.hpp"
#include "qtomo/models.hpp"
#include "qtomo/qubit_analytic.hpp"
#include "qtomo/simulator.hpp"
#include "qtomo/twoqubit.hpp"

using namespace qtomo;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::vector<std::int64_t> axis_counts(std::int64_t plus, std::int64_t n) { return {plus, n - plus}; }

// Random single-qubit X, Y, Z record with integer counts.
ExperimentRecord random_qubit_record(std::mt19937_64& rng, std::int64_t n) {
  std::uniform_int_distribution<std::int64_t> c(0, n);
  return testing::make_record(
      {{"X", axis_counts(c(rng), n)}, {"Y", axis_counts(c(rng), n)}, {"Z", axis_counts(c(rng), n)}});
}

Outcome criterion1() {
  const LinearInversionMatrix m = bloch_to_density({1, 1, 1});
  const Eigen::VectorXd ev = m.eigenvalues();
  const double lo = (1 - std::sqrt(3.0)) / 2, hi = (1 + std::sqrt(3.0)) / 2;
  const double herm = (m.matrix() - m.matrix().adjoint()).norm();
  const double tr = std::abs(m.matrix().trace() - Complex(1, 0));
  const BlochVector b = density_to_bloch(project_positive_eigenspace(m));
  const double s = 1 / std::sqrt(3.0);
  const double err_ev = std::max(std::abs(ev(0) - lo), std::abs(ev(1) - hi));
  const double err_b = std::max({std::abs(b.x - s), std::abs(b.y - s), std::abs(b.z - s)});
  Outcome o;
  o.pass = herm <= 1e-12 && tr <= 1e-12 && err_ev <= 1e-12 && err_b <= 1e-12;
  o.detail = fmt("eigenvalue err %.2e, projected Bloch err %.2e, hermiticity %.1e", err_ev, err_b, herm);
  return o;
}

Outcome criterion2() {
  std::mt19937_64 rng(2002);
  std::uniform_int_distribution<std::int64_t> nd(10, 10000);
  double worst = 0.0;
  int done = 0;
  while (done < 1000) {
    const std::int64_t n = nd(rng);
    const ExperimentRecord r = random_qubit_record(rng, n);
    const qubit::QubitSummary s = qubit::summarize(r);
    const double rad = s.radius();
    if (!(rad > 1.0 && rad < 1.8) || std::abs(s.x) > 0.95 || std::abs(s.y) > 0.95 || std::abs(s.z) > 0.95) continue;
    ++done;
    const DensityMatrix est(bloch_to_density({s.x / rad, s.y / rad, s.z / rad}).matrix());
    double ls = 0.0, la = 0.0;
    for (const BlockData& b : r.blocks) {
      ls += multinomial_loglik(b.counts, born_probabilities(est, b.setting)).value();
      la += multinomial_loglik(b.counts, b.frequencies()).value();
    }
    worst = std::max(worst, std::abs(qubit::delta_aic_exact(s) - (1.0 + ls - la)));
  }
  return {worst <= 1e-9, fmt("max |closed form - oracle| = %.3e over 1000 datasets", worst)};
}

Outcome criterion3() {
  std::mt19937_64 rng(3003);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> dr(1e-5, 0.01);
  std::uniform_int_distribution<std::int64_t> nd(10, 100000);
  double worst_ratio = 0.0;
  int taylor_points = 0;
  while (taylor_points < 2000) {
    const double x = g(rng), y = g(rng), z = g(rng);
    const double nrm = std::sqrt(x * x + y * y + z * z);
    const double rad = 1.0 + dr(rng);
    const qubit::QubitSummary s{x / nrm * rad, y / nrm * rad, z / nrm * rad, nd(rng)};
    if (std::abs(s.x) > 0.7 || std::abs(s.y) > 0.7 || std::abs(s.z) > 0.7) continue;
    ++taylor_points;
    const double exact = qubit::delta_aic_exact(s);
    worst_ratio = std::max(worst_ratio, std::abs(qubit::delta_aic_taylor(s) - exact) / std::abs(exact - 1.0));
  }

  // 10^4-point grid: 25 directions x 20 radii x 20 sample sizes.
  int mismatches = 0, grid = 0;
  for (int d = 0; d < 25; ++d) {
    const double th = std::acos(1.0 - 2.0 * (d + 0.5) / 25.0);
    const double ph = 2.399963229728653 * d;
    const BlochVector u{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
    for (int i = 0; i < 20; ++i) {
      const double rad = 1.0 + 0.0005 * (i + 1) * (i + 1) / 4.0;
      for (int j = 0; j < 20; ++j) {
        const auto n = static_cast<std::int64_t>(std::llround(10.0 * std::pow(10.0, 4.0 * j / 19.0)));
        const qubit::QubitSummary s{u.x * rad, u.y * rad, u.z * rad, n};
        ++grid;
        const double t = qubit::delta_aic_taylor(s);
        if (t == 0.0) continue;
        const bool consistent = t > 0.0;
        if (consistent != qubit::consistent_by_threshold(s)) ++mismatches;
      }
    }
  }
  Outcome o;
  o.pass = worst_ratio <= 0.05 && mismatches == 0;
  o.detail = fmt("max relative Taylor error %.3e over 2000 points; threshold mismatches %.0f of %.0f", worst_ratio,
                 mismatches, grid);
  return o;
}

Outcome criterion4() {
  std::mt19937_64 rng(4004);
  std::uniform_int_distribution<std::int64_t> nd(1, 2000);
  int done = 0, bad = 0;
  while (done < 1000) {
    const ExperimentRecord r = random_qubit_record(rng, nd(rng));
    if (qubit::summarize(r).radius() > 1.0) continue;
    ++done;
    const FittedModel s = fit_model(standard_model(3), r);
    const FittedModel a = fit_model(per_block_model(3), r);
    const bool tie = s.omega == a.omega;
    const AicReport rep = rank_models({s, a});
    if (!tie || rep.verdict != Verdict::Consistent) ++bad;
  }
  return {bad == 0, fmt("%.0f of 1000 datasets with R <= 1 broke the exact tie or the verdict", bad)};
}

Outcome criterion5() {
  const sim::Schedule sched = sim::drift_schedule();
  const auto models = sim::drift_model_set(sched.blocks.size());
  sim::SourceConfig cfg;
  cfg.p = 0.9;
  cfg.seed = 5005;
  cfg.sigma_step = 0.0;
  const sim::PowerResult iid = sim::monte_carlo_power(cfg, sched, models, 500);
  cfg.sigma_step = M_PI / std::sqrt(3000.0);
  const sim::PowerResult drift = sim::monte_carlo_power(cfg, sched, models, 500);
  const double keep = 1.0 - iid.fraction;
  Outcome o;
  o.pass = keep >= 0.75 && drift.fraction >= 0.90;
  o.detail = fmt("sigma 0: standard preferred in %.3f; sigma %.5f: alternative preferred in %.3f", keep,
                 cfg.sigma_step, drift.fraction);
  return o;
}

Outcome criterion6() {
  const double corr = aic(-10.0, 3) - aicc(-10.0, 3, 30);
  double worst = 0.0;
  for (int k = 0; k <= 10; ++k) worst = std::max(worst, std::abs(aicc(-7.5, k, 1000000000) - aic(-7.5, k)));
  const double omega = aic(-67.30116670092565, 3);
  Outcome o;
  o.pass = std::abs(corr - 12.0 / 26.0) <= 1e-12 && worst < 1e-6 && std::abs(omega + 70.30116670092565) <= 1e-12;
  o.detail = fmt("K=3, n=30 correction %.15f; max |AICc - AIC| at n=1e9 is %.2e", corr, worst);
  return o;
}

Outcome criterion7() {
  std::mt19937_64 rng(7007);
  std::uniform_real_distribution<double> u(-30, 0);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const std::vector<double> om{u(rng), u(rng), u(rng)};
    const auto w = akaike_weights(om);
    worst = std::max(worst, std::abs(w[0] / w[1] / std::exp(om[0] - om[1]) - 1.0));
  }
  const double ws = akaike_weights({-5.07, 0.0})[0];
  return {worst <= 1e-12 && std::abs(ws - 0.00624) <= 1e-5,
          fmt("max relative ratio error %.2e; w_s at delta -5.07 is %.6f", worst, ws)};
}

Outcome criterion8() {
  sim::SourceConfig cfg;
  cfg.n_qubits = 2;
  const ExperimentRecord r = sim::run_experiment(cfg, sim::two_qubit_schedule(100));
  const twoqubit::MultiplicityTable t = twoqubit::multiplicity_table(r);
  int ones = 0, threes = 0, total = 0;
  for (const auto& [obs, est] : t) {
    ones += est.size() == 1;
    threes += est.size() == 3;
    total += static_cast<int>(est.size());
  }
  return {ones == 9 && threes == 6 && total == 27 && t.size() == 15,
          fmt("%.0f observables of multiplicity 1, %.0f of multiplicity 3, %.0f estimates", ones, threes, total)};
}

Outcome criterion9() {
  std::mt19937_64 rng(9009);
  std::uniform_int_distribution<int> rank(1, 4);
  std::uniform_int_distribution<int> shots(50, 2000);
  int nonmonotone = 0;
  for (int t = 0; t < 100; ++t) {
    const DensityMatrix rho = testing::random_state(4, rng, static_cast<std::size_t>(rank(rng)));
    const ExperimentRecord r = testing::sample_record(rho, testing::kNineSettings, shots(rng), rng);
    const twoqubit::JointMleResult res = twoqubit::joint_mle(r);
    bool ok = res.monotone;
    for (std::size_t i = 1; i < res.trace.size(); ++i) ok = ok && res.trace[i] >= res.trace[i - 1];
    if (!ok) ++nonmonotone;
  }
  const ExperimentRecord mixed =
      testing::sample_record(DensityMatrix::maximally_mixed(4), testing::kNineSettings, 100000, rng);
  const double td = trace_distance(twoqubit::joint_mle(mixed).state, DensityMatrix::maximally_mixed(4));
  return {nonmonotone == 0 && td <= 0.02,
          fmt("%.0f of 100 runs non-monotone; trace distance to I/4 at 1e5 shots/setting %.5f", nonmonotone, td)};
}

Outcome criterion10() {
  sim::SourceConfig cfg;
  cfg.seed = 1010;
  cfg.sigma_step = 0.02;
  auto once = [&] {
    const ExperimentRecord r = sim::run_experiment(cfg, sim::drift_schedule());
    const std::string text = io::dump_record(r);
    std::vector<FittedModel> fitted;
    for (const ModelSpec& m : sim::drift_model_set(6)) fitted.push_back(fit_model(m, r));
    io::Provenance prov{io::sha256_hex(text), r.metadata.seed};
    return std::make_pair(text, io::dump_report(io::make_report(rank_models(std::move(fitted)), prov)));
  };
  const auto a = once(), b = once();
  return {a == b, a == b ? "simulation file and report byte-identical across runs" : "outputs differ between runs"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"extreme-drift linear inversion and projection", criterion1},
      {"closed-form score difference vs likelihood oracle", criterion2},
      {"quadratic expansion and threshold", criterion3},
      {"exact tie for R <= 1", criterion4},
      {"Monte Carlo behavior of the drift experiment", criterion5},
      {"AIC and AICc arithmetic", criterion6},
      {"Akaike weights", criterion7},
      {"two-qubit multiplicity table", criterion8},
      {"two-qubit maximum likelihood", criterion9},
      {"determinism", criterion10},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2zu %s: %s (%s) [%.2f s]\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

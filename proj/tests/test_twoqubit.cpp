#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "qtomo/twoqubit.hpp"

using namespace qtomo;
using namespace qtomo::twoqubit;

TEST_CASE("nine settings") {
  const auto s = enumerate_settings();
  REQUIRE(s.size() == 9);
  CHECK(s.front().label() == "XX");
  CHECK(s.back().label() == "ZZ");
}

TEST_CASE("per-setting averages") {
  const SettingAverages a = per_setting_averages({MeasurementSetting::parse("XZ"), {40, 10, 10, 40}, 0});
  CHECK(a.correlator == doctest::Approx(0.6));
  CHECK(a.marginal_a == doctest::Approx(0.0));
  CHECK(a.marginal_b == doctest::Approx(0.0));
  const SettingAverages b = per_setting_averages({MeasurementSetting::parse("XZ"), {70, 10, 10, 10}, 0});
  CHECK(b.marginal_a == doctest::Approx(0.6));
  CHECK(b.marginal_b == doctest::Approx(0.6));
  CHECK(b.correlator == doctest::Approx(0.6));
}

TEST_CASE("multiplicity table") {
  std::mt19937_64 rng(1);
  const ExperimentRecord r = testing::sample_record(DensityMatrix::maximally_mixed(4), testing::kNineSettings, 100, rng);
  const MultiplicityTable t = multiplicity_table(r);
  CHECK(t.size() == 15);
  int ones = 0, threes = 0, total = 0;
  for (const auto& [obs, est] : t) {
    ones += est.size() == 1;
    threes += est.size() == 3;
    total += static_cast<int>(est.size());
  }
  CHECK(ones == 9);
  CHECK(threes == 6);
  CHECK(total == 27);
  CHECK(t.at(PauliString("XI")).size() == 3);
  CHECK(t.at(PauliString("XY")).size() == 1);

  ExperimentRecord missing = r;
  missing.blocks.pop_back();
  CHECK_THROWS(multiplicity_table(missing));
}

TEST_CASE("pairwise z-score") {
  const MeasurementSetting s = MeasurementSetting::parse("XX");
  CHECK(pair_z_score({s, 0.2, 500}, {s, -0.2, 500}) == doctest::Approx(6.454972243679029).epsilon(1e-12));
  CHECK(pair_z_score({s, 0.2, 500}, {s, 0.2, 500}) == 0.0);
  CHECK(std::isinf(pair_z_score({s, 1.0, 500}, {s, -1.0, 500})));
}

TEST_CASE("scan finds a planted inconsistency") {
  std::mt19937_64 rng(6);
  ExperimentRecord r = testing::sample_record(DensityMatrix::maximally_mixed(4), testing::kNineSettings, 2000, rng);
  // XZ block from a state with <XI> = 0.6.
  const DensityMatrix shifted(bloch_to_density({0.6, 0, 0}).matrix());
  Matrix prod(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) prod.block(2 * i, 2 * j, 2, 2) = shifted.matrix()(i, j) * Matrix::Identity(2, 2) / 2.0;
  BlockData b = sim::sample_block(DensityMatrix(prod), MeasurementSetting::parse("XZ"), 2000, rng);
  b.order_index = 2;
  r.blocks[2] = b;
  const auto scan = inconsistency_scan(multiplicity_table(r));
  CHECK(scan.size() == 6);
  CHECK(scan.front().observable.str() == "XI");
  const auto flagged = flag_inconsistent(scan);
  REQUIRE(flagged.size() == 1);

  const auto models = build_alternative_models(r, flagged);
  REQUIRE(models.size() == 3);
  CHECK(models[2].name == "per-setting:free=XI");
  std::vector<FittedModel> fitted;
  for (const auto& m : models) fitted.push_back(fit_model(m, r));
  CHECK(fitted[2].k == fitted[0].k + 2);
  CHECK(rank_models(fitted).verdict == Verdict::Inconsistent);
}

TEST_CASE("joint MLE is monotone and recovers the mixed state") {
  std::mt19937_64 rng(10);
  const ExperimentRecord r = testing::sample_record(DensityMatrix::maximally_mixed(4), testing::kNineSettings, 20000, rng);
  const JointMleResult res = joint_mle(r);
  CHECK(res.monotone);
  CHECK(res.converged);
  CHECK_FALSE(res.rank_deficient);
  for (std::size_t i = 1; i < res.trace.size(); ++i) CHECK(res.trace[i] >= res.trace[i - 1]);
  CHECK(trace_distance(res.state, DensityMatrix::maximally_mixed(4)) < 0.03);
}

TEST_CASE("joint MLE of a pure state") {
  std::mt19937_64 rng(15);
  const DensityMatrix rho = testing::random_state(4, rng, 1);
  const ExperimentRecord r = testing::sample_record(rho, testing::kNineSettings, 500, rng);
  const JointMleResult res = joint_mle(r, {1e-10, 20000, true});
  CHECK(res.monotone);
  CHECK(trace_distance(res.state, rho) < 0.15);
}

TEST_CASE("per-setting averages rebuild the outcome frequencies") {
  std::mt19937_64 rng(36);
  std::uniform_int_distribution<int> c(0, 40);
  for (int t = 0; t < 100; ++t) {
    const BlockData b{MeasurementSetting::parse("YZ"), {c(rng), c(rng), c(rng), c(rng) + 1}, 0};
    const SettingAverages a = per_setting_averages(b);
    const auto f = b.frequencies();
    for (std::size_t o = 0; o < 4; ++o) {
      const double sa = o < 2 ? 1 : -1, sb = o % 2 == 0 ? 1 : -1;
      CHECK(std::abs((1 + sa * a.marginal_a + sb * a.marginal_b + sa * sb * a.correlator) / 4 - f[o]) < 1e-15);
    }
  }
}

TEST_CASE("per-setting likelihood dominates the single state") {
  std::mt19937_64 rng(37);
  for (int t = 0; t < 3; ++t) {
    const DensityMatrix rho = t == 0 ? DensityMatrix::maximally_mixed(4) : testing::random_state(4, rng);
    const ExperimentRecord r = testing::sample_record(rho, testing::kNineSettings, 10000, rng);
    const double s = fit_model(standard_model(9), r).loglik;
    const double p = fit_model(per_setting_model(r), r).loglik;
    CHECK(p >= s - 1e-9);
    // 2 (lnL_p - lnL_s) is chi-square with 27 - 15 degrees of freedom; 32.91
    // is its 99.9% quantile.
    CHECK(2 * (p - s) < 32.91);
  }
}

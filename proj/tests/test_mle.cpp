#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "qtomo/mle.hpp"
#include "qtomo/qubit_analytic.hpp"

using namespace qtomo;
using testing::make_record;
using testing::qubit_record;

TEST_CASE("R rho R reaches the interior optimum") {
  const ExperimentRecord r = qubit_record(0.4, -0.2, 0.1, 1000);
  const mle::RhoRResult res = mle::rho_r_rho(r.blocks, 1, {1e-13, 100000, true});
  CHECK(res.converged);
  CHECK(res.monotone);
  const BlochVector b = density_to_bloch(res.state);
  CHECK(b.x == doctest::Approx(0.4).epsilon(1e-5));
  CHECK(b.y == doctest::Approx(-0.2).epsilon(1e-5));
  CHECK(b.z == doctest::Approx(0.1).epsilon(1e-5));
  for (std::size_t i = 1; i < res.trace.size(); ++i) CHECK(res.trace[i] >= res.trace[i - 1]);
}

TEST_CASE("R rho R matches the exact Bloch-ball maximum on the boundary") {
  const ExperimentRecord r = qubit_record(0.9, 0.5, 0.3, 500);
  const mle::RhoRResult res = mle::rho_r_rho(r.blocks, 1);
  const double exact = qubit::tally_loglik(qubit::tally_axes(r.blocks), qubit::bloch_ball_mle(qubit::tally_axes(r.blocks))).value();
  CHECK(res.loglik <= exact + 1e-9);
  CHECK(res.loglik == doctest::Approx(exact).epsilon(1e-7));
}

TEST_CASE("state_loglik sums block likelihoods") {
  const ExperimentRecord r = qubit_record(0.2, 0.2, 0.2, 100);
  const DensityMatrix rho(bloch_to_density({0.1, 0.3, 0.0}).matrix());
  double manual = 0.0;
  for (const BlockData& b : r.blocks) manual += multinomial_loglik(b.counts, born_probabilities(rho, b.setting)).value();
  CHECK(mle::state_loglik(rho, r.blocks).value() == doctest::Approx(manual).epsilon(1e-14));
}

TEST_CASE("tied fit with everything shared equals the single-state fit") {
  const ExperimentRecord r = qubit_record(0.8, 0.6, 0.4, 300);
  mle::TiedStateProblem p;
  p.blocks = r.blocks;
  p.group_of_block = {0, 1, 1};
  p.n_groups = 2;
  p.shared = {true, true, true};
  const mle::TiedStateResult res = mle::fit_tied_states(p);
  CHECK(res.converged);
  CHECK(res.duality_gap_bound < 1e-9);
  const auto t = qubit::tally_axes(r.blocks);
  const double exact = qubit::tally_loglik(t, qubit::bloch_ball_mle(t)).value();
  CHECK(res.loglik == doctest::Approx(exact).epsilon(1e-10));
  CHECK(trace_distance(res.states[0], res.states[1]) < 1e-12);
}

TEST_CASE("tied fit with nothing shared equals independent fits") {
  const ExperimentRecord r = make_record({{"X", {90, 10}}, {"Y", {80, 20}}, {"Z", {70, 30}},
                                          {"X", {20, 80}}, {"Y", {50, 50}}, {"Z", {55, 45}}});
  mle::TiedStateProblem p;
  p.blocks = r.blocks;
  p.group_of_block = {0, 0, 0, 1, 1, 1};
  p.n_groups = 2;
  p.shared = {false, false, false};
  const mle::TiedStateResult res = mle::fit_tied_states(p);
  const std::span<const BlockData> all(r.blocks);
  const auto t0 = qubit::tally_axes(all.subspan(0, 3));
  const auto t1 = qubit::tally_axes(all.subspan(3, 3));
  const double expected =
      qubit::tally_loglik(t0, qubit::bloch_ball_mle(t0)).value() + qubit::tally_loglik(t1, qubit::bloch_ball_mle(t1)).value();
  CHECK(res.loglik == doctest::Approx(expected).epsilon(1e-10));
  CHECK(res.loglik <= expected + 1e-9);
}

TEST_CASE("tied fit never beats the unconstrained fit and never loses to the fully shared one") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 10; ++t) {
    const DensityMatrix rho = testing::random_state(2, rng);
    const ExperimentRecord r = testing::sample_record(rho, {"X", "Y", "Z", "X", "Y", "Z"}, 200, rng);
    mle::TiedStateProblem p;
    p.blocks = r.blocks;
    p.group_of_block = {0, 0, 0, 1, 1, 1};
    p.n_groups = 2;
    p.shared = {false, false, true};
    const double masked = mle::fit_tied_states(p).loglik;
    p.shared = {false, false, false};
    const double free = mle::fit_tied_states(p).loglik;
    p.shared = {true, true, true};
    const double tied = mle::fit_tied_states(p).loglik;
    CHECK(masked <= free + 1e-9);
    CHECK(masked >= tied - 1e-9);
  }
}

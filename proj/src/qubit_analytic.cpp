#include "qtomo/qubit_analytic.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qtomo::qubit {

namespace {

constexpr std::array<Pauli, 3> kAxes = {Pauli::X, Pauli::Y, Pauli::Z};

int axis_index(Pauli p) {
  switch (p) {
    case Pauli::X:
      return 0;
    case Pauli::Y:
      return 1;
    case Pauli::Z:
      return 2;
  }
  return 0;
}

double at(const BlochVector& b, int a) { return a == 0 ? b.x : (a == 1 ? b.y : b.z); }

// Root of n+/(1+r) - n-/(1-r) - lambda r on [-1, 1]; the left side is
// strictly decreasing in r.
double stationary_component(const AxisTally& t, double lambda) {
  if (t.total() <= 0.0) return 0.0;
  double lo = -1.0;
  double hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    double h = -lambda * mid;
    if (t.n_plus > 0.0) h += t.n_plus / (1.0 + mid);
    if (t.n_minus > 0.0) h -= t.n_minus / (1.0 - mid);
    (h > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

BlochVector stationary_point(const AxisTallies& t, double lambda) {
  return {stationary_component(t[0], lambda), stationary_component(t[1], lambda), stationary_component(t[2], lambda)};
}

// Per-axis standard-minus-alternative log-likelihood per shot, written as a
// sum over outcomes so that |M| = 1 needs no special casing.
double axis_gap_limit(double m, double r) {
  double s = 0.0;
  for (double sign : {1.0, -1.0}) {
    const double f = 0.5 * (1.0 + sign * m);
    const double q = 0.5 * (1.0 + sign * m / r);
    if (f > 0.0) s += f * std::log(q / f);
  }
  return s;
}

double axis_gap_closed_form(double m, double r) {
  return 0.5 * std::log((1.0 - m * m / (r * r)) / (1.0 - m * m)) +
         0.5 * m * std::log((r + m) * (1.0 - m) / ((r - m) * (1.0 + m)));
}

}  // namespace

double QubitSummary::radius() const { return qubit::radius(x, y, z); }

double QubitSummary::average(Pauli p) const {
  switch (p) {
    case Pauli::X:
      return x;
    case Pauli::Y:
      return y;
    case Pauli::Z:
      return z;
  }
  return 0.0;
}

double radius(double x, double y, double z) { return std::sqrt(x * x + y * y + z * z); }

QubitSummary summarize(const ExperimentRecord& r) {
  if (r.n_qubits != 1 || r.blocks.size() != 3) {
    throw std::invalid_argument("closed forms need exactly three single-qubit blocks");
  }
  QubitSummary s;
  std::array<bool, 3> seen{};
  s.n = r.blocks.front().total();
  for (const BlockData& b : r.blocks) {
    validate_block(b);
    const int a = axis_index(b.setting.axes()[0]);
    if (seen[a]) throw std::invalid_argument("closed forms need one block per axis");
    seen[a] = true;
    if (b.total() != s.n) throw std::invalid_argument("closed forms need equal block sizes");
    const double m = empirical_averages(b).front().value;
    (a == 0 ? s.x : (a == 1 ? s.y : s.z)) = m;
  }
  return s;
}

AxisTallies tally_axes(std::span<const BlockData> blocks) {
  AxisTallies t{};
  for (const BlockData& b : blocks) {
    if (b.setting.n_qubits() != 1) throw std::invalid_argument("axis tallies need single-qubit blocks");
    validate_block(b);
    AxisTally& a = t[axis_index(b.setting.axes()[0])];
    a.n_plus += static_cast<double>(b.counts[0]);
    a.n_minus += static_cast<double>(b.counts[1]);
  }
  return t;
}

AxisTallies tally_summary(const QubitSummary& s) {
  AxisTallies t{};
  const double n = static_cast<double>(s.n);
  for (int a = 0; a < 3; ++a) {
    const double m = s.average(kAxes[a]);
    t[a] = {0.5 * n * (1.0 + m), 0.5 * n * (1.0 - m)};
  }
  return t;
}

LogLikelihood tally_loglik(const AxisTallies& t, const BlochVector& b) {
  LogLikelihood l(0.0);
  for (int a = 0; a < 3; ++a) {
    const double r = at(b, a);
    const double p_plus = std::max(0.0, 0.5 * (1.0 + r));
    const double p_minus = std::max(0.0, 0.5 * (1.0 - r));
    for (auto [n, p] : {std::pair{t[a].n_plus, p_plus}, std::pair{t[a].n_minus, p_minus}}) {
      if (n <= 0.0) continue;
      if (!(p > 0.0)) return LogLikelihood::impossible();
      l += LogLikelihood(n * std::log(p));
    }
  }
  return l;
}

BlochVector bloch_ball_mle(const AxisTallies& t) {
  BlochVector m;
  double* comp[3] = {&m.x, &m.y, &m.z};
  for (int a = 0; a < 3; ++a) {
    if (t[a].total() > 0.0) *comp[a] = (t[a].n_plus - t[a].n_minus) / t[a].total();
  }
  if (m.x * m.x + m.y * m.y + m.z * m.z <= 1.0) return m;

  auto norm2 = [&](double lambda) {
    const BlochVector r = stationary_point(t, lambda);
    return r.x * r.x + r.y * r.y + r.z * r.z;
  };
  double lo = 0.0;
  double hi = 1.0;
  while (norm2(hi) > 1.0) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (norm2(mid) > 1.0 ? lo : hi) = mid;
  }
  BlochVector r = stationary_point(t, hi);
  const double n = r.norm();
  return {r.x / n, r.y / n, r.z / n};
}

BlochVector normalized_average_estimate(const QubitSummary& s) {
  const double r = s.radius();
  if (r <= 1.0) return {s.x, s.y, s.z};
  return {s.x / r, s.y / r, s.z / r};
}

DensityMatrix standard_mle_qubit(const QubitSummary& s) {
  const BlochVector start = normalized_average_estimate(s);
  if (s.radius() <= 1.0) return DensityMatrix(bloch_to_density(start).matrix());
  const AxisTallies t = tally_summary(s);
  const BlochVector refined = bloch_ball_mle(t);
  const LogLikelihood l_start = tally_loglik(t, start);
  const LogLikelihood l_refined = tally_loglik(t, refined);
  const bool keep_refined =
      !l_refined.is_impossible() && (l_start.is_impossible() || l_refined.value() >= l_start.value());
  return project_positive_eigenspace(bloch_to_density(keep_refined ? refined : start));
}

bool uses_limiting_form(const QubitSummary& s) {
  for (Pauli p : kAxes) {
    if (std::abs(s.average(p)) >= 1.0) return true;
  }
  return false;
}

double delta_aic_exact(const QubitSummary& s) {
  const double r = s.radius();
  if (r < 1.0) return 0.0;
  double sum = 0.0;
  for (Pauli p : kAxes) {
    const double m = s.average(p);
    sum += std::abs(m) >= 1.0 ? axis_gap_limit(m, r) : axis_gap_closed_form(m, r);
  }
  return 1.0 + static_cast<double>(s.n) * sum;
}

double delta_aic_taylor(const QubitSummary& s) {
  const double r = s.radius();
  if (r < 1.0) return 0.0;
  if (r == 1.0) return 1.0;
  double sum = 0.0;
  for (Pauli p : kAxes) {
    const double m = s.average(p);
    if (m == 0.0) continue;
    if (std::abs(m) >= 1.0) return -std::numeric_limits<double>::infinity();
    sum += (r - 1.0) * (r - 1.0) * m * m / (2.0 * (1.0 - m * m));
  }
  return 1.0 - static_cast<double>(s.n) * sum;
}

bool taylor_regime(const QubitSummary& s, double factor) {
  const double r = s.radius();
  for (Pauli p : kAxes) {
    const double m = s.average(p);
    if ((r - 1.0) * (r - 1.0) > factor * (1.0 - m * m)) return false;
  }
  return true;
}

std::optional<double> consistency_threshold(double x, double y, double z) {
  double sum = 0.0;
  bool any = false;
  for (double m : {x, y, z}) {
    if (m == 0.0) continue;
    any = true;
    if (std::abs(m) >= 1.0) return 0.0;
    sum += m * m / (2.0 * (1.0 - m * m));
  }
  if (!any) return std::nullopt;
  return 1.0 / std::sqrt(sum);
}

bool consistent_by_threshold(const QubitSummary& s) {
  const auto c = consistency_threshold(s.x, s.y, s.z);
  if (!c) return true;
  return s.radius() - 1.0 <= *c / std::sqrt(static_cast<double>(s.n));
}

}  // namespace qtomo::qubit

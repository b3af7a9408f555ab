#include "qtomo/mle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace qtomo::mle {

namespace {

struct ProjectedOutcome {
  Matrix projector;
  double count;
};

std::vector<ProjectedOutcome> observed_projectors(std::span<const BlockData> blocks) {
  std::vector<ProjectedOutcome> out;
  for (const BlockData& b : blocks) {
    for (std::size_t o = 0; o < b.counts.size(); ++o) {
      if (b.counts[o] > 0) out.push_back({outcome_projector(b.setting, o), static_cast<double>(b.counts[o])});
    }
  }
  return out;
}

double loglik_of(const Matrix& rho, const std::vector<ProjectedOutcome>& outcomes, std::vector<double>& probs) {
  double l = 0.0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const double p = (rho.cwiseProduct(outcomes[i].projector.transpose())).sum().real();
    probs[i] = p;
    if (!(p > 0.0)) return -std::numeric_limits<double>::infinity();
    l += outcomes[i].count * std::log(p);
  }
  return l;
}

Matrix normalized(const Matrix& m) {
  Matrix h = 0.5 * (m + m.adjoint());
  return h / h.trace().real();
}

}  // namespace

LogLikelihood state_loglik(const DensityMatrix& rho, std::span<const BlockData> blocks) {
  LogLikelihood total(0.0);
  for (const BlockData& b : blocks) total += multinomial_loglik(b.counts, born_probabilities(rho, b.setting));
  return total;
}

RhoRResult rho_r_rho(std::span<const BlockData> blocks, std::size_t n_qubits, const RhoROptions& opts) {
  if (blocks.empty()) throw std::invalid_argument("no data to fit");
  const auto d = static_cast<Eigen::Index>(std::size_t{1} << n_qubits);
  for (const BlockData& b : blocks) {
    validate_block(b);
    if (b.setting.n_qubits() != n_qubits) throw std::invalid_argument("block does not match n_qubits");
  }
  const std::vector<ProjectedOutcome> outcomes = observed_projectors(blocks);
  double n_total = 0.0;
  for (const auto& o : outcomes) n_total += o.count;

  std::vector<double> probs(outcomes.size());
  Matrix rho = Matrix::Identity(d, d) / static_cast<double>(d);
  double lnl = loglik_of(rho, outcomes, probs);
  const Matrix identity = Matrix::Identity(d, d);

  RhoRResult res{DensityMatrix::maximally_mixed(static_cast<std::size_t>(d)), 0.0, 0, false, true, {}};
  if (opts.record_trace) res.trace.push_back(lnl);

  for (int it = 0; it < opts.max_iterations; ++it) {
    Matrix r = Matrix::Zero(d, d);
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      r += (outcomes[i].count / (n_total * probs[i])) * outcomes[i].projector;
    }

    std::vector<double> cand_probs(outcomes.size());
    Matrix cand = normalized(r * rho * r);
    double cand_lnl = loglik_of(cand, outcomes, cand_probs);
    double eps = 1.0;
    while (!(cand_lnl >= lnl) && eps > 1e-12) {
      const Matrix a = identity + eps * r;
      cand = normalized(a * rho * a);
      cand_lnl = loglik_of(cand, outcomes, cand_probs);
      eps *= 0.5;
    }
    res.iterations = it + 1;
    if (!(cand_lnl >= lnl)) {
      // No step size improves the likelihood: stationary to working precision.
      res.converged = true;
      break;
    }
    const double gain = cand_lnl - lnl;
    rho = std::move(cand);
    lnl = cand_lnl;
    probs.swap(cand_probs);
    if (opts.record_trace) res.trace.push_back(lnl);
    if (gain < opts.tolerance) {
      res.converged = true;
      break;
    }
  }

  res.state = DensityMatrix::from_unnormalized(rho);
  res.loglik = lnl;
  if (opts.record_trace) {
    for (std::size_t i = 1; i < res.trace.size(); ++i) {
      if (res.trace[i] < res.trace[i - 1]) res.monotone = false;
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Barrier method for tied states.
//
// Group g's state is rho_g = (I + sum_c theta[var(g, c)] P_c) / d, so every
// outcome probability is affine in theta. Maximizes
//   F(theta) = sum_o n_o ln p_o(theta) + mu sum_g ln det rho_g(theta)
// by damped Newton steps along a decreasing sequence of mu. At the end of
// each centering stage the gap to the constrained maximum is at most
// mu * sum_g d.

namespace {

struct AffineRow {
  double count;
  double constant;
  std::vector<std::pair<int, double>> coef;  // (variable, coefficient)
};

class TiedObjective {
 public:
  explicit TiedObjective(const TiedStateProblem& pr) : n_groups_(pr.n_groups) {
    const std::vector<PauliString> basis = pauli_basis(pr.n_qubits);
    d_ = std::size_t{1} << pr.n_qubits;
    if (pr.shared.size() != basis.size()) throw std::invalid_argument("shared mask has the wrong length");
    if (pr.group_of_block.size() != pr.blocks.size()) {
      throw std::invalid_argument("group assignment does not cover every block");
    }
    for (const auto& p : basis) paulis_.push_back(p.matrix());

    var_.assign(n_groups_, std::vector<int>(basis.size(), -1));
    int next = 0;
    std::vector<int> shared_var(basis.size(), -1);
    for (std::size_t c = 0; c < basis.size(); ++c) {
      if (pr.shared[c]) shared_var[c] = next++;
    }
    for (std::size_t g = 0; g < n_groups_; ++g) {
      for (std::size_t c = 0; c < basis.size(); ++c) var_[g][c] = pr.shared[c] ? shared_var[c] : next++;
    }
    n_vars_ = next;

    const double inv_d = 1.0 / static_cast<double>(d_);
    for (std::size_t i = 0; i < pr.blocks.size(); ++i) {
      const BlockData& b = pr.blocks[i];
      validate_block(b);
      const int g = pr.group_of_block[i];
      if (g < 0 || static_cast<std::size_t>(g) >= n_groups_) throw std::invalid_argument("bad group id");
      for (std::size_t o = 0; o < b.counts.size(); ++o) {
        if (b.counts[o] == 0) continue;
        AffineRow row{static_cast<double>(b.counts[o]), inv_d, {}};
        for (std::size_t c = 0; c < basis.size(); ++c) {
          if (basis[c].measured_by(b.setting)) row.coef.emplace_back(var_[g][c], basis[c].eigenvalue(o) * inv_d);
        }
        rows_.push_back(std::move(row));
      }
    }
  }

  int n_vars() const { return n_vars_; }
  std::size_t barrier_dim() const { return n_groups_ * d_; }

  Matrix state(const Eigen::VectorXd& theta, std::size_t g) const {
    const auto d = static_cast<Eigen::Index>(d_);
    Matrix m = Matrix::Identity(d, d);
    for (std::size_t c = 0; c < paulis_.size(); ++c) m += theta[var_[g][c]] * paulis_[c];
    return m / static_cast<double>(d_);
  }

  double loglik(const Eigen::VectorXd& theta) const {
    double l = 0.0;
    for (const AffineRow& r : rows_) {
      const double p = prob(r, theta);
      if (!(p > 0.0)) return -std::numeric_limits<double>::infinity();
      l += r.count * std::log(p);
    }
    return l;
  }

  // Barrier objective; -inf outside the feasible region.
  double value(const Eigen::VectorXd& theta, double mu) const {
    double f = loglik(theta);
    if (!std::isfinite(f)) return f;
    for (std::size_t g = 0; g < n_groups_; ++g) {
      Eigen::LLT<Matrix> llt(state(theta, g));
      if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
      const auto diag = llt.matrixLLT().diagonal().real();
      if ((diag.array() <= 0.0).any()) return -std::numeric_limits<double>::infinity();
      f += mu * 2.0 * diag.array().log().sum();
    }
    return f;
  }

  void derivatives(const Eigen::VectorXd& theta, double mu, Eigen::VectorXd& grad, Eigen::MatrixXd& hess) const {
    grad.setZero(n_vars_);
    hess.setZero(n_vars_, n_vars_);
    for (const AffineRow& r : rows_) {
      const double p = prob(r, theta);
      for (const auto& [j, aj] : r.coef) {
        grad[j] += r.count * aj / p;
        for (const auto& [k, ak] : r.coef) hess(j, k) -= r.count * aj * ak / (p * p);
      }
    }
    const double inv_d = 1.0 / static_cast<double>(d_);
    const std::size_t nc = paulis_.size();
    std::vector<Matrix> sp(nc);
    for (std::size_t g = 0; g < n_groups_; ++g) {
      const Matrix s = state(theta, g).inverse();
      for (std::size_t c = 0; c < nc; ++c) sp[c] = s * paulis_[c];
      for (std::size_t c = 0; c < nc; ++c) {
        const int j = var_[g][c];
        grad[j] += mu * sp[c].trace().real() * inv_d;
        for (std::size_t e = 0; e < nc; ++e) {
          const double t = (sp[c].cwiseProduct(sp[e].transpose())).sum().real();
          hess(j, var_[g][e]) -= mu * t * inv_d * inv_d;
        }
      }
    }
  }

 private:
  static double prob(const AffineRow& r, const Eigen::VectorXd& theta) {
    double p = r.constant;
    for (const auto& [j, a] : r.coef) p += a * theta[j];
    return p;
  }

  std::size_t n_groups_;
  std::size_t d_ = 2;
  int n_vars_ = 0;
  std::vector<Matrix> paulis_;
  std::vector<std::vector<int>> var_;
  std::vector<AffineRow> rows_;
};

// Damped Newton centering for a fixed mu. Returns false if it stalled before
// reaching the decrement tolerance.
bool center(const TiedObjective& obj, Eigen::VectorXd& theta, double mu) {
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
  double f = obj.value(theta, mu);
  for (int it = 0; it < 200; ++it) {
    obj.derivatives(theta, mu, grad, hess);
    const Eigen::MatrixXd neg = -0.5 * (hess + hess.transpose());
    Eigen::LDLT<Eigen::MatrixXd> ldlt(neg);
    Eigen::VectorXd step = ldlt.solve(grad);
    double decrement = grad.dot(step);
    if (ldlt.info() != Eigen::Success || !step.allFinite() || decrement <= 0.0) {
      step = grad;  // fall back to steepest ascent
      decrement = grad.squaredNorm();
    }
    if (decrement < 1e-13) return true;
    double t = 1.0;
    bool moved = false;
    while (t > 1e-14) {
      const Eigen::VectorXd trial = theta + t * step;
      const double ft = obj.value(trial, mu);
      if (std::isfinite(ft) && ft >= f + 0.25 * t * decrement) {
        theta = trial;
        f = ft;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if (!moved) return decrement < 1e-8;
  }
  return false;
}

}  // namespace

TiedStateResult fit_tied_states(const TiedStateProblem& problem) {
  if (problem.blocks.empty()) throw std::invalid_argument("no data to fit");
  if (problem.n_groups == 0) throw std::invalid_argument("at least one group is required");
  const TiedObjective obj(problem);

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(obj.n_vars());
  const double dims = static_cast<double>(obj.barrier_dim());
  const double mu_final = 1e-11 / dims;
  bool converged = true;
  for (double mu = 1.0;; mu *= 0.1) {
    const double m = std::max(mu, mu_final);
    converged = center(obj, theta, m) && converged;
    if (m <= mu_final) break;
  }

  TiedStateResult res;
  for (std::size_t g = 0; g < problem.n_groups; ++g) {
    res.states.push_back(DensityMatrix::from_unnormalized(obj.state(theta, g)));
  }
  res.loglik = obj.loglik(theta);
  res.duality_gap_bound = mu_final * dims;
  res.converged = converged;
  return res;
}

}  // namespace qtomo::mle

#include "qtomo/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qtomo {

namespace {

bool valid_dim(Eigen::Index d) { return d == 2 || d == 4; }

void check_hermitian_trace_one(const Matrix& m) {
  if (m.rows() != m.cols() || !valid_dim(m.rows())) {
    throw std::invalid_argument("state matrix must be 2x2 or 4x4");
  }
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol) {
    throw std::invalid_argument("state matrix is not Hermitian");
  }
  const Complex tr = m.trace();
  if (std::abs(tr.real() - 1.0) > kTraceTol || std::abs(tr.imag()) > kTraceTol) {
    throw std::invalid_argument("state matrix does not have unit trace");
  }
}

Eigen::VectorXd hermitian_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix single_qubit_op(char c) {
  if (c == 'I') return Matrix::Identity(2, 2);
  return pauli_matrix(pauli_from_char(c));
}

}  // namespace

Pauli pauli_from_char(char c) {
  switch (c) {
    case 'X':
    case 'x':
      return Pauli::X;
    case 'Y':
    case 'y':
      return Pauli::Y;
    case 'Z':
    case 'z':
      return Pauli::Z;
    default:
      throw std::invalid_argument(std::string("unknown Pauli axis '") + c + "'");
  }
}

Matrix pauli_matrix(Pauli p) {
  Matrix m = Matrix::Zero(2, 2);
  switch (p) {
    case Pauli::X:
      m(0, 1) = 1.0;
      m(1, 0) = 1.0;
      break;
    case Pauli::Y:
      m(0, 1) = Complex(0.0, -1.0);
      m(1, 0) = Complex(0.0, 1.0);
      break;
    case Pauli::Z:
      m(0, 0) = 1.0;
      m(1, 1) = -1.0;
      break;
  }
  return m;
}

double BlochVector::norm() const { return std::sqrt(x * x + y * y + z * z); }

double BlochVector::component(Pauli p) const {
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

LinearInversionMatrix::LinearInversionMatrix(Matrix m) : m_(std::move(m)) {
  check_hermitian_trace_one(m_);
}

Eigen::VectorXd LinearInversionMatrix::eigenvalues() const { return hermitian_eigenvalues(m_); }

DensityMatrix::DensityMatrix(Matrix m) : m_(std::move(m)) {
  check_hermitian_trace_one(m_);
  if (hermitian_eigenvalues(m_).minCoeff() < -kNegativeEigTol) {
    throw std::invalid_argument("state matrix has a negative eigenvalue");
  }
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  return DensityMatrix(Matrix::Identity(d, d) / static_cast<double>(d));
}

DensityMatrix DensityMatrix::from_unnormalized(const Matrix& m) {
  Matrix h = 0.5 * (m + m.adjoint());
  h /= h.trace().real();
  return DensityMatrix(std::move(h));
}

Eigen::VectorXd DensityMatrix::eigenvalues() const { return hermitian_eigenvalues(m_); }

int DensityMatrix::rank(double threshold) const {
  const Eigen::VectorXd ev = eigenvalues();
  return static_cast<int>((ev.array() > threshold).count());
}

MeasurementSetting::MeasurementSetting(std::vector<Pauli> axes) : axes_(std::move(axes)) {
  if (axes_.empty() || axes_.size() > 2) {
    throw std::invalid_argument("a measurement setting covers one or two qubits");
  }
}

MeasurementSetting MeasurementSetting::parse(std::string_view s) {
  std::vector<Pauli> axes;
  for (char c : s) axes.push_back(pauli_from_char(c));
  return MeasurementSetting(std::move(axes));
}

std::string MeasurementSetting::label() const {
  std::string out;
  for (Pauli p : axes_) out.push_back(to_char(p));
  return out;
}

int outcome_sign(std::size_t n_qubits, std::size_t outcome, std::size_t qubit) {
  return ((outcome >> (n_qubits - 1 - qubit)) & 1U) ? -1 : 1;
}

std::string outcome_label(std::size_t n_qubits, std::size_t outcome) {
  std::string out;
  for (std::size_t q = 0; q < n_qubits; ++q) {
    out.push_back(outcome_sign(n_qubits, outcome, q) > 0 ? '+' : '-');
  }
  return out;
}

std::vector<std::string> outcome_labels(std::size_t n_qubits) {
  std::vector<std::string> out;
  for (std::size_t o = 0; o < (std::size_t{1} << n_qubits); ++o) {
    out.push_back(outcome_label(n_qubits, o));
  }
  return out;
}

Matrix outcome_projector(const MeasurementSetting& s, std::size_t outcome) {
  const std::size_t n = s.n_qubits();
  Matrix out = Matrix::Identity(1, 1);
  for (std::size_t q = 0; q < n; ++q) {
    const double sign = outcome_sign(n, outcome, q);
    const Matrix proj = 0.5 * (Matrix::Identity(2, 2) + sign * pauli_matrix(s.axes()[q]));
    out = kron(out, proj);
  }
  return out;
}

PauliString::PauliString(std::string ops) : ops_(std::move(ops)) {
  if (ops_.empty() || ops_.size() > 2) {
    throw std::invalid_argument("Pauli string must cover one or two qubits");
  }
  bool identity = true;
  for (char c : ops_) {
    if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') {
      throw std::invalid_argument("invalid Pauli string '" + ops_ + "'");
    }
    identity = identity && c == 'I';
  }
  if (identity) throw std::invalid_argument("identity is not an observable component");
}

Matrix PauliString::matrix() const {
  Matrix out = Matrix::Identity(1, 1);
  for (char c : ops_) out = kron(out, single_qubit_op(c));
  return out;
}

bool PauliString::measured_by(const MeasurementSetting& s) const {
  if (s.n_qubits() != ops_.size()) return false;
  for (std::size_t q = 0; q < ops_.size(); ++q) {
    if (ops_[q] != 'I' && ops_[q] != to_char(s.axes()[q])) return false;
  }
  return true;
}

int PauliString::eigenvalue(std::size_t outcome) const {
  int sign = 1;
  for (std::size_t q = 0; q < ops_.size(); ++q) {
    if (ops_[q] != 'I') sign *= outcome_sign(ops_.size(), outcome, q);
  }
  return sign;
}

std::vector<PauliString> pauli_basis(std::size_t n_qubits) {
  static constexpr char kOps[] = {'I', 'X', 'Y', 'Z'};
  std::vector<PauliString> out;
  if (n_qubits == 1) {
    for (char a : {'X', 'Y', 'Z'}) out.emplace_back(std::string(1, a));
  } else if (n_qubits == 2) {
    for (char a : kOps) {
      for (char b : kOps) {
        if (a == 'I' && b == 'I') continue;
        out.emplace_back(std::string{a, b});
      }
    }
  } else {
    throw std::invalid_argument("only one or two qubits are supported");
  }
  return out;
}

std::vector<PauliString> observables_of(const MeasurementSetting& s) {
  std::vector<PauliString> out;
  for (const PauliString& p : pauli_basis(s.n_qubits())) {
    if (p.measured_by(s)) out.push_back(p);
  }
  return out;
}

LinearInversionMatrix bloch_to_density(const BlochVector& b) {
  Matrix m = 0.5 * (Matrix::Identity(2, 2) + b.x * pauli_matrix(Pauli::X) +
                    b.y * pauli_matrix(Pauli::Y) + b.z * pauli_matrix(Pauli::Z));
  return LinearInversionMatrix(std::move(m));
}

namespace {
BlochVector bloch_of(const Matrix& m) {
  if (m.rows() != 2) throw std::invalid_argument("Bloch vectors exist only for a single qubit");
  return {(m * pauli_matrix(Pauli::X)).trace().real(), (m * pauli_matrix(Pauli::Y)).trace().real(),
          (m * pauli_matrix(Pauli::Z)).trace().real()};
}
}  // namespace

BlochVector density_to_bloch(const DensityMatrix& rho) { return bloch_of(rho.matrix()); }
BlochVector density_to_bloch(const LinearInversionMatrix& m) { return bloch_of(m.matrix()); }

DensityMatrix project_positive_eigenspace(const LinearInversionMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.matrix());
  if (es.eigenvalues().minCoeff() >= -kNegativeEigTol) {
    return DensityMatrix(m.matrix());
  }
  const Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
  const Matrix& v = es.eigenvectors();
  Matrix out = v * clipped.cast<Complex>().asDiagonal() * v.adjoint();
  return DensityMatrix::from_unnormalized(out);
}

std::vector<double> born_probabilities(const DensityMatrix& rho, const MeasurementSetting& s) {
  if (rho.dim() != (std::size_t{1} << s.n_qubits())) {
    throw std::invalid_argument("measurement setting does not match the state dimension");
  }
  std::vector<double> p(s.n_outcomes());
  if (s.n_qubits() == 1) {
    // Closed form keeps eigenstates exact: (1 +/- <A>) / 2.
    const double a = (rho.matrix() * pauli_matrix(s.axes()[0])).trace().real();
    p[0] = std::clamp(0.5 * (1.0 + a), 0.0, 1.0);
    p[1] = std::clamp(0.5 * (1.0 - a), 0.0, 1.0);
    return p;
  }
  for (std::size_t o = 0; o < p.size(); ++o) {
    p[o] = std::max(0.0, (rho.matrix() * outcome_projector(s, o)).trace().real());
  }
  return p;
}

double purity(const DensityMatrix& rho) { return (rho.matrix() * rho.matrix()).trace().real(); }

double expectation(const DensityMatrix& rho, const PauliString& p) {
  if (p.n_qubits() != rho.n_qubits()) {
    throw std::invalid_argument("observable does not match the state dimension");
  }
  return (rho.matrix() * p.matrix()).trace().real();
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("trace distance needs equal dimensions");
  return 0.5 * hermitian_eigenvalues(a.matrix() - b.matrix()).cwiseAbs().sum();
}

}  // namespace qtomo

#pragma once
// Density matrices, Bloch vectors and Pauli measurement settings for one and
// two qubits.

#include <compare>
#include <complex>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace qtomo {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-12;
inline constexpr double kNegativeEigTol = 1e-10;

enum class Pauli : char { X = 'X', Y = 'Y', Z = 'Z' };

Pauli pauli_from_char(char c);
inline char to_char(Pauli p) { return static_cast<char>(p); }

// 2x2 Pauli matrix; sigma_y = [[0, -i], [i, 0]].
Matrix pauli_matrix(Pauli p);

// Expectation values of sigma_x, sigma_y, sigma_z. Not required to be
// physical: linear inversion routinely produces norms above one.
struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const;
  bool is_physical(double tol = 1e-12) const { return norm() * norm() <= 1.0 + tol; }
  double component(Pauli p) const;
  friend bool operator==(const BlochVector&, const BlochVector&) = default;
};

// Hermitian, trace-one matrix that may have negative eigenvalues.
class LinearInversionMatrix {
 public:
  explicit LinearInversionMatrix(Matrix m);

  const Matrix& matrix() const { return m_; }
  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  Eigen::VectorXd eigenvalues() const;

 private:
  Matrix m_;
};

// Physical quantum state: Hermitian, trace one, eigenvalues >= -1e-10.
// Construction validates the invariants and throws std::invalid_argument.
class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix m);

  static DensityMatrix maximally_mixed(std::size_t dim);
  // Symmetrizes and trace-normalizes before validating; for optimizer output.
  static DensityMatrix from_unnormalized(const Matrix& m);

  const Matrix& matrix() const { return m_; }
  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  std::size_t n_qubits() const { return dim() == 2 ? 1 : 2; }
  Eigen::VectorXd eigenvalues() const;  // ascending
  // Number of eigenvalues above the threshold.
  int rank(double threshold = 1e-8) const;

 private:
  Matrix m_;
};

// One Pauli axis per qubit, measured as a product of single-qubit
// projective measurements. Outcome index o runs over 0..2^n-1; bit (n-1-i)
// of o set means qubit i gave -1, so for two qubits the order is ++, +-, -+, --.
class MeasurementSetting {
 public:
  MeasurementSetting() = default;
  explicit MeasurementSetting(std::vector<Pauli> axes);
  // Parses "X" or "XY".
  static MeasurementSetting parse(std::string_view s);

  const std::vector<Pauli>& axes() const { return axes_; }
  std::size_t n_qubits() const { return axes_.size(); }
  std::size_t n_outcomes() const { return std::size_t{1} << axes_.size(); }
  std::string label() const;

  friend auto operator<=>(const MeasurementSetting&, const MeasurementSetting&) = default;

 private:
  std::vector<Pauli> axes_;
};

// Sign (+1/-1) that outcome `o` assigns to qubit `qubit`.
int outcome_sign(std::size_t n_qubits, std::size_t outcome, std::size_t qubit);
// "+", "-" for one qubit; "++", "+-", "-+", "--" for two.
std::string outcome_label(std::size_t n_qubits, std::size_t outcome);
std::vector<std::string> outcome_labels(std::size_t n_qubits);

// Projector onto the eigenspace selected by `outcome`.
Matrix outcome_projector(const MeasurementSetting& s, std::size_t outcome);

// Pauli string such as "XI", "ZZ" or "Y". 'I' marks the identity.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(std::string ops);

  const std::string& str() const { return ops_; }
  std::size_t n_qubits() const { return ops_.size(); }
  Matrix matrix() const;
  // True if a measurement of `s` determines this observable's expectation.
  bool measured_by(const MeasurementSetting& s) const;
  // Product of outcome signs over the non-identity positions.
  int eigenvalue(std::size_t outcome) const;

  friend auto operator<=>(const PauliString&, const PauliString&) = default;

 private:
  std::string ops_;
};

// All 4^n - 1 non-identity Pauli strings, in lexicographic I<X<Y<Z order.
std::vector<PauliString> pauli_basis(std::size_t n_qubits);
// Observables whose expectations a setting determines (2^n - 1 of them).
std::vector<PauliString> observables_of(const MeasurementSetting& s);

LinearInversionMatrix bloch_to_density(const BlochVector& b);
BlochVector density_to_bloch(const DensityMatrix& rho);
BlochVector density_to_bloch(const LinearInversionMatrix& m);

// Clips negative eigenvalues to zero and renormalizes the trace. For a qubit
// with one negative eigenvalue this is the projector onto the positive
// eigenvector. Physical input comes back unchanged.
DensityMatrix project_positive_eigenspace(const LinearInversionMatrix& m);

// Outcome probabilities Tr(rho Pi_o), indexed as in MeasurementSetting.
std::vector<double> born_probabilities(const DensityMatrix& rho, const MeasurementSetting& s);

double purity(const DensityMatrix& rho);
double expectation(const DensityMatrix& rho, const PauliString& p);
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

}  // namespace qtomo

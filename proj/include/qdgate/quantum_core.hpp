#pragma once

// Dense complex operator algebra for small multi-qubit registers.
//
// Basis convention (used everywhere in the library): qubit 0 is the most
// significant bit of the basis index and |up> is bit value 0, so index 0 is
// |up...up> and index dim-1 is |down...down>.

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace qdgate {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Axis { X, Y, Z };

/// Square complex matrix with value semantics.
class Operator {
 public:
  Operator() = default;
  explicit Operator(Matrix m);

  static Operator zero(std::size_t dim);
  static Operator identity(std::size_t dim);
  static Operator diagonal(std::span<const double> entries);
  /// |ket><bra|
  static Operator outer(const Vector& ket, const Vector& bra);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  Complex operator()(std::size_t r, std::size_t c) const {
    return m_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }

  Operator adjoint() const { return Operator(m_.adjoint()); }
  Complex trace() const { return m_.trace(); }
  double frobenius_norm() const { return m_.norm(); }
  /// max_ij |A_ij - conj(A_ji)|
  double hermiticity_residual() const;
  bool is_hermitian(double tol = 1e-12) const { return hermiticity_residual() <= tol; }
  bool is_unitary(double tol = 1e-12) const;
  /// max_ij |A_ij - B_ij|
  double max_abs_diff(const Operator& other) const;

  friend Operator operator+(const Operator& a, const Operator& b);
  friend Operator operator-(const Operator& a, const Operator& b);
  friend Operator operator*(const Operator& a, const Operator& b);
  friend Operator operator*(Complex s, const Operator& a);
  friend Operator operator*(double s, const Operator& a) { return Complex(s, 0.0) * a; }

 private:
  Matrix m_;
};

Operator pauli(Axis axis);
Operator kron(const Operator& a, const Operator& b);
/// I x ... x sigma_axis x ... x I with the Pauli matrix at position `qubit`.
Operator embed_pauli(Axis axis, std::size_t qubit, std::size_t n_qubits);

bool is_power_of_two(std::size_t n);
/// log2(dim); throws unless dim is a power of two.
std::size_t qubit_count_for_dim(std::size_t dim);

/// "u"/"d" string for a basis index, qubit 0 first: index 1 of 2 qubits -> "ud".
std::string basis_label(std::size_t index, std::size_t n_qubits);
/// Inverse of basis_label; also accepts the arrow glyphs.
std::size_t parse_basis_label(std::string_view label);
/// As above, but the label must have exactly n_qubits symbols.
std::size_t parse_basis_label(std::string_view label, std::size_t n_qubits);
/// Spin of `qubit` in basis state `index`: true for up.
bool qubit_is_up(std::size_t index, std::size_t qubit, std::size_t n_qubits);

struct PhysicalityReport {
  double trace_error = 0.0;
  double hermiticity_residual = 0.0;
  double min_eigenvalue = 0.0;
};

PhysicalityReport physicality(const Operator& rho);

struct DensityTolerances {
  double trace = 1e-9;
  double hermiticity = 1e-9;
  double eigenvalue = 1e-9;
};

/// Positive semidefinite, unit-trace operator in the computational basis.
class DensityMatrix {
 public:
  /// Validates trace, Hermiticity and positivity against `tol`.
  static DensityMatrix from_operator(Operator rho, DensityTolerances tol = {});
  static DensityMatrix basis_state(std::size_t index, std::size_t dim);
  static DensityMatrix pure(const Vector& psi);

  const Operator& op() const { return rho_; }
  const Matrix& matrix() const { return rho_.matrix(); }
  std::size_t dim() const { return rho_.dim(); }
  std::size_t qubits() const { return qubit_count_for_dim(rho_.dim()); }

 private:
  explicit DensityMatrix(Operator rho) : rho_(std::move(rho)) {}
  Operator rho_;
};

/// Spectrum of a Hermitian operator, ascending.
struct EigenSystem {
  std::vector<double> energies;
  Operator vectors;  // column k is the eigenvector of energies[k]
  Eigen::MatrixXd gaps;  // gaps(j, k) = energies[j] - energies[k]
  /// Computational basis state of maximum overlap, or nullopt when the
  /// overlap is not above 1/2, the label is not unique, or the level is
  /// degenerate.
  std::vector<std::optional<std::size_t>> labels;

  std::size_t size() const { return energies.size(); }
  double gap(std::size_t j, std::size_t k) const {
    return gaps(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
  }
  Vector eigenvector(std::size_t k) const {
    return vectors.matrix().col(static_cast<Eigen::Index>(k));
  }
  bool fully_labeled() const;
  bool nondegenerate() const;
  /// Eigen-index carrying the given basis label.
  std::optional<std::size_t> level_of(std::size_t basis_index) const;
};

EigenSystem eigensystem(const Operator& h);

/// Reduced 2x2 state of one qubit.
DensityMatrix partial_trace(const DensityMatrix& rho, std::size_t keep);

/// Tr(op rho) for Hermitian op.
double expect(const Operator& op, const DensityMatrix& rho);

}  // namespace qdgate

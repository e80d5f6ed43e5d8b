#include "qdgate/quantum_core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace qdgate {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

void require_same_dim(const Operator& a, const Operator& b, const char* what) {
  if (a.dim() != b.dim()) {
    throw Error(std::string(what) + ": dimension mismatch (" + std::to_string(a.dim()) +
                " vs " + std::to_string(b.dim()) + ")");
  }
}

}  // namespace

Operator::Operator(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw Error("Operator: matrix is not square");
}

Operator Operator::zero(std::size_t dim) { return Operator(Matrix::Zero(idx(dim), idx(dim))); }

Operator Operator::identity(std::size_t dim) {
  return Operator(Matrix::Identity(idx(dim), idx(dim)));
}

Operator Operator::diagonal(std::span<const double> entries) {
  Matrix m = Matrix::Zero(idx(entries.size()), idx(entries.size()));
  for (std::size_t i = 0; i < entries.size(); ++i) m(idx(i), idx(i)) = entries[i];
  return Operator(std::move(m));
}

Operator Operator::outer(const Vector& ket, const Vector& bra) {
  if (ket.size() != bra.size()) throw Error("Operator::outer: size mismatch");
  return Operator(ket * bra.adjoint());
}

double Operator::hermiticity_residual() const {
  return (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
}

bool Operator::is_unitary(double tol) const {
  const Matrix p = m_.adjoint() * m_;
  return (p - Matrix::Identity(m_.rows(), m_.cols())).cwiseAbs().maxCoeff() <= tol;
}

double Operator::max_abs_diff(const Operator& other) const {
  require_same_dim(*this, other, "max_abs_diff");
  return (m_ - other.m_).cwiseAbs().maxCoeff();
}

Operator operator+(const Operator& a, const Operator& b) {
  require_same_dim(a, b, "operator+");
  return Operator(a.m_ + b.m_);
}

Operator operator-(const Operator& a, const Operator& b) {
  require_same_dim(a, b, "operator-");
  return Operator(a.m_ - b.m_);
}

Operator operator*(const Operator& a, const Operator& b) {
  require_same_dim(a, b, "operator*");
  return Operator(a.m_ * b.m_);
}

Operator operator*(Complex s, const Operator& a) { return Operator(s * a.m_); }

Operator pauli(Axis axis) {
  Matrix m(2, 2);
  const Complex i(0.0, 1.0);
  switch (axis) {
    case Axis::X: m << 0.0, 1.0, 1.0, 0.0; break;
    case Axis::Y: m << 0.0, -i, i, 0.0; break;
    case Axis::Z: m << 1.0, 0.0, 0.0, -1.0; break;
  }
  return Operator(std::move(m));
}

Operator kron(const Operator& a, const Operator& b) {
  const Eigen::Index na = a.matrix().rows();
  const Eigen::Index nb = b.matrix().rows();
  Matrix out(na * nb, na * nb);
  for (Eigen::Index r = 0; r < na; ++r) {
    for (Eigen::Index c = 0; c < na; ++c) {
      out.block(r * nb, c * nb, nb, nb) = a.matrix()(r, c) * b.matrix();
    }
  }
  return Operator(std::move(out));
}

Operator embed_pauli(Axis axis, std::size_t qubit, std::size_t n_qubits) {
  if (qubit >= n_qubits) {
    throw Error("embed_pauli: qubit " + std::to_string(qubit) + " out of range for " +
                std::to_string(n_qubits) + " qubits");
  }
  Operator out = qubit == 0 ? pauli(axis) : Operator::identity(2);
  for (std::size_t q = 1; q < n_qubits; ++q) {
    out = kron(out, q == qubit ? pauli(axis) : Operator::identity(2));
  }
  return out;
}

bool is_power_of_two(std::size_t n) { return n != 0 && std::has_single_bit(n); }

std::size_t qubit_count_for_dim(std::size_t dim) {
  if (!is_power_of_two(dim)) {
    throw Error("dimension " + std::to_string(dim) + " is not a power of two");
  }
  return static_cast<std::size_t>(std::countr_zero(dim));
}

std::string basis_label(std::size_t index, std::size_t n_qubits) {
  std::string s(n_qubits, 'u');
  for (std::size_t q = 0; q < n_qubits; ++q) {
    if (!qubit_is_up(index, q, n_qubits)) s[q] = 'd';
  }
  return s;
}

namespace {

std::vector<bool> label_bits(std::string_view label) {
  static constexpr std::string_view kUp = "↑";
  static constexpr std::string_view kDown = "↓";
  std::vector<bool> bits;  // true = down
  for (std::size_t i = 0; i < label.size();) {
    const char c = label[i];
    if (c == 'u' || c == 'U' || c == '0') {
      bits.push_back(false);
      ++i;
    } else if (c == 'd' || c == 'D' || c == '1') {
      bits.push_back(true);
      ++i;
    } else if (label.substr(i, kUp.size()) == kUp) {
      bits.push_back(false);
      i += kUp.size();
    } else if (label.substr(i, kDown.size()) == kDown) {
      bits.push_back(true);
      i += kDown.size();
    } else {
      throw Error("invalid basis label '" + std::string(label) + "'");
    }
  }
  if (bits.empty()) throw Error("empty basis label");
  return bits;
}

std::size_t bits_to_index(const std::vector<bool>& bits) {
  std::size_t index = 0;
  for (bool down : bits) index = (index << 1) | (down ? 1u : 0u);
  return index;
}

}  // namespace

std::size_t parse_basis_label(std::string_view label) { return bits_to_index(label_bits(label)); }

std::size_t parse_basis_label(std::string_view label, std::size_t n_qubits) {
  const auto bits = label_bits(label);
  if (bits.size() != n_qubits) {
    throw Error("basis label '" + std::string(label) + "' has " + std::to_string(bits.size()) +
                " qubits, expected " + std::to_string(n_qubits));
  }
  return bits_to_index(bits);
}

bool qubit_is_up(std::size_t index, std::size_t qubit, std::size_t n_qubits) {
  return ((index >> (n_qubits - 1 - qubit)) & 1u) == 0;
}

PhysicalityReport physicality(const Operator& rho) {
  PhysicalityReport r;
  r.trace_error = std::abs(rho.trace() - Complex(1.0, 0.0));
  r.hermiticity_residual = rho.hermiticity_residual();
  const Matrix sym = 0.5 * (rho.matrix() + rho.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  r.min_eigenvalue = es.eigenvalues().minCoeff();
  return r;
}

DensityMatrix DensityMatrix::from_operator(Operator rho, DensityTolerances tol) {
  if (rho.dim() == 0) throw Error("DensityMatrix: empty operator");
  const PhysicalityReport r = physicality(rho);
  if (r.trace_error > tol.trace) {
    throw Error("DensityMatrix: trace deviates from 1 by " + std::to_string(r.trace_error));
  }
  if (r.hermiticity_residual > tol.hermiticity) {
    throw Error("DensityMatrix: not Hermitian (residual " +
                std::to_string(r.hermiticity_residual) + ")");
  }
  if (r.min_eigenvalue < -tol.eigenvalue) {
    throw Error("DensityMatrix: negative eigenvalue " + std::to_string(r.min_eigenvalue));
  }
  return DensityMatrix(std::move(rho));
}

DensityMatrix DensityMatrix::basis_state(std::size_t index, std::size_t dim) {
  if (index >= dim) throw Error("basis_state: index out of range");
  Matrix m = Matrix::Zero(idx(dim), idx(dim));
  m(idx(index), idx(index)) = 1.0;
  return DensityMatrix(Operator(std::move(m)));
}

DensityMatrix DensityMatrix::pure(const Vector& psi) {
  const double n = psi.norm();
  if (n == 0.0) throw Error("DensityMatrix::pure: zero vector");
  const Vector v = psi / n;
  return DensityMatrix(Operator::outer(v, v));
}

bool EigenSystem::fully_labeled() const {
  return std::all_of(labels.begin(), labels.end(), [](const auto& l) { return l.has_value(); });
}

bool EigenSystem::nondegenerate() const {
  const double scale = energies.empty()
                           ? 1.0
                           : std::max({1.0, std::abs(energies.front()), std::abs(energies.back())});
  for (std::size_t k = 1; k < energies.size(); ++k) {
    if (energies[k] - energies[k - 1] <= 1e-9 * scale) return false;
  }
  return true;
}

std::optional<std::size_t> EigenSystem::level_of(std::size_t basis_index) const {
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (labels[k] == basis_index) return k;
  }
  return std::nullopt;
}

EigenSystem eigensystem(const Operator& h) {
  const double herm = h.hermiticity_residual();
  const double scale = std::max(1.0, h.matrix().cwiseAbs().maxCoeff());
  if (herm > 1e-12 * scale) {
    throw Error("eigensystem: operator is not Hermitian (residual " + std::to_string(herm) + ")");
  }
  const Matrix sym = 0.5 * (h.matrix() + h.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  if (es.info() != Eigen::Success) throw Error("eigensystem: decomposition failed");

  const std::size_t n = h.dim();
  EigenSystem out;
  out.energies.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.energies[k] = es.eigenvalues()(idx(k));
  out.vectors = Operator(es.eigenvectors());
  out.gaps.resize(idx(n), idx(n));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      out.gaps(idx(j), idx(k)) = out.energies[j] - out.energies[k];
    }
  }

  const double escale =
      std::max({1.0, std::abs(out.energies.front()), std::abs(out.energies.back())});
  const double degen_tol = 1e-9 * escale;
  out.labels.assign(n, std::nullopt);
  std::vector<int> claims(n, 0);
  for (std::size_t k = 0; k < n; ++k) {
    const bool degenerate = (k > 0 && out.energies[k] - out.energies[k - 1] <= degen_tol) ||
                            (k + 1 < n && out.energies[k + 1] - out.energies[k] <= degen_tol);
    if (degenerate) continue;
    Eigen::Index best = 0;
    const double overlap = es.eigenvectors().col(idx(k)).cwiseAbs2().maxCoeff(&best);
    if (overlap > 0.5) {
      out.labels[k] = static_cast<std::size_t>(best);
      ++claims[static_cast<std::size_t>(best)];
    }
  }
  for (auto& l : out.labels) {
    if (l && claims[*l] > 1) l.reset();
  }
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::size_t keep) {
  const std::size_t n = rho.qubits();
  if (keep >= n) {
    throw Error("partial_trace: qubit " + std::to_string(keep) + " out of range for " +
                std::to_string(n) + " qubits");
  }
  const std::size_t shift = n - 1 - keep;
  const std::size_t mask = ~(std::size_t{1} << shift);
  Matrix red = Matrix::Zero(2, 2);
  const Matrix& m = rho.matrix();
  for (std::size_t i = 0; i < rho.dim(); ++i) {
    for (std::size_t j = 0; j < rho.dim(); ++j) {
      if ((i & mask) != (j & mask)) continue;
      red(idx((i >> shift) & 1u), idx((j >> shift) & 1u)) += m(idx(i), idx(j));
    }
  }
  return DensityMatrix::from_operator(Operator(std::move(red)),
                                      {.trace = 1e-7, .hermiticity = 1e-7, .eigenvalue = 1e-7});
}

double expect(const Operator& op, const DensityMatrix& rho) {
  if (op.dim() != rho.dim()) {
    throw Error("expect: dimension mismatch (" + std::to_string(op.dim()) + " vs " +
                std::to_string(rho.dim()) + ")");
  }
  const Complex v = (op.matrix() * rho.matrix()).trace();
  if (std::abs(v.imag()) > 1e-10) {
    throw Error("expect: imaginary residue " + std::to_string(v.imag()) +
                " (operator not Hermitian?)");
  }
  return v.real();
}

}  // namespace qdgate

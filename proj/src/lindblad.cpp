#include "qdgate/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "qdgate/simd/kernels.hpp"

namespace qdgate {

namespace {

Matrix sum_cdag_c(const CollapseSet& collapse, std::size_t d) {
  Matrix s = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (const auto& c : collapse.ops) s += c.op.matrix().adjoint() * c.op.matrix();
  return s;
}

void check_dims(const Operator& h, const CollapseSet& collapse, std::size_t d, const char* fn) {
  if (h.dim() != d) throw Error(std::string(fn) + ": Hamiltonian dimension mismatch");
  for (const auto& c : collapse.ops) {
    if (c.op.dim() != d) throw Error(std::string(fn) + ": collapse operator dimension mismatch");
  }
}

Operator rhs_with(const Matrix& h, const CollapseSet& collapse, const Matrix& cdc,
                  const Matrix& rho) {
  const Complex i(0.0, 1.0);
  Matrix out = -i * (h * rho - rho * h);
  for (const auto& c : collapse.ops) {
    const Matrix& m = c.op.matrix();
    out += m * rho * m.adjoint();
  }
  out -= 0.5 * (cdc * rho + rho * cdc);
  return Operator(std::move(out));
}

}  // namespace

Operator lindblad_rhs(const Operator& h, const CollapseSet& collapse, const Operator& rho) {
  check_dims(h, collapse, rho.dim(), "lindblad_rhs");
  return rhs_with(h.matrix(), collapse, sum_cdag_c(collapse, rho.dim()), rho.matrix());
}

Operator lindblad_rhs(const Operator& h, const CollapseSet& collapse, const DensityMatrix& rho) {
  return lindblad_rhs(h, collapse, rho.op());
}

std::vector<double> flatten(const Operator& rho) {
  const std::size_t d = rho.dim();
  const std::size_t n = d * d;
  std::vector<double> v(2 * n);
  for (std::size_t c = 0; c < d; ++c) {
    for (std::size_t r = 0; r < d; ++r) {
      const Complex z = rho(r, c);
      v[r + c * d] = z.real();
      v[n + r + c * d] = z.imag();
    }
  }
  return v;
}

Operator unflatten(std::span<const double> v, std::size_t dim) {
  const std::size_t n = dim * dim;
  if (v.size() != 2 * n) throw Error("unflatten: size mismatch");
  Matrix m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t c = 0; c < dim; ++c) {
    for (std::size_t r = 0; r < dim; ++r) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          Complex(v[r + c * dim], v[n + r + c * dim]);
    }
  }
  return Operator(std::move(m));
}

Liouvillian Liouvillian::build(const Operator& h, const CollapseSet& collapse) {
  const std::size_t d = h.dim();
  check_dims(h, collapse, d, "Liouvillian::build");
  const std::size_t n = d * d;
  const std::size_t size = 2 * n;
  const Matrix cdc = sum_cdag_c(collapse, d);

  Liouvillian l;
  l.dim_ = d;
  l.m_.assign(size * size, 0.0);
  Matrix e = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t b = 0; b < d; ++b) {
    for (std::size_t a = 0; a < d; ++a) {
      const auto ai = static_cast<Eigen::Index>(a), bi = static_cast<Eigen::Index>(b);
      e(ai, bi) = 1.0;
      const Operator col = rhs_with(h.matrix(), collapse, cdc, e);
      e(ai, bi) = 0.0;
      const std::size_t j = a + b * d;
      for (std::size_t cc = 0; cc < d; ++cc) {
        for (std::size_t rr = 0; rr < d; ++rr) {
          const Complex z = col(rr, cc);
          const std::size_t i = rr + cc * d;
          // [[Re L, -Im L], [Im L, Re L]]
          l.m_[i * size + j] = z.real();
          l.m_[(n + i) * size + j] = z.imag();
          l.m_[i * size + n + j] = -z.imag();
          l.m_[(n + i) * size + n + j] = z.real();
        }
      }
    }
  }
  return l;
}

Liouvillian Liouvillian::dissipator(const CollapseSet& collapse, std::size_t dim) {
  return build(Operator::zero(dim), collapse);
}

void Liouvillian::apply(std::span<const double> x, std::span<double> y) const {
  simd::matvec(m_.data(), x.data(), y.data(), size());
}

Matrix liouvillian_kron(const Operator& h, const CollapseSet& collapse) {
  const std::size_t d = h.dim();
  check_dims(h, collapse, d, "liouvillian_kron");
  const auto di = static_cast<Eigen::Index>(d);
  const Matrix id = Matrix::Identity(di, di);
  const Complex i(0.0, 1.0);
  // vec(A X B) = (B^T (x) A) vec(X) for column stacking.
  Matrix l = -i * (Eigen::kroneckerProduct(id, h.matrix()).eval() -
                   Eigen::kroneckerProduct(h.matrix().transpose(), id).eval());
  for (const auto& c : collapse.ops) {
    const Matrix& m = c.op.matrix();
    const Matrix cdc = m.adjoint() * m;
    l += Eigen::kroneckerProduct(m.conjugate(), m).eval();
    l -= 0.5 * Eigen::kroneckerProduct(id, cdc).eval();
    l -= 0.5 * Eigen::kroneckerProduct(cdc.transpose(), id).eval();
  }
  return l;
}

DensityMatrix expm_oracle(const Operator& h, const CollapseSet& collapse,
                          const DensityMatrix& rho0, double t) {
  const std::size_t d = rho0.dim();
  const auto di = static_cast<Eigen::Index>(d);
  const Matrix l = liouvillian_kron(h, collapse);
  Eigen::VectorXcd v = rho0.matrix().reshaped();
  if (t != 0.0) v = (l * Complex(t, 0.0)).exp() * v;
  Matrix rho = v.reshaped(di, di);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityMatrix::from_operator(Operator(std::move(rho)), {1e-8, 1e-8, 1e-7});
}

namespace {

DormandPrince45::Rhs liouvillian_rhs(std::shared_ptr<const Liouvillian> l, std::size_t d) {
  if (!l || l->dim() != d) throw Error("Propagator: dimension mismatch");
  return [l = std::move(l)](double, std::span<const double> y, std::span<double> dy) {
    l->apply(y, dy);
  };
}

DormandPrince45::Rhs callable_rhs(HamiltonianFn h, const CollapseSet& collapse, std::size_t d) {
  auto diss = std::make_shared<const Liouvillian>(Liouvillian::dissipator(collapse, d));
  return [h = std::move(h), diss, d](double t, std::span<const double> y, std::span<double> dy) {
    diss->apply(y, dy);
    const Operator ht = h(t);
    if (ht.dim() != d) throw Error("evolve: H(t) dimension mismatch");
    const Matrix rho = unflatten(y, d).matrix();
    const Complex i(0.0, 1.0);
    const Matrix comm = -i * (ht.matrix() * rho - rho * ht.matrix());
    const std::size_t n = d * d;
    for (std::size_t c = 0; c < d; ++c) {
      for (std::size_t r = 0; r < d; ++r) {
        const Complex z = comm(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        dy[r + c * d] += z.real();
        dy[n + r + c * d] += z.imag();
      }
    }
  };
}

}  // namespace

Propagator::Propagator(std::shared_ptr<const Liouvillian> l, const DensityMatrix& rho0, double t0,
                       const SolverOptions& opts)
    : dim_(rho0.dim()),
      solver_(liouvillian_rhs(std::move(l), rho0.dim()), flatten(rho0.op()), t0, opts) {}

Propagator::Propagator(const HamiltonianFn& h, const CollapseSet& collapse,
                       const DensityMatrix& rho0, double t0, const SolverOptions& opts)
    : dim_(rho0.dim()), solver_(callable_rhs(h, collapse, rho0.dim()), flatten(rho0.op()), t0, opts) {}

DensityMatrix Propagator::state(Diagnostics* diag, SampleTolerances tol) const {
  Operator rho = unflatten(solver_.state(), dim_);
  const double herm = rho.hermiticity_residual();
  if (herm > tol.hermiticity) {
    std::ostringstream os;
    os << "Hermiticity drift " << herm << " at t=" << time();
    throw SolverError(os.str());
  }
  rho = 0.5 * (rho + rho.adjoint());
  const PhysicalityReport rep = physicality(rho);
  if (rep.trace_error > tol.trace || rep.min_eigenvalue < -tol.eigenvalue) {
    std::ostringstream os;
    os << "unphysical state at t=" << time() << ": trace error " << rep.trace_error
       << ", min eigenvalue " << rep.min_eigenvalue;
    throw SolverError(os.str());
  }
  if (diag) {
    diag->max_trace_error = std::max(diag->max_trace_error, rep.trace_error);
    diag->max_hermiticity_residual = std::max(diag->max_hermiticity_residual, herm);
    diag->min_eigenvalue = std::min(diag->min_eigenvalue, rep.min_eigenvalue);
  }
  return DensityMatrix::from_operator(std::move(rho), {tol.trace, tol.hermiticity, tol.eigenvalue});
}

std::vector<double> uniform_times(double t_end, std::size_t samples) {
  if (!(t_end > 0.0)) throw Error("uniform_times: t_end must be > 0");
  if (samples < 2) throw Error("uniform_times: need at least 2 samples");
  std::vector<double> t(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    t[k] = t_end * static_cast<double>(k) / static_cast<double>(samples - 1);
  }
  t.back() = t_end;
  return t;
}

namespace {

void check_times(std::span<const double> times) {
  if (times.empty()) throw Error("evolve: no sample times");
  if (times.front() < 0.0) throw Error("evolve: sample times must be >= 0");
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) throw Error("evolve: sample times must increase strictly");
  }
}

Trajectory run(Propagator& p, std::span<const double> times) {
  Trajectory tr;
  tr.times.assign(times.begin(), times.end());
  tr.states.reserve(times.size());
  for (double t : times) {
    p.advance_to(t);
    tr.states.push_back(p.state(&tr.diagnostics));
  }
  tr.diagnostics.steps = p.steps();
  tr.diagnostics.rejected = p.rejected();
  return tr;
}

}  // namespace

Trajectory evolve(std::shared_ptr<const Liouvillian> l, const DensityMatrix& rho0,
                  std::span<const double> times, const SolverOptions& opts) {
  check_times(times);
  Propagator p(std::move(l), rho0, 0.0, opts);
  return run(p, times);
}

Trajectory evolve(const Operator& h, const CollapseSet& collapse, const DensityMatrix& rho0,
                  double t_end, const SolverOptions& opts, std::size_t samples) {
  const auto times = uniform_times(t_end, samples);
  return evolve(std::make_shared<const Liouvillian>(Liouvillian::build(h, collapse)), rho0, times,
                opts);
}

Trajectory evolve(const HamiltonianFn& h, const CollapseSet& collapse, const DensityMatrix& rho0,
                  std::span<const double> times, const SolverOptions& opts) {
  check_times(times);
  Propagator p(h, collapse, rho0, 0.0, opts);
  return run(p, times);
}

}  // namespace qdgate

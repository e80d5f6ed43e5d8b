#pragma once

// Lindblad master equation (hbar = 1):
//   drho/dt = -i[H, rho] + sum_n (C_n rho C_n^+ - 1/2 {C_n^+ C_n, rho})
//
// The integrator works on a real flattening of rho: the first d^2 entries are
// Re vec(rho) and the next d^2 are Im vec(rho), with vec() stacking columns.

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "qdgate/integrator.hpp"
#include "qdgate/noise_model.hpp"
#include "qdgate/quantum_core.hpp"

namespace qdgate {

Operator lindblad_rhs(const Operator& h, const CollapseSet& collapse, const Operator& rho);
Operator lindblad_rhs(const Operator& h, const CollapseSet& collapse, const DensityMatrix& rho);

std::vector<double> flatten(const Operator& rho);
Operator unflatten(std::span<const double> v, std::size_t dim);

/// Real 2d^2 x 2d^2 generator, assembled column by column from lindblad_rhs.
class Liouvillian {
 public:
  static Liouvillian build(const Operator& h, const CollapseSet& collapse);
  /// Dissipative part only (H = 0).
  static Liouvillian dissipator(const CollapseSet& collapse, std::size_t dim);

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return 2 * dim_ * dim_; }
  /// Row-major size() x size().
  const std::vector<double>& data() const { return m_; }
  void apply(std::span<const double> x, std::span<double> y) const;

 private:
  std::size_t dim_ = 0;
  std::vector<double> m_;
};

/// Complex d^2 x d^2 Liouvillian from Kronecker products, acting on the
/// column-stacked vec(rho).
Matrix liouvillian_kron(const Operator& h, const CollapseSet& collapse);

/// exp(L t) vec(rho0) with L from liouvillian_kron.
DensityMatrix expm_oracle(const Operator& h, const CollapseSet& collapse,
                          const DensityMatrix& rho0, double t);

struct Diagnostics {
  double max_trace_error = 0.0;
  /// Largest Hermiticity residual seen before symmetrizing a sample.
  double max_hermiticity_residual = 0.0;
  double min_eigenvalue = 1.0;
  std::size_t steps = 0;
  std::size_t rejected = 0;
};

struct Trajectory {
  std::vector<double> times;  // model units
  std::vector<DensityMatrix> states;
  Diagnostics diagnostics;

  std::size_t size() const { return times.size(); }
};

using HamiltonianFn = std::function<Operator(double)>;

/// Acceptance bounds for samples taken from the integrator.
struct SampleTolerances {
  double trace = 1e-8;
  double hermiticity = 1e-8;
  double eigenvalue = 1e-7;
};

/// Integrator state for one density matrix; copyable so that a run can be
/// branched (flip-time refinement does this).
class Propagator {
 public:
  Propagator(std::shared_ptr<const Liouvillian> l, const DensityMatrix& rho0, double t0,
             const SolverOptions& opts);
  Propagator(const HamiltonianFn& h, const CollapseSet& collapse, const DensityMatrix& rho0,
             double t0, const SolverOptions& opts);

  void advance_to(double t) { solver_.advance_to(t); }
  double time() const { return solver_.time(); }
  std::size_t dim() const { return dim_; }
  const std::vector<double>& raw() const { return solver_.state(); }
  /// Current state, symmetrized and checked; folds the checks into `diag`
  /// when given.
  DensityMatrix state(Diagnostics* diag = nullptr, SampleTolerances tol = {}) const;
  std::size_t steps() const { return solver_.steps(); }
  std::size_t rejected() const { return solver_.rejected(); }

 private:
  std::size_t dim_;
  DormandPrince45 solver_;
};

/// Uniform grid of `samples` points on [0, t_end].
std::vector<double> uniform_times(double t_end, std::size_t samples);

Trajectory evolve(const Operator& h, const CollapseSet& collapse, const DensityMatrix& rho0,
                  double t_end, const SolverOptions& opts = {}, std::size_t samples = 2000);
Trajectory evolve(std::shared_ptr<const Liouvillian> l, const DensityMatrix& rho0,
                  std::span<const double> times, const SolverOptions& opts = {});
Trajectory evolve(const HamiltonianFn& h, const CollapseSet& collapse, const DensityMatrix& rho0,
                  std::span<const double> times, const SolverOptions& opts = {});

}  // namespace qdgate

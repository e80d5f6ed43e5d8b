#pragma once

// Adaptive Dormand-Prince 5(4) integrator for real ODE systems y' = f(t, y).
// Steps are clipped so that advance_to() lands exactly on the requested time;
// no interpolation is involved.

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qdgate {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolverOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  std::size_t max_steps = 50'000'000;
  /// Smallest step allowed, relative to max(1, |t|).
  double min_step = 1e-14;

  bool operator==(const SolverOptions&) const = default;
};

void validate(const SolverOptions& opts);

class DormandPrince45 {
 public:
  using Rhs = std::function<void(double t, std::span<const double> y, std::span<double> dy)>;

  DormandPrince45(Rhs rhs, std::vector<double> y0, double t0, SolverOptions opts);

  /// Integrate forward to t_target (>= time()).
  void advance_to(double t_target);

  double time() const { return t_; }
  const std::vector<double>& state() const { return y_; }
  std::size_t steps() const { return accepted_; }
  std::size_t rejected() const { return rejected_; }

  /// One fixed step of size h from (t, y) without error control; the
  /// embedded error estimate is written to `err` when non-empty.
  static std::vector<double> fixed_step(const Rhs& rhs, double t, std::span<const double> y,
                                        double h, std::span<double> err = {});

 private:
  double initial_step(double t_end);

  Rhs rhs_;
  SolverOptions opts_;
  double t_;
  std::vector<double> y_;
  std::vector<double> k1_;  // f(t_, y_), kept across steps (FSAL)
  double h_ = 0.0;
  std::size_t accepted_ = 0;
  std::size_t rejected_ = 0;
  std::vector<std::vector<double>> k_;
  std::vector<double> ytmp_, ynew_, err_;
};

}  // namespace qdgate

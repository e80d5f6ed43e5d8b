#pragma once

// Gate verdicts and operating ranges.
//
// A point of a sweep is one device configuration. Its flip time comes from a
// noise-free run started in the all-up state; every computational basis state
// is then evolved with noise to that time and each qubit's P_up is compared
// with the thresholds. The operating range is the contiguous run of passing
// grid points that contains the best point (largest worst-case margin).

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qdgate/device_model.hpp"
#include "qdgate/integrator.hpp"
#include "qdgate/lindblad.hpp"
#include "qdgate/noise_model.hpp"

namespace qdgate {

struct Thresholds {
  double upper = 0.8;  // T_U
  double lower = 0.2;  // T_D

  bool operator==(const Thresholds&) const = default;
};

void validate(const Thresholds& t);

/// <up| Tr_others(rho) |up>, clamped to [0, 1].
double population_up(const DensityMatrix& rho, std::size_t qubit);
std::vector<double> populations_up(const DensityMatrix& rho);

/// Truth table on basis indices.
std::size_t expected_final(Gate g, std::size_t initial);
std::string expected_final(Gate g, std::string_view initial);

/// pi/(2 g mu_B B_ac): the resonant flip time of a lone spin, model units.
double rabi_flip_time(const DeviceConfig& cfg);

/// Time of the conditional pi rotation, model units (see header comment).
double flip_time(const DeviceConfig& cfg, const SolverOptions& opts = {});

struct GateVerdict {
  std::size_t initial = 0;
  std::size_t expected = 0;
  std::vector<double> p_up;
  /// P - T_U for qubits expected up, T_D - P for qubits expected down.
  std::vector<double> margins;
  bool pass = false;
  std::vector<std::size_t> failing;

  double worst_margin() const;
  std::size_t limiting_qubit() const;
};

GateVerdict classify_populations(std::vector<double> p_up, Gate g, std::size_t initial,
                                 const Thresholds& t);
/// P_up sampled at t_flip by linear interpolation between trajectory samples.
GateVerdict classify(const Trajectory& traj, double t_flip, Gate g, std::size_t initial,
                     const Thresholds& t);

/// All verdicts of one configuration.
struct PointResult {
  double gradient = 0.0;
  double t_flip = 0.0;
  std::vector<GateVerdict> verdicts;  // indexed by initial basis state
  std::vector<double> fidelity;       // <expected| rho(t_flip) |expected>
  Diagnostics diagnostics;            // folded over all initial states

  bool pass() const;
  double worst_margin() const;
  /// Verdict with the smallest margin.
  const GateVerdict& limiting() const;
};

/// Raised when a sweep point fails numerically; carries its coordinates.
class PointError : public Error {
 public:
  PointError(double gradient, std::optional<std::size_t> state, std::size_t n_qubits,
             const std::string& what);
  double gradient() const { return gradient_; }
  std::optional<std::size_t> state() const { return state_; }

 private:
  double gradient_;
  std::optional<std::size_t> state_;
};

struct PointOptions {
  SolverOptions solver;
  Thresholds thresholds;
};

/// Evaluate one fully specified device configuration.
PointResult evaluate_config(const DeviceConfig& cfg, const NoiseConfig& noise,
                            const PointOptions& opts, double gradient = 0.0);

enum class Scale { Linear, Log };
std::string to_string(Scale s);
Scale parse_scale(std::string_view s);

struct SweepAxis {
  double start = 0.0;
  double stop = 0.0;
  std::size_t points = 0;
  Scale scale = Scale::Log;

  bool operator==(const SweepAxis&) const = default;
};

void validate(const SweepAxis& a);
std::vector<double> axis_values(const SweepAxis& a);
/// Point count for a log axis at the given density.
std::size_t points_per_decade(double start, double stop, double per_decade);

struct SweepSpec {
  /// Everything except static_fields, which come from fixed_field and the
  /// gradient (see fields_for_gradient).
  DeviceConfig device;
  double fixed_field = 0.0;
  SweepAxis axis;
  bool refine = true;
  /// Relative bracket width at which boundary bisection stops.
  double refine_rtol = 5e-4;
  unsigned workers = 1;
};

DeviceConfig config_at(const SweepSpec& spec, double gradient);
PointResult evaluate_point(const SweepSpec& spec, double gradient, const NoiseConfig& noise,
                           const PointOptions& opts);

struct RangeBound {
  double value = 0.0;  // gradient, T
  /// True when the passing run reaches the grid edge, so the bound is one-sided.
  bool open = false;
  /// Failing side of the boundary (absent for open bounds).
  std::optional<std::size_t> limiting_state;
  std::optional<std::size_t> limiting_qubit;
};

struct SweepResult {
  Gate gate = Gate::Cnot;
  double fixed_field = 0.0;
  std::vector<double> axis;
  std::vector<PointResult> points;
  /// Grid indices [first, last] of the operating range.
  std::optional<std::pair<std::size_t, std::size_t>> range;
  std::optional<RangeBound> lower;
  std::optional<RangeBound> upper;

  bool empty() const { return !range.has_value(); }
};

SweepResult operating_range(const SweepSpec& spec, const NoiseConfig& noise,
                            const PointOptions& opts);

}  // namespace qdgate

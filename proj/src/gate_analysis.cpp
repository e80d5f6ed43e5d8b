#include "qdgate/gate_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qdgate/parallel.hpp"

namespace qdgate {

void validate(const Thresholds& t) {
  if (!(t.lower > 0.0 && t.lower < t.upper && t.upper < 1.0)) {
    throw Error("Thresholds: need 0 < lower < upper < 1");
  }
}

double population_up(const DensityMatrix& rho, std::size_t qubit) {
  const std::size_t n = rho.qubits();
  if (qubit >= n) throw Error("population_up: qubit out of range");
  const Operator red = partial_trace(rho, qubit).op();
  return std::clamp(red(0, 0).real(), 0.0, 1.0);
}

std::vector<double> populations_up(const DensityMatrix& rho) {
  std::vector<double> p(rho.qubits());
  for (std::size_t q = 0; q < p.size(); ++q) p[q] = population_up(rho, q);
  return p;
}

std::size_t expected_final(Gate g, std::size_t initial) {
  const std::size_t n = qubit_count(g);
  if (initial >= (std::size_t{1} << n)) throw Error("expected_final: state out of range");
  for (std::size_t c : control_qubits(g)) {
    if (!qubit_is_up(initial, c, n)) return initial;
  }
  return initial ^ (std::size_t{1} << (n - 1 - target_qubit(g)));
}

std::string expected_final(Gate g, std::string_view initial) {
  const std::size_t n = qubit_count(g);
  if (initial.size() != n) {
    throw Error("expected_final: " + to_string(g) + " needs a " + std::to_string(n) +
                "-qubit label");
  }
  return basis_label(expected_final(g, parse_basis_label(initial)), n);
}

double rabi_flip_time(const DeviceConfig& cfg) {
  const double omega = field_to_energy(cfg.drive_field, std::abs(cfg.g_factor));
  if (!(omega > 0.0)) throw Error("flip_time: drive field must be > 0");
  return std::numbers::pi / (2.0 * omega);
}

namespace {

// P_up of `qubit` straight from the flattened state (diagonal only).
double raw_population_up(std::span<const double> y, std::size_t d, std::size_t qubit) {
  const std::size_t n = qubit_count_for_dim(d);
  double p = 0.0;
  for (std::size_t s = 0; s < d; ++s) {
    if (qubit_is_up(s, qubit, n)) p += y[s + s * d];
  }
  return p;
}

}  // namespace

double flip_time(const DeviceConfig& cfg_in, const SolverOptions& opts) {
  const DeviceConfig cfg = resolve_drive_frequency(cfg_in);
  const double t_half = rabi_flip_time(cfg);
  const std::size_t d = std::size_t{1} << qubit_count(cfg.gate);
  const std::size_t tq = target_qubit(cfg.gate);
  auto l = std::make_shared<const Liouvillian>(
      Liouvillian::build(build_hamiltonian_rwa(cfg), CollapseSet{}));

  constexpr std::size_t kPerHalf = 400;
  constexpr std::size_t kHalves = 4;
  const double dt = t_half / kPerHalf;
  auto pop = [&](const Propagator& p) { return raw_population_up(p.raw(), d, tq); };

  Propagator p(l, DensityMatrix::basis_state(0, d), 0.0, opts);
  // p at grid points k-2, k-1 and k
  std::vector<Propagator> hist{p, p};
  std::vector<double> pk{pop(p), pop(p)};
  std::optional<Propagator> branch;
  double a = 0.0, b = 0.0;
  for (std::size_t k = 1; k <= kPerHalf * kHalves; ++k) {
    p.advance_to(static_cast<double>(k) * dt);
    const double pnow = pop(p);
    if (k >= 2) {
      const double pm = pk[1];
      if (pm < 0.5 && pm <= pk[0] && pm <= pnow) {
        branch = hist[0];
        a = static_cast<double>(k - 2) * dt;
        b = static_cast<double>(k) * dt;
        break;
      }
    }
    hist[0] = hist[1];
    hist[1] = p;
    pk[0] = pk[1];
    pk[1] = pnow;
  }
  if (!branch) {
    std::ostringstream os;
    os << "flip_time: no flip of the target detected within " << kHalves
       << " Rabi half-periods (" << model_to_ns(kHalves * t_half) << " ns)";
    throw Error(os.str());
  }

  auto f = [&](double t) {
    Propagator q = *branch;
    q.advance_to(t);
    return pop(q);
  };
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 100 && (b - a) > 1e-10 * t_half; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

double GateVerdict::worst_margin() const {
  return margins.empty() ? 0.0 : *std::min_element(margins.begin(), margins.end());
}

std::size_t GateVerdict::limiting_qubit() const {
  return static_cast<std::size_t>(std::min_element(margins.begin(), margins.end()) -
                                  margins.begin());
}

GateVerdict classify_populations(std::vector<double> p_up, Gate g, std::size_t initial,
                                 const Thresholds& t) {
  const std::size_t n = qubit_count(g);
  if (p_up.size() != n) throw Error("classify: population count does not match gate");
  GateVerdict v;
  v.initial = initial;
  v.expected = expected_final(g, initial);
  v.p_up = std::move(p_up);
  v.margins.resize(n);
  v.pass = true;
  for (std::size_t q = 0; q < n; ++q) {
    const bool up = qubit_is_up(v.expected, q, n);
    // the dead zone [T_D, T_U] fails either way
    v.margins[q] = up ? v.p_up[q] - t.upper : t.lower - v.p_up[q];
    if (!(v.margins[q] > 0.0)) {
      v.pass = false;
      v.failing.push_back(q);
    }
  }
  return v;
}

GateVerdict classify(const Trajectory& traj, double t_flip, Gate g, std::size_t initial,
                     const Thresholds& t) {
  const auto& ts = traj.times;
  if (ts.empty() || t_flip < ts.front() || t_flip > ts.back()) {
    throw Error("classify: flip time outside the trajectory");
  }
  auto hi = std::lower_bound(ts.begin(), ts.end(), t_flip);
  std::size_t j = static_cast<std::size_t>(hi - ts.begin());
  std::vector<double> p = populations_up(traj.states[j]);
  if (ts[j] != t_flip) {
    const std::size_t i = j - 1;
    const double w = (t_flip - ts[i]) / (ts[j] - ts[i]);
    const std::vector<double> p0 = populations_up(traj.states[i]);
    for (std::size_t q = 0; q < p.size(); ++q) p[q] = (1.0 - w) * p0[q] + w * p[q];
  }
  return classify_populations(std::move(p), g, initial, t);
}

bool PointResult::pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const auto& v) { return v.pass; });
}

double PointResult::worst_margin() const { return limiting().worst_margin(); }

const GateVerdict& PointResult::limiting() const {
  if (verdicts.empty()) throw Error("PointResult: no verdicts");
  return *std::min_element(verdicts.begin(), verdicts.end(), [](const auto& x, const auto& y) {
    return x.worst_margin() < y.worst_margin();
  });
}

namespace {

std::string point_message(double gradient, std::optional<std::size_t> state, std::size_t n,
                          const std::string& what) {
  std::ostringstream os;
  os << "gradient " << gradient << " T";
  if (state) os << ", initial state " << basis_label(*state, n);
  os << ": " << what;
  return os.str();
}

}  // namespace

PointError::PointError(double gradient, std::optional<std::size_t> state, std::size_t n_qubits,
                       const std::string& what)
    : Error(point_message(gradient, state, n_qubits, what)), gradient_(gradient), state_(state) {}

PointResult evaluate_config(const DeviceConfig& cfg_in, const NoiseConfig& noise,
                            const PointOptions& opts, double gradient) {
  const std::size_t n = qubit_count(cfg_in.gate);
  const std::size_t d = std::size_t{1} << n;
  PointResult r;
  r.gradient = gradient;
  std::shared_ptr<const Liouvillian> l;
  try {
    validate(cfg_in);
    const DeviceConfig cfg = resolve_drive_frequency(cfg_in);
    r.t_flip = flip_time(cfg, opts.solver);
    const EigenSystem eig = eigensystem(build_static_hamiltonian(cfg));
    const CollapseSet collapse = build_collapse_set(eig, noise, bare_zeeman_energies(cfg));
    l = std::make_shared<const Liouvillian>(Liouvillian::build(build_hamiltonian_rwa(cfg), collapse));
  } catch (const std::exception& e) {
    throw PointError(gradient, std::nullopt, n, e.what());
  }
  r.verdicts.reserve(d);
  r.fidelity.reserve(d);
  for (std::size_t s = 0; s < d; ++s) {
    try {
      Propagator p(l, DensityMatrix::basis_state(s, d), 0.0, opts.solver);
      p.advance_to(r.t_flip);
      const DensityMatrix rho = p.state(&r.diagnostics);
      r.verdicts.push_back(classify_populations(populations_up(rho), cfg_in.gate, s, opts.thresholds));
      const std::size_t e = r.verdicts.back().expected;
      r.fidelity.push_back(rho.op()(e, e).real());
    } catch (const std::exception& e) {
      throw PointError(gradient, s, n, e.what());
    }
  }
  return r;
}

std::string to_string(Scale s) { return s == Scale::Linear ? "linear" : "log"; }

Scale parse_scale(std::string_view s) {
  if (s == "linear" || s == "lin") return Scale::Linear;
  if (s == "log") return Scale::Log;
  throw Error("unknown axis scale '" + std::string(s) + "' (linear|log)");
}

void validate(const SweepAxis& a) {
  if (!std::isfinite(a.start) || !std::isfinite(a.stop)) throw Error("sweep axis: non-finite end");
  if (!(a.start < a.stop)) throw Error("sweep axis: start must be < stop");
  if (a.points < 2) throw Error("sweep axis: need at least 2 points");
  if (a.scale == Scale::Log && !(a.start > 0.0)) throw Error("sweep axis: log scale needs start > 0");
}

std::vector<double> axis_values(const SweepAxis& a) {
  validate(a);
  std::vector<double> v(a.points);
  const double m = static_cast<double>(a.points - 1);
  for (std::size_t k = 0; k < a.points; ++k) {
    const double f = static_cast<double>(k) / m;
    v[k] = a.scale == Scale::Linear ? a.start + f * (a.stop - a.start)
                                    : a.start * std::pow(a.stop / a.start, f);
  }
  v.front() = a.start;
  v.back() = a.stop;
  return v;
}

std::size_t points_per_decade(double start, double stop, double per_decade) {
  if (!(start > 0.0 && stop > start)) throw Error("points_per_decade: need 0 < start < stop");
  const double decades = std::log10(stop / start);
  return std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(decades * per_decade)) + 1);
}

DeviceConfig config_at(const SweepSpec& spec, double gradient) {
  DeviceConfig cfg = spec.device;
  cfg.static_fields = fields_for_gradient(cfg.gate, spec.fixed_field, gradient);
  return cfg;
}

PointResult evaluate_point(const SweepSpec& spec, double gradient, const NoiseConfig& noise,
                           const PointOptions& opts) {
  return evaluate_config(config_at(spec, gradient), noise, opts, gradient);
}

namespace {

// Bisect between a failing and a passing gradient; returns the passing end
// and the result on the failing side.
RangeBound refine(const SweepSpec& spec, const NoiseConfig& noise, const PointOptions& opts,
                  double fail_x, double pass_x, PointResult fail_r) {
  while (std::abs(pass_x - fail_x) > spec.refine_rtol * std::abs(pass_x)) {
    const double mid = spec.axis.scale == Scale::Log && fail_x > 0.0
                           ? std::sqrt(fail_x * pass_x)
                           : 0.5 * (fail_x + pass_x);
    PointResult r = evaluate_point(spec, mid, noise, opts);
    if (r.pass()) {
      pass_x = mid;
    } else {
      fail_x = mid;
      fail_r = std::move(r);
    }
  }
  const GateVerdict& lim = fail_r.limiting();
  return {pass_x, false, lim.initial, lim.limiting_qubit()};
}

}  // namespace

SweepResult operating_range(const SweepSpec& spec, const NoiseConfig& noise,
                            const PointOptions& opts) {
  validate(opts.thresholds);
  validate(noise);
  SweepResult r;
  r.gate = spec.device.gate;
  r.fixed_field = spec.fixed_field;
  r.axis = axis_values(spec.axis);
  const std::size_t n = r.axis.size();
  r.points.resize(n);
  parallel_for(n, spec.workers,
               [&](std::size_t i) { r.points[i] = evaluate_point(spec, r.axis[i], noise, opts); });

  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < n; ++i) {
    if (!r.points[i].pass()) continue;
    if (!best || r.points[i].worst_margin() > r.points[*best].worst_margin()) best = i;
  }
  if (!best) return r;
  std::size_t lo = *best, hi = *best;
  while (lo > 0 && r.points[lo - 1].pass()) --lo;
  while (hi + 1 < n && r.points[hi + 1].pass()) ++hi;
  r.range = {lo, hi};

  auto bound_at = [&](std::size_t edge, std::optional<std::size_t> outside) -> RangeBound {
    if (!outside) return {r.axis[edge], true, std::nullopt, std::nullopt};
    if (!spec.refine) {
      const GateVerdict& lim = r.points[*outside].limiting();
      return {r.axis[edge], false, lim.initial, lim.limiting_qubit()};
    }
    return refine(spec, noise, opts, r.axis[*outside], r.axis[edge], r.points[*outside]);
  };
  std::vector<RangeBound> bounds(2);
  parallel_for(2, spec.workers, [&](std::size_t k) {
    bounds[k] = k == 0 ? bound_at(lo, lo > 0 ? std::optional<std::size_t>(lo - 1) : std::nullopt)
                       : bound_at(hi, hi + 1 < n ? std::optional<std::size_t>(hi + 1) : std::nullopt);
  });
  r.lower = bounds[0];
  r.upper = bounds[1];
  return r;
}

}  // namespace qdgate

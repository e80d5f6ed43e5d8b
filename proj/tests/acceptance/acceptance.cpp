// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
// Every tolerance is pinned below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qdgate/config.hpp"
#include "qdgate/gate_analysis.hpp"
#include "qdgate/harness.hpp"
#include "../fixtures.hpp"

using namespace qdgate;

namespace {

constexpr double kOracleTol = 1e-6;
constexpr double kOracleBudgetS = 60.0;
constexpr double kTraceTol = 1e-8;
constexpr double kHermTol = 1e-8;
constexpr double kEigTol = -1e-7;
constexpr double kRateRatioTol = 1e-12;
constexpr double kStationaryTol = 1e-6;
constexpr double kCnotFidelity = 0.99;
constexpr double kToffoliFidelity = 0.98;
constexpr double kFidelityBudgetS = 300.0;
constexpr double kFrameTol = 2e-2;
constexpr double kFrameBudgetS = 600.0;
constexpr double kCalibratedBc = 3.01;
constexpr double kCalibratedRel = 0.10;
constexpr double kMonotoneBudgetS = 600.0;

// Physicality over every run of this binary.
Diagnostics g_phys;

void fold(const Diagnostics& d) {
  g_phys.max_trace_error = std::max(g_phys.max_trace_error, d.max_trace_error);
  g_phys.max_hermiticity_residual = std::max(g_phys.max_hermiticity_residual, d.max_hermiticity_residual);
  g_phys.min_eigenvalue = std::min(g_phys.min_eigenvalue, d.min_eigenvalue);
}

void fold(const SweepResult& r) {
  for (const auto& p : r.points) fold(p.diagnostics);
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

DeviceConfig cnot(double bc, double bt, double j = 0.42, double bac = 4e-3) {
  DeviceConfig c;
  c.gate = Gate::Cnot;
  c.exchange = {j};
  c.static_fields = {bc, bt};
  c.drive_field = bac;
  c.g_factor = 2.0;
  return c;
}

DeviceConfig toffoli(double bcl, double grad, double j = 0.42, double bac = 4e-3) {
  DeviceConfig c;
  c.gate = Gate::Toffoli;
  c.exchange = {j, j};
  c.static_fields = fields_for_gradient(Gate::Toffoli, bcl, grad);
  c.drive_field = bac;
  c.g_factor = 2.0;
  return c;
}

SweepSpec row(Gate g, double fixed, SweepAxis axis, double j = 0.42, double bac = 4e-3) {
  SweepSpec s;
  s.device.gate = g;
  s.device.exchange = g == Gate::Cnot ? std::vector<double>{j} : std::vector<double>{j, j};
  s.device.drive_field = bac;
  s.device.g_factor = 2.0;
  s.fixed_field = fixed;
  s.axis = axis;
  return s;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string limit(const SweepResult& r, const std::optional<RangeBound>& b) {
  if (!b || b->open || !b->limiting_state) return "open";
  return basis_label(*b->limiting_state, qubit_count(r.gate)) + "/" +
         qubit_roles(r.gate)[*b->limiting_qubit];
}

// 1: integrator vs matrix exponential
Outcome oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<DeviceConfig> cfgs;
  for (int i = 0; i < 5; ++i) {
    const double bt = 0.5 + 0.5 * u(rng);
    cfgs.push_back(cnot(bt + 0.1 + 2.4 * u(rng), bt));
  }
  for (int i = 0; i < 3; ++i) cfgs.push_back(toffoli(0.1 + 0.2 * u(rng), 0.1 + 0.9 * u(rng)));

  double worst = 0.0;
  for (const auto& c0 : cfgs) {
    const DeviceConfig c = resolve_drive_frequency(c0);
    const Operator h = build_hamiltonian_rwa(c);
    const CollapseSet col = build_collapse_set(eigensystem(build_static_hamiltonian(c)), NoiseConfig{});
    const std::size_t d = h.dim();
    const auto rho0 = DensityMatrix::basis_state(static_cast<std::size_t>(u(rng) * d) % d, d);
    const double tf = flip_time(c);
    std::vector<double> times;
    for (int k = 1; k <= 10; ++k) times.push_back(tf * k / 10.0);
    const Trajectory tr = evolve(std::make_shared<const Liouvillian>(Liouvillian::build(h, col)), rho0, times);
    fold(tr.diagnostics);
    for (std::size_t k = 0; k < times.size(); ++k) {
      worst = std::max(worst, tr.states[k].op().max_abs_diff(expm_oracle(h, col, rho0, times[k]).op()));
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= kOracleTol && secs <= kOracleBudgetS,
          "max deviation " + fmt("%.2e", worst) + " over 8 configs x 10 times, " + fmt("%.1f", secs) + " s"};
}

// 3: detailed balance of the rates and the stationary state of one pair
Outcome detailed_balance() {
  std::mt19937_64 rng(77);
  const double tk = NoiseConfig{}.t_k;
  std::uniform_real_distribution<double> gap(0.0, 100.0 * tk);
  double worst_ratio = 0.0;
  for (int i = 0; i < 100; ++i) {
    double w = gap(rng);
    if (w == 0.0) w = 1e-3;
    const double boltz = std::exp(-w / tk);
    // a wide bath keeps both hyperfine branches out of underflow at any gap
    const double de = w < 3.0 ? NoiseConfig{}.delta_e_nuc : 100.0 * tk;
    const double hr = hyperfine_rate(-w, 1.0, de, tk) / hyperfine_rate(w, 1.0, de, tk);
    const double pr = phonon_rate(-w, w, 1.0, tk) / phonon_rate(w, w, 1.0, tk);
    worst_ratio = std::max({worst_ratio, std::abs(hr / boltz - 1.0), std::abs(pr / boltz - 1.0)});
  }

  // Single pair (j, k) of a low-field CNOT spectrum, H fixed, evolved to 50x
  // the slow rate from the lower level.
  const DeviceConfig c = cnot(0.02, 8e-3, 0.0042, 4e-5);
  const Operator h = build_static_hamiltonian(c);
  const EigenSystem eig = eigensystem(h);
  double worst_stat = 0.0;
  for (auto [lo, hi] : {std::pair<std::size_t, std::size_t>{0, 1}, {1, 2}, {0, 3}, {2, 3}}) {
    const double w = eig.gap(hi, lo);
    for (int channel = 0; channel < 2; ++channel) {
      double down = 0.0, up = 0.0;
      if (channel == 0) {
        down = hyperfine_rate(w, 1.0, 3.0, tk);
        up = hyperfine_rate(-w, 1.0, 3.0, tk);
      } else {
        down = phonon_rate(w, w, 1.0, tk);
        up = phonon_rate(-w, w, 1.0, tk);
        up /= down;  // normalize the fast rate to 1
        down = 1.0;
      }
      CollapseSet col;
      const Vector vl = eig.eigenvector(lo), vh = eig.eigenvector(hi);
      col.ops.push_back({std::sqrt(down) * Operator::outer(vl, vh), Channel::PhononPositive, lo, hi, down});
      col.ops.push_back({std::sqrt(up) * Operator::outer(vh, vl), Channel::PhononNegative, hi, lo, up});
      const auto rho0 = DensityMatrix::pure(vl);
      const double t_end = 50.0 / std::min(up, down);
      const Trajectory tr = evolve(h, col, rho0, t_end, {}, 2);
      fold(tr.diagnostics);
      const Matrix& r = tr.states.back().matrix();
      const double pl = (vl.adjoint() * r * vl)(0).real();
      const double ph = (vh.adjoint() * r * vh)(0).real();
      worst_stat = std::max(worst_stat, std::abs(ph / pl - std::exp(-w / tk)));
    }
  }
  return {worst_ratio <= kRateRatioTol && worst_stat <= kStationaryTol,
          "rate ratio rel. error " + fmt("%.1e", worst_ratio) + ", stationary ratio error " +
              fmt("%.1e", worst_stat)};
}

// 4
Outcome collapse_counts() {
  const DeviceConfig c = cnot(2.0, 1.0), t = toffoli(0.1, 0.5);
  const std::size_t n2 = build_collapse_set(eigensystem(build_static_hamiltonian(c)), NoiseConfig{}).size();
  const CollapseSet s3 = build_collapse_set(eigensystem(build_static_hamiltonian(t)), NoiseConfig{});
  bool per = true;
  for (auto ch : {Channel::HyperfinePositive, Channel::HyperfineNegative, Channel::PhononPositive,
                  Channel::PhononNegative}) {
    per = per && s3.count(ch) == 28;
  }
  return {n2 == 25 && s3.size() == 113 && per,
          std::to_string(n2) + " two-qubit, " + std::to_string(s3.size()) + " three-qubit operators"};
}

// 5
Outcome noise_free_truth_tables() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_c = 1.0, worst_t = 1.0;
  bool all_pass = true;
  for (auto [bc, bt] : {std::pair{2.0, 1.0}, {2.0, 0.75}, {2.0, 0.5}}) {
    const PointResult r = evaluate_config(cnot(bc, bt), NoiseConfig::disabled(), {});
    fold(r.diagnostics);
    all_pass = all_pass && r.pass();
    for (double f : r.fidelity) worst_c = std::min(worst_c, f);
  }
  for (double bcl : {0.1, 0.2, 0.3}) {
    const PointResult r = evaluate_config(toffoli(bcl, 0.5), NoiseConfig::disabled(), {});
    fold(r.diagnostics);
    all_pass = all_pass && r.pass();
    for (double f : r.fidelity) worst_t = std::min(worst_t, f);
  }
  const double secs = seconds_since(t0);
  return {worst_c >= kCnotFidelity && worst_t >= kToffoliFidelity && all_pass && secs <= kFidelityBudgetS,
          "min fidelity CNOT " + fmt("%.4f", worst_c) + ", Toffoli " + fmt("%.4f", worst_t) + ", " +
              fmt("%.1f", secs) + " s"};
}

// 6
Outcome frame_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  const DeviceConfig c = resolve_drive_frequency(cnot(1.5, 1.0));  // B_ac / dB = 0.008
  const double tf = flip_time(c);
  const auto times = uniform_times(tf, 400);
  const CollapseSet none;
  auto l = std::make_shared<const Liouvillian>(Liouvillian::build(build_hamiltonian_rwa(c), none));
  const LabHamiltonian lab(c);
  double worst = 0.0;
  for (std::size_t s = 0; s < 4; ++s) {
    const auto rho0 = DensityMatrix::basis_state(s, 4);
    const Trajectory a = evolve(l, rho0, times);
    const Trajectory b = evolve([&lab](double t) { return lab(t); }, none, rho0, times);
    fold(a.diagnostics);
    fold(b.diagnostics);
    for (std::size_t k = 0; k < times.size(); ++k) {
      for (std::size_t i = 0; i < 4; ++i) {
        worst = std::max(worst, std::abs(a.states[k].op()(i, i).real() - b.states[k].op()(i, i).real()));
      }
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= kFrameTol && secs <= kFrameBudgetS,
          "max population difference " + fmt("%.2e", worst) + ", " + fmt("%.1f", secs) + " s"};
}

// 7
Outcome calibrated_trend() {
  const SweepAxis hf{0.05, 3.5, 70, Scale::Linear};
  std::vector<double> upper;
  std::string detail = "upper B_C:";
  bool limits_ok = true;
  for (double bt : {1.0, 0.75, 0.5}) {
    const SweepResult r = operating_range(row(Gate::Cnot, bt, hf), NoiseConfig{}, {});
    fold(r);
    if (r.empty() || r.upper->open) {
      detail += " row " + fmt("%g", bt) + " has no closed upper bound;";
      upper.push_back(std::nan(""));
      limits_ok = false;
      continue;
    }
    upper.push_back(bt + r.upper->value);
    detail += " " + fmt("%.3f", bt + r.upper->value) + " (" + limit(r, r.upper) + ")";
    limits_ok = limits_ok && limit(r, r.upper) == "dd/control";
  }
  const bool trend = upper.size() == 3 && upper[0] < upper[1] && upper[1] < upper[2];
  const bool calibrated = std::abs(upper[0] - kCalibratedBc) <= kCalibratedRel * kCalibratedBc;

  const double lo = 5e-3, hi = 3e-2;
  const SweepAxis lf{lo, hi, points_per_decade(lo, hi, kDefaultPointsPerDecade), Scale::Log};
  const SweepResult low = operating_range(row(Gate::Cnot, 8e-3, lf, 0.0042, 4e-5), NoiseConfig{}, {});
  fold(low);
  std::string low_limit = low.empty() ? "empty" : limit(low, low.lower);
  const bool low_ok = !low.empty() && !low.lower->open && low.lower->limiting_state == 2;
  detail += "; low-field lower B_C " +
            (low.empty() ? std::string("-") : fmt("%.2f", 1e3 * (8e-3 + low.lower->value)) + " mT") +
            " (" + low_limit + ")";
  return {trend && calibrated && limits_ok && low_ok, detail};
}

// 8
Outcome cnot_contains_toffoli() {
  const SweepAxis axis{0.05, 3.5, 70, Scale::Linear};
  bool ok = true;
  std::string detail;
  for (double fixed : {0.1, 0.3}) {
    const SweepResult c = operating_range(row(Gate::Cnot, fixed, axis), NoiseConfig{}, {});
    const SweepResult t = operating_range(row(Gate::Toffoli, fixed, axis), NoiseConfig{}, {});
    fold(c);
    fold(t);
    if (c.empty()) {
      ok = false;
      detail += " fixed " + fmt("%g", fixed) + ": CNOT range empty;";
      continue;
    }
    const bool contains = t.empty() || (c.lower->value <= t.lower->value && c.upper->value >= t.upper->value &&
                                        (c.lower->value < t.lower->value || c.upper->value > t.upper->value));
    ok = ok && contains;
    detail += " fixed " + fmt("%g", fixed) + " T: CNOT [" + fmt("%.3f", c.lower->value) + ", " +
              fmt("%.3f", c.upper->value) + "] vs Toffoli " +
              (t.empty() ? std::string("empty")
                         : "[" + fmt("%.3f", t.lower->value) + ", " + fmt("%.3f", t.upper->value) + "]") +
              ";";
  }
  return {ok, "gradient ranges:" + detail};
}

// 9
Outcome monotonicity() {
  const auto t0 = std::chrono::steady_clock::now();
  struct Line {
    SweepSpec spec;
    const char* name;
  };
  std::vector<Line> lines{
      {row(Gate::Cnot, 1.0, {0.1, 3.5, 10, Scale::Linear}), "high field"},
      {row(Gate::Cnot, 8e-3, {5e-3, 3e-2, 10, Scale::Log}, 0.0042, 4e-5), "low field"},
  };
  bool ok = true;
  std::string detail;
  auto passing = [](const SweepResult& r) {
    std::vector<bool> p;
    for (const auto& pt : r.points) p.push_back(pt.pass());
    return p;
  };
  // b within a: every passing point of b passes in a and b's range sits inside a's
  auto nested = [&](const SweepResult& a, const SweepResult& b) {
    const auto pa = passing(a), pb = passing(b);
    for (std::size_t i = 0; i < pa.size(); ++i)
      if (pb[i] && !pa[i]) return false;
    if (b.empty()) return true;
    return !a.empty() && a.range->first <= b.range->first && a.range->second >= b.range->second;
  };
  auto count = [](const SweepResult& r) {
    return r.empty() ? 0 : r.range->second - r.range->first + 1;
  };
  for (auto& l : lines) {
    l.spec.refine = false;
    PointOptions base, loose;
    loose.thresholds = {0.7, 0.3};
    const SweepResult r0 = operating_range(l.spec, NoiseConfig{}, base);
    const SweepResult rl = operating_range(l.spec, NoiseConfig{}, loose);
    const SweepResult r10 = operating_range(l.spec, NoiseConfig{}.scaled(10.0), base);
    fold(r0);
    fold(rl);
    fold(r10);
    ok = ok && nested(rl, r0) && nested(r0, r10);
    detail += std::string(" ") + l.name + ": " + std::to_string(count(r0)) + " points, relaxed " +
              std::to_string(count(rl)) + ", noise x10 " + std::to_string(count(r10)) + ";";
  }
  const double secs = seconds_since(t0);
  return {ok && secs <= kMonotoneBudgetS, "range sizes:" + detail + " " + fmt("%.1f", secs) + " s"};
}

// 10
Outcome cli_contract() {
  std::size_t mismatched = 0, files = 0;
  for (const auto& [name, text] : test::golden_outputs()) {
    std::ifstream f(std::filesystem::path(QDGATE_GOLDEN_DIR) / name, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    ++files;
    if (!f || os.str() != text) ++mismatched;
  }
  std::mt19937_64 rng(4242);
  std::size_t round_trip_failures = 0;
  for (int i = 0; i < 100; ++i) {
    const RunSpec s = test::random_spec(rng);
    try {
      if (!(parse_config(render_config(s)) == s)) ++round_trip_failures;
    } catch (const std::exception&) {
      ++round_trip_failures;
    }
  }
  return {mismatched == 0 && round_trip_failures == 0,
          std::to_string(files - mismatched) + "/" + std::to_string(files) + " golden files match, " +
              std::to_string(100 - round_trip_failures) + "/100 specs round-trip"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  // physicality is reported last because it folds in every other run
  const std::vector<Criterion> criteria{
      {1, "oracle equivalence", oracle_equivalence},
      {3, "detailed balance", detailed_balance},
      {4, "collapse-set counting", collapse_counts},
      {5, "noise-free truth tables", noise_free_truth_tables},
      {6, "frame equivalence", frame_equivalence},
      {7, "calibrated trend", calibrated_trend},
      {8, "CNOT range contains Toffoli range", cnot_contains_toffoli},
      {9, "threshold/noise monotonicity", monotonicity},
      {10, "CLI contract", cli_contract},
  };
  std::vector<std::pair<int, std::string>> lines;
  bool all = true;
  bool aborted = false;
  auto report = [&](int id, const char* name, const Outcome& o) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%-4s %2d  ", o.pass ? "PASS" : "FAIL", id);
    lines.emplace_back(id, std::string(buf) + name + ": " + o.detail);
    std::printf("%s\n", lines.back().second.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  };
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
      aborted = aborted || dynamic_cast<const SolverError*>(&e) != nullptr;
    }
    report(c.id, c.name, o);
  }
  const bool phys = !aborted && g_phys.max_trace_error <= kTraceTol &&
                    g_phys.max_hermiticity_residual <= kHermTol && g_phys.min_eigenvalue >= kEigTol;
  report(2, "physicality",
         {phys, "max trace error " + fmt("%.1e", g_phys.max_trace_error) + ", max Hermiticity residual " +
                    fmt("%.1e", g_phys.max_hermiticity_residual) + ", min eigenvalue " +
                    fmt("%.1e", g_phys.min_eigenvalue)});

  std::sort(lines.begin(), lines.end());
  std::printf("\nsummary\n");
  for (const auto& l : lines) std::printf("%s\n", l.second.c_str());
  return all ? 0 : 1;
}

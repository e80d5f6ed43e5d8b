#pragma once

// Shared by the unit tests and the acceptance binary: random run specs and
// the synthetic results behind the golden files.

#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qdgate/config.hpp"
#include "qdgate/harness.hpp"

namespace qdgate::test {

inline RunSpec random_spec(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto pick = [&](int n) { return static_cast<int>(u(rng) * n) % n; };
  RunSpec s;
  s.mode = static_cast<Mode>(pick(3));
  s.device.gate = pick(2) ? Gate::Toffoli : Gate::Cnot;
  const std::size_t nq = qubit_count(s.device.gate);
  s.device.exchange.clear();
  for (std::size_t i = 0; i + 1 < nq; ++i) s.device.exchange.push_back(u(rng) * 0.5);
  s.device.drive_field = 1e-5 + u(rng) * 1e-2;
  s.device.g_factor = pick(2) ? 2.0 : kGaAsGFactor;
  if (pick(2)) s.device.drive_frequency = 1.0 + 100.0 * u(rng);
  s.noise.upsilon = u(rng) * 1e5;
  s.noise.phonon_p = u(rng) * 1e-15;
  s.noise.delta_e_nuc = 0.1 + u(rng);
  s.noise.t_k = 1.0 + 20 * u(rng);
  s.noise.t2_star_ns = 10.0 + 1e4 * u(rng);
  s.noise.hyperfine = pick(2);
  s.noise.phonon = pick(2);
  s.noise.dephasing = pick(2);
  s.noise.phonon_energy = pick(2) ? PhononEnergyMode::Gap : PhononEnergyMode::BareZeeman;
  s.noise.sense = pick(2) ? RelaxationSense::Literal : RelaxationSense::Thermal;
  s.thresholds = {0.6 + 0.3 * u(rng), 0.05 + 0.3 * u(rng)};
  s.solver.rtol = std::pow(10.0, -6 - 4 * u(rng));
  s.solver.atol = s.solver.rtol * 1e-2;
  s.solver.max_steps = 1000 + static_cast<std::size_t>(u(rng) * 1e6);
  s.workers = 1 + static_cast<unsigned>(pick(8));
  s.output_path = "out/run_" + std::to_string(pick(1000));
  if (s.mode == Mode::Simulate) {
    for (std::size_t q = 0; q < nq; ++q) s.device.static_fields.push_back(u(rng) * 3.0);
    s.simulate.initial_state = static_cast<std::size_t>(pick(1 << nq));
    s.simulate.frame = pick(2) ? Frame::Lab : Frame::Rwa;
    s.simulate.samples = 2 + static_cast<std::size_t>(pick(5000));
    if (pick(2)) s.simulate.t_end_ns = 0.1 + 100 * u(rng);
  } else {
    s.axis.scale = pick(2) ? Scale::Log : Scale::Linear;
    s.axis.start = 1e-4 + u(rng);
    s.axis.stop = s.axis.start * (1.5 + 10 * u(rng));
    s.axis.points = 2 + static_cast<std::size_t>(pick(200));
    const int nf = 1 + pick(3);
    for (int i = 0; i < nf; ++i) s.fixed_fields.push_back(u(rng) * 2.0);
    s.refine = pick(2);
  }
  return s;
}

inline DensityMatrix mix(std::initializer_list<std::pair<std::size_t, double>> w, std::size_t d) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (auto [i, p] : w) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = p;
  return DensityMatrix::from_operator(Operator(m));
}

inline PointResult point(Gate g, double grad, std::vector<std::vector<double>> p) {
  PointResult r;
  r.gradient = grad;
  for (std::size_t s = 0; s < p.size(); ++s) {
    r.verdicts.push_back(classify_populations(p[s], g, s, Thresholds{}));
  }
  return r;
}

inline DeviceConfig cnot_device() {
  DeviceConfig d;
  d.gate = Gate::Cnot;
  d.exchange = {0.42};
  d.drive_field = 4e-3;
  return d;
}

inline DeviceConfig toffoli_device() {
  DeviceConfig d;
  d.gate = Gate::Toffoli;
  d.exchange = {0.0042, 0.0042};
  d.drive_field = 4e-3;
  return d;
}

inline SweepResult closed_row() {
  SweepResult r;
  r.gate = Gate::Cnot;
  r.fixed_field = 1.0;
  r.axis = {0.1, 2.01};
  r.range = {0, 1};
  r.lower = RangeBound{0.1, false, 1, 1};
  r.upper = RangeBound{2.01, false, 3, 0};
  return r;
}

// (file name, rendered text) for every golden file.
inline std::vector<std::pair<std::string, std::string>> golden_outputs() {
  std::vector<std::pair<std::string, std::string>> out;

  Trajectory t;
  t.times = {0.0, ns_to_model(1.0), ns_to_model(2.5)};
  t.states = {mix({{0, 1.0}}, 4), mix({{0, 0.5}, {1, 0.5}}, 4), mix({{1, 0.75}, {3, 0.25}}, 4)};
  std::ostringstream traj;
  write_trajectory_csv(traj, t);
  out.emplace_back("trajectory.csv", traj.str());

  SweepResult sw;
  sw.gate = Gate::Cnot;
  sw.fixed_field = 1.0;
  sw.axis = {0.5, 1.0};
  sw.points = {point(Gate::Cnot, 0.5, {{0.99, 0.01}, {0.98, 0.97}, {0.02, 0.95}, {0.05, 0.03}}),
               point(Gate::Cnot, 1.0, {{0.9, 0.1}, {0.9, 0.9}, {0.1, 0.9}, {0.25, 0.1}})};
  std::ostringstream sweep;
  write_sweep_csv(sweep, sw);
  out.emplace_back("sweep.csv", sweep.str());

  SweepResult open_hi;
  open_hi.gate = Gate::Cnot;
  open_hi.fixed_field = 8e-3;
  open_hi.axis = {5e-3, 3e-2};
  open_hi.range = {0, 1};
  open_hi.lower = RangeBound{8.6e-3, false, 2, 0};
  open_hi.upper = RangeBound{3e-2, true, std::nullopt, std::nullopt};
  SweepResult empty;
  empty.gate = Gate::Cnot;
  empty.fixed_field = 0.5;
  const std::vector<SweepResult> rows{closed_row(), open_hi, empty};
  std::ostringstream csv;
  write_ranges_csv(csv, cnot_device(), rows);
  out.emplace_back("ranges.csv", csv.str());
  out.emplace_back("ranges_cnot.txt", format_range_table(cnot_device(), rows));

  SweepResult both;
  both.gate = Gate::Toffoli;
  both.fixed_field = 9e-3;
  both.axis = {1e-3, 2e-2};
  both.range = {0, 1};
  both.lower = RangeBound{1e-3, true, std::nullopt, std::nullopt};
  both.upper = RangeBound{2e-2, true, std::nullopt, std::nullopt};
  SweepResult t2;
  t2.gate = Gate::Toffoli;
  t2.fixed_field = 0.1;
  t2.axis = {0.1, 1.07};
  t2.range = {0, 1};
  t2.lower = RangeBound{0.1, true, std::nullopt, std::nullopt};
  t2.upper = RangeBound{1.07, false, 0, 2};
  out.emplace_back("ranges_toffoli.txt", format_range_table(toffoli_device(), {t2, both}));
  return out;
}

}  // namespace qdgate::test

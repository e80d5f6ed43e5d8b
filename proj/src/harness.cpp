#include "qdgate/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "qdgate/simd/kernels.hpp"

namespace qdgate {

std::string tool_version() { return QDGATE_VERSION; }

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

namespace {

std::string sig3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string format_energy(double uev) {
  if (uev != 0.0 && std::abs(uev) < 0.1) return sig3(uev * 1e3) + "neV";
  return sig3(uev) + "ueV";
}

std::string limit_label(const SweepResult& r, const std::optional<RangeBound>& b) {
  if (!b || b->open || !b->limiting_state) return "-";
  const std::size_t n = qubit_count(r.gate);
  return basis_label(*b->limiting_state, n) + "/" + qubit_roles(r.gate)[*b->limiting_qubit];
}

}  // namespace

std::string format_field(double tesla) {
  if (tesla != 0.0 && std::abs(tesla) < 0.1) return sig3(tesla * 1e3) + "mT";
  return sig3(tesla) + "T";
}

std::string format_field_range(const SweepResult& r, double base, double per_gradient) {
  if (r.empty()) return "empty";
  const double lo = base + per_gradient * r.lower->value;
  const double hi = base + per_gradient * r.upper->value;
  if (r.lower->open && r.upper->open) return format_field(lo) + "-" + format_field(hi) + "*";
  if (r.upper->open) return ">" + format_field(lo);
  if (r.lower->open) return "<" + format_field(hi);
  return format_field(lo) + "-" + format_field(hi);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const std::size_t n = traj.states.empty() ? 0 : traj.states.front().qubits();
  os << "time_ns";
  for (std::size_t q = 0; q < n; ++q) os << ",P_up_q" << q;
  os << ",trace_error\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    os << format_value(model_to_ns(traj.times[k]));
    for (double p : populations_up(traj.states[k])) os << ',' << format_value(p);
    os << ',' << format_value(traj.states[k].op().trace().real() - 1.0) << '\n';
  }
}

void write_sweep_csv(std::ostream& os, const SweepResult& sweep) {
  const std::size_t n = qubit_count(sweep.gate);
  const auto roles = qubit_roles(sweep.gate);
  os << "gradient_T,initial_state,qubit_role,P_up,verdict\n";
  for (const auto& pt : sweep.points) {
    for (const auto& v : pt.verdicts) {
      for (std::size_t q = 0; q < n; ++q) {
        os << format_value(pt.gradient) << ',' << basis_label(v.initial, n) << ',' << roles[q]
           << ',' << format_value(v.p_up[q]) << ',' << (v.margins[q] > 0.0 ? "pass" : "fail")
           << '\n';
      }
    }
  }
}

void write_ranges_csv(std::ostream& os, const DeviceConfig& device,
                      const std::vector<SweepResult>& rows) {
  os << "gate,b_ac_T,j12_ueV,j23_ueV,fixed_field_T,gradient_lo_T,gradient_hi_T,lower_open,"
        "upper_open,lower_limit,upper_limit\n";
  for (const auto& r : rows) {
    os << to_string(device.gate) << ',' << format_value(device.drive_field) << ','
       << format_value(device.exchange.at(0)) << ','
       << (device.exchange.size() > 1 ? format_value(device.exchange[1]) : std::string()) << ','
       << format_value(r.fixed_field) << ',';
    if (r.empty()) {
      os << ",,,,empty,empty\n";
      continue;
    }
    os << format_value(r.lower->value) << ',' << format_value(r.upper->value) << ','
       << (r.lower->open ? "true" : "false") << ',' << (r.upper->open ? "true" : "false") << ','
       << limit_label(r, r.lower) << ',' << limit_label(r, r.upper) << '\n';
  }
}

std::string format_range_table(const DeviceConfig& device, const std::vector<SweepResult>& rows) {
  const bool cnot = device.gate == Gate::Cnot;
  std::vector<std::vector<std::string>> cells;
  if (cnot) {
    cells.push_back({"B_ac, J", "B_T", "B_C", "low limit", "high limit"});
  } else {
    cells.push_back({"B_ac, J12, J23", "B_CL", "B_TC", "B_CR", "low limit", "high limit"});
  }
  std::string params = format_field(device.drive_field);
  for (double j : device.exchange) params += ", " + format_energy(j);
  for (const auto& r : rows) {
    std::vector<std::string> row{params, format_field(r.fixed_field),
                                 format_field_range(r, r.fixed_field, 1.0)};
    if (!cnot) row.push_back(format_field_range(r, r.fixed_field, 2.0));
    row.push_back(r.empty() ? "-" : limit_label(r, r.lower));
    row.push_back(r.empty() ? "-" : limit_label(r, r.upper));
    cells.push_back(std::move(row));
  }
  std::vector<std::size_t> width(cells.front().size(), 0);
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      os << row[c];
      if (c + 1 < row.size()) os << std::string(width[c] - row[c].size() + 2, ' ');
    }
    os << '\n';
  };
  line(cells.front());
  std::size_t total = 0;
  for (std::size_t w : width) total += w + 2;
  os << std::string(total - 2, '-') << '\n';
  for (std::size_t i = 1; i < cells.size(); ++i) line(cells[i]);
  bool star = false;
  for (const auto& r : rows) star = star || (!r.empty() && r.lower->open && r.upper->open);
  if (star) os << "* range reaches both ends of the sweep grid\n";
  return os.str();
}

std::string sweep_file_name(double fixed_field) {
  return "sweep_" + format_double(fixed_field) + "T.csv";
}

std::string render_manifest(const RunSpec& spec, const std::vector<std::string>& outputs) {
  std::ostringstream os;
  os << "# qdgate " << tool_version() << " run manifest\n";
  os << "# kernels: " << simd::to_string(simd::active().variant) << "\n";
  for (const auto& f : outputs) os << "# output: " << f << "\n";
  os << "\n" << render_config(spec);
  return os.str();
}

namespace {

namespace fs = std::filesystem;

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f << text;
  if (!f) throw Error("error writing " + path.string());
}

int simulate(const RunSpec& spec, const fs::path& dir, std::ostream& out,
             std::vector<std::string>& files, RunSpec& resolved) {
  const DeviceConfig cfg = resolve_drive_frequency(spec.device);
  resolved.device = cfg;
  for (const auto& w : validate(cfg)) out << "warning: " << w << "\n";
  const std::size_t n = qubit_count(cfg.gate);
  const std::size_t d = std::size_t{1} << n;

  const double t_flip = flip_time(cfg, spec.solver);
  const double t_end = spec.simulate.t_end_ns ? ns_to_model(*spec.simulate.t_end_ns) : t_flip;
  const auto times = uniform_times(t_end, spec.simulate.samples);
  const EigenSystem eig = eigensystem(build_static_hamiltonian(cfg));
  const CollapseSet collapse = build_collapse_set(eig, spec.noise, bare_zeeman_energies(cfg));
  const auto rho0 = DensityMatrix::basis_state(spec.simulate.initial_state, d);

  Trajectory traj;
  if (spec.simulate.frame == Frame::Rwa) {
    auto l = std::make_shared<const Liouvillian>(Liouvillian::build(build_hamiltonian_rwa(cfg), collapse));
    traj = evolve(l, rho0, times, spec.solver);
  } else {
    const LabHamiltonian h(cfg);
    traj = evolve([&h](double t) { return h(t); }, collapse, rho0, times, spec.solver);
  }

  std::ostringstream csv;
  write_trajectory_csv(csv, traj);
  write_file(dir / "trajectory.csv", csv.str());
  files.push_back("trajectory.csv");

  out << "gate " << to_string(cfg.gate) << ", initial state "
      << basis_label(spec.simulate.initial_state, n) << ", " << to_string(spec.simulate.frame)
      << " frame\n";
  out << "drive frequency " << format_value(*cfg.drive_frequency) << " ueV, flip time "
      << format_value(model_to_ns(t_flip)) << " ns\n";
  out << "collapse operators " << collapse.size() << ", integrator steps "
      << traj.diagnostics.steps << " (" << traj.diagnostics.rejected << " rejected)\n";
  out << "max trace error " << format_value(traj.diagnostics.max_trace_error)
      << ", min eigenvalue " << format_value(traj.diagnostics.min_eigenvalue) << "\n";
  const auto final_p = populations_up(traj.states.back());
  out << "final P_up:";
  for (std::size_t q = 0; q < n; ++q) out << ' ' << qubit_roles(cfg.gate)[q] << '=' << format_value(final_p[q]);
  out << "\n";
  if (t_end >= t_flip) {
    const GateVerdict v =
        classify(traj, t_flip, cfg.gate, spec.simulate.initial_state, spec.thresholds);
    out << "at flip time: expected " << basis_label(v.expected, n) << ", "
        << (v.pass ? "pass" : "fail") << "\n";
  }
  return 0;
}

std::vector<SweepResult> sweep_rows(const RunSpec& spec, bool refine) {
  std::vector<SweepResult> rows;
  PointOptions po{spec.solver, spec.thresholds};
  for (double fixed : spec.fixed_fields) {
    SweepSpec ss;
    ss.device = spec.device;
    ss.fixed_field = fixed;
    ss.axis = spec.axis;
    ss.refine = refine;
    ss.workers = spec.workers;
    rows.push_back(operating_range(ss, spec.noise, po));
  }
  return rows;
}

int sweep(const RunSpec& spec, const fs::path& dir, std::ostream& out,
          std::vector<std::string>& files) {
  const auto rows = sweep_rows(spec, false);
  for (const auto& r : rows) {
    std::ostringstream csv;
    write_sweep_csv(csv, r);
    const std::string name = sweep_file_name(r.fixed_field);
    write_file(dir / name, csv.str());
    files.push_back(name);
    out << name << ": " << r.points.size() << " gradient points, range "
        << (r.empty() ? std::string("empty")
                      : format_field(r.axis[r.range->first]) + " to " +
                            format_field(r.axis[r.range->second]) + " (gradient)")
        << "\n";
  }
  return 0;
}

int ranges(const RunSpec& spec, const fs::path& dir, std::ostream& out,
           std::vector<std::string>& files) {
  const auto rows = sweep_rows(spec, spec.refine);
  std::ostringstream csv;
  write_ranges_csv(csv, spec.device, rows);
  write_file(dir / "ranges.csv", csv.str());
  const std::string table = format_range_table(spec.device, rows);
  write_file(dir / "ranges.txt", table);
  files.push_back("ranges.csv");
  files.push_back("ranges.txt");
  out << table;
  return 0;
}

}  // namespace

int run(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  try {
    const fs::path dir(spec.output_path);
    fs::create_directories(dir);
    std::vector<std::string> files;
    RunSpec resolved = spec;
    int status = 0;
    switch (spec.mode) {
      case Mode::Simulate: status = simulate(spec, dir, out, files, resolved); break;
      case Mode::Sweep: status = sweep(spec, dir, out, files); break;
      case Mode::Ranges: status = ranges(spec, dir, out, files); break;
    }
    write_file(dir / "manifest.conf", render_manifest(resolved, files));
    return status;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace qdgate

#include "qdgate/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace qdgate {

std::string to_string(Mode m) {
  switch (m) {
    case Mode::Simulate: return "simulate";
    case Mode::Sweep: return "sweep";
    case Mode::Ranges: return "ranges";
  }
  return "?";
}

Mode parse_mode(std::string_view s) {
  if (s == "simulate") return Mode::Simulate;
  if (s == "sweep") return Mode::Sweep;
  if (s == "ranges") return Mode::Ranges;
  throw Error("unknown mode '" + std::string(s) + "' (simulate|sweep|ranges)");
}

std::string to_string(Frame f) { return f == Frame::Rwa ? "rwa" : "lab"; }

Frame parse_frame(std::string_view s) {
  if (s == "rwa") return Frame::Rwa;
  if (s == "lab") return Frame::Lab;
  throw Error("unknown frame '" + std::string(s) + "' (rwa|lab)");
}

ConfigError::ConfigError(std::string key, std::size_t line, const std::string& what)
    : Error((line ? "line " + std::to_string(line) + ": " : std::string()) +
            (key.empty() ? std::string() : "'" + key + "': ") + what),
      key_(std::move(key)),
      line_(line) {}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

const std::set<std::string, std::less<>> kKeys = {
    "mode",
    "device.gate", "device.j", "device.j12", "device.j23", "device.fields", "device.b_ac",
    "device.g", "device.drive_frequency",
    "noise.upsilon", "noise.phonon_p", "noise.delta_e_nuc", "noise.t_k", "noise.t2_star",
    "noise.hyperfine", "noise.phonon", "noise.dephasing", "noise.phonon_energy",
    "noise.relaxation_sense",
    "thresholds.upper", "thresholds.lower",
    "sweep.start", "sweep.stop", "sweep.points", "sweep.scale", "sweep.fixed_fields",
    "sweep.refine",
    "simulate.initial_state", "simulate.frame", "simulate.samples", "simulate.t_end",
    "solver.rtol", "solver.atol", "solver.max_steps",
    "run.workers",
    "output.path",
};

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

struct Entry {
  std::string value;
  std::size_t line;
};

class Table {
 public:
  explicit Table(std::string_view text) {
    std::size_t lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t nl = text.find('\n', pos);
      std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
      pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
      ++lineno;
      if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
      const std::string_view line = trim(raw);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) throw ConfigError("", lineno, "expected 'key = value'");
      const std::string key(trim(line.substr(0, eq)));
      const std::string value(trim(line.substr(eq + 1)));
      if (key.empty()) throw ConfigError("", lineno, "missing key");
      if (!kKeys.contains(key)) throw ConfigError(key, lineno, "unknown key");
      if (value.empty()) throw ConfigError(key, lineno, "missing value");
      if (auto it = entries_.find(key); it != entries_.end()) {
        throw ConfigError(key, lineno,
                          "duplicate key (first set on line " + std::to_string(it->second.line) + ")");
      }
      entries_[key] = {value, lineno};
    }
  }

  bool has(const std::string& key) const { return entries_.contains(key); }
  std::size_t line(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
  }
  const std::string& raw(const std::string& key) const { return entries_.at(key).value; }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError(key, line(key), what);
  }

  const std::string& require(const std::string& key, const std::string& why) const {
    if (!has(key)) throw ConfigError(key, 0, "missing required key (" + why + ")");
    return raw(key);
  }

  double number(const std::string& key) const { return to_number(key, raw(key)); }

  double to_number(const std::string& key, std::string_view s) const {
    double v = 0.0;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    if (!s.empty() && *b == '+') ++b;
    auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc() || res.ptr != e || b == e) fail(key, "expected a number, got '" + std::string(s) + "'");
    if (!std::isfinite(v)) fail(key, "value must be finite");
    return v;
  }

  std::vector<double> numbers(const std::string& key) const {
    std::vector<double> out;
    std::string_view s = raw(key);
    while (true) {
      const auto comma = s.find(',');
      out.push_back(to_number(key, trim(s.substr(0, comma))));
      if (comma == std::string_view::npos) break;
      s = s.substr(comma + 1);
    }
    return out;
  }

  std::size_t count(const std::string& key) const {
    const std::string& s = raw(key);
    std::size_t v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      fail(key, "expected a non-negative integer, got '" + s + "'");
    }
    return v;
  }

  bool boolean(const std::string& key) const {
    const std::string& s = raw(key);
    if (s == "true") return true;
    if (s == "false") return false;
    fail(key, "expected true or false, got '" + s + "'");
  }

  template <class F>
  auto parsed(const std::string& key, F&& f) const {
    try {
      return f(raw(key));
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      fail(key, e.what());
    }
  }

 private:
  std::map<std::string, Entry, std::less<>> entries_;
};

void positive(const Table& t, const std::string& key, double v) {
  if (!(v > 0.0)) t.fail(key, "must be > 0");
}

void non_negative(const Table& t, const std::string& key, double v) {
  if (!(v >= 0.0)) t.fail(key, "must be >= 0");
}

}  // namespace

RunSpec parse_config(std::string_view text, std::optional<Mode> mode) {
  const Table t(text);
  RunSpec s;

  if (t.has("mode")) {
    s.mode = t.parsed("mode", [](const std::string& v) { return parse_mode(v); });
    if (mode && *mode != s.mode) {
      t.fail("mode", "config says " + to_string(s.mode) + " but " + to_string(*mode) + " was requested");
    }
  } else if (mode) {
    s.mode = *mode;
  } else {
    throw ConfigError("mode", 0, "missing required key (no mode given on the command line)");
  }
  const bool simulate = s.mode == Mode::Simulate;

  // device
  auto& dev = s.device;
  t.require("device.gate", "gate species");
  dev.gate = t.parsed("device.gate", [](const std::string& v) { return parse_gate(v); });
  if (dev.gate == Gate::Cnot) {
    for (const char* k : {"device.j12", "device.j23"}) {
      if (t.has(k)) t.fail(k, "only valid for the toffoli gate (use device.j)");
    }
    t.require("device.j", "exchange coupling J in ueV");
    dev.exchange = {t.number("device.j")};
    non_negative(t, "device.j", dev.exchange[0]);
  } else {
    if (t.has("device.j")) t.fail("device.j", "only valid for the cnot gate (use device.j12, device.j23)");
    t.require("device.j12", "exchange coupling J12 in ueV");
    t.require("device.j23", "exchange coupling J23 in ueV");
    dev.exchange = {t.number("device.j12"), t.number("device.j23")};
    non_negative(t, "device.j12", dev.exchange[0]);
    non_negative(t, "device.j23", dev.exchange[1]);
  }
  const std::size_t nq = qubit_count(dev.gate);
  if (simulate) t.require("device.fields", "static fields in tesla, one per qubit");
  if (t.has("device.fields")) {
    dev.static_fields = t.numbers("device.fields");
    if (dev.static_fields.size() != nq) {
      t.fail("device.fields", to_string(dev.gate) + " needs " + std::to_string(nq) + " fields");
    }
  }
  t.require("device.b_ac", "drive amplitude in tesla");
  dev.drive_field = t.number("device.b_ac");
  positive(t, "device.b_ac", dev.drive_field);
  if (t.has("device.g")) {
    dev.g_factor = t.number("device.g");
    if (dev.g_factor == 0.0) t.fail("device.g", "must be non-zero");
  }
  if (t.has("device.drive_frequency") && t.raw("device.drive_frequency") != "auto") {
    dev.drive_frequency = t.number("device.drive_frequency");
    positive(t, "device.drive_frequency", *dev.drive_frequency);
  }
  if (!dev.static_fields.empty()) {
    try {
      validate(dev);
    } catch (const std::exception& e) {
      t.fail("device.fields", e.what());
    }
  }

  // noise
  auto& n = s.noise;
  auto num = [&](const char* key, double& dst, bool strict) {
    if (!t.has(key)) return;
    dst = t.number(key);
    strict ? positive(t, key, dst) : non_negative(t, key, dst);
  };
  num("noise.upsilon", n.upsilon, false);
  num("noise.phonon_p", n.phonon_p, false);
  num("noise.delta_e_nuc", n.delta_e_nuc, true);
  num("noise.t_k", n.t_k, true);
  num("noise.t2_star", n.t2_star_ns, true);
  if (t.has("noise.hyperfine")) n.hyperfine = t.boolean("noise.hyperfine");
  if (t.has("noise.phonon")) n.phonon = t.boolean("noise.phonon");
  if (t.has("noise.dephasing")) n.dephasing = t.boolean("noise.dephasing");
  if (t.has("noise.phonon_energy")) {
    n.phonon_energy = t.parsed("noise.phonon_energy",
                               [](const std::string& v) { return parse_phonon_energy_mode(v); });
  }
  if (t.has("noise.relaxation_sense")) {
    n.sense = t.parsed("noise.relaxation_sense",
                       [](const std::string& v) { return parse_relaxation_sense(v); });
  }

  // thresholds
  if (t.has("thresholds.upper")) s.thresholds.upper = t.number("thresholds.upper");
  if (t.has("thresholds.lower")) s.thresholds.lower = t.number("thresholds.lower");
  try {
    validate(s.thresholds);
  } catch (const std::exception& e) {
    t.fail(t.has("thresholds.lower") ? "thresholds.lower" : "thresholds.upper", e.what());
  }

  // sweep
  if (t.has("sweep.scale")) {
    s.axis.scale = t.parsed("sweep.scale", [](const std::string& v) { return parse_scale(v); });
  }
  if (t.has("sweep.refine")) s.refine = t.boolean("sweep.refine");
  if (!simulate) {
    t.require("sweep.start", "first gradient in tesla");
    t.require("sweep.stop", "last gradient in tesla");
    t.require("sweep.fixed_fields", "fixed field of each sweep line in tesla");
    s.axis.start = t.number("sweep.start");
    s.axis.stop = t.number("sweep.stop");
    if (s.axis.scale == Scale::Log) positive(t, "sweep.start", s.axis.start);
    if (!(s.axis.start < s.axis.stop)) t.fail("sweep.stop", "must be greater than sweep.start");
    if (t.has("sweep.points")) {
      s.axis.points = t.count("sweep.points");
      if (s.axis.points < 2) t.fail("sweep.points", "need at least 2 points");
    } else if (s.axis.scale == Scale::Log) {
      s.axis.points = points_per_decade(s.axis.start, s.axis.stop, kDefaultPointsPerDecade);
    } else {
      throw ConfigError("sweep.points", 0, "missing required key (linear axes have no default)");
    }
    s.fixed_fields = t.numbers("sweep.fixed_fields");
    for (double f : s.fixed_fields) non_negative(t, "sweep.fixed_fields", f);
    for (double f : s.fixed_fields) {
      DeviceConfig probe = dev;
      probe.static_fields = fields_for_gradient(dev.gate, f, s.axis.start);
      try {
        validate(probe);
      } catch (const std::exception& e) {
        t.fail("sweep.fixed_fields", e.what());
      }
    }
  } else {
    for (const char* k : {"sweep.start", "sweep.stop", "sweep.points", "sweep.fixed_fields"}) {
      if (t.has(k)) t.fail(k, "only valid in sweep and ranges modes");
    }
  }

  // simulate
  if (t.has("simulate.initial_state")) {
    s.simulate.initial_state = t.parsed("simulate.initial_state", [&](const std::string& v) {
      return parse_basis_label(v, nq);
    });
  }
  if (t.has("simulate.frame")) {
    s.simulate.frame = t.parsed("simulate.frame", [](const std::string& v) { return parse_frame(v); });
  }
  if (t.has("simulate.samples")) {
    s.simulate.samples = t.count("simulate.samples");
    if (s.simulate.samples < 2) t.fail("simulate.samples", "need at least 2 samples");
  }
  if (t.has("simulate.t_end") && t.raw("simulate.t_end") != "flip") {
    s.simulate.t_end_ns = t.number("simulate.t_end");
    positive(t, "simulate.t_end", *s.simulate.t_end_ns);
  }

  // solver / run / output
  if (t.has("solver.rtol")) {
    s.solver.rtol = t.number("solver.rtol");
    positive(t, "solver.rtol", s.solver.rtol);
  }
  if (t.has("solver.atol")) {
    s.solver.atol = t.number("solver.atol");
    positive(t, "solver.atol", s.solver.atol);
  }
  if (t.has("solver.max_steps")) {
    s.solver.max_steps = t.count("solver.max_steps");
    if (s.solver.max_steps == 0) t.fail("solver.max_steps", "must be > 0");
  }
  if (t.has("run.workers")) {
    const std::size_t w = t.count("run.workers");
    if (w == 0 || w > 1024) t.fail("run.workers", "must be in 1..1024");
    s.workers = static_cast<unsigned>(w);
  }
  if (t.has("output.path")) s.output_path = t.raw("output.path");
  return s;
}

RunSpec load_config(const std::string& path, std::optional<Mode> mode) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", 0, "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), mode);
}

std::string render_config(const RunSpec& s) {
  std::ostringstream o;
  auto list = [](const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_double(v[i]);
    return out;
  };
  auto boolean = [](bool b) { return b ? "true" : "false"; };
  const auto& d = s.device;
  o << "mode = " << to_string(s.mode) << "\n\n";
  o << "device.gate = " << to_string(d.gate) << "\n";
  if (d.gate == Gate::Cnot) {
    o << "device.j = " << format_double(d.exchange.at(0)) << "\n";
  } else {
    o << "device.j12 = " << format_double(d.exchange.at(0)) << "\n";
    o << "device.j23 = " << format_double(d.exchange.at(1)) << "\n";
  }
  if (!d.static_fields.empty()) o << "device.fields = " << list(d.static_fields) << "\n";
  o << "device.b_ac = " << format_double(d.drive_field) << "\n";
  o << "device.g = " << format_double(d.g_factor) << "\n";
  o << "device.drive_frequency = "
    << (d.drive_frequency ? format_double(*d.drive_frequency) : std::string("auto")) << "\n\n";

  const auto& n = s.noise;
  o << "noise.upsilon = " << format_double(n.upsilon) << "\n";
  o << "noise.phonon_p = " << format_double(n.phonon_p) << "\n";
  o << "noise.delta_e_nuc = " << format_double(n.delta_e_nuc) << "\n";
  o << "noise.t_k = " << format_double(n.t_k) << "\n";
  o << "noise.t2_star = " << format_double(n.t2_star_ns) << "\n";
  o << "noise.hyperfine = " << boolean(n.hyperfine) << "\n";
  o << "noise.phonon = " << boolean(n.phonon) << "\n";
  o << "noise.dephasing = " << boolean(n.dephasing) << "\n";
  o << "noise.phonon_energy = " << to_string(n.phonon_energy) << "\n";
  o << "noise.relaxation_sense = " << to_string(n.sense) << "\n\n";

  o << "thresholds.upper = " << format_double(s.thresholds.upper) << "\n";
  o << "thresholds.lower = " << format_double(s.thresholds.lower) << "\n\n";

  if (s.mode != Mode::Simulate) {
    o << "sweep.start = " << format_double(s.axis.start) << "\n";
    o << "sweep.stop = " << format_double(s.axis.stop) << "\n";
    o << "sweep.points = " << s.axis.points << "\n";
    o << "sweep.scale = " << to_string(s.axis.scale) << "\n";
    o << "sweep.fixed_fields = " << list(s.fixed_fields) << "\n";
    o << "sweep.refine = " << boolean(s.refine) << "\n\n";
  } else {
    const std::size_t nq = qubit_count(d.gate);
    o << "simulate.initial_state = " << basis_label(s.simulate.initial_state, nq) << "\n";
    o << "simulate.frame = " << to_string(s.simulate.frame) << "\n";
    o << "simulate.samples = " << s.simulate.samples << "\n";
    o << "simulate.t_end = "
      << (s.simulate.t_end_ns ? format_double(*s.simulate.t_end_ns) : std::string("flip")) << "\n\n";
  }

  o << "solver.rtol = " << format_double(s.solver.rtol) << "\n";
  o << "solver.atol = " << format_double(s.solver.atol) << "\n";
  o << "solver.max_steps = " << s.solver.max_steps << "\n\n";
  o << "run.workers = " << s.workers << "\n";
  o << "output.path = " << s.output_path << "\n";
  return o.str();
}

}  // namespace qdgate

#include "qdgate/device_model.hpp"

#include <cmath>
#include <sstream>

namespace qdgate {

std::string to_string(Gate g) { return g == Gate::Cnot ? "cnot" : "toffoli"; }

Gate parse_gate(std::string_view s) {
  if (s == "cnot" || s == "CNOT") return Gate::Cnot;
  if (s == "toffoli" || s == "TOFFOLI" || s == "ccnot") return Gate::Toffoli;
  throw Error("unknown gate '" + std::string(s) + "'");
}

std::size_t qubit_count(Gate g) { return g == Gate::Cnot ? 2 : 3; }

std::size_t target_qubit(Gate) { return 1; }

std::vector<std::size_t> control_qubits(Gate g) {
  return g == Gate::Cnot ? std::vector<std::size_t>{0} : std::vector<std::size_t>{0, 2};
}

std::vector<std::string> qubit_roles(Gate g) {
  if (g == Gate::Cnot) return {"control", "target"};
  return {"left_control", "target", "right_control"};
}

int drive_sense(Gate g) { return g == Gate::Cnot ? -1 : +1; }

namespace {

std::size_t exchange_count(Gate g) { return g == Gate::Cnot ? 1 : 2; }

// +1 when the gate's static Zeeman term is +E sz, -1 for -E sz.
double zeeman_sign(Gate g) { return g == Gate::Cnot ? 1.0 : -1.0; }

Operator heisenberg(std::size_t a, std::size_t b, std::size_t n) {
  Operator out = Operator::zero(std::size_t{1} << n);
  for (Axis ax : {Axis::X, Axis::Y, Axis::Z}) {
    out = out + embed_pauli(ax, a, n) * embed_pauli(ax, b, n);
  }
  return out;
}

Operator exchange_part(const DeviceConfig& cfg) {
  const std::size_t n = qubit_count(cfg.gate);
  Operator h = Operator::zero(std::size_t{1} << n);
  for (std::size_t i = 0; i + 1 < n; ++i) h = h + cfg.exchange[i] * heisenberg(i, i + 1, n);
  return h;
}

Operator sum_pauli(Axis ax, std::size_t n) {
  Operator out = Operator::zero(std::size_t{1} << n);
  for (std::size_t q = 0; q < n; ++q) out = out + embed_pauli(ax, q, n);
  return out;
}

double drive_energy(const DeviceConfig& cfg) {
  return field_to_energy(cfg.drive_field, std::abs(cfg.g_factor));
}

double signed_omega(const DeviceConfig& cfg) {
  if (!cfg.drive_frequency) {
    throw Error("drive frequency is unresolved ('auto'); call resolve_drive_frequency first");
  }
  return drive_sense(cfg.gate) * *cfg.drive_frequency;
}

void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw Error(std::string("DeviceConfig: ") + what + " is not finite");
}

}  // namespace

std::vector<std::string> validate(const DeviceConfig& cfg) {
  const std::size_t n = qubit_count(cfg.gate);
  if (cfg.exchange.size() != exchange_count(cfg.gate)) {
    throw Error("DeviceConfig: " + to_string(cfg.gate) + " needs " +
                std::to_string(exchange_count(cfg.gate)) + " exchange coupling(s)");
  }
  if (cfg.static_fields.size() != n) {
    throw Error("DeviceConfig: " + to_string(cfg.gate) + " needs " + std::to_string(n) +
                " static fields");
  }
  for (double j : cfg.exchange) {
    check_finite(j, "exchange");
    if (j < 0.0) throw Error("DeviceConfig: exchange coupling must be >= 0");
  }
  for (double b : cfg.static_fields) check_finite(b, "static field");
  check_finite(cfg.drive_field, "drive field");
  check_finite(cfg.g_factor, "g-factor");
  if (cfg.drive_field < 0.0) throw Error("DeviceConfig: drive field must be >= 0");
  if (cfg.drive_frequency) {
    check_finite(*cfg.drive_frequency, "drive frequency");
    if (*cfg.drive_frequency < 0.0) throw Error("DeviceConfig: drive frequency must be >= 0");
  }

  std::vector<std::string> warnings;
  const auto& b = cfg.static_fields;
  if (cfg.gate == Gate::Cnot && !(b[0] > b[1])) {
    warnings.emplace_back("CNOT field profile expects B_control > B_target");
  }
  if (cfg.gate == Gate::Toffoli && !(b[2] > b[1] && b[1] > b[0])) {
    warnings.emplace_back("Toffoli field profile expects B_CR > B_TC > B_CL");
  }
  return warnings;
}

double field_to_energy(double field_tesla, double g_factor) {
  return g_factor * constants::kBohrMagneton * field_tesla;
}

Operator build_static_hamiltonian(const DeviceConfig& cfg) {
  validate(cfg);
  const std::size_t n = qubit_count(cfg.gate);
  const double g = std::abs(cfg.g_factor);
  Operator h = exchange_part(cfg);
  for (std::size_t q = 0; q < n; ++q) {
    h = h + (zeeman_sign(cfg.gate) * field_to_energy(cfg.static_fields[q], g)) *
                embed_pauli(Axis::Z, q, n);
  }
  return h;
}

LabHamiltonian::LabHamiltonian(const DeviceConfig& cfg)
    : static_part_(build_static_hamiltonian(cfg)),
      x_part_((-drive_energy(cfg)) * sum_pauli(Axis::X, qubit_count(cfg.gate))),
      y_part_(drive_energy(cfg) * sum_pauli(Axis::Y, qubit_count(cfg.gate))),
      omega_(signed_omega(cfg)) {}

Operator LabHamiltonian::operator()(double t) const {
  return Operator(static_part_.matrix() + std::cos(omega_ * t) * x_part_.matrix() +
                  std::sin(omega_ * t) * y_part_.matrix());
}

Operator build_hamiltonian_lab(const DeviceConfig& cfg, double t) {
  return LabHamiltonian(cfg)(t);
}

Operator build_hamiltonian_rwa(const DeviceConfig& cfg) {
  validate(cfg);
  const std::size_t n = qubit_count(cfg.gate);
  const double g = std::abs(cfg.g_factor);
  const double frame_shift = 0.5 * signed_omega(cfg);
  Operator h = exchange_part(cfg);
  for (std::size_t q = 0; q < n; ++q) {
    const double zeeman = zeeman_sign(cfg.gate) * field_to_energy(cfg.static_fields[q], g);
    h = h + (zeeman + frame_shift) * embed_pauli(Axis::Z, q, n);
  }
  return h + (-drive_energy(cfg)) * sum_pauli(Axis::X, n);
}

double resonance_frequency(const EigenSystem& eig, std::size_t label_a, std::size_t label_b) {
  const auto a = eig.level_of(label_a);
  const auto b = eig.level_of(label_b);
  if (!a || !b) {
    throw Error("resonance_frequency: level '" +
                basis_label(a ? label_b : label_a, qubit_count_for_dim(eig.size())) +
                "' is not labeled (degenerate or strongly mixed spectrum)");
  }
  return std::abs(eig.energies[*a] - eig.energies[*b]);
}

std::pair<std::size_t, std::size_t> gate_transition(Gate g) {
  // all up -> target flipped; the target is qubit 1 for both gates.
  return g == Gate::Cnot ? std::pair<std::size_t, std::size_t>{0b00, 0b01}
                         : std::pair<std::size_t, std::size_t>{0b000, 0b010};
}

DeviceConfig resolve_drive_frequency(const DeviceConfig& cfg) {
  if (cfg.drive_frequency) return cfg;
  DeviceConfig out = cfg;
  const auto [a, b] = gate_transition(cfg.gate);
  out.drive_frequency = resonance_frequency(eigensystem(build_static_hamiltonian(cfg)), a, b);
  return out;
}

std::vector<double> bare_zeeman_energies(const DeviceConfig& cfg) {
  const std::size_t n = qubit_count(cfg.gate);
  const double g = std::abs(cfg.g_factor);
  std::vector<double> out(std::size_t{1} << n, 0.0);
  for (std::size_t s = 0; s < out.size(); ++s) {
    for (std::size_t q = 0; q < n; ++q) {
      const double e = zeeman_sign(cfg.gate) * field_to_energy(cfg.static_fields[q], g);
      out[s] += qubit_is_up(s, q, n) ? e : -e;
    }
  }
  return out;
}

std::vector<double> fields_for_gradient(Gate g, double fixed_field, double gradient) {
  if (g == Gate::Cnot) return {fixed_field + gradient, fixed_field};
  return {fixed_field, fixed_field + gradient, fixed_field + 2.0 * gradient};
}

}  // namespace qdgate

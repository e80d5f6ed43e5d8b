#pragma once

// Spin-qubit device Hamiltonians.
//
// Units: energies in ueV, fields in tesla, and hbar = 1, so one model time
// unit is hbar/ueV = 0.6582120 ns. Spin operators are Pauli matrices
// (eigenvalues +-1), so a single spin in field B has a Zeeman gap of
// 2*g*mu_B*B.
//
// CNOT (2 qubits, order [control, target]):
//   H = J sigma1.sigma2 + E1 s1z + E2 s2z
//       - Ebac (cos(wt)(s1x + s2x) - sin(wt)(s1y + s2y))
// Toffoli (3 qubits, order [left control, center target, right control]):
//   H = J12 sigma1.sigma2 + J23 sigma2.sigma3 - E1 s1z - E2 s2z - E3 s3z
//       - Ebac (cos(wt) sum six - sin(wt) sum siy)
// with Ei = |g| mu_B Biz and Ebac = |g| mu_B B_ac. The Zeeman signs differ
// between the two gates and are kept as written.
//
// The drive is circularly polarized. It flips a spin only when it rotates in
// the same sense as that spin's Larmor precession, which for a Zeeman term
// +E sz means w < 0. The signed angular frequency used in H is therefore
// drive_sense(gate) * drive_frequency, where drive_frequency is the (positive)
// transition energy.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qdgate/quantum_core.hpp"

namespace qdgate {

namespace constants {
inline constexpr double kBohrMagneton = 57.883818;  // ueV / T
inline constexpr double kHbar = 0.6582120;          // ueV * ns
}  // namespace constants

inline double ns_to_model(double ns) { return ns / constants::kHbar; }
inline double model_to_ns(double t) { return t * constants::kHbar; }

enum class Gate { Cnot, Toffoli };

std::string to_string(Gate g);
Gate parse_gate(std::string_view s);
std::size_t qubit_count(Gate g);
std::size_t target_qubit(Gate g);
std::vector<std::size_t> control_qubits(Gate g);
/// Role names per qubit: {"control","target"} or {"left_control","target","right_control"}.
std::vector<std::string> qubit_roles(Gate g);
/// +1 or -1: sign of the angular frequency that co-rotates with the target spin.
int drive_sense(Gate g);

struct DeviceConfig {
  Gate gate = Gate::Cnot;
  std::vector<double> exchange;       // ueV: {J} or {J12, J23}
  std::vector<double> static_fields;  // T, one per qubit
  double drive_field = 0.0;           // T
  double g_factor = 2.0;
  std::optional<double> drive_frequency;  // ueV; nullopt means "auto"

  bool operator==(const DeviceConfig&) const = default;
};

inline constexpr double kGaAsGFactor = -0.44;

/// Throws on invalid configs; returns human-readable warnings for field
/// profiles that do not match the expected gradient geometry.
std::vector<std::string> validate(const DeviceConfig& cfg);

/// g * mu_B * B in ueV.
double field_to_energy(double field_tesla, double g_factor);

/// Static (drive-off) lab-frame Hamiltonian.
Operator build_static_hamiltonian(const DeviceConfig& cfg);
Operator build_hamiltonian_lab(const DeviceConfig& cfg, double t);
/// Time-independent Hamiltonian in the frame rotating with the drive.
Operator build_hamiltonian_rwa(const DeviceConfig& cfg);

/// Callable lab-frame H(t) with the static and drive parts precomputed.
class LabHamiltonian {
 public:
  explicit LabHamiltonian(const DeviceConfig& cfg);
  Operator operator()(double t) const;
  std::size_t dim() const { return static_part_.dim(); }

 private:
  Operator static_part_;
  Operator x_part_;
  Operator y_part_;
  double omega_ = 0.0;
};

/// |w_a - w_b| for the levels carrying basis labels a and b.
double resonance_frequency(const EigenSystem& eig, std::size_t label_a, std::size_t label_b);

/// The transition the drive is tuned to: target flip with all controls up.
std::pair<std::size_t, std::size_t> gate_transition(Gate g);

/// Copy of cfg with drive_frequency resolved from the drive-off spectrum when
/// it is "auto".
DeviceConfig resolve_drive_frequency(const DeviceConfig& cfg);

/// Diagonal Zeeman energy of every computational basis state.
std::vector<double> bare_zeeman_energies(const DeviceConfig& cfg);

/// Fields for a gradient sweep point. CNOT: [fixed + gradient, fixed]
/// (fixed = target field). Toffoli: [fixed, fixed + gradient, fixed + 2 gradient]
/// (fixed = left-control field).
std::vector<double> fields_for_gradient(Gate g, double fixed_field, double gradient);

}  // namespace qdgate

#pragma once

// Relaxation and dephasing channels.
//
// Every ordered pair of eigenlevels (j, k) gets a rank-1 collapse operator
// sqrt(rate) |w_j><w_k| per enabled relaxation channel. The rate is a function
// of a signed gap x:
//   hyperfine  x > 0: U exp(-x^2 / (2 dE_nuc^2))
//              x < 0: U exp(-x^2 / (2 dE_nuc^2) - |x| / T_k)
//   phonon     P |x^3 E^2 / (1 - exp(-x / T_k))|
// Operators evaluated with x > 0 belong to the "positive" channels and x < 0
// to the "negative" channels; each pair obeys detailed balance,
// rate(-|x|) / rate(|x|) = exp(-|x| / T_k).
//
// RelaxationSense::Literal uses x = w_j - w_k for |w_j><w_k|, so the fast
// branch promotes population upward in energy. RelaxationSense::Thermal uses
// x = w_k - w_j, which relaxes toward the thermal state.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qdgate/quantum_core.hpp"

namespace qdgate {

enum class RelaxationSense { Literal, Thermal };
enum class PhononEnergyMode { Gap, BareZeeman };

std::string to_string(RelaxationSense s);
std::string to_string(PhononEnergyMode m);
RelaxationSense parse_relaxation_sense(std::string_view s);
PhononEnergyMode parse_phonon_energy_mode(std::string_view s);

/// Rate constants fitted once against reference CNOT operating ranges (see
/// README, "Calibration"). Model units: 1/time for upsilon, 1/(time ueV^5)
/// for phonon_p, time = hbar/ueV.
namespace calibration {
inline constexpr double kUpsilon = 4.0e4;
inline constexpr double kPhononP = 8.5e-17;
}  // namespace calibration

struct NoiseConfig {
  double upsilon = calibration::kUpsilon;
  double phonon_p = calibration::kPhononP;
  double delta_e_nuc = 0.3;  // ueV
  double t_k = 10.0;         // ueV
  double t2_star_ns = 1000.0;
  bool hyperfine = true;
  bool phonon = true;
  bool dephasing = true;
  PhononEnergyMode phonon_energy = PhononEnergyMode::Gap;
  RelaxationSense sense = RelaxationSense::Literal;

  bool operator==(const NoiseConfig&) const = default;

  static NoiseConfig disabled();
  /// Copy with upsilon and phonon_p multiplied by `factor`.
  NoiseConfig scaled(double factor) const;
};

void validate(const NoiseConfig& noise);

/// Rates below this are treated as exactly zero.
inline constexpr double kRateFloor = 1e-30;

double hyperfine_rate_positive(double omega, double upsilon, double delta_e_nuc);
double hyperfine_rate_negative(double omega, double upsilon, double delta_e_nuc, double t_k);
/// Signed-gap hyperfine rate: positive branch for x > 0, negative for x < 0.
double hyperfine_rate(double x, double upsilon, double delta_e_nuc, double t_k);
double phonon_rate(double x, double energy, double phonon_p, double t_k);

/// sqrt(1/(2 T2*)) sz x ... x sz, with T2* in model time units.
Operator dephasing_operator(std::size_t n_qubits, double t2_star);

enum class Channel { HyperfinePositive, HyperfineNegative, PhononPositive, PhononNegative, Dephasing };
std::string to_string(Channel c);

struct CollapseOperator {
  Operator op;
  Channel channel;
  std::size_t to = 0;    // eigen-index j of |w_j><w_k|
  std::size_t from = 0;  // eigen-index k
  double rate = 0.0;
};

struct CollapseSet {
  std::vector<CollapseOperator> ops;

  std::size_t size() const { return ops.size(); }
  bool empty() const { return ops.empty(); }
  std::size_t count(Channel c) const;
  /// Sum of rates over one channel.
  double total_rate(Channel c) const;
};

/// Collapse operators built from the eigenvectors of `eig`. `bare_zeeman`
/// (indexed by computational basis state) is required only for
/// PhononEnergyMode::BareZeeman.
CollapseSet build_collapse_set(const EigenSystem& eig, const NoiseConfig& noise,
                               std::span<const double> bare_zeeman = {});

}  // namespace qdgate

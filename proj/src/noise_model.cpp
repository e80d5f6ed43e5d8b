#include "qdgate/noise_model.hpp"

#include <cmath>

#include "qdgate/device_model.hpp"

namespace qdgate {

std::string to_string(RelaxationSense s) {
  return s == RelaxationSense::Literal ? "literal" : "thermal";
}

std::string to_string(PhononEnergyMode m) {
  return m == PhononEnergyMode::Gap ? "gap" : "bare_zeeman";
}

RelaxationSense parse_relaxation_sense(std::string_view s) {
  if (s == "literal") return RelaxationSense::Literal;
  if (s == "thermal") return RelaxationSense::Thermal;
  throw Error("unknown relaxation sense '" + std::string(s) + "' (literal|thermal)");
}

PhononEnergyMode parse_phonon_energy_mode(std::string_view s) {
  if (s == "gap") return PhononEnergyMode::Gap;
  if (s == "bare_zeeman") return PhononEnergyMode::BareZeeman;
  throw Error("unknown phonon energy mode '" + std::string(s) + "' (gap|bare_zeeman)");
}

std::string to_string(Channel c) {
  switch (c) {
    case Channel::HyperfinePositive: return "hyperfine+";
    case Channel::HyperfineNegative: return "hyperfine-";
    case Channel::PhononPositive: return "phonon+";
    case Channel::PhononNegative: return "phonon-";
    case Channel::Dephasing: return "dephasing";
  }
  return "?";
}

NoiseConfig NoiseConfig::disabled() {
  NoiseConfig n;
  n.hyperfine = n.phonon = n.dephasing = false;
  return n;
}

NoiseConfig NoiseConfig::scaled(double factor) const {
  NoiseConfig n = *this;
  n.upsilon *= factor;
  n.phonon_p *= factor;
  return n;
}

void validate(const NoiseConfig& n) {
  auto check = [](bool ok, const char* what) {
    if (!ok) throw Error(std::string("NoiseConfig: ") + what);
  };
  check(std::isfinite(n.upsilon) && n.upsilon >= 0.0, "upsilon must be >= 0");
  check(std::isfinite(n.phonon_p) && n.phonon_p >= 0.0, "phonon_p must be >= 0");
  check(std::isfinite(n.delta_e_nuc) && n.delta_e_nuc > 0.0, "delta_e_nuc must be > 0");
  check(std::isfinite(n.t_k) && n.t_k > 0.0, "t_k must be > 0");
  check(std::isfinite(n.t2_star_ns) && n.t2_star_ns > 0.0, "t2_star must be > 0");
}

namespace {

double floor_rate(double r) { return r < kRateFloor ? 0.0 : r; }

void require_positive_gap(double omega, const char* fn) {
  if (!(omega > 0.0)) throw Error(std::string(fn) + ": gap must be > 0");
}

}  // namespace

double hyperfine_rate_positive(double omega, double upsilon, double delta_e_nuc) {
  require_positive_gap(omega, "hyperfine_rate_positive");
  return upsilon * std::exp(-omega * omega / (2.0 * delta_e_nuc * delta_e_nuc));
}

double hyperfine_rate_negative(double omega, double upsilon, double delta_e_nuc, double t_k) {
  require_positive_gap(omega, "hyperfine_rate_negative");
  return upsilon * std::exp(-omega * omega / (2.0 * delta_e_nuc * delta_e_nuc) - omega / t_k);
}

double hyperfine_rate(double x, double upsilon, double delta_e_nuc, double t_k) {
  if (x == 0.0) throw Error("hyperfine_rate: zero gap");
  return x > 0.0 ? hyperfine_rate_positive(x, upsilon, delta_e_nuc)
                 : hyperfine_rate_negative(-x, upsilon, delta_e_nuc, t_k);
}

double phonon_rate(double x, double energy, double phonon_p, double t_k) {
  if (x == 0.0) throw Error("phonon_rate: zero gap (formula is singular)");
  // 1 - exp(-x/T) without cancellation for small |x|.
  const double denom = -std::expm1(-x / t_k);
  return phonon_p * std::abs(x * x * x * energy * energy / denom);
}

Operator dephasing_operator(std::size_t n_qubits, double t2_star) {
  if (n_qubits != 2 && n_qubits != 3) {
    throw Error("dephasing_operator: unsupported qubit count " + std::to_string(n_qubits));
  }
  if (!(t2_star > 0.0)) throw Error("dephasing_operator: T2* must be > 0");
  Operator z = pauli(Axis::Z);
  for (std::size_t q = 1; q < n_qubits; ++q) z = kron(z, pauli(Axis::Z));
  return std::sqrt(1.0 / (2.0 * t2_star)) * z;
}

std::size_t CollapseSet::count(Channel c) const {
  std::size_t n = 0;
  for (const auto& op : ops) n += op.channel == c ? 1 : 0;
  return n;
}

double CollapseSet::total_rate(Channel c) const {
  double r = 0.0;
  for (const auto& op : ops) r += op.channel == c ? op.rate : 0.0;
  return r;
}

CollapseSet build_collapse_set(const EigenSystem& eig, const NoiseConfig& noise,
                               std::span<const double> bare_zeeman) {
  validate(noise);
  CollapseSet out;
  const std::size_t d = eig.size();
  const bool relax = noise.hyperfine || noise.phonon;
  if (relax && !eig.nondegenerate()) {
    throw Error("build_collapse_set: degenerate spectrum");
  }
  const bool bare = noise.phonon && noise.phonon_energy == PhononEnergyMode::BareZeeman;
  if (bare) {
    if (bare_zeeman.size() != d) {
      throw Error("build_collapse_set: bare Zeeman energies required for bare_zeeman mode");
    }
    if (!eig.fully_labeled()) {
      throw Error("build_collapse_set: bare_zeeman mode needs a fully labeled spectrum");
    }
  }
  const double sense = noise.sense == RelaxationSense::Literal ? 1.0 : -1.0;

  auto emit = [&](Channel ch, std::size_t j, std::size_t k, double rate) {
    rate = floor_rate(rate);
    const Vector vj = eig.eigenvector(j);
    const Vector vk = eig.eigenvector(k);
    out.ops.push_back({std::sqrt(rate) * Operator::outer(vj, vk), ch, j, k, rate});
  };

  if (relax) {
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t k = 0; k < d; ++k) {
        if (j == k) continue;
        const double x = sense * eig.gap(j, k);
        const bool positive = x > 0.0;
        if (noise.hyperfine) {
          emit(positive ? Channel::HyperfinePositive : Channel::HyperfineNegative, j, k,
               hyperfine_rate(x, noise.upsilon, noise.delta_e_nuc, noise.t_k));
        }
        if (noise.phonon) {
          const double energy =
              bare ? bare_zeeman[*eig.labels[j]] - bare_zeeman[*eig.labels[k]] : eig.gap(j, k);
          emit(positive ? Channel::PhononPositive : Channel::PhononNegative, j, k,
               phonon_rate(x, energy, noise.phonon_p, noise.t_k));
        }
      }
    }
  }
  if (noise.dephasing) {
    const double t2 = ns_to_model(noise.t2_star_ns);
    const std::size_t n = qubit_count_for_dim(d);
    out.ops.push_back({dephasing_operator(n, t2), Channel::Dephasing, 0, 0, 1.0 / (2.0 * t2)});
  }
  return out;
}

}  // namespace qdgate

// Fits the two free rate constants against the CNOT operating ranges:
//   P   so that the B_T = 1 T row (B_ac = 4 mT, J = 0.42 ueV) ends at B_C = 3.01 T
//   Ups so that the B_T = 8 mT row (B_ac = 0.04 mT, J = 4.2 neV) starts as close
//       to B_C = 16.60 mT as possible while the limit there stays du/control
// Prints the fitted values; they are copied into noise_model.hpp by hand.

#include <cmath>
#include <cstdio>
#include <iostream>

#include "qdgate/gate_analysis.hpp"

using namespace qdgate;

namespace {

SweepSpec cnot_row(double b_ac, double j, double b_t, SweepAxis axis) {
  SweepSpec s;
  s.device.gate = Gate::Cnot;
  s.device.exchange = {j};
  s.device.drive_field = b_ac;
  s.device.g_factor = 2.0;
  s.fixed_field = b_t;
  s.axis = axis;
  s.refine_rtol = 1e-4;
  return s;
}

}  // namespace

int main() {
  const PointOptions po;
  NoiseConfig noise;

  // P: larger P lowers the upper bound.
  {
    const SweepSpec row = cnot_row(4e-3, 0.42, 1.0, {1.6, 2.5, 10, Scale::Linear});
    double lo = std::log(1e-18), hi = std::log(1e-15);
    for (int it = 0; it < 30 && hi - lo > 1e-4; ++it) {
      noise.phonon_p = std::exp(0.5 * (lo + hi));
      const SweepResult r = operating_range(row, noise, po);
      const double bc = r.empty() ? 0.0 : row.fixed_field + r.upper->value;
      std::printf("P = %.6e  upper B_C = %.5f T\n", noise.phonon_p, bc);
      (bc > 3.01 ? lo : hi) = std::log(noise.phonon_p);
    }
    noise.phonon_p = std::exp(0.5 * (lo + hi));
  }

  // Upsilon: larger Ups raises the lower bound until the target-gap channel
  // takes over and the range collapses.
  {
    const SweepSpec row = cnot_row(4e-5, 0.0042, 8e-3, {5e-3, 3e-2, 16, Scale::Log});
    const double target = 16.60e-3;
    double lo = std::log(1e3), hi = std::log(1e6);
    for (int it = 0; it < 30 && hi - lo > 1e-3; ++it) {
      noise.upsilon = std::exp(0.5 * (lo + hi));
      const SweepResult r = operating_range(row, noise, po);
      bool ok = !r.empty() && !r.lower->open && r.lower->limiting_state == 2 &&
                r.lower->limiting_qubit == 0;
      const double bc = ok ? row.fixed_field + r.lower->value : 0.0;
      ok = ok && bc <= target;
      std::printf("Ups = %.6e  lower B_C = %.5f mT  %s\n", noise.upsilon, bc * 1e3,
                  ok ? "du/control" : "rejected");
      (ok ? lo : hi) = std::log(noise.upsilon);
    }
    noise.upsilon = std::exp(lo);
  }

  std::printf("\nkUpsilon = %.4e\nkPhononP = %.4e\n", noise.upsilon, noise.phonon_p);
  return 0;
}

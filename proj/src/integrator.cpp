#include "qdgate/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qdgate/simd/kernels.hpp"

namespace qdgate {

namespace {

// Dormand & Prince (1980), RK5(4)7M.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 5.0;

// out = y + h * sum(coef[i] * k[i]) over the listed stages.
void combine(std::span<const double> y, double h, std::initializer_list<double> coefs,
             const std::vector<std::vector<double>>& k, std::vector<double>& out) {
  std::copy(y.begin(), y.end(), out.begin());
  std::size_t s = 0;
  for (double c : coefs) {
    if (c != 0.0) simd::axpy(h * c, k[s].data(), out.data(), out.size());
    ++s;
  }
}

// Stages k[1..6] are computed from k[0] = f(t, y); ynew and k[6] = f(t+h, ynew)
// on return. err (if non-empty) receives the embedded error vector.
void dp_step(const DormandPrince45::Rhs& rhs, double t, std::span<const double> y, double h,
             std::vector<std::vector<double>>& k, std::vector<double>& ytmp,
             std::vector<double>& ynew, std::span<double> err) {
  combine(y, h, {a21}, k, ytmp);
  rhs(t + c2 * h, ytmp, k[1]);
  combine(y, h, {a31, a32}, k, ytmp);
  rhs(t + c3 * h, ytmp, k[2]);
  combine(y, h, {a41, a42, a43}, k, ytmp);
  rhs(t + c4 * h, ytmp, k[3]);
  combine(y, h, {a51, a52, a53, a54}, k, ytmp);
  rhs(t + c5 * h, ytmp, k[4]);
  combine(y, h, {a61, a62, a63, a64, a65}, k, ytmp);
  rhs(t + h, ytmp, k[5]);
  combine(y, h, {b1, 0.0, b3, b4, b5, b6}, k, ynew);
  rhs(t + h, ynew, k[6]);
  if (!err.empty()) {
    std::fill(err.begin(), err.end(), 0.0);
    const double ec[] = {e1, 0.0, e3, e4, e5, e6, e7};
    for (std::size_t s = 0; s < 7; ++s) {
      if (ec[s] != 0.0) simd::axpy(h * ec[s], k[s].data(), err.data(), err.size());
    }
  }
}

double scaled_norm(std::span<const double> e, std::span<const double> y0,
                   std::span<const double> y1, const SolverOptions& o) {
  double acc = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double sc = o.atol + o.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double r = e[i] / sc;
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(e.size()));
}

}  // namespace

void validate(const SolverOptions& o) {
  if (!(o.rtol > 0.0) || !(o.atol > 0.0)) throw SolverError("solver tolerances must be > 0");
  if (o.max_steps == 0) throw SolverError("solver max_steps must be > 0");
}

DormandPrince45::DormandPrince45(Rhs rhs, std::vector<double> y0, double t0, SolverOptions opts)
    : rhs_(std::move(rhs)), opts_(opts), t_(t0), y_(std::move(y0)) {
  validate(opts_);
  const std::size_t n = y_.size();
  k_.assign(7, std::vector<double>(n, 0.0));
  ytmp_.resize(n);
  ynew_.resize(n);
  err_.resize(n);
  k1_.resize(n);
  rhs_(t_, y_, k1_);
}

double DormandPrince45::initial_step(double t_end) {
  const std::size_t n = y_.size();
  std::vector<double> zero(n, 0.0);
  const double d0 = scaled_norm(y_, y_, zero, opts_);
  const double d1 = scaled_norm(k1_, y_, zero, opts_);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, t_end - t_);
  std::vector<double> y1(n), f1(n);
  for (std::size_t i = 0; i < n; ++i) y1[i] = y_[i] + h0 * k1_[i];
  rhs_(t_ + h0, y1, f1);
  for (std::size_t i = 0; i < n; ++i) f1[i] -= k1_[i];
  const double d2 = scaled_norm(f1, y_, zero, opts_) / h0;
  const double h1 = std::max(d1, d2) <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                              : std::pow(0.01 / std::max(d1, d2), 1.0 / 5.0);
  return std::min(100.0 * h0, h1);
}

void DormandPrince45::advance_to(double t_target) {
  if (t_target < t_) throw SolverError("advance_to: target time is in the past");
  if (t_target == t_) return;
  if (h_ <= 0.0) h_ = initial_step(t_target);

  k_[0] = k1_;
  while (t_ < t_target) {
    if (accepted_ + rejected_ >= opts_.max_steps) {
      std::ostringstream os;
      os << "integrator exceeded " << opts_.max_steps << " steps at t=" << t_ << " (target "
         << t_target << ", h=" << h_ << ")";
      throw SolverError(os.str());
    }
    const double remaining = t_target - t_;
    const bool clipped = h_ >= remaining;
    const double h = clipped ? remaining : h_;
    const double h_min = opts_.min_step * std::max(1.0, std::abs(t_));
    if (h < h_min && !clipped) {
      std::ostringstream os;
      os << "step size underflow at t=" << t_ << " (h=" << h << ")";
      throw SolverError(os.str());
    }

    dp_step(rhs_, t_, y_, h, k_, ytmp_, ynew_, err_);
    const double en = scaled_norm(err_, y_, ynew_, opts_);
    if (!std::isfinite(en)) {
      std::ostringstream os;
      os << "non-finite error estimate at t=" << t_ << " (h=" << h << ")";
      throw SolverError(os.str());
    }
    if (en <= 1.0) {
      const double fac =
          en == 0.0 ? kMaxFactor
                    : std::clamp(kSafety * std::pow(en, -1.0 / 5.0), kMinFactor, kMaxFactor);
      t_ = clipped ? t_target : t_ + h;
      y_.swap(ynew_);
      k_[0].swap(k_[6]);
      ++accepted_;
      h_ = clipped ? std::max(h_, h * fac) : h * fac;
    } else {
      ++rejected_;
      h_ = h * std::max(kMinFactor, kSafety * std::pow(en, -1.0 / 5.0));
    }
  }
  k1_ = k_[0];
}

std::vector<double> DormandPrince45::fixed_step(const Rhs& rhs, double t,
                                                std::span<const double> y, double h,
                                                std::span<double> err) {
  const std::size_t n = y.size();
  std::vector<std::vector<double>> k(7, std::vector<double>(n, 0.0));
  std::vector<double> ytmp(n), ynew(n);
  rhs(t, y, k[0]);
  dp_step(rhs, t, y, h, k, ytmp, ynew, err);
  return ynew;
}

}  // namespace qdgate

// Proportional-fairness bookkeeping: exponentially smoothed average rates
// and the per-slot log-ratio reward.
#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace specshare {

// X[n] = (1-1/B) X[n-1] + (1/B) R[n], clamped to >= rate_floor.
inline Eigen::VectorXd update_avg_rates(const Eigen::VectorXd& x_prev,
                                        const Eigen::VectorXd& r_inst, int smoothing_window,
                                        double rate_floor) {
  const double keep = 1.0 - 1.0 / static_cast<double>(smoothing_window);
  return (keep * x_prev + (1.0 / smoothing_window) * r_inst).cwiseMax(rate_floor);
}

// Sum over UEs of ln(X[n]) - ln(X[n-1]) with X[n] from the clamped update.
// Wherever the clamp is inactive this is exactly
//   sum_j ln((1-1/B)(1 + R_j / ((B-1) Xprev_j))),
// and the clamp-aware form makes the per-slot rewards telescope to
// sum_j ln X_j[L] for every policy.
inline double per_slot_reward(const Eigen::VectorXd& x_prev, const Eigen::VectorXd& r_inst,
                              int smoothing_window, double rate_floor) {
  const double keep = 1.0 - 1.0 / static_cast<double>(smoothing_window);
  double r = 0.0;
  for (Eigen::Index j = 0; j < x_prev.size(); ++j) {
    const double x_new =
        std::max(keep * x_prev[j] + r_inst[j] / smoothing_window, rate_floor);
    r += std::log(x_new) - std::log(x_prev[j]);
  }
  return r;
}

}  // namespace specshare

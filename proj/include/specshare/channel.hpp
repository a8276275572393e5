// Link gains: indoor-hotspot LOS path loss plus first-order autoregressive
// complex Rayleigh fading on every BS-UE and BS-BS link.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>

#include "specshare/network.hpp"
#include "specshare/rng.hpp"
#include "specshare/units.hpp"

namespace specshare {

// InH-Office LOS path loss, returned as a (negative) gain in dB:
//   PL = 32.4 + 17.3*log10(d_m) + 20*log10(f_c_GHz)
inline double path_gain_db(double dist_m, const NetworkConfig& net) {
  if (dist_m < net.min_link_dist_m)
    throw std::invalid_argument("path_gain_db: distance below min_link_dist_m");
  const double pl =
      32.4 + 17.3 * std::log10(dist_m) + 20.0 * std::log10(net.center_freq_ghz);
  return -pl;
}

// Per-link state. h evolves as h[n] = (1-alpha)h[n-1] + alpha*e[n] with
// e ~ CN(0,1); the stationary amplitude variance is alpha^2/(1-(1-alpha)^2).
// Linear power gain = path_gain * |h|^2. BS-BS links are symmetric and share
// one fading process per unordered pair; the diagonal is unused.
class ChannelState {
 public:
  static ChannelState make(const Configuration& cfg, const NetworkConfig& net, Rng& rng) {
    ChannelState ch;
    const int n = cfg.n_bs();
    ch.pg_ue_.resize(n, n);
    ch.pg_bs_.resize(n, n);
    ch.h_ue_.resize(n, n);
    ch.h_bs_.resize(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        ch.pg_ue_(i, j) = db_to_linear(path_gain_db(
            std::max(distance(cfg.bs_positions[i], cfg.ue_positions[j]), net.min_link_dist_m),
            net));
      }
    }
    ch.pg_bs_.setZero();
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double g = db_to_linear(
            path_gain_db(distance(cfg.bs_positions[i], cfg.bs_positions[j]), net));
        ch.pg_bs_(i, j) = g;
        ch.pg_bs_(j, i) = g;
      }
    }

    // Stationary initial draw; alpha = 0 degenerates to a static unfaded
    // channel (h = 1), alpha = 1 to i.i.d. CN(0,1) per slot.
    const double a = net.fading_coeff;
    const double stat_sd = (a > 0.0) ? std::sqrt(a * a / (1.0 - (1.0 - a) * (1.0 - a))) : 0.0;
    auto init_h = [&](std::complex<double>& h) {
      h = (a > 0.0) ? stat_sd * ch.draw_cn(rng) : std::complex<double>(1.0, 0.0);
    };
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) init_h(ch.h_ue_(i, j));
    ch.h_bs_.setConstant(std::complex<double>(1.0, 0.0));
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        init_h(ch.h_bs_(i, j));
        ch.h_bs_(j, i) = ch.h_bs_(i, j);
      }
    ch.refresh_gains();
    return ch;
  }

  // One slot of fading evolution. Draw order is pinned: UE links row-major,
  // then BS pairs in upper-triangle order.
  void step(const NetworkConfig& net, Rng& rng) {
    const double a = net.fading_coeff;
    const int n = static_cast<int>(pg_ue_.rows());
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        h_ue_(i, j) = (1.0 - a) * h_ue_(i, j) + a * draw_cn(rng);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        h_bs_(i, j) = (1.0 - a) * h_bs_(i, j) + a * draw_cn(rng);
        h_bs_(j, i) = h_bs_(i, j);
      }
    refresh_gains();
  }

  // Linear power gain BS i -> UE j.
  const Eigen::MatrixXd& gain_ue() const { return g_ue_; }
  // Linear power gain between BS i and BS j (symmetric, diagonal unused).
  const Eigen::MatrixXd& gain_bs() const { return g_bs_; }

  Eigen::MatrixXd& mutable_gain_ue() { return g_ue_; }
  Eigen::MatrixXd& mutable_gain_bs() { return g_bs_; }

  const Eigen::MatrixXcd& fading_ue() const { return h_ue_; }

  int n_bs() const { return static_cast<int>(pg_ue_.rows()); }

 private:
  std::complex<double> draw_cn(Rng& rng) {
    // Circularly-symmetric unit-variance: each component N(0, 1/2).
    const double re = rng.normal() * std::numbers::sqrt2 / 2.0;
    const double im = rng.normal() * std::numbers::sqrt2 / 2.0;
    return {re, im};
  }

  void refresh_gains() {
    g_ue_ = pg_ue_.cwiseProduct(h_ue_.cwiseAbs2());
    g_bs_ = pg_bs_.cwiseProduct(h_bs_.cwiseAbs2());
  }

  Eigen::MatrixXd pg_ue_, pg_bs_;  // linear path gains (fading-free)
  Eigen::MatrixXcd h_ue_, h_bs_;   // fading amplitudes
  Eigen::MatrixXd g_ue_, g_bs_;    // current linear power gains
};

// Observation floor for reported powers; SINR itself is computed in the
// linear domain before flooring.
inline constexpr double kPowerFloorDbm = -120.0;

struct RateReport {
  Eigen::VectorXd sig_dbm;   // received signal power per UE, floored
  Eigen::VectorXd intf_dbm;  // total interference per UE, floored
  Eigen::VectorXd rate;      // spectral efficiency log2(1+SINR), bps/Hz
};

// Shannon-capacity slot outcome for a binary action vector.
// a_j = 0 yields S_j = 0 and R_j = 0 exactly.
inline RateReport compute_rates(const std::vector<int>& actions, const ChannelState& ch,
                                const NetworkConfig& net) {
  const int n = ch.n_bs();
  if (static_cast<int>(actions.size()) != n)
    throw std::invalid_argument("compute_rates: action vector length mismatch");
  RateReport rep;
  rep.sig_dbm.resize(n);
  rep.intf_dbm.resize(n);
  rep.rate.resize(n);
  const double p_mw = net.tx_power_mw();
  const double noise_mw = net.ue_noise_mw();
  for (int j = 0; j < n; ++j) {
    const double s_mw = actions[j] ? p_mw * ch.gain_ue()(j, j) : 0.0;
    double i_mw = 0.0;
    for (int k = 0; k < n; ++k) {
      if (k != j && actions[k]) i_mw += p_mw * ch.gain_ue()(k, j);
    }
    rep.sig_dbm[j] = s_mw > 0.0 ? std::max(mw_to_dbm(s_mw), kPowerFloorDbm) : kPowerFloorDbm;
    rep.intf_dbm[j] = i_mw > 0.0 ? std::max(mw_to_dbm(i_mw), kPowerFloorDbm) : kPowerFloorDbm;
    rep.rate[j] = actions[j] ? std::log2(1.0 + s_mw / (i_mw + noise_mw)) : 0.0;
  }
  return rep;
}

}  // namespace specshare

// World description: radio constants, rectangle layout, BS/UE placement.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "specshare/rng.hpp"
#include "specshare/units.hpp"

namespace specshare {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Point2& a, const Point2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Immutable radio/world constants. Defaults follow the common indoor
// 4-BS setup: 20 MHz at 6 GHz, noise PSD -174 dBm/Hz, UE/BS noise figures
// (9, 5) dB, smoothing window B = 10, fading coefficient 0.1, episodes of
// 2000 slots.
struct NetworkConfig {
  int n_bs = 4;
  double rect_length_m = 20.0;
  double rect_width_m = 20.0;
  double bandwidth_hz = 20e6;
  double center_freq_ghz = 6.0;
  double noise_psd_dbm_hz = -174.0;
  double ue_noise_figure_db = 9.0;
  double bs_noise_figure_db = 5.0;
  int smoothing_window = 10;  // B
  double fading_coeff = 0.1;  // alpha
  double tx_power_dbm = 23.0;
  int episode_len = 2000;  // L
  double min_link_dist_m = 1.0;
  double ue_drop_radius_m = 10.0;
  double rate_floor = 1e-3;  // bps/Hz, keeps log(avg rate) finite

  void validate() const {
    if (n_bs < 1) throw std::invalid_argument("n_bs must be >= 1");
    if (smoothing_window < 2) throw std::invalid_argument("smoothing_window must be >= 2");
    if (fading_coeff < 0.0 || fading_coeff > 1.0)
      throw std::invalid_argument("fading_coeff must lie in [0, 1]");
    if (episode_len < 1) throw std::invalid_argument("episode_len must be >= 1");
    if (rect_length_m <= 0.0 || rect_width_m <= 0.0)
      throw std::invalid_argument("rectangle dimensions must be positive");
    if (bandwidth_hz <= 0.0) throw std::invalid_argument("bandwidth_hz must be positive");
    if (center_freq_ghz <= 0.0) throw std::invalid_argument("center_freq_ghz must be positive");
    if (min_link_dist_m <= 0.0) throw std::invalid_argument("min_link_dist_m must be positive");
    if (ue_drop_radius_m <= 0.0) throw std::invalid_argument("ue_drop_radius_m must be positive");
    if (rate_floor <= 0.0) throw std::invalid_argument("rate_floor must be positive");
  }

  double tx_power_mw() const { return dbm_to_mw(tx_power_dbm); }

  // Thermal noise power over the full band at the UE front end, in mW.
  double ue_noise_mw() const {
    return dbm_to_mw(noise_psd_dbm_hz + 10.0 * std::log10(bandwidth_hz) + ue_noise_figure_db);
  }

  // BS sensing floor: thermal noise + BS noise figure, in dBm. Energy
  // entries at this value mean "nothing detected".
  double sensing_floor_dbm() const {
    return noise_psd_dbm_hz + 10.0 * std::log10(bandwidth_hz) + bs_noise_figure_db;
  }
};

// One sampled placement: BS j serves UE j (index-paired).
struct Configuration {
  std::vector<Point2> bs_positions;
  std::vector<Point2> ue_positions;

  int n_bs() const { return static_cast<int>(bs_positions.size()); }
};

// BS anchors: the four rectangle corners, then (for n > 4) evenly spaced
// points along the perimeter.
inline std::vector<Point2> bs_anchor_points(const NetworkConfig& net) {
  const double l = net.rect_length_m;
  const double w = net.rect_width_m;
  std::vector<Point2> corners = {{0.0, 0.0}, {l, 0.0}, {0.0, w}, {l, w}};
  std::vector<Point2> out;
  const int n = net.n_bs;
  for (int i = 0; i < n && i < 4; ++i) out.push_back(corners[i]);
  if (n > 4) {
    const double perim = 2.0 * (l + w);
    for (int i = 4; i < n; ++i) {
      double t = perim * (static_cast<double>(i - 4) + 0.5) / static_cast<double>(n - 4 + 1);
      Point2 p;
      if (t < l) {
        p = {t, 0.0};
      } else if (t < l + w) {
        p = {l, t - l};
      } else if (t < 2.0 * l + w) {
        p = {2.0 * l + w - t, w};
      } else {
        p = {0.0, perim - t};
      }
      out.push_back(p);
    }
  }
  return out;
}

// Drops UE j uniformly in a disc of radius ue_drop_radius_m around BS j,
// rejected until it lies inside the room rectangle and at least
// min_link_dist_m away from every BS. Deterministic given the stream.
inline Configuration sample_configuration(const NetworkConfig& net, Rng rng) {
  net.validate();
  Configuration cfg;
  cfg.bs_positions = bs_anchor_points(net);

  for (int i = 0; i < net.n_bs; ++i) {
    for (int j = i + 1; j < net.n_bs; ++j) {
      if (distance(cfg.bs_positions[i], cfg.bs_positions[j]) < net.min_link_dist_m)
        throw std::runtime_error("degenerate geometry: BS pair closer than min_link_dist_m");
    }
  }

  cfg.ue_positions.resize(net.n_bs);
  for (int j = 0; j < net.n_bs; ++j) {
    const Point2 c = cfg.bs_positions[j];
    bool placed = false;
    for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
      // Uniform in the disc via radius = R*sqrt(u).
      const double r = net.ue_drop_radius_m * std::sqrt(rng.uniform());
      const double phi = 2.0 * std::numbers::pi * rng.uniform();
      const Point2 p{c.x + r * std::cos(phi), c.y + r * std::sin(phi)};
      if (p.x < 0.0 || p.x > net.rect_length_m || p.y < 0.0 || p.y > net.rect_width_m) continue;
      bool ok = true;
      for (const Point2& bs : cfg.bs_positions) {
        if (distance(p, bs) < net.min_link_dist_m) {
          ok = false;
          break;
        }
      }
      if (ok) {
        cfg.ue_positions[j] = p;
        placed = true;
      }
    }
    if (!placed)
      throw std::runtime_error("sample_configuration: 1000 rejection attempts exhausted for UE " +
                               std::to_string(j));
  }
  return cfg;
}

inline Configuration sample_configuration(const NetworkConfig& net, std::uint64_t seed) {
  return sample_configuration(net, Rng(seed));
}

}  // namespace specshare

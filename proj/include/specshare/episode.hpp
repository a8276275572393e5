// Episode generation: counter-ordered contention mini-slots, sensing,
// per-slot rates/reward, and trajectory recording. Batches of episodes run
// in lockstep so neural policies can batch their forward passes across
// episodes; per-episode random streams keep results independent of the
// batching.
#pragma once

#include <Eigen/Dense>
#include <concepts>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "specshare/channel.hpp"
#include "specshare/network.hpp"
#include "specshare/reward.hpp"
#include "specshare/rng.hpp"

namespace specshare {

// What BS i sees when its counter expires: the serving-UE feedback from the
// previous slot, the sensed energy vector, and the counter itself.
struct ConObs {
  double xbar = 0.0;      // X_i[n-1], bps/Hz
  double sig_dbm = 0.0;   // S_i[n-1]
  double intf_dbm = 0.0;  // I_i[n-1]
  Eigen::VectorXd energies_dbm;
  int counter = 0;
};

struct SlotRecord {
  std::vector<int> counters;      // theta (zeros in the bootstrap slot)
  Eigen::MatrixXd energies_dbm;   // row i = what BS i sensed
  std::vector<int> actions;
  Eigen::VectorXd sig_dbm;        // per UE, this slot
  Eigen::VectorXd intf_dbm;
  Eigen::VectorXd rate;           // bps/Hz
  Eigen::VectorXd xbar;           // after the smoothed update
  double reward = 0.0;
};

// L+1 records; slot 0 is the all-transmit bootstrap that seeds the averages.
struct Trajectory {
  std::vector<SlotRecord> slots;
  std::uint64_t seed = 0;
  int n_bs = 0;

  int episode_len() const { return static_cast<int>(slots.size()) - 1; }

  // EOS observation preceding decision slot n (n in 1..L): previous slot's
  // average rate / signal / interference for BS i's UE.
  ConObs con_obs(int n, int i) const {
    const SlotRecord& prev = slots[n - 1];
    const SlotRecord& cur = slots[n];
    ConObs o;
    o.xbar = prev.xbar[i];
    o.sig_dbm = prev.sig_dbm[i];
    o.intf_dbm = prev.intf_dbm[i];
    o.energies_dbm = cur.energies_dbm.row(i);
    o.counter = cur.counters[i];
    return o;
  }

  const Eigen::VectorXd& final_xbar() const { return slots.back().xbar; }

  double cumulative_reward(double gamma) const {
    double acc = 0.0;
    double w = 1.0;
    for (const SlotRecord& s : slots) {
      acc += w * s.reward;
      w *= gamma;
    }
    return acc;
  }
};

// Sensed energy vector for BS `bs` holding counter `counter`: every BS j
// that drew a strictly earlier counter and chose to transmit contributes
// tx_power * g_bs(j, bs); everything else sits at the sensing floor.
inline Eigen::VectorXd sensed_energies_dbm(int bs, int counter, const std::vector<int>& counters,
                                           const std::vector<int>& actions,
                                           const ChannelState& ch, const NetworkConfig& net) {
  const int n = ch.n_bs();
  const double floor_dbm = net.sensing_floor_dbm();
  Eigen::VectorXd e = Eigen::VectorXd::Constant(n, floor_dbm);
  for (int j = 0; j < n; ++j) {
    if (j == bs) continue;  // no self-sensing
    if (counters[j] < counter && actions[j] == 1) {
      const double p_mw = net.tx_power_mw() * ch.gain_bs()(j, bs);
      if (p_mw > 0.0) e[j] = std::max(mw_to_dbm(p_mw), floor_dbm);
    }
  }
  return e;
}

template <typename F>
concept SlotDecider = requires(F f, int bs, const ConObs& o) {
  { f(bs, o) } -> std::convertible_to<int>;
};

// One slot of contention: BSs are visited in ascending counter order, ties
// share a mini-slot (they sense strictly-earlier transmitters but not each
// other). Returns all actions and the per-BS sensed energy rows.
template <SlotDecider F>
void run_contention(const std::vector<int>& counters, F&& decide, const ChannelState& ch,
                    const Eigen::VectorXd& xbar_prev, const Eigen::VectorXd& sig_prev_dbm,
                    const Eigen::VectorXd& intf_prev_dbm, const NetworkConfig& net,
                    std::vector<int>& actions_out, Eigen::MatrixXd& energies_out) {
  const int n = ch.n_bs();
  actions_out.assign(n, 0);
  energies_out.resize(n, n);
  for (int v = 0; v < n; ++v) {
    // Decisions within a tie group all read the pre-group transmitter set.
    std::vector<std::pair<int, int>> pending;  // (bs, action)
    for (int bs = 0; bs < n; ++bs) {
      if (counters[bs] != v) continue;
      ConObs o;
      o.xbar = xbar_prev[bs];
      o.sig_dbm = sig_prev_dbm[bs];
      o.intf_dbm = intf_prev_dbm[bs];
      o.energies_dbm = sensed_energies_dbm(bs, v, counters, actions_out, ch, net);
      o.counter = v;
      energies_out.row(bs) = o.energies_dbm;
      pending.emplace_back(bs, decide(bs, o) ? 1 : 0);
    }
    for (auto [bs, a] : pending) actions_out[bs] = a;
  }
}

// Batched decision maker driving a lockstep batch of episodes. `cols` names
// the episodes (batch columns) whose BS `bs` decides in the current
// mini-slot; implementations write 0/1 into `actions`.
template <typename P>
concept BatchPolicy = requires(P p, int bs, const std::vector<int>& cols,
                               const std::vector<ConObs>& obs, std::span<int> actions) {
  p.begin_episodes(1, 1);
  p.decide(bs, cols, obs, actions);
};

namespace detail {

struct EpisodeCtx {
  ChannelState ch;
  Rng rng;
  Trajectory traj;
  std::vector<int> counters;
  std::vector<int> actions;
  Eigen::MatrixXd energies;
};

}  // namespace detail

// Generates a batch of episodes slot-by-slot. Episode e uses streams[e] for
// every environment draw (channel init, counters, fading); policies draw
// from their own streams. Slot n is processed for all episodes before slot
// n+1 begins, with per-BS decisions grouped by mini-slot value.
template <BatchPolicy P>
std::vector<Trajectory> generate_episodes(P& policy, const NetworkConfig& net,
                                          const std::vector<const Configuration*>& cfgs,
                                          const std::vector<Rng>& streams) {
  net.validate();
  const int batch = static_cast<int>(cfgs.size());
  if (batch == 0) return {};
  if (streams.size() != cfgs.size())
    throw std::invalid_argument("generate_episodes: one stream per configuration required");
  const int n = net.n_bs;
  const int len = net.episode_len;

  std::vector<detail::EpisodeCtx> eps;
  eps.reserve(batch);
  for (int e = 0; e < batch; ++e) {
    if (cfgs[e]->n_bs() != n)
      throw std::invalid_argument("generate_episodes: configuration size mismatch");
    detail::EpisodeCtx ctx{ChannelState(), streams[e], Trajectory{}, {}, {}, {}};
    ctx.rng = streams[e];
    ctx.ch = ChannelState::make(*cfgs[e], net, ctx.rng);
    ctx.traj.seed = streams[e].id();
    ctx.traj.n_bs = n;
    ctx.traj.slots.reserve(len + 1);
    eps.push_back(std::move(ctx));
  }

  // Bootstrap slot: every BS transmits, seeding X[0] and r[0].
  for (auto& ctx : eps) {
    SlotRecord rec;
    rec.counters.assign(n, 0);
    rec.energies_dbm = Eigen::MatrixXd::Constant(n, n, net.sensing_floor_dbm());
    rec.actions.assign(n, 1);
    RateReport rr = compute_rates(rec.actions, ctx.ch, net);
    rec.sig_dbm = rr.sig_dbm;
    rec.intf_dbm = rr.intf_dbm;
    rec.rate = rr.rate;
    rec.xbar = rr.rate.cwiseMax(net.rate_floor);
    rec.reward = rec.xbar.array().log().sum();
    ctx.traj.slots.push_back(std::move(rec));
  }

  policy.begin_episodes(n, batch);

  std::vector<int> cols;
  std::vector<ConObs> obs;
  std::vector<int> group_actions;
  for (int slot = 1; slot <= len; ++slot) {
    if constexpr (requires { policy.begin_slot(slot, std::span<const detail::EpisodeCtx>{}); }) {
      policy.begin_slot(slot, std::span<const detail::EpisodeCtx>(eps.data(), eps.size()));
    }
    for (auto& ctx : eps) {
      ctx.counters.resize(n);
      for (int i = 0; i < n; ++i) ctx.counters[i] = ctx.rng.uniform_int(n);
      ctx.actions.assign(n, 0);
      ctx.energies.resize(n, n);
    }
    for (int v = 0; v < n; ++v) {
      for (int bs = 0; bs < n; ++bs) {
        cols.clear();
        obs.clear();
        for (int e = 0; e < batch; ++e) {
          if (eps[e].counters[bs] != v) continue;
          cols.push_back(e);
          const SlotRecord& prev = eps[e].traj.slots.back();
          ConObs o;
          o.xbar = prev.xbar[bs];
          o.sig_dbm = prev.sig_dbm[bs];
          o.intf_dbm = prev.intf_dbm[bs];
          o.energies_dbm =
              sensed_energies_dbm(bs, v, eps[e].counters, eps[e].actions, eps[e].ch, net);
          o.counter = v;
          eps[e].energies.row(bs) = o.energies_dbm;
          obs.push_back(std::move(o));
        }
        if (cols.empty()) continue;
        group_actions.assign(cols.size(), 0);
        policy.decide(bs, cols, obs, std::span<int>(group_actions));
        // Tie semantics: same-counter peers never see these transmissions,
        // so committing per-BS inside mini-slot v is safe (energies read
        // strictly earlier counters only).
        for (std::size_t k = 0; k < cols.size(); ++k)
          eps[cols[k]].actions[bs] = group_actions[k] ? 1 : 0;
      }
    }
    for (auto& ctx : eps) {
      SlotRecord rec;
      rec.counters = ctx.counters;
      rec.energies_dbm = ctx.energies;
      rec.actions = ctx.actions;
      RateReport rr = compute_rates(rec.actions, ctx.ch, net);
      rec.sig_dbm = rr.sig_dbm;
      rec.intf_dbm = rr.intf_dbm;
      rec.rate = rr.rate;
      const Eigen::VectorXd& x_prev = ctx.traj.slots.back().xbar;
      rec.reward = per_slot_reward(x_prev, rr.rate, net.smoothing_window, net.rate_floor);
      rec.xbar = update_avg_rates(x_prev, rr.rate, net.smoothing_window, net.rate_floor);
      ctx.traj.slots.push_back(std::move(rec));
      ctx.ch.step(net, ctx.rng);
    }
  }

  std::vector<Trajectory> out;
  out.reserve(batch);
  for (auto& ctx : eps) out.push_back(std::move(ctx.traj));
  return out;
}

namespace detail {

// Adapts a per-BS scalar decision function to the batch interface.
template <typename F>
struct ScalarPolicyAdapter {
  F* fn;
  void begin_episodes(int, int) {}
  void decide(int bs, const std::vector<int>&, const std::vector<ConObs>& obs,
              std::span<int> actions) {
    for (std::size_t k = 0; k < obs.size(); ++k) actions[k] = (*fn)(bs, obs[k]) ? 1 : 0;
  }
};

}  // namespace detail

// Single-episode generation against a per-BS decision function.
template <SlotDecider F>
Trajectory generate_episode(F&& decide, const NetworkConfig& net, const Configuration& cfg,
                            Rng stream) {
  auto fn = [&](int bs, const ConObs& o) { return decide(bs, o); };
  detail::ScalarPolicyAdapter<decltype(fn)> adapter{&fn};
  std::vector<const Configuration*> cfgs{&cfg};
  std::vector<Rng> streams{stream};
  return std::move(generate_episodes(adapter, net, cfgs, streams)[0]);
}

template <SlotDecider F>
Trajectory generate_episode(F&& decide, const NetworkConfig& net, const Configuration& cfg,
                            std::uint64_t seed) {
  return generate_episode(std::forward<F>(decide), net, cfg, Rng(seed));
}

// Debug export: one row per slot per BS.
inline void write_trajectory_csv(const Trajectory& traj, const NetworkConfig& net,
                                 std::ostream& out) {
  const int n = traj.n_bs;
  out << "slot,bs,theta";
  for (int j = 0; j < n; ++j) out << ",energy_dbm_" << j;
  out << ",action,sig_dbm,intf_dbm,rate_bpshz,avg_rate_bpshz,slot_reward\n";
  for (int s = 0; s < static_cast<int>(traj.slots.size()); ++s) {
    const SlotRecord& rec = traj.slots[s];
    for (int i = 0; i < n; ++i) {
      out << s << ',' << i << ',' << rec.counters[i];
      for (int j = 0; j < n; ++j) out << ',' << rec.energies_dbm(i, j);
      out << ',' << rec.actions[i] << ',' << rec.sig_dbm[i] << ',' << rec.intf_dbm[i] << ','
          << rec.rate[i] << ',' << rec.xbar[i] << ',' << rec.reward << '\n';
    }
  }
  (void)net;
}

inline void write_trajectory_csv(const Trajectory& traj, const NetworkConfig& net,
                                 const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("write_trajectory_csv: cannot open " + path);
  write_trajectory_csv(traj, net, f);
}

}  // namespace specshare

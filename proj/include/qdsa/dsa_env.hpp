#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>

#include "qdsa/errors.hpp"
#include "qdsa/rng.hpp"

namespace qdsa {

// Slot-based D2D-in-cellular simulator: one D2D pair shares spectrum with a
// cellular UE population. Per slot the UE accesses the channel with
// probability alpha and, when it does, sits in the protected area with
// probability beta. All distances in meters, powers in dBm, rates in bits/s.
struct NetworkConfig {
    double alpha = 0.7; // P(UE accesses the shared spectrum per slot)
    double beta = 0.5;  // P(accessing UE is inside the protected area)
    double d2d_bs_distance_min_m = 100.0;
    double d2d_bs_distance_max_m = 1000.0;
    double d2d_pair_distance_min_m = 20.0;
    double d2d_pair_distance_max_m = 100.0;
    double bs_power_dbm = 40.0;
    double d2d_power_dbm = 23.0;
    double noise_dbm = -114.0;
    double carrier_hz = 2e9;
    double bandwidth_hz = 20e6;
    double los_decay_m = 150.0; // P(LoS) = exp(-d / los_decay_m)
    double pl_exponent_los = 2.0;
    double pl_exponent_nlos = 3.5;
    double collision_reward_bps = 0.0;

    void validate() const {
        auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
        if (!in_unit(alpha)) {
            throw config_error("alpha must be in [0, 1], got " + std::to_string(alpha));
        }
        if (!in_unit(beta)) {
            throw config_error("beta must be in [0, 1], got " + std::to_string(beta));
        }
        auto check_range = [](double lo, double hi, const char* name) {
            if (!(lo > 0.0) || !(hi > 0.0) || lo > hi) {
                throw config_error(std::string(name) +
                                   " must be positive with min <= max, got [" +
                                   std::to_string(lo) + ", " + std::to_string(hi) + "]");
            }
        };
        check_range(d2d_bs_distance_min_m, d2d_bs_distance_max_m, "d2d_bs_distance");
        check_range(d2d_pair_distance_min_m, d2d_pair_distance_max_m, "d2d_pair_distance");
        for (double p : {bs_power_dbm, d2d_power_dbm, noise_dbm}) {
            if (!std::isfinite(p)) {
                throw config_error("powers must be finite dBm values");
            }
        }
        if (!(bandwidth_hz > 0.0)) {
            throw config_error("bandwidth_hz must be > 0");
        }
        if (!(carrier_hz > 0.0)) {
            throw config_error("carrier_hz must be > 0");
        }
        if (!(los_decay_m > 0.0)) {
            throw config_error("los_decay_m must be > 0");
        }
        if (!(pl_exponent_los >= 0.0) || !(pl_exponent_nlos >= 0.0)) {
            throw config_error("path-loss exponents must be >= 0");
        }
        if (!(collision_reward_bps >= 0.0)) {
            throw config_error("collision_reward_bps must be >= 0 (rewards are nonnegative)");
        }
    }
};

inline double dbm_to_watts(double p_dbm) { return std::pow(10.0, (p_dbm - 30.0) / 10.0); }

inline double p_line_of_sight(double distance_m, const NetworkConfig& cfg) {
    return std::exp(-distance_m / cfg.los_decay_m);
}

// Log-distance path loss with 1 m free-space reference:
//   PL(d) = 20 log10(4 pi d0 f / c) + 10 n log10(d / d0),  d0 = 1 m.
// Distances below the reference are clamped to 1 m.
inline double path_loss_db(double distance_m, double carrier_hz, bool los,
                           const NetworkConfig& cfg) {
    constexpr double c_mps = 299792458.0;
    const double d = distance_m < 1.0 ? 1.0 : distance_m;
    const double ref = 20.0 * std::log10(4.0 * std::numbers::pi * carrier_hz / c_mps);
    const double n = los ? cfg.pl_exponent_los : cfg.pl_exponent_nlos;
    return ref + 10.0 * n * std::log10(d);
}

// Shannon rate B log2(1 + S / (N + I)) with S from the path-loss model.
inline double link_rate_bps(double tx_power_dbm, double distance_m, double interference_w,
                            const NetworkConfig& cfg, bool los) {
    if (!(distance_m > 0.0)) {
        throw usage_error("link_rate distance must be > 0, got " + std::to_string(distance_m));
    }
    const double received_dbm = tx_power_dbm - path_loss_db(distance_m, cfg.carrier_hz, los, cfg);
    const double received_w = dbm_to_watts(received_dbm);
    const double noise_w = dbm_to_watts(cfg.noise_dbm);
    return cfg.bandwidth_hz * std::log2(1.0 + received_w / (noise_w + interference_w));
}

enum class Action { IDLE = 0, TRANSMIT = 1 };

// 4 features, each in [-1, 1]: last action, last channel occupancy, last UE
// protection flag (booleans mapped to -1/+1), normalized transmitter-to-BS
// distance.
using EnvObservation = std::array<double, 4>;

struct StepOutcome {
    EnvObservation observation;
    double reward_bps = 0.0;
    bool collision = false;
    bool channel_idle = false;
};

// Topology (pair distance, BS distance, LoS draws) is fixed within an episode
// and resampled at episode boundaries. Env stream draw order: per episode
// (pair distance, BS distance, pair LoS, BS LoS), then per slot (UE access,
// and UE protection only when the UE accessed).
class DsaEnv {
  public:
    DsaEnv(const NetworkConfig& cfg, std::uint64_t seed, long episode_slots = 200)
        : cfg_(cfg), episode_slots_(episode_slots), rng_(Rng::stream(seed, 0x656e76)) { // "env"
        cfg_.validate();
        if (episode_slots_ < 1) {
            throw config_error("episode_slots must be >= 1");
        }
        sample_topology();
        obs_ = {-1.0, -1.0, -1.0, normalized_bs_distance()};
    }

    const NetworkConfig& config() const { return cfg_; }
    const EnvObservation& observation() const { return obs_; }
    long slot() const { return slot_; }

    double d2d_pair_distance_m() const { return pair_distance_m_; }
    double d2d_bs_distance_m() const { return bs_distance_m_; }
    bool pair_los() const { return pair_los_; }
    bool bs_los() const { return bs_los_; }

    // Interference-free rate of the current episode's D2D link; the default
    // reward normalizer.
    double interference_free_rate_bps() const {
        return link_rate_bps(cfg_.d2d_power_dbm, pair_distance_m_, 0.0, cfg_, pair_los_);
    }

    StepOutcome step(Action action) {
        const bool ue_active = rng_.bernoulli(cfg_.alpha);
        const bool ue_protected = ue_active && rng_.bernoulli(cfg_.beta);

        double reward = 0.0;
        bool collision = false;
        if (action == Action::TRANSMIT) {
            if (!ue_active) {
                reward = interference_free_rate_bps();
            } else if (ue_protected) {
                // protected UE keeps its downlink; the D2D link pays for the
                // coexistence with BS interference at its receiver
                reward = link_rate_bps(cfg_.d2d_power_dbm, pair_distance_m_,
                                       bs_interference_w(), cfg_, pair_los_);
            } else {
                collision = true;
                reward = cfg_.collision_reward_bps;
            }
        }

        slot_ += 1;
        if (slot_ % episode_slots_ == 0) {
            sample_topology(); // next decision sees the new episode's distance
        }
        obs_ = {action == Action::TRANSMIT ? 1.0 : -1.0, ue_active ? 1.0 : -1.0,
                ue_protected ? 1.0 : -1.0, normalized_bs_distance()};
        return {obs_, reward, collision, !ue_active};
    }

  private:
    void sample_topology() {
        pair_distance_m_ = rng_.uniform(cfg_.d2d_pair_distance_min_m, cfg_.d2d_pair_distance_max_m);
        bs_distance_m_ = rng_.uniform(cfg_.d2d_bs_distance_min_m, cfg_.d2d_bs_distance_max_m);
        pair_los_ = rng_.uniform() < p_line_of_sight(pair_distance_m_, cfg_);
        bs_los_ = rng_.uniform() < p_line_of_sight(bs_distance_m_, cfg_);
    }

    // BS downlink power at the D2D receiver, with the receiver-to-BS distance
    // approximated by the tracked transmitter-to-BS distance
    double bs_interference_w() const {
        return dbm_to_watts(cfg_.bs_power_dbm -
                            path_loss_db(bs_distance_m_, cfg_.carrier_hz, bs_los_, cfg_));
    }

    double normalized_bs_distance() const {
        const double lo = cfg_.d2d_bs_distance_min_m;
        const double hi = cfg_.d2d_bs_distance_max_m;
        if (hi == lo) {
            return 0.0;
        }
        return 2.0 * (bs_distance_m_ - lo) / (hi - lo) - 1.0;
    }

    NetworkConfig cfg_;
    long episode_slots_;
    Rng rng_;
    long slot_ = 0;
    double pair_distance_m_ = 0.0;
    double bs_distance_m_ = 0.0;
    bool pair_los_ = false;
    bool bs_los_ = false;
    EnvObservation obs_{};
};

} // namespace qdsa

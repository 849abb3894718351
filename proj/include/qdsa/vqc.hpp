#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "qdsa/errors.hpp"
#include "qdsa/rng.hpp"
#include "qdsa/statevector.hpp"

namespace qdsa {

using ActionValues = std::vector<double>;

enum class Entangler { CNOT_RING, CZ_RING };

struct VqcConfig {
    int n_qubits = 4;
    int n_blocks = 5;
    Entangler entangler = Entangler::CNOT_RING;
    int n_actions = 2;
    // per-qubit rotation axes of each variational layer
    std::array<GateKind, 3> rotation_triplet{GateKind::RZ, GateKind::RY, GateKind::RZ};
};

// variational angles + encoding scales + output scales
inline std::size_t vqc_parameter_count(const VqcConfig& cfg) {
    return static_cast<std::size_t>(3) * cfg.n_qubits * (cfg.n_blocks + 1) +
           static_cast<std::size_t>(cfg.n_qubits) * cfg.n_blocks +
           static_cast<std::size_t>(cfg.n_actions);
}

// Scratch buffers for forward/gradient evaluation. Models carry no mutable
// state, so one workspace per worker keeps evaluations allocation-free.
struct VqcWorkspace {
    std::vector<std::vector<cdouble>> cache; // state before each gate + final
    std::vector<cdouble> scratch;
    std::vector<double> half_cos, half_sin; // per-slot cos/sin of angle/2
    std::vector<double> z_plus, z_minus;
};

// Layered circuit of the usual three-stage shape used as the Q-function
// approximator: repeated blocks of (variational triplet layer, entangling
// ring, angle encoding with per-block trainable input scales), one closing
// variational layer, and <Z> readout on the first n_actions qubits scaled by
// trainable output weights. The encoding re-uploads arctan-squashed features
// every block, so angles stay bounded for any real-valued input.
class VqcModel {
  public:
    VqcModel() = default;

    VqcModel(const VqcConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
        validate_config(cfg);
        phi_count_ = static_cast<std::size_t>(3) * cfg.n_qubits * (cfg.n_blocks + 1);
        lambda_count_ = static_cast<std::size_t>(cfg.n_qubits) * cfg.n_blocks;
        params_.assign(phi_count_ + lambda_count_ + cfg.n_actions, 0.0);

        Rng rng = Rng::stream(seed, 0x767163); // "vqc"
        for (std::size_t i = 0; i < phi_count_; ++i) {
            params_[i] = rng.uniform(-std::numbers::pi, std::numbers::pi);
        }
        for (std::size_t i = 0; i < lambda_count_; ++i) {
            params_[phi_count_ + i] = 1.0;
        }
        for (int a = 0; a < cfg.n_actions; ++a) {
            params_[phi_count_ + lambda_count_ + a] = 1.0;
        }
        build_slots();
        mark_inert_tail();
    }

    const VqcConfig& config() const { return cfg_; }
    std::size_t parameter_count() const { return params_.size(); }
    std::vector<double>& parameters() { return params_; }
    const std::vector<double>& parameters() const { return params_; }

    std::span<const double> variational_angles() const { return {params_.data(), phi_count_}; }
    std::span<const double> encoding_scales() const {
        return {params_.data() + phi_count_, lambda_count_};
    }
    std::span<const double> output_scales() const {
        return {params_.data() + phi_count_ + lambda_count_,
                static_cast<std::size_t>(cfg_.n_actions)};
    }

    ActionValues forward(std::span<const double> observation) const {
        VqcWorkspace ws;
        return forward(observation, ws);
    }

    ActionValues forward(std::span<const double> observation, VqcWorkspace& ws) const {
        check_observation(observation);
        fill_trig(observation, ws);
        ws.scratch.assign(std::size_t{1} << cfg_.n_qubits, cdouble{0.0, 0.0});
        ws.scratch[0] = cdouble{1.0, 0.0};
        for (std::size_t g = 0; g < slots_.size(); ++g) {
            apply_slot(ws.scratch, slots_[g], ws.half_cos[g], ws.half_sin[g]);
        }
        ActionValues q(static_cast<std::size_t>(cfg_.n_actions));
        for (int a = 0; a < cfg_.n_actions; ++a) {
            q[a] = output_scales()[a] * z_expectation(ws.scratch, a);
        }
        return q;
    }

    // d(sum_a loss_grad[a] * Q_a)/d(params), flat [phi | lambda | w] layout.
    // Rotation-angle derivatives use the two-point shift rule evaluated at
    // angle +- pi/2; encoding scales pick up the arctan(feature) chain factor,
    // output scales contribute <Z_a> directly.
    std::vector<double> gradient(std::span<const double> observation,
                                 std::span<const double> loss_grad) const {
        VqcWorkspace ws;
        return gradient(observation, loss_grad, ws);
    }

    std::vector<double> gradient(std::span<const double> observation,
                                 std::span<const double> loss_grad, VqcWorkspace& ws) const {
        check_observation(observation);
        if (loss_grad.size() != static_cast<std::size_t>(cfg_.n_actions)) {
            throw usage_error("loss_grad length " + std::to_string(loss_grad.size()) +
                              " != n_actions " + std::to_string(cfg_.n_actions));
        }

        const std::size_t dim = std::size_t{1} << cfg_.n_qubits;
        const std::size_t n_slots = slots_.size();
        fill_trig(observation, ws);
        ws.cache.resize(n_slots + 1);
        for (auto& c : ws.cache) {
            c.resize(dim);
        }
        ws.z_plus.assign(static_cast<std::size_t>(cfg_.n_actions), 0.0);
        ws.z_minus.assign(static_cast<std::size_t>(cfg_.n_actions), 0.0);

        // forward pass caching the state before every gate
        std::fill(ws.cache[0].begin(), ws.cache[0].end(), cdouble{0.0, 0.0});
        ws.cache[0][0] = cdouble{1.0, 0.0};
        for (std::size_t g = 0; g < n_slots; ++g) {
            ws.cache[g + 1] = ws.cache[g];
            apply_slot(ws.cache[g + 1], slots_[g], ws.half_cos[g], ws.half_sin[g]);
        }

        std::vector<double> grad(params_.size(), 0.0);
        const auto w = output_scales();

        // output scales: dQ_a/dw_a = <Z_a>
        for (int a = 0; a < cfg_.n_actions; ++a) {
            grad[phi_count_ + lambda_count_ + a] =
                loss_grad[a] * z_expectation(ws.cache[n_slots], a);
        }

        // Shifted re-evaluations from the cached prefix states. Shifting the
        // angle by +-pi/2 shifts the half angle by pi/4:
        //   cos(a/2 +- pi/4) = (c -+ s) / sqrt2,  sin(a/2 +- pi/4) = (s +- c) / sqrt2.
        // Slots marked inert commute with every readout Z, so their shift
        // difference is identically zero and they are skipped.
        constexpr double r = 0.70710678118654752440;
        for (std::size_t g = 0; g < n_slots; ++g) {
            const Slot& slot = slots_[g];
            if (slot.param < 0 || slot.inert) {
                continue;
            }
            // angle = param for variational slots, param * arctan(f) for
            // encoding slots; chain is d(angle)/d(param)
            const double chain =
                slot.feature >= 0 ? std::atan(observation[slot.feature]) : 1.0;
            if (chain == 0.0) {
                continue;
            }
            const double c = ws.half_cos[g];
            const double s = ws.half_sin[g];
            shifted_expectations(ws, g, (c - s) * r, (s + c) * r, ws.z_plus);
            shifted_expectations(ws, g, (c + s) * r, (s - c) * r, ws.z_minus);
            double weighted = 0.0;
            for (int a = 0; a < cfg_.n_actions; ++a) {
                const double dz = 0.5 * (ws.z_plus[a] - ws.z_minus[a]);
                weighted += loss_grad[a] * w[a] * dz;
            }
            grad[static_cast<std::size_t>(slot.param)] += weighted * chain;
        }
        return grad;
    }

  private:
    // one gate in the fixed circuit layout
    struct Slot {
        GateKind kind;
        int target;
        int control;       // entangler only
        int param;         // index into params_, -1 for fixed gates
        int feature;       // encoding slots: which feature feeds the angle, else -1
        bool inert = false; // provably zero shift-gradient w.r.t. readout <Z>
    };

    static void validate_config(const VqcConfig& cfg) {
        if (cfg.n_qubits < 1 || cfg.n_qubits > kMaxQubits) {
            throw config_error("vqc n_qubits must be in [1, " + std::to_string(kMaxQubits) +
                               "], got " + std::to_string(cfg.n_qubits));
        }
        if (cfg.n_blocks < 0) {
            throw config_error("vqc n_blocks must be >= 0");
        }
        if (cfg.n_actions < 1 || cfg.n_actions > cfg.n_qubits) {
            throw config_error("vqc n_actions must be in [1, n_qubits]; each action reads "
                               "one qubit's <Z>");
        }
        for (GateKind k : cfg.rotation_triplet) {
            if (k != GateKind::RX && k != GateKind::RY && k != GateKind::RZ) {
                throw config_error("vqc rotation_triplet must name rotation gates");
            }
        }
    }

    void check_observation(std::span<const double> observation) const {
        if (observation.size() != static_cast<std::size_t>(cfg_.n_qubits)) {
            throw usage_error("observation length " + std::to_string(observation.size()) +
                              " != n_qubits " + std::to_string(cfg_.n_qubits));
        }
        for (double f : observation) {
            if (!std::isfinite(f)) {
                throw usage_error("non-finite observation feature");
            }
        }
    }

    void build_slots() {
        const int n = cfg_.n_qubits;
        auto variational_layer = [&](int layer) {
            for (int q = 0; q < n; ++q) {
                for (int j = 0; j < 3; ++j) {
                    const int idx = (layer * n + q) * 3 + j;
                    slots_.push_back(
                        {cfg_.rotation_triplet[static_cast<std::size_t>(j)], q, -1, idx, -1});
                }
            }
        };
        for (int b = 0; b < cfg_.n_blocks; ++b) {
            variational_layer(b);
            if (n > 1) {
                const GateKind ent =
                    cfg_.entangler == Entangler::CNOT_RING ? GateKind::CNOT : GateKind::CZ;
                for (int q = 0; q < n; ++q) {
                    slots_.push_back({ent, (q + 1) % n, q, -1, -1});
                }
            }
            for (int q = 0; q < n; ++q) {
                const int lambda_idx = static_cast<int>(phi_count_) + b * n + q;
                slots_.push_back({GateKind::RX, q, -1, lambda_idx, q});
            }
        }
        variational_layer(cfg_.n_blocks);
    }

    // Flag slots whose +-pi/2 shift cannot change any readout expectation:
    //  - from the circuit tail, diagonal gates (RZ, CZ), CNOTs whose target is
    //    not read out, and single-qubit gates on qubits never read out;
    //  - any RZ whose qubit is only touched diagonally afterwards (it commutes
    //    through to the Z readout).
    void mark_inert_tail() {
        const auto reads = [&](int q) { return q < cfg_.n_actions; };
        replay_end_ = slots_.size();
        for (std::size_t g = slots_.size(); g-- > 0;) {
            const Slot& s = slots_[g];
            bool droppable = false;
            switch (s.kind) {
            case GateKind::RZ:
            case GateKind::CZ: droppable = true; break;
            case GateKind::CNOT:
            case GateKind::RX:
            case GateKind::RY:
            case GateKind::H: droppable = !reads(s.target); break;
            }
            if (!droppable) {
                break;
            }
            replay_end_ = g;
            slots_[g].inert = slots_[g].param >= 0;
        }
        for (std::size_t g = 0; g < slots_.size(); ++g) {
            Slot& s = slots_[g];
            if (s.param < 0 || s.kind != GateKind::RZ || s.inert) {
                continue;
            }
            bool commutes_out = true;
            for (std::size_t j = g + 1; j < slots_.size() && commutes_out; ++j) {
                const Slot& later = slots_[j];
                switch (later.kind) {
                case GateKind::RZ:
                case GateKind::CZ: break;
                case GateKind::CNOT: commutes_out = later.target != s.target; break;
                case GateKind::RX:
                case GateKind::RY:
                case GateKind::H: commutes_out = later.target != s.target; break;
                }
            }
            s.inert = commutes_out;
        }
    }

    void fill_trig(std::span<const double> observation, VqcWorkspace& ws) const {
        ws.half_cos.resize(slots_.size());
        ws.half_sin.resize(slots_.size());
        for (std::size_t g = 0; g < slots_.size(); ++g) {
            const Slot& s = slots_[g];
            if (s.kind == GateKind::H || s.kind == GateKind::CNOT || s.kind == GateKind::CZ) {
                ws.half_cos[g] = 1.0;
                ws.half_sin[g] = 0.0;
                continue;
            }
            double angle = params_[static_cast<std::size_t>(s.param)];
            if (s.feature >= 0) {
                angle *= std::atan(observation[s.feature]);
            }
            ws.half_cos[g] = std::cos(0.5 * angle);
            ws.half_sin[g] = std::sin(0.5 * angle);
        }
    }

    static void apply_slot(std::vector<cdouble>& amps, const Slot& s, double c, double sn) {
        switch (s.kind) {
        case GateKind::RX: kernel_rx(amps, s.target, c, sn); break;
        case GateKind::RY: kernel_ry(amps, s.target, c, sn); break;
        case GateKind::RZ: kernel_rz(amps, s.target, c, sn); break;
        case GateKind::H: kernel_h(amps, s.target); break;
        case GateKind::CNOT: kernel_cnot(amps, s.control, s.target); break;
        case GateKind::CZ: kernel_cz(amps, s.control, s.target); break;
        }
    }

    // Re-run the circuit from the cached state before slot g with that slot's
    // half-angle trig replaced, stopping once no later gate can influence the
    // readout qubits.
    void shifted_expectations(VqcWorkspace& ws, std::size_t g, double c, double sn,
                              std::vector<double>& z) const {
        ws.scratch = ws.cache[g];
        apply_slot(ws.scratch, slots_[g], c, sn);
        for (std::size_t j = g + 1; j < replay_end_; ++j) {
            apply_slot(ws.scratch, slots_[j], ws.half_cos[j], ws.half_sin[j]);
        }
        for (int a = 0; a < cfg_.n_actions; ++a) {
            z[a] = z_expectation(ws.scratch, a);
        }
    }

    static double z_expectation(const std::vector<cdouble>& amps, int qubit) {
        const std::size_t mask = std::size_t{1} << qubit;
        double zv = 0.0;
        for (std::size_t i = 0; i < amps.size(); ++i) {
            const double p = std::norm(amps[i]);
            zv += (i & mask) ? -p : p;
        }
        return zv;
    }

    // validation-free kernels; indices are fixed by the layout at build time
    template <typename F>
    static void for_pairs(std::vector<cdouble>& amps, int target, F&& f) {
        const std::size_t mask = std::size_t{1} << target;
        const std::size_t lo = mask - 1;
        const std::size_t hi = ~lo;
        const std::size_t half = amps.size() >> 1;
        for (std::size_t k = 0; k < half; ++k) {
            const std::size_t i0 = ((k & hi) << 1) | (k & lo);
            f(amps[i0], amps[i0 | mask]);
        }
    }

    static void kernel_rx(std::vector<cdouble>& amps, int target, double c, double s) {
        for_pairs(amps, target, [&](cdouble& a0, cdouble& a1) {
            const cdouble t0 = a0, t1 = a1;
            a0 = cdouble{c * t0.real() + s * t1.imag(), c * t0.imag() - s * t1.real()};
            a1 = cdouble{s * t0.imag() + c * t1.real(), -s * t0.real() + c * t1.imag()};
        });
    }

    static void kernel_ry(std::vector<cdouble>& amps, int target, double c, double s) {
        for_pairs(amps, target, [&](cdouble& a0, cdouble& a1) {
            const cdouble t0 = a0, t1 = a1;
            a0 = c * t0 - s * t1;
            a1 = s * t0 + c * t1;
        });
    }

    static void kernel_rz(std::vector<cdouble>& amps, int target, double c, double s) {
        const cdouble p0{c, -s}, p1{c, s};
        const std::size_t mask = std::size_t{1} << target;
        for (std::size_t i = 0; i < amps.size(); ++i) {
            amps[i] *= (i & mask) ? p1 : p0;
        }
    }

    static void kernel_h(std::vector<cdouble>& amps, int target) {
        constexpr double inv_sqrt2 = 0.70710678118654752440;
        for_pairs(amps, target, [&](cdouble& a0, cdouble& a1) {
            const cdouble t0 = a0, t1 = a1;
            a0 = (t0 + t1) * inv_sqrt2;
            a1 = (t0 - t1) * inv_sqrt2;
        });
    }

    static void kernel_cnot(std::vector<cdouble>& amps, int control, int target) {
        const std::size_t cmask = std::size_t{1} << control;
        const std::size_t tmask = std::size_t{1} << target;
        for (std::size_t i = 0; i < amps.size(); ++i) {
            if ((i & cmask) && !(i & tmask)) {
                std::swap(amps[i], amps[i | tmask]);
            }
        }
    }

    static void kernel_cz(std::vector<cdouble>& amps, int control, int target) {
        const std::size_t both = (std::size_t{1} << control) | (std::size_t{1} << target);
        for (std::size_t i = 0; i < amps.size(); ++i) {
            if ((i & both) == both) {
                amps[i] = -amps[i];
            }
        }
    }

    VqcConfig cfg_;
    std::size_t phi_count_ = 0;
    std::size_t lambda_count_ = 0;
    std::size_t replay_end_ = 0;
    std::vector<double> params_;
    std::vector<Slot> slots_;
};

inline VqcModel build_vqc(const VqcConfig& cfg, std::uint64_t seed) {
    return VqcModel(cfg, seed);
}

inline ActionValues vqc_forward(const VqcModel& model, std::span<const double> observation) {
    return model.forward(observation);
}

inline std::vector<double> vqc_gradient(const VqcModel& model,
                                        std::span<const double> observation,
                                        std::span<const double> loss_grad) {
    return model.gradient(observation, loss_grad);
}

} // namespace qdsa

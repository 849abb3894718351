#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qdsa/errors.hpp"

namespace qdsa {

using cdouble = std::complex<double>;

enum class GateKind { RX, RY, RZ, H, CNOT, CZ };

// One gate application. Rotations follow the Bloch-sphere convention
// R_A(theta) = exp(-i theta A / 2) for A in {X, Y, Z}. Qubit 0 is the
// least-significant bit of the basis index.
struct GateOp {
    GateKind kind = GateKind::RX;
    int target = 0;
    int control = -1; // only CNOT/CZ carry a control
    double angle = 0.0;

    static GateOp rx(int target, double angle) { return {GateKind::RX, target, -1, angle}; }
    static GateOp ry(int target, double angle) { return {GateKind::RY, target, -1, angle}; }
    static GateOp rz(int target, double angle) { return {GateKind::RZ, target, -1, angle}; }
    static GateOp h(int target) { return {GateKind::H, target, -1, 0.0}; }
    static GateOp cnot(int control, int target) { return {GateKind::CNOT, target, control, 0.0}; }
    static GateOp cz(int control, int target) { return {GateKind::CZ, target, control, 0.0}; }

    bool has_angle() const {
        return kind == GateKind::RX || kind == GateKind::RY || kind == GateKind::RZ;
    }
    bool has_control() const { return kind == GateKind::CNOT || kind == GateKind::CZ; }
};

inline constexpr int kMaxQubits = 12; // desk-scale cap

// Dense register of 2^n complex amplitudes, initialized to |0...0>.
class StateVector {
  public:
    explicit StateVector(int n_qubits)
        : n_qubits_(n_qubits), amps_(std::size_t{1} << check_width(n_qubits)) {
        amps_[0] = cdouble{1.0, 0.0};
    }

    int n_qubits() const { return n_qubits_; }
    std::size_t dim() const { return amps_.size(); }
    const std::vector<cdouble>& amplitudes() const { return amps_; }
    cdouble amplitude(std::size_t basis) const { return amps_[basis]; }

    double norm_sq() const {
        double s = 0.0;
        for (const auto& a : amps_) {
            s += std::norm(a);
        }
        return s;
    }

    // In-place gate application; the free function apply_gate wraps this
    // with value semantics.
    void apply(const GateOp& g) {
        validate(g);
        switch (g.kind) {
        case GateKind::RX: apply_rx(g.target, g.angle); break;
        case GateKind::RY: apply_ry(g.target, g.angle); break;
        case GateKind::RZ: apply_rz(g.target, g.angle); break;
        case GateKind::H: apply_h(g.target); break;
        case GateKind::CNOT: apply_cnot(g.control, g.target); break;
        case GateKind::CZ: apply_cz(g.control, g.target); break;
        }
    }

    void apply_rx(int target, double angle) {
        const double c = std::cos(0.5 * angle);
        const double s = std::sin(0.5 * angle);
        // [c, -is; -is, c]
        for_pairs(target, [&](cdouble& a0, cdouble& a1) {
            const cdouble t0 = a0;
            const cdouble t1 = a1;
            a0 = cdouble{c * t0.real() + s * t1.imag(), c * t0.imag() - s * t1.real()};
            a1 = cdouble{s * t0.imag() + c * t1.real(), -s * t0.real() + c * t1.imag()};
        });
    }

    void apply_ry(int target, double angle) {
        const double c = std::cos(0.5 * angle);
        const double s = std::sin(0.5 * angle);
        // [c, -s; s, c]
        for_pairs(target, [&](cdouble& a0, cdouble& a1) {
            const cdouble t0 = a0;
            const cdouble t1 = a1;
            a0 = c * t0 - s * t1;
            a1 = s * t0 + c * t1;
        });
    }

    void apply_rz(int target, double angle) {
        const double c = std::cos(0.5 * angle);
        const double s = std::sin(0.5 * angle);
        const cdouble p0{c, -s}; // e^{-i angle/2}
        const cdouble p1{c, s};  // e^{+i angle/2}
        const std::size_t mask = std::size_t{1} << target;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            amps_[i] *= (i & mask) ? p1 : p0;
        }
    }

    void apply_h(int target) {
        constexpr double inv_sqrt2 = 0.70710678118654752440;
        for_pairs(target, [&](cdouble& a0, cdouble& a1) {
            const cdouble t0 = a0;
            const cdouble t1 = a1;
            a0 = (t0 + t1) * inv_sqrt2;
            a1 = (t0 - t1) * inv_sqrt2;
        });
    }

    void apply_cnot(int control, int target) {
        const std::size_t cmask = std::size_t{1} << control;
        const std::size_t tmask = std::size_t{1} << target;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if ((i & cmask) && !(i & tmask)) {
                std::swap(amps_[i], amps_[i | tmask]);
            }
        }
    }

    void apply_cz(int control, int target) {
        const std::size_t both = (std::size_t{1} << control) | (std::size_t{1} << target);
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if ((i & both) == both) {
                amps_[i] = -amps_[i];
            }
        }
    }

  private:
    static int check_width(int n_qubits) {
        if (n_qubits < 1 || n_qubits > kMaxQubits) {
            throw config_error("n_qubits must be in [1, " + std::to_string(kMaxQubits) +
                               "], got " + std::to_string(n_qubits));
        }
        return n_qubits;
    }

    void validate(const GateOp& g) const {
        if (g.target < 0 || g.target >= n_qubits_) {
            throw usage_error("gate target " + std::to_string(g.target) +
                              " out of range for " + std::to_string(n_qubits_) + " qubits");
        }
        if (g.has_control()) {
            if (g.control < 0 || g.control >= n_qubits_) {
                throw usage_error("gate control " + std::to_string(g.control) +
                                  " out of range for " + std::to_string(n_qubits_) + " qubits");
            }
            if (g.control == g.target) {
                throw usage_error("gate control equals target (" +
                                  std::to_string(g.target) + ")");
            }
        }
        if (g.has_angle() && !std::isfinite(g.angle)) {
            throw usage_error("gate angle is not finite");
        }
    }

    // Visit amplitude pairs (i, i | 2^target) with the target bit clear in i.
    template <typename F>
    void for_pairs(int target, F&& f) {
        const std::size_t mask = std::size_t{1} << target;
        const std::size_t lo = mask - 1;
        const std::size_t hi = ~lo;
        const std::size_t half = amps_.size() >> 1;
        for (std::size_t k = 0; k < half; ++k) {
            const std::size_t i0 = ((k & hi) << 1) | (k & lo);
            f(amps_[i0], amps_[i0 | mask]);
        }
    }

    int n_qubits_;
    std::vector<cdouble> amps_;
};

// |0>^(x)n register. n_qubits outside [1, 12] is a configuration error.
inline StateVector new_state(int n_qubits) { return StateVector(n_qubits); }

inline StateVector apply_gate(StateVector state, const GateOp& g) {
    state.apply(g);
    return state;
}

// |amplitude_b|^2 indexed by basis state b.
inline std::vector<double> probabilities(const StateVector& state) {
    std::vector<double> p(state.dim());
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = std::norm(state.amplitude(i));
    }
    return p;
}

// Bitstring key convention: qubit 0 is the rightmost character.
inline std::string basis_bitstring(std::size_t basis, int n_qubits) {
    std::string s(static_cast<std::size_t>(n_qubits), '0');
    for (int q = 0; q < n_qubits; ++q) {
        if (basis & (std::size_t{1} << q)) {
            s[static_cast<std::size_t>(n_qubits - 1 - q)] = '1';
        }
    }
    return s;
}

inline std::map<std::string, double> probability_map(const StateVector& state) {
    std::map<std::string, double> out;
    for (std::size_t i = 0; i < state.dim(); ++i) {
        out[basis_bitstring(i, state.n_qubits())] = std::norm(state.amplitude(i));
    }
    return out;
}

// Exact <Z_qubit>: sum of (+1/-1 by the qubit's bit) |amp|^2. No sampling.
inline double expectation_z(const StateVector& state, int qubit) {
    if (qubit < 0 || qubit >= state.n_qubits()) {
        throw usage_error("expectation_z qubit " + std::to_string(qubit) +
                          " out of range for " + std::to_string(state.n_qubits()) + " qubits");
    }
    const std::size_t mask = std::size_t{1} << qubit;
    double z = 0.0;
    for (std::size_t i = 0; i < state.dim(); ++i) {
        const double p = std::norm(state.amplitude(i));
        z += (i & mask) ? -p : p;
    }
    return z;
}

// H on qubit 0 then CNOT(0 -> 1) from |00>: amplitudes (1/sqrt2, 0, 0, 1/sqrt2).
inline StateVector bell_state() {
    StateVector s(2);
    s.apply(GateOp::h(0));
    s.apply(GateOp::cnot(0, 1));
    return s;
}

} // namespace qdsa

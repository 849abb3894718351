#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "qdsa/rng.hpp"
#include "qdsa/vqc.hpp"

using qdsa::Rng;
using qdsa::VqcConfig;
using qdsa::VqcModel;

namespace {

constexpr double pi = std::numbers::pi;

// independent central-difference gradient of sum_a loss_grad[a] * Q_a
std::vector<double> fd_gradient(VqcModel model, const std::vector<double>& obs,
                                const std::vector<double>& loss_grad, double h) {
    auto scalar = [&](const VqcModel& m) {
        auto q = m.forward(obs);
        double s = 0.0;
        for (std::size_t a = 0; a < q.size(); ++a) {
            s += loss_grad[a] * q[a];
        }
        return s;
    };
    std::vector<double> grad(model.parameter_count());
    auto& p = model.parameters();
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double orig = p[i];
        p[i] = orig + h;
        const double up = scalar(model);
        p[i] = orig - h;
        const double down = scalar(model);
        p[i] = orig;
        grad[i] = (up - down) / (2.0 * h);
    }
    return grad;
}

VqcConfig default_config() {
    return VqcConfig{}; // 4 qubits, 5 blocks, CNOT ring, 2 actions
}

} // namespace

TEST_CASE("vqc parameter counts") {
    REQUIRE(qdsa::vqc_parameter_count(default_config()) == 94);
    REQUIRE(qdsa::build_vqc(default_config(), 1).parameter_count() == 94);

    VqcConfig tiny;
    tiny.n_qubits = 1;
    tiny.n_blocks = 0;
    tiny.n_actions = 1;
    REQUIRE(qdsa::build_vqc(tiny, 1).parameter_count() == 4);

    VqcConfig c3;
    c3.n_qubits = 3;
    c3.n_blocks = 2;
    c3.n_actions = 3;
    auto m = qdsa::build_vqc(c3, 7);
    REQUIRE(m.parameter_count() == 3 * 3 * 3 + 3 * 2 + 3);
    REQUIRE(m.variational_angles().size() == 27);
    REQUIRE(m.encoding_scales().size() == 6);
    REQUIRE(m.output_scales().size() == 3);
}

TEST_CASE("vqc config validation") {
    VqcConfig bad = default_config();
    bad.n_actions = 5; // > n_qubits
    REQUIRE_THROWS_AS(qdsa::build_vqc(bad, 1), qdsa::config_error);
    bad = default_config();
    bad.n_blocks = -1;
    REQUIRE_THROWS_AS(qdsa::build_vqc(bad, 1), qdsa::config_error);
    bad = default_config();
    bad.n_qubits = 0;
    REQUIRE_THROWS_AS(qdsa::build_vqc(bad, 1), qdsa::config_error);
    bad = default_config();
    bad.rotation_triplet[1] = qdsa::GateKind::H;
    REQUIRE_THROWS_AS(qdsa::build_vqc(bad, 1), qdsa::config_error);
}

TEST_CASE("vqc build is deterministic under seed") {
    auto a = qdsa::build_vqc(default_config(), 123);
    auto b = qdsa::build_vqc(default_config(), 123);
    REQUIRE(a.parameters() == b.parameters());
    auto c = qdsa::build_vqc(default_config(), 124);
    REQUIRE(a.parameters() != c.parameters());

    // init contract: phi in [-pi, pi], lambda = 1, w = 1
    for (double phi : a.variational_angles()) {
        REQUIRE(std::abs(phi) <= pi);
    }
    for (double l : a.encoding_scales()) {
        REQUIRE(l == 1.0);
    }
    for (double w : a.output_scales()) {
        REQUIRE(w == 1.0);
    }
}

TEST_CASE("identity circuit returns output scales") {
    auto m = qdsa::build_vqc(default_config(), 5);
    for (std::size_t i = 0; i < m.variational_angles().size(); ++i) {
        m.parameters()[i] = 0.0;
    }
    std::vector<double> obs{0.0, 0.0, 0.0, 0.0};
    auto q = m.forward(obs);
    // all rotations are identity and CNOT ring fixes |0000>, so Q_a = w_a
    REQUIRE_THAT(q[0], Catch::Matchers::WithinAbs(1.0, 1e-12));
    REQUIRE_THAT(q[1], Catch::Matchers::WithinAbs(1.0, 1e-12));

    auto& params = m.parameters();
    params[params.size() - 2] = 0.25;
    params[params.size() - 1] = -1.5;
    q = m.forward(obs);
    REQUIRE_THAT(q[0], Catch::Matchers::WithinAbs(0.25, 1e-12));
    REQUIRE_THAT(q[1], Catch::Matchers::WithinAbs(-1.5, 1e-12));
}

TEST_CASE("vqc outputs bounded by output scales") {
    Rng rng(2025);
    for (int trial = 0; trial < 25; ++trial) {
        auto m = qdsa::build_vqc(default_config(), 50 + trial);
        auto& p = m.parameters();
        for (std::size_t i = 0; i < p.size(); ++i) {
            p[i] = rng.uniform(-2.0, 2.0);
        }
        std::vector<double> obs(4);
        for (double& f : obs) {
            f = rng.uniform(-5.0, 5.0); // arctan keeps any real bounded
        }
        auto q = m.forward(obs);
        auto w = m.output_scales();
        for (std::size_t a = 0; a < q.size(); ++a) {
            REQUIRE(std::abs(q[a]) <= std::abs(w[a]) + 1e-12);
        }
    }
}

TEST_CASE("vqc forward is deterministic and validates inputs") {
    auto m = qdsa::build_vqc(default_config(), 77);
    std::vector<double> obs{0.3, -0.8, 0.1, 0.9};
    auto q1 = m.forward(obs);
    auto q2 = m.forward(obs);
    REQUIRE(q1 == q2);

    REQUIRE_THROWS_AS(m.forward(std::vector<double>{0.1, 0.2}), qdsa::usage_error);
    REQUIRE_THROWS_AS(m.forward(std::vector<double>{0.1, 0.2, std::nan(""), 0.0}),
                      qdsa::usage_error);
    REQUIRE_THROWS_AS(m.gradient(obs, std::vector<double>{1.0}), qdsa::usage_error);
}

TEST_CASE("single-qubit RY circuit has cosine Q and analytic gradient") {
    VqcConfig tiny;
    tiny.n_qubits = 1;
    tiny.n_blocks = 0;
    tiny.n_actions = 1;

    // params: [rz, ry, rz, w]; circuit reduces to RY(theta)|0>, Q = cos(theta)
    for (double theta : {0.0, pi / 2, 0.3, -1.2}) {
        auto m = qdsa::build_vqc(tiny, 3);
        m.parameters() = {0.0, theta, 0.0, 1.0};
        auto q = m.forward(std::vector<double>{0.0});
        REQUIRE_THAT(q[0], Catch::Matchers::WithinAbs(std::cos(theta), 1e-12));

        auto g = m.gradient(std::vector<double>{0.0}, std::vector<double>{1.0});
        REQUIRE_THAT(g[1], Catch::Matchers::WithinAbs(-std::sin(theta), 1e-12));
        REQUIRE_THAT(g[0], Catch::Matchers::WithinAbs(0.0, 1e-12));
        REQUIRE_THAT(g[2], Catch::Matchers::WithinAbs(0.0, 1e-12));
        REQUIRE_THAT(g[3], Catch::Matchers::WithinAbs(std::cos(theta), 1e-12));
    }
}

TEST_CASE("parameter-shift gradient matches finite differences on 20 random models") {
    Rng rng(8675309);
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        auto m = qdsa::build_vqc(default_config(), 9000 + trial);
        auto& p = m.parameters();
        // scatter lambda and w away from their 1.0 init to exercise chain rules
        for (std::size_t i = 72; i < p.size(); ++i) {
            p[i] = rng.uniform(0.5, 1.5);
        }
        std::vector<double> obs(4);
        for (double& f : obs) {
            f = rng.uniform(-1.0, 1.0);
        }
        std::vector<double> lg{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};

        auto shift = m.gradient(obs, lg);
        auto fd = fd_gradient(m, obs, lg, 1e-5);
        for (std::size_t i = 0; i < shift.size(); ++i) {
            worst = std::max(worst, std::abs(shift[i] - fd[i]));
        }
    }
    INFO("max abs gradient error vs finite differences: " << worst);
    REQUIRE(worst < 1e-5);
}

TEST_CASE("gradient with CZ ring entangler also matches finite differences") {
    VqcConfig cfg = default_config();
    cfg.entangler = qdsa::Entangler::CZ_RING;
    auto m = qdsa::build_vqc(cfg, 4242);
    std::vector<double> obs{0.4, -0.6, 0.9, -0.1};
    std::vector<double> lg{0.7, -1.3};
    auto shift = m.gradient(obs, lg);
    auto fd = fd_gradient(m, obs, lg, 1e-5);
    for (std::size_t i = 0; i < shift.size(); ++i) {
        REQUIRE_THAT(shift[i], Catch::Matchers::WithinAbs(fd[i], 1e-5));
    }
}

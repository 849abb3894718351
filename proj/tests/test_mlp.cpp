#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "qdsa/mlp.hpp"
#include "qdsa/optim.hpp"
#include "qdsa/rng.hpp"

using qdsa::AdamConfig;
using qdsa::AdamState;
using qdsa::MlpModel;
using qdsa::Rng;

namespace {

// independent central-difference gradient of dot(output, loss_grad)
std::vector<double> fd_gradient(MlpModel model, const std::vector<double>& features,
                                const std::vector<double>& loss_grad, double h) {
    auto scalar = [&](const MlpModel& m) {
        auto out = m.forward(features);
        double s = 0.0;
        for (std::size_t i = 0; i < out.size(); ++i) {
            s += out[i] * loss_grad[i];
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

} // namespace

TEST_CASE("mlp parameter counts") {
    REQUIRE(qdsa::build_mlp({4, 64, 64, 2}, 1).parameter_count() == 4610);
    REQUIRE(qdsa::build_mlp({1, 1}, 1).parameter_count() == 2);
    REQUIRE_THROWS_AS(qdsa::build_mlp({4}, 1), qdsa::config_error);
    REQUIRE_THROWS_AS(qdsa::build_mlp({4, 0, 2}, 1), qdsa::config_error);
}

TEST_CASE("mlp build determinism and init ranges") {
    auto a = qdsa::build_mlp({4, 8, 2}, 42);
    auto b = qdsa::build_mlp({4, 8, 2}, 42);
    REQUIRE(a.parameters() == b.parameters());

    auto c = qdsa::build_mlp({4, 8, 2}, 43);
    REQUIRE(a.parameters() != c.parameters());

    // Glorot bound for the first layer, biases zero
    const double limit = std::sqrt(6.0 / (4 + 8));
    auto w = a.layer_weights(0);
    for (double x : w) {
        REQUIRE(std::abs(x) <= limit);
    }
    for (double x : a.layer_biases(0)) {
        REQUIRE(x == 0.0);
    }
}

TEST_CASE("mlp forward basics") {
    auto zeroed = qdsa::build_mlp({3, 4, 2}, 5);
    std::fill(zeroed.parameters().begin(), zeroed.parameters().end(), 0.0);
    auto out = zeroed.forward(std::vector<double>{0.3, -0.2, 0.9});
    REQUIRE(out == std::vector<double>{0.0, 0.0});

    auto linear = qdsa::build_mlp({2, 1}, 5);
    linear.parameters() = {1.0, 1.0, 0.0}; // w = [1, 1], b = 0
    REQUIRE_THAT(linear.forward(std::vector<double>{3.0, 4.0})[0],
                 Catch::Matchers::WithinAbs(7.0, 1e-15));

    auto m = qdsa::build_mlp({4, 8, 2}, 9);
    std::vector<double> x{0.1, -0.5, 0.7, 0.2};
    REQUIRE(m.forward(x) == m.forward(x));
    REQUIRE_THROWS_AS(m.forward(std::vector<double>{1.0, 2.0}), qdsa::usage_error);
    REQUIRE_THROWS_AS(m.forward(std::vector<double>{1.0, 2.0, std::nan(""), 0.0}),
                      qdsa::usage_error);
}

TEST_CASE("mlp backward basics") {
    auto linear = qdsa::build_mlp({2, 1}, 5);
    linear.parameters() = {0.5, -0.4, 0.1};
    auto g = linear.backward(std::vector<double>{3.0, 4.0}, std::vector<double>{2.0});
    // d(w.x + b)*lg / dw = x * lg, /db = lg
    REQUIRE_THAT(g[0], Catch::Matchers::WithinAbs(6.0, 1e-15));
    REQUIRE_THAT(g[1], Catch::Matchers::WithinAbs(8.0, 1e-15));
    REQUIRE_THAT(g[2], Catch::Matchers::WithinAbs(2.0, 1e-15));

    auto m = qdsa::build_mlp({4, 8, 2}, 9);
    auto zero = m.backward(std::vector<double>{0.1, 0.2, 0.3, 0.4}, std::vector<double>{0.0, 0.0});
    for (double x : zero) {
        REQUIRE(x == 0.0);
    }
}

TEST_CASE("mlp backward matches finite differences on random [4,8,2] nets") {
    Rng rng(314159);
    for (int trial = 0; trial < 10; ++trial) {
        auto m = qdsa::build_mlp({4, 8, 2}, 1000 + trial);
        std::vector<double> x(4);
        for (double& f : x) {
            f = rng.uniform(-1.0, 1.0);
        }
        std::vector<double> lg{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};

        auto exact = m.backward(x, lg);
        auto fd = fd_gradient(m, x, lg, 1e-5);

        double max_fd = 0.0, max_diff = 0.0;
        for (std::size_t i = 0; i < exact.size(); ++i) {
            max_fd = std::max(max_fd, std::abs(fd[i]));
            max_diff = std::max(max_diff, std::abs(exact[i] - fd[i]));
        }
        REQUIRE(max_diff / std::max(max_fd, 1e-12) < 1e-4);
    }
}

TEST_CASE("adam zero gradient leaves parameters unchanged") {
    std::vector<double> p{1.0, -2.0, 3.0};
    auto orig = p;
    AdamState st(p.size());
    adam_step(p, std::vector<double>{0.0, 0.0, 0.0}, st, AdamConfig{});
    REQUIRE(p == orig);
    REQUIRE(st.step == 1);
}

TEST_CASE("adam first step moves by about the learning rate") {
    std::vector<double> p{0.0, 0.0};
    AdamState st(p.size());
    AdamConfig cfg;
    cfg.learning_rate = 0.01;
    adam_step(p, std::vector<double>{3.0, -0.25}, st, cfg);
    // bias-corrected first step: lr * g / (|g| + eps) = lr * sign(g)
    REQUIRE_THAT(p[0], Catch::Matchers::WithinAbs(-0.01, 1e-6));
    REQUIRE_THAT(p[1], Catch::Matchers::WithinAbs(0.01, 1e-6));
}

TEST_CASE("adam moves monotonically against a constant gradient") {
    std::vector<double> p{0.5};
    AdamState st(1);
    AdamConfig cfg;
    double prev = p[0];
    for (int i = 0; i < 100; ++i) {
        adam_step(p, std::vector<double>{2.5}, st, cfg);
        REQUIRE(p[0] < prev);
        prev = p[0];
    }
}

TEST_CASE("adam rejects shape mismatches") {
    std::vector<double> p{1.0, 2.0};
    AdamState st(3);
    REQUIRE_THROWS_AS(adam_step(p, std::vector<double>{1.0, 1.0}, st, AdamConfig{}),
                      qdsa::usage_error);
}

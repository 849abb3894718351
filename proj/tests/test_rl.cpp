#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <vector>

#include "qdsa/checkpoint.hpp"
#include "qdsa/rl.hpp"

using qdsa::ActionValues;
using qdsa::AgentKind;
using qdsa::AgentSpec;
using qdsa::NetworkConfig;
using qdsa::ReplayBuffer;
using qdsa::Rng;
using qdsa::TrainConfig;
using qdsa::Transition;

namespace {

// small configs keep the unit runs fast; the acceptance suite exercises the
// full-scale setup
TrainConfig small_train_config() {
    TrainConfig cfg;
    cfg.batch_size = 16;
    cfg.buffer_capacity = 500;
    cfg.epsilon.decay_steps = 100;
    cfg.iterations = 240;
    cfg.episode_slots = 50;
    cfg.avg_window = 50;
    cfg.target_sync_interval = 20;
    return cfg;
}

AgentSpec small_vqc_spec() {
    AgentSpec spec;
    spec.kind = AgentKind::VQC;
    spec.vqc.n_blocks = 2;
    return spec;
}

AgentSpec small_mlp_spec() {
    AgentSpec spec;
    spec.kind = AgentKind::MLP;
    spec.mlp_layers = {4, 16, 2};
    return spec;
}

} // namespace

TEST_CASE("select_action argmax, tie-break, and exploration frequency") {
    Rng rng(1);
    REQUIRE(qdsa::select_action({1.0, 2.0}, 0.0, rng) == 1);
    REQUIRE(qdsa::select_action({0.5, 0.5}, 0.0, rng) == 0);
    REQUIRE(qdsa::select_action({3.0, -1.0, 7.0, 7.0}, 0.0, rng) == 2);

    long ones = 0;
    const long n = 10000;
    for (long i = 0; i < n; ++i) {
        ones += qdsa::select_action({9.0, 1.0}, 1.0, rng);
    }
    const double freq = static_cast<double>(ones) / static_cast<double>(n);
    REQUIRE(freq > 0.48);
    REQUIRE(freq < 0.52);
}

TEST_CASE("td_targets formula and terminal rule") {
    auto const_eval = [](std::span<const double>) { return ActionValues{2.0, 1.0}; };

    std::vector<Transition> batch(1);
    batch[0].reward_norm = 1.0;

    REQUIRE(qdsa::td_targets(batch, const_eval, 0.0)[0] == 1.0);
    REQUIRE_THAT(qdsa::td_targets(batch, const_eval, 0.9)[0],
                 Catch::Matchers::WithinAbs(2.8, 1e-12));

    batch[0].terminal = true;
    REQUIRE(qdsa::td_targets(batch, const_eval, 0.9)[0] == 1.0);
}

TEST_CASE("replay buffer is bounded FIFO") {
    ReplayBuffer buf(4);
    REQUIRE(buf.capacity() == 4);
    for (int i = 0; i < 10; ++i) {
        Transition t;
        t.action = i;
        buf.push(t);
        REQUIRE(buf.size() <= 4);
    }
    // oldest surviving entries are 6, 7, 8, 9 in order
    for (std::size_t i = 0; i < 4; ++i) {
        REQUIRE(buf[i].action == static_cast<int>(6 + i));
    }
    REQUIRE_THROWS_AS(ReplayBuffer(0), qdsa::config_error);
}

TEST_CASE("epsilon schedule is linear then flat") {
    qdsa::EpsilonSchedule s;
    REQUIRE(s.at(0) == 1.0);
    REQUIRE_THAT(s.at(2500), Catch::Matchers::WithinAbs(0.525, 1e-12));
    REQUIRE(s.at(5000) == 0.05);
    REQUIRE(s.at(100000) == 0.05);
}

TEST_CASE("train_run with zero iterations returns an empty log") {
    TrainConfig cfg = small_train_config();
    cfg.iterations = 0;
    auto res = qdsa::train_run(NetworkConfig{}, small_mlp_spec(), cfg, 1);
    REQUIRE(res.metrics.empty());
}

TEST_CASE("train_run validates the agent/observation contract") {
    AgentSpec bad = small_vqc_spec();
    bad.vqc.n_qubits = 3;
    REQUIRE_THROWS_AS(qdsa::train_run(NetworkConfig{}, bad, small_train_config(), 1),
                      qdsa::config_error);
    AgentSpec bad_mlp = small_mlp_spec();
    bad_mlp.mlp_layers = {4, 16, 3};
    REQUIRE_THROWS_AS(qdsa::train_run(NetworkConfig{}, bad_mlp, small_train_config(), 1),
                      qdsa::config_error);
}

TEST_CASE("train_run is bit-deterministic under a fixed seed") {
    for (const AgentSpec& spec : {small_vqc_spec(), small_mlp_spec()}) {
        auto a = qdsa::train_run(NetworkConfig{}, spec, small_train_config(), 77);
        auto b = qdsa::train_run(NetworkConfig{}, spec, small_train_config(), 77);
        REQUIRE(a.metrics.size() == b.metrics.size());
        for (std::size_t i = 0; i < a.metrics.size(); ++i) {
            REQUIRE(a.metrics[i].reward_bps == b.metrics[i].reward_bps);
            REQUIRE(a.metrics[i].running_avg_bps == b.metrics[i].running_avg_bps);
            REQUIRE(a.metrics[i].loss == b.metrics[i].loss);
            REQUIRE(a.metrics[i].epsilon == b.metrics[i].epsilon);
        }
    }
}

TEST_CASE("both agent kinds see identical environment realizations per seed") {
    std::vector<qdsa::StepRecord> vqc_steps, mlp_steps;
    qdsa::train_run(NetworkConfig{}, small_vqc_spec(), small_train_config(), 31,
                    [&](const qdsa::StepRecord& r) { vqc_steps.push_back(r); });
    qdsa::train_run(NetworkConfig{}, small_mlp_spec(), small_train_config(), 31,
                    [&](const qdsa::StepRecord& r) { mlp_steps.push_back(r); });

    REQUIRE(vqc_steps.size() == mlp_steps.size());
    bool actions_differ = false;
    for (std::size_t i = 0; i < vqc_steps.size(); ++i) {
        // environment draws are agent-independent ...
        REQUIRE(vqc_steps[i].channel_idle == mlp_steps[i].channel_idle);
        REQUIRE(vqc_steps[i].observation_after[1] == mlp_steps[i].observation_after[1]);
        REQUIRE(vqc_steps[i].observation_after[2] == mlp_steps[i].observation_after[2]);
        REQUIRE(vqc_steps[i].observation_after[3] == mlp_steps[i].observation_after[3]);
        actions_differ |= vqc_steps[i].action != mlp_steps[i].action;
    }
    // ... while the policies themselves are free to differ
    REQUIRE(actions_differ);
}

TEST_CASE("target network equals online network right after sync") {
    qdsa::detail::VqcQ agent(small_vqc_spec().vqc, 5);
    std::vector<double> obs{0.2, -0.4, 0.6, -0.8};

    agent.parameters()[0] += 0.3; // diverge online from target
    auto q_on = agent.q_online(obs);
    auto q_tg = agent.q_target(obs);
    REQUIRE(q_on != q_tg);

    agent.sync_target();
    REQUIRE(agent.q_online(obs) == agent.q_target(obs));
}

TEST_CASE("alpha 0 trains into transmit-dominant behavior") {
    NetworkConfig env;
    env.alpha = 0.0; // channel always idle: TRANSMIT dominates every slot
    TrainConfig cfg;
    cfg.iterations = 3000;
    cfg.epsilon.decay_steps = 1000;
    cfg.avg_window = 500;
    cfg.episode_slots = 3000; // single topology so the rate target is fixed

    long transmit_tail = 0, tail = 0;
    double free_rate = 0.0;
    auto res = qdsa::train_run(env, small_mlp_spec(), cfg, 21, [&](const qdsa::StepRecord& r) {
        if (r.iteration >= 2500) {
            tail += 1;
            transmit_tail += r.action == 1;
            if (r.reward_bps > free_rate) {
                free_rate = r.reward_bps;
            }
        }
    });
    const double transmit_frac = static_cast<double>(transmit_tail) / static_cast<double>(tail);
    REQUIRE(transmit_frac > 0.9);
    // final window throughput approaches the interference-free channel rate
    REQUIRE(res.final_running_avg_bps > 0.9 * free_rate);
    REQUIRE(res.final_running_avg_bps <= free_rate + 1e-9);
}

TEST_CASE("scripted baselines order as expected on matched seeds") {
    TrainConfig cfg = small_train_config();
    cfg.iterations = 2000;
    NetworkConfig env;
    auto idle = qdsa::evaluate_scripted(env, qdsa::ScriptedPolicy::ALWAYS_IDLE, cfg, 11);
    auto tx = qdsa::evaluate_scripted(env, qdsa::ScriptedPolicy::ALWAYS_TRANSMIT, cfg, 11);
    auto rnd = qdsa::evaluate_scripted(env, qdsa::ScriptedPolicy::UNIFORM_RANDOM, cfg, 11);
    REQUIRE(idle.mean_reward_bps == 0.0);
    REQUIRE(tx.mean_reward_bps > 0.0);
    REQUIRE(rnd.mean_reward_bps > 0.0);
    REQUIRE(rnd.mean_reward_bps < tx.mean_reward_bps);
}

TEST_CASE("vqc checkpoint round-trips bit-exactly") {
    auto model = qdsa::build_vqc(qdsa::VqcConfig{}, 987);
    model.parameters()[10] = 0.1 + 0.2; // a value without a short decimal form

    std::stringstream ss;
    qdsa::save_vqc(model, ss);
    auto loaded = qdsa::load_vqc(ss);

    REQUIRE(loaded.parameters() == model.parameters());
    REQUIRE(loaded.config().n_qubits == 4);
    REQUIRE(loaded.config().n_blocks == 5);

    std::vector<double> obs{0.3, 0.1, -0.7, 0.5};
    REQUIRE(loaded.forward(obs) == model.forward(obs));
}

TEST_CASE("mlp checkpoint round-trips bit-exactly") {
    auto model = qdsa::build_mlp({4, 64, 64, 2}, 55);
    std::stringstream ss;
    qdsa::save_mlp(model, ss);
    auto loaded = qdsa::load_mlp(ss);
    REQUIRE(loaded.parameters() == model.parameters());
    REQUIRE(loaded.layer_sizes() == model.layer_sizes());
}

TEST_CASE("checkpoint loader rejects malformed input") {
    std::stringstream bad("not a checkpoint\n");
    REQUIRE_THROWS_AS(qdsa::load_vqc(bad), qdsa::usage_error);

    auto model = qdsa::build_vqc(qdsa::VqcConfig{}, 1);
    std::stringstream ss;
    qdsa::save_vqc(model, ss);
    REQUIRE_THROWS_AS(qdsa::load_mlp(ss), qdsa::usage_error); // wrong kind

    std::stringstream truncated("qdsa-checkpoint v1\nkind vqc\nn_qubits 4\n");
    REQUIRE_THROWS_AS(qdsa::load_vqc(truncated), qdsa::usage_error);
}

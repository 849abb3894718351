#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "qdsa/dsa_env.hpp"
#include "qdsa/errors.hpp"
#include "qdsa/mlp.hpp"
#include "qdsa/optim.hpp"
#include "qdsa/rng.hpp"
#include "qdsa/vqc.hpp"

namespace qdsa {

struct Transition {
    EnvObservation observation{};
    int action = 0;
    double reward_norm = 0.0; // reward scaled by the normalization constant
    EnvObservation next_observation{};
    bool terminal = false;
};

// Bounded FIFO of transitions; index 0 is the oldest entry.
class ReplayBuffer {
  public:
    explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
        if (capacity_ == 0) {
            throw config_error("replay buffer capacity must be >= 1");
        }
        storage_.reserve(capacity_);
    }

    std::size_t size() const { return storage_.size(); }
    std::size_t capacity() const { return capacity_; }

    void push(const Transition& t) {
        if (storage_.size() < capacity_) {
            storage_.push_back(t);
        } else {
            storage_[head_] = t;
            head_ = (head_ + 1) % capacity_;
        }
    }

    const Transition& operator[](std::size_t i) const {
        return storage_[(head_ + i) % storage_.size()];
    }

  private:
    std::size_t capacity_;
    std::size_t head_ = 0;
    std::vector<Transition> storage_;
};

struct EpsilonSchedule {
    double start = 1.0;
    double end = 0.05;
    long decay_steps = 5000;

    double at(long t) const {
        if (decay_steps <= 0 || t >= decay_steps) {
            return end;
        }
        const double frac = static_cast<double>(t) / static_cast<double>(decay_steps);
        return start + (end - start) * frac;
    }
};

struct TrainConfig {
    double gamma = 0.9;
    EpsilonSchedule epsilon{};
    int batch_size = 32;
    std::size_t buffer_capacity = 10000;
    long target_sync_interval = 100;
    double learning_rate_vqc = 1e-2;
    double learning_rate_mlp = 1e-3;
    long iterations = 50000;
    long episode_slots = 200;
    long avg_window = 1000;
    double reward_norm_bps = 0.0; // 0 = current episode's interference-free rate

    void validate() const {
        if (!(gamma >= 0.0) || gamma >= 1.0) {
            throw config_error("gamma must be in [0, 1), got " + std::to_string(gamma));
        }
        if (epsilon.start < 0.0 || epsilon.start > 1.0 || epsilon.end < 0.0 ||
            epsilon.end > 1.0 || epsilon.decay_steps < 0) {
            throw config_error("epsilon schedule out of range");
        }
        if (batch_size < 1) {
            throw config_error("batch_size must be >= 1");
        }
        if (buffer_capacity < static_cast<std::size_t>(batch_size)) {
            throw config_error("buffer_capacity must be >= batch_size");
        }
        if (target_sync_interval < 1) {
            throw config_error("target_sync_interval must be >= 1");
        }
        if (!(learning_rate_vqc > 0.0) || !(learning_rate_mlp > 0.0)) {
            throw config_error("learning rates must be > 0");
        }
        if (iterations < 0) {
            throw config_error("iterations must be >= 0");
        }
        if (episode_slots < 1) {
            throw config_error("episode_slots must be >= 1");
        }
        if (avg_window < 1) {
            throw config_error("avg_window must be >= 1");
        }
        if (reward_norm_bps < 0.0) {
            throw config_error("reward_norm_bps must be >= 0 (0 selects per-episode auto)");
        }
    }
};

// epsilon-greedy with lowest-index argmax tie-break; one uniform draw, plus a
// second only on the exploration branch
inline int select_action(const ActionValues& values, double epsilon, Rng& rng) {
    if (rng.uniform() < epsilon) {
        return static_cast<int>(rng.uniform_int(values.size()));
    }
    int best = 0;
    for (std::size_t a = 1; a < values.size(); ++a) {
        if (values[a] > values[best]) {
            best = static_cast<int>(a);
        }
    }
    return best;
}

// y = r + gamma * max_a Q_target(s', a), max term dropped on terminals
inline std::vector<double>
td_targets(std::span<const Transition> batch,
           const std::function<ActionValues(std::span<const double>)>& target_eval,
           double gamma) {
    std::vector<double> y(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const Transition& t = batch[i];
        double bootstrap = 0.0;
        if (!t.terminal) {
            const ActionValues q = target_eval(t.next_observation);
            bootstrap = *std::max_element(q.begin(), q.end());
        }
        y[i] = t.reward_norm + gamma * bootstrap;
    }
    return y;
}

enum class AgentKind { VQC, MLP };

inline const char* agent_name(AgentKind k) { return k == AgentKind::VQC ? "vqc" : "mlp"; }

struct AgentSpec {
    AgentKind kind = AgentKind::VQC;
    VqcConfig vqc{};
    std::vector<int> mlp_layers{4, 64, 64, 2};
};

struct MetricsRow {
    long iteration;
    double reward_bps;
    double running_avg_bps;
    double epsilon;
    double loss;
};

using MetricsLog = std::vector<MetricsRow>;

// test/diagnostic hook into the loop
struct StepRecord {
    long iteration;
    int action;
    double reward_bps;
    bool collision;
    bool channel_idle;
    bool terminal;
    EnvObservation observation_after{};
};
using StepObserver = std::function<void(const StepRecord&)>;

namespace detail {

// Q-function behind the loop: online net, frozen target copy, Adam state.
class QFunction {
  public:
    virtual ~QFunction() = default;
    virtual ActionValues q_online(std::span<const double> obs) = 0;
    virtual ActionValues q_target(std::span<const double> obs) = 0;
    virtual std::vector<double> gradient(std::span<const double> obs,
                                         std::span<const double> loss_grad) = 0;
    virtual std::vector<double>& parameters() = 0;
    virtual void sync_target() = 0;
    virtual int n_actions() const = 0;
};

class VqcQ final : public QFunction {
  public:
    VqcQ(const VqcConfig& cfg, std::uint64_t seed) : online_(cfg, seed), target_(online_) {}

    ActionValues q_online(std::span<const double> obs) override { return online_.forward(obs, ws_); }
    ActionValues q_target(std::span<const double> obs) override { return target_.forward(obs, ws_); }
    std::vector<double> gradient(std::span<const double> obs,
                                 std::span<const double> lg) override {
        return online_.gradient(obs, lg, ws_);
    }
    std::vector<double>& parameters() override { return online_.parameters(); }
    void sync_target() override { target_ = online_; }
    int n_actions() const override { return online_.config().n_actions; }
    const VqcModel& model() const { return online_; }

  private:
    VqcModel online_;
    VqcModel target_;
    VqcWorkspace ws_;
};

class MlpQ final : public QFunction {
  public:
    MlpQ(const std::vector<int>& layers, std::uint64_t seed)
        : online_(layers, seed), target_(online_) {}

    ActionValues q_online(std::span<const double> obs) override { return online_.forward(obs); }
    ActionValues q_target(std::span<const double> obs) override { return target_.forward(obs); }
    std::vector<double> gradient(std::span<const double> obs,
                                 std::span<const double> lg) override {
        return online_.backward(obs, lg);
    }
    std::vector<double>& parameters() override { return online_.parameters(); }
    void sync_target() override { target_ = online_; }
    int n_actions() const override { return online_.output_size(); }
    const MlpModel& model() const { return online_; }

  private:
    MlpModel online_;
    MlpModel target_;
};

// Windowed running mean; elements before a full window average what exists.
// The sum is recomputed oldest-to-newest on every push so the value is a pure
// function of the window contents (an incremental sum would carry rounding
// residue from long-evicted values).
class RunningAverage {
  public:
    explicit RunningAverage(long window) : window_(static_cast<std::size_t>(window)) {}

    double push(double x) {
        if (buf_.size() == window_) {
            buf_[next_] = x;
            next_ = (next_ + 1) % window_;
        } else {
            buf_.push_back(x);
        }
        double sum = 0.0;
        const std::size_t n = buf_.size();
        for (std::size_t i = 0; i < n; ++i) {
            sum += buf_[(next_ + i) % n];
        }
        return sum / static_cast<double>(n);
    }

  private:
    std::size_t window_;
    std::size_t next_ = 0;
    std::vector<double> buf_;
};

} // namespace detail

struct TrainResult {
    MetricsLog metrics;
    double final_running_avg_bps = 0.0;
    double mean_reward_bps = 0.0;
    // final online networks for checkpointing; exactly one is set
    std::shared_ptr<const VqcModel> vqc;
    std::shared_ptr<const MlpModel> mlp;
};

// One full training run. RNG layout: four sub-streams derived from the run
// seed (env topology/occupancy; exploration; replay sampling; parameter
// init), so both agent kinds consume identical environment realizations,
// exploration coin flips, and replay indices for the same seed. Per-iteration
// draw order: exploration uniform (plus one action draw when exploring), env
// access draw (plus protection draw when accessed, plus four topology draws
// at episode boundaries), then batch_size replay indices once the buffer
// holds a full batch.
inline TrainResult train_run(const NetworkConfig& env_cfg, const AgentSpec& agent_spec,
                             const TrainConfig& train_cfg, std::uint64_t seed,
                             const StepObserver& observer = {}) {
    env_cfg.validate();
    train_cfg.validate();

    std::unique_ptr<detail::QFunction> agent;
    AdamConfig adam_cfg;
    const std::uint64_t init_seed = splitmix64(splitmix64(seed) + 0x696e6974); // "init"
    if (agent_spec.kind == AgentKind::VQC) {
        if (agent_spec.vqc.n_qubits != 4) {
            throw config_error("vqc agent needs n_qubits = 4: features map one-to-one "
                               "onto qubits and the observation has 4 features");
        }
        if (agent_spec.vqc.n_actions != 2) {
            throw config_error("vqc agent needs n_actions = 2 for {IDLE, TRANSMIT}");
        }
        agent = std::make_unique<detail::VqcQ>(agent_spec.vqc, init_seed);
        adam_cfg.learning_rate = train_cfg.learning_rate_vqc;
    } else {
        if (agent_spec.mlp_layers.front() != 4 || agent_spec.mlp_layers.back() != 2) {
            throw config_error("mlp agent needs input size 4 and output size 2");
        }
        agent = std::make_unique<detail::MlpQ>(agent_spec.mlp_layers, init_seed);
        adam_cfg.learning_rate = train_cfg.learning_rate_mlp;
    }
    agent->sync_target();

    DsaEnv env(env_cfg, seed, train_cfg.episode_slots);
    Rng explore = Rng::stream(seed, 0x657870); // "exp"
    Rng replay_rng = Rng::stream(seed, 0x727074); // "rpt"
    ReplayBuffer buffer(train_cfg.buffer_capacity);

    AdamState adam(agent->parameters().size());
    detail::RunningAverage avg(train_cfg.avg_window);
    const int n_actions = agent->n_actions();

    TrainResult result;
    result.metrics.reserve(static_cast<std::size_t>(train_cfg.iterations));
    double reward_sum = 0.0;

    std::vector<Transition> batch(static_cast<std::size_t>(train_cfg.batch_size));
    std::vector<double> loss_grad(static_cast<std::size_t>(n_actions));

    for (long t = 0; t < train_cfg.iterations; ++t) {
        const double eps = train_cfg.epsilon.at(t);
        const EnvObservation obs = env.observation();
        const ActionValues q = agent->q_online(obs);
        const int action = select_action(q, eps, explore);

        const double norm_bps = train_cfg.reward_norm_bps > 0.0
                                    ? train_cfg.reward_norm_bps
                                    : env.interference_free_rate_bps();
        const StepOutcome out = env.step(action == 1 ? Action::TRANSMIT : Action::IDLE);
        const bool terminal = (t + 1) % train_cfg.episode_slots == 0;

        buffer.push({obs, action, out.reward_bps / norm_bps, out.observation, terminal});

        double loss = 0.0;
        if (buffer.size() >= static_cast<std::size_t>(train_cfg.batch_size)) {
            for (auto& b : batch) {
                b = buffer[replay_rng.uniform_int(buffer.size())];
            }
            const auto targets = td_targets(
                batch, [&](std::span<const double> o) { return agent->q_target(o); },
                train_cfg.gamma);

            // MSE on the taken action only, averaged over the batch
            std::vector<double> grad(agent->parameters().size(), 0.0);
            const double inv_b = 1.0 / static_cast<double>(train_cfg.batch_size);
            for (std::size_t i = 0; i < batch.size(); ++i) {
                const ActionValues qi = agent->q_online(batch[i].observation);
                const double err = qi[static_cast<std::size_t>(batch[i].action)] - targets[i];
                loss += err * err * inv_b;
                std::fill(loss_grad.begin(), loss_grad.end(), 0.0);
                loss_grad[static_cast<std::size_t>(batch[i].action)] = 2.0 * err * inv_b;
                const auto gi = agent->gradient(batch[i].observation, loss_grad);
                for (std::size_t p = 0; p < grad.size(); ++p) {
                    grad[p] += gi[p];
                }
            }
            adam_step(agent->parameters(), grad, adam, adam_cfg);
        }

        if ((t + 1) % train_cfg.target_sync_interval == 0) {
            agent->sync_target();
        }

        reward_sum += out.reward_bps;
        const double running = avg.push(out.reward_bps);
        result.metrics.push_back({t, out.reward_bps, running, eps, loss});
        if (observer) {
            observer({t, action, out.reward_bps, out.collision, out.channel_idle, terminal,
                      out.observation});
        }
    }

    if (!result.metrics.empty()) {
        result.final_running_avg_bps = result.metrics.back().running_avg_bps;
        result.mean_reward_bps = reward_sum / static_cast<double>(train_cfg.iterations);
    }
    if (agent_spec.kind == AgentKind::VQC) {
        result.vqc = std::make_shared<VqcModel>(static_cast<detail::VqcQ&>(*agent).model());
    } else {
        result.mlp = std::make_shared<MlpModel>(static_cast<detail::MlpQ&>(*agent).model());
    }
    return result;
}

enum class ScriptedPolicy { ALWAYS_IDLE, ALWAYS_TRANSMIT, UNIFORM_RANDOM };

inline const char* scripted_name(ScriptedPolicy p) {
    switch (p) {
    case ScriptedPolicy::ALWAYS_IDLE: return "always_idle";
    case ScriptedPolicy::ALWAYS_TRANSMIT: return "always_transmit";
    default: return "uniform_random";
    }
}

struct BaselineResult {
    double mean_reward_bps = 0.0;
    double final_running_avg_bps = 0.0;
};

// Fixed policies on the same env stream as train_run (matched seeds see the
// same topology and occupancy realizations); the random policy draws from the
// exploration stream.
inline BaselineResult evaluate_scripted(const NetworkConfig& env_cfg, ScriptedPolicy policy,
                                        const TrainConfig& train_cfg, std::uint64_t seed) {
    env_cfg.validate();
    train_cfg.validate();
    DsaEnv env(env_cfg, seed, train_cfg.episode_slots);
    Rng explore = Rng::stream(seed, 0x657870);
    detail::RunningAverage avg(train_cfg.avg_window);
    double sum = 0.0;
    double running = 0.0;
    for (long t = 0; t < train_cfg.iterations; ++t) {
        Action a = Action::IDLE;
        switch (policy) {
        case ScriptedPolicy::ALWAYS_IDLE: a = Action::IDLE; break;
        case ScriptedPolicy::ALWAYS_TRANSMIT: a = Action::TRANSMIT; break;
        case ScriptedPolicy::UNIFORM_RANDOM:
            a = explore.uniform_int(2) == 1 ? Action::TRANSMIT : Action::IDLE;
            break;
        }
        const StepOutcome out = env.step(a);
        sum += out.reward_bps;
        running = avg.push(out.reward_bps);
    }
    BaselineResult r;
    if (train_cfg.iterations > 0) {
        r.mean_reward_bps = sum / static_cast<double>(train_cfg.iterations);
        r.final_running_avg_bps = running;
    }
    return r;
}

} // namespace qdsa

// Experiment harness for the quantum-vs-classical dynamic spectrum access
// testbed: seeded convergence runs, the alpha sweep, config validation, and a
// built-in invariant selftest.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime error.

#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qdsa/checkpoint.hpp"
#include "qdsa/experiment.hpp"
#include "qdsa/rl.hpp"
#include "qdsa/statevector.hpp"
#include "qdsa/version.hpp"

namespace {

using namespace qdsa;

// ---------------------------------------------------------------------------
// selftest: the module invariants, compiled in
// ---------------------------------------------------------------------------

struct SelftestRunner {
    int failures = 0;

    void run(const std::string& name, const std::function<void()>& body) {
        try {
            body();
            std::printf("[PASS] %s\n", name.c_str());
        } catch (const std::exception& e) {
            failures += 1;
            std::printf("[FAIL] %s: %s\n", name.c_str(), e.what());
        }
    }
};

void check(bool ok, const std::string& what) {
    if (!ok) {
        throw std::runtime_error(what);
    }
}

GateOp random_gate(int n_qubits, Rng& rng) {
    const int kind = static_cast<int>(rng.uniform_int(6));
    const int target = static_cast<int>(rng.uniform_int(n_qubits));
    const double angle = rng.uniform(-2.0 * std::numbers::pi, 2.0 * std::numbers::pi);
    switch (kind) {
    case 0: return GateOp::rx(target, angle);
    case 1: return GateOp::ry(target, angle);
    case 2: return GateOp::rz(target, angle);
    case 3: return GateOp::h(target);
    default: {
        int control = static_cast<int>(rng.uniform_int(n_qubits));
        while (control == target) {
            control = static_cast<int>(rng.uniform_int(n_qubits));
        }
        return kind == 4 ? GateOp::cnot(control, target) : GateOp::cz(control, target);
    }
    }
}

int run_selftest() {
    SelftestRunner t;

    t.run("statevector norm over 1000 random gates", [] {
        Rng rng(11);
        auto s = new_state(4);
        for (int i = 0; i < 1000; ++i) {
            s.apply(random_gate(4, rng));
            check(std::abs(s.norm_sq() - 1.0) < 1e-10, "norm drifted past 1e-10");
        }
    });

    t.run("bell state probabilities", [] {
        auto p = probability_map(bell_state());
        check(std::abs(p.at("00") - 0.5) < 1e-12 && std::abs(p.at("11") - 0.5) < 1e-12 &&
                  p.at("01") < 1e-12 && p.at("10") < 1e-12,
              "bell state deviates from (0.5, 0, 0, 0.5)");
    });

    t.run("CNOT involution and rotation inverses", [] {
        Rng rng(12);
        auto s = new_state(3);
        for (int i = 0; i < 30; ++i) {
            s.apply(random_gate(3, rng));
        }
        auto before = s.amplitudes();
        s.apply(GateOp::cnot(0, 2));
        s.apply(GateOp::cnot(0, 2));
        const double theta = 1.234;
        s.apply(GateOp::ry(1, theta));
        s.apply(GateOp::ry(1, -theta));
        for (std::size_t i = 0; i < before.size(); ++i) {
            check(std::abs(before[i] - s.amplitudes()[i]) < 1e-12, "identity not restored");
        }
    });

    t.run("vqc parameter counts (default configuration = 94)", [] {
        check(build_vqc(VqcConfig{}, 1).parameter_count() == 94, "expected 94 parameters");
        VqcConfig tiny;
        tiny.n_qubits = 1;
        tiny.n_blocks = 0;
        tiny.n_actions = 1;
        check(build_vqc(tiny, 1).parameter_count() == 4, "expected 4 parameters");
    });

    t.run("vqc parameter-shift gradient vs finite differences", [] {
        Rng rng(13);
        for (int trial = 0; trial < 3; ++trial) {
            auto m = build_vqc(VqcConfig{}, 100 + trial);
            std::vector<double> obs(4), lg{rng.uniform(-1, 1), rng.uniform(-1, 1)};
            for (double& f : obs) {
                f = rng.uniform(-1.0, 1.0);
            }
            auto g = m.gradient(obs, lg);
            auto& p = m.parameters();
            for (std::size_t i = 0; i < p.size(); ++i) {
                const double h = 1e-5, orig = p[i];
                auto scalar = [&] {
                    auto q = m.forward(obs);
                    return lg[0] * q[0] + lg[1] * q[1];
                };
                p[i] = orig + h;
                const double up = scalar();
                p[i] = orig - h;
                const double down = scalar();
                p[i] = orig;
                check(std::abs(g[i] - (up - down) / (2 * h)) < 1e-5,
                      "gradient mismatch at parameter " + std::to_string(i));
            }
        }
    });

    t.run("mlp parameter count and gradient vs finite differences", [] {
        check(build_mlp({4, 64, 64, 2}, 1).parameter_count() == 4610, "expected 4610");
        auto m = build_mlp({4, 8, 2}, 2);
        std::vector<double> x{0.3, -0.2, 0.8, 0.5}, lg{1.0, -0.6};
        auto g = m.backward(x, lg);
        auto& p = m.parameters();
        double max_fd = 0.0, max_diff = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double h = 1e-5, orig = p[i];
            auto scalar = [&] {
                auto out = m.forward(x);
                return lg[0] * out[0] + lg[1] * out[1];
            };
            p[i] = orig + h;
            const double up = scalar();
            p[i] = orig - h;
            const double down = scalar();
            p[i] = orig;
            const double fd = (up - down) / (2 * h);
            max_fd = std::max(max_fd, std::abs(fd));
            max_diff = std::max(max_diff, std::abs(fd - g[i]));
        }
        check(max_diff / std::max(max_fd, 1e-12) < 1e-4, "backprop mismatch");
    });

    t.run("environment access/protection statistics over 100k slots", [] {
        DsaEnv env(NetworkConfig{}, 4711);
        long active = 0, prot = 0;
        for (long i = 0; i < 100000; ++i) {
            auto out = env.step(Action::IDLE);
            check(out.reward_bps == 0.0, "IDLE produced nonzero reward");
            if (!out.channel_idle) {
                active += 1;
                prot += out.observation[2] > 0.0;
            }
        }
        const double fa = active / 1e5;
        const double fb = static_cast<double>(prot) / static_cast<double>(active);
        check(fa > 0.69 && fa < 0.71, "access frequency " + std::to_string(fa));
        check(fb > 0.49 && fb < 0.51, "protection frequency " + std::to_string(fb));
    });

    t.run("replay buffer FIFO and td target rule", [] {
        ReplayBuffer buf(3);
        for (int i = 0; i < 5; ++i) {
            Transition tr;
            tr.action = i;
            buf.push(tr);
        }
        check(buf.size() == 3 && buf[0].action == 2, "FIFO eviction broken");

        std::vector<Transition> batch(1);
        batch[0].reward_norm = 1.0;
        auto eval = [](std::span<const double>) { return ActionValues{2.0, 1.0}; };
        check(std::abs(td_targets(batch, eval, 0.9)[0] - 2.8) < 1e-12, "td target formula");
        batch[0].terminal = true;
        check(td_targets(batch, eval, 0.9)[0] == 1.0, "terminal rule");
    });

    t.run("checkpoints round-trip bit-exactly", [] {
        auto vm = build_vqc(VqcConfig{}, 5);
        std::stringstream vs;
        save_vqc(vm, vs);
        check(load_vqc(vs).parameters() == vm.parameters(), "vqc checkpoint mismatch");
        auto mm = build_mlp({4, 16, 2}, 6);
        std::stringstream ms;
        save_mlp(mm, ms);
        check(load_mlp(ms).parameters() == mm.parameters(), "mlp checkpoint mismatch");
    });

    t.run("train_run determinism and cross-agent stream parity", [] {
        TrainConfig tc;
        tc.iterations = 120;
        tc.batch_size = 8;
        tc.buffer_capacity = 64;
        tc.episode_slots = 40;
        tc.avg_window = 20;
        tc.epsilon.decay_steps = 50;
        AgentSpec vqc_spec;
        vqc_spec.vqc.n_blocks = 1;
        AgentSpec mlp_spec;
        mlp_spec.kind = AgentKind::MLP;
        mlp_spec.mlp_layers = {4, 8, 2};

        auto a = train_run(NetworkConfig{}, vqc_spec, tc, 3);
        auto b = train_run(NetworkConfig{}, vqc_spec, tc, 3);
        for (std::size_t i = 0; i < a.metrics.size(); ++i) {
            check(a.metrics[i].reward_bps == b.metrics[i].reward_bps &&
                      a.metrics[i].loss == b.metrics[i].loss,
                  "metrics differ across identical runs");
        }

        std::vector<bool> idle_vqc, idle_mlp;
        train_run(NetworkConfig{}, vqc_spec, tc, 9,
                  [&](const StepRecord& r) { idle_vqc.push_back(r.channel_idle); });
        train_run(NetworkConfig{}, mlp_spec, tc, 9,
                  [&](const StepRecord& r) { idle_mlp.push_back(r.channel_idle); });
        check(idle_vqc == idle_mlp, "environment realizations differ across agent kinds");
    });

    std::printf(t.failures == 0 ? "selftest: all invariants hold\n"
                                : "selftest: %d invariant(s) violated\n",
                t.failures);
    return t.failures == 0 ? 0 : 2;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::string spaced = text;
    std::replace(spaced.begin(), spaced.end(), ',', ' ');
    std::istringstream is(spaced);
    std::vector<std::uint64_t> seeds;
    std::uint64_t s = 0;
    while (is >> s) {
        seeds.push_back(s);
    }
    if (seeds.empty()) {
        throw config_error("--seeds: expected a comma-separated seed list, got '" + text + "'");
    }
    return seeds;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"qdsa: quantum-vs-classical dynamic spectrum access testbed"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    std::string config_path, seeds_csv, out_dir;
    long iterations = -1;
    int workers = -1;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "experiment config file (key = value lines)");
        cmd->add_option("--seeds", seeds_csv, "seed list override, e.g. 1,2,3");
        cmd->add_option("--iterations", iterations, "training-iteration override");
        cmd->add_option("--out-dir", out_dir, "output directory override");
        cmd->add_option("--workers", workers, "max parallel runs (0 = hardware concurrency)");
    };

    CLI::App* conv = app.add_subcommand(
        "convergence", "train the quantum and classical agents on every seed; write CSVs");
    add_common(conv);
    CLI::App* sweep = app.add_subcommand(
        "sweep-alpha", "train both agents across the alpha sweep; write the summary CSV");
    add_common(sweep);
    CLI::App* validate =
        app.add_subcommand("validate-config", "parse a config and print its canonical form");
    validate->add_option("--config", config_path, "experiment config file");
    CLI::App* selftest = app.add_subcommand("selftest", "run the built-in invariant suites");
    (void)selftest;

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (selftest->parsed()) {
            return run_selftest();
        }

        ExperimentConfig cfg =
            config_path.empty() ? ExperimentConfig{} : load_config(config_path);

        if (validate->parsed()) {
            cfg.validate();
            std::cout << save_config(cfg);
            std::cerr << "config ok\n";
            return 0;
        }

        if (!out_dir.empty()) {
            cfg.out_dir = out_dir;
        }
        if (workers >= 0) {
            cfg.workers = workers;
        }

        if (conv->parsed()) {
            if (!seeds_csv.empty()) {
                cfg.seeds = parse_seed_list(seeds_csv);
            }
            if (iterations >= 0) {
                cfg.train.iterations = iterations;
            }
            cfg.validate();
            std::cerr << "convergence: " << cfg.seeds.size() << " seed(s) x 2 agents, "
                      << cfg.train.iterations << " iterations, out-dir " << cfg.out_dir << "\n";
            auto result = run_convergence(cfg);
            for (const auto& f : result.files) {
                std::cout << f << '\n';
            }
            return 0;
        }

        if (sweep->parsed()) {
            if (!seeds_csv.empty()) {
                cfg.sweep.seeds = parse_seed_list(seeds_csv);
            }
            if (iterations >= 0) {
                cfg.sweep.iterations = iterations;
            }
            cfg.validate();
            std::cerr << "sweep-alpha: " << cfg.sweep.alpha.size() << " alpha value(s) x "
                      << cfg.sweep.seeds.size() << " seed(s) x 2 agents, "
                      << cfg.sweep.iterations << " iterations each, out-dir " << cfg.out_dir
                      << "\n";
            auto result = run_alpha_sweep(cfg);
            for (const auto& f : result.files) {
                std::cout << f << '\n';
            }
            return 0;
        }
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

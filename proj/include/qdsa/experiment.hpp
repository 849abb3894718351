#pragma once

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qdsa/checkpoint.hpp"
#include "qdsa/errors.hpp"
#include "qdsa/rl.hpp"
#include "qdsa/version.hpp"

namespace qdsa {

// ---------------------------------------------------------------------------
// configuration file: flat "key = value" lines, '#' comments, documented keys,
// unknown keys rejected; absent keys keep the built-in defaults
// ---------------------------------------------------------------------------

struct SweepConfig {
    std::vector<double> alpha{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    std::vector<std::uint64_t> seeds{1, 2, 3};
    long iterations = 10000;
};

struct ExperimentConfig {
    NetworkConfig network{};
    TrainConfig train{};
    VqcConfig vqc{};
    std::vector<int> mlp_layers{4, 64, 64, 2};
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    std::string out_dir = "results";
    int workers = 0; // 0 = hardware concurrency
    SweepConfig sweep{};

    void validate() const {
        network.validate();
        train.validate();
        VqcModel probe(vqc, 0); // reuses the model's config checks
        (void)probe;
        MlpModel mlp_probe(mlp_layers, 0);
        (void)mlp_probe;
        if (seeds.empty()) {
            throw config_error("seeds must list at least one seed");
        }
        if (sweep.seeds.empty()) {
            throw config_error("sweep.seeds must list at least one seed");
        }
        if (sweep.alpha.empty()) {
            throw config_error("sweep.alpha must list at least one value");
        }
        for (double a : sweep.alpha) {
            if (a < 0.0 || a > 1.0) {
                throw config_error("sweep.alpha values must be in [0, 1], got " +
                                   std::to_string(a));
            }
        }
        if (sweep.iterations < 1) {
            throw config_error("sweep.iterations must be >= 1");
        }
        if (workers < 0) {
            throw config_error("workers must be >= 0 (0 = hardware concurrency)");
        }
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <typename T>
std::string join(const std::vector<T>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) {
            out += ' ';
        }
        if constexpr (std::is_same_v<T, double>) {
            out += fmt_double(values[i]);
        } else {
            out += std::to_string(values[i]);
        }
    }
    return out;
}

struct KeyParser {
    const std::string& key;
    const std::string& value;

    double number() const {
        char* end = nullptr;
        const double v = std::strtod(value.c_str(), &end);
        if (end == value.c_str() || *end != '\0') {
            throw config_error(key + ": expected a number, got '" + value + "'");
        }
        return v;
    }

    long integer() const {
        const double v = number();
        const long i = static_cast<long>(v);
        if (static_cast<double>(i) != v) {
            throw config_error(key + ": expected an integer, got '" + value + "'");
        }
        return i;
    }

    double unit_interval() const {
        const double v = number();
        if (v < 0.0 || v > 1.0) {
            throw config_error(key + ": must be in [0, 1], got '" + value + "'");
        }
        return v;
    }

    template <typename T>
    std::vector<T> list() const {
        std::string spaced = value;
        std::replace(spaced.begin(), spaced.end(), ',', ' ');
        std::istringstream is(spaced);
        std::vector<T> out;
        std::string tok;
        while (is >> tok) {
            KeyParser p{key, tok};
            if constexpr (std::is_same_v<T, double>) {
                out.push_back(p.number());
            } else {
                out.push_back(static_cast<T>(p.integer()));
            }
        }
        if (out.empty()) {
            throw config_error(key + ": expected a list of values");
        }
        return out;
    }
};

inline GateKind axis_from_name(const std::string& key, const std::string& name) {
    if (name == "rx") {
        return GateKind::RX;
    }
    if (name == "ry") {
        return GateKind::RY;
    }
    if (name == "rz") {
        return GateKind::RZ;
    }
    throw config_error(key + ": unknown rotation axis '" + name + "'");
}

inline void apply_key(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    const KeyParser p{key, value};
    auto& net = cfg.network;
    auto& tr = cfg.train;

    if (key == "network.alpha") { net.alpha = p.unit_interval(); return; }
    if (key == "network.beta") { net.beta = p.unit_interval(); return; }
    if (key == "network.d2d_bs_distance_min_m") { net.d2d_bs_distance_min_m = p.number(); return; }
    if (key == "network.d2d_bs_distance_max_m") { net.d2d_bs_distance_max_m = p.number(); return; }
    if (key == "network.d2d_pair_distance_min_m") { net.d2d_pair_distance_min_m = p.number(); return; }
    if (key == "network.d2d_pair_distance_max_m") { net.d2d_pair_distance_max_m = p.number(); return; }
    if (key == "network.bs_power_dbm") { net.bs_power_dbm = p.number(); return; }
    if (key == "network.d2d_power_dbm") { net.d2d_power_dbm = p.number(); return; }
    if (key == "network.noise_dbm") { net.noise_dbm = p.number(); return; }
    if (key == "network.carrier_hz") { net.carrier_hz = p.number(); return; }
    if (key == "network.bandwidth_hz") { net.bandwidth_hz = p.number(); return; }
    if (key == "network.los_decay_m") { net.los_decay_m = p.number(); return; }
    if (key == "network.pl_exponent_los") { net.pl_exponent_los = p.number(); return; }
    if (key == "network.pl_exponent_nlos") { net.pl_exponent_nlos = p.number(); return; }
    if (key == "network.collision_reward_bps") { net.collision_reward_bps = p.number(); return; }

    if (key == "train.gamma") { tr.gamma = p.number(); return; }
    if (key == "train.epsilon_start") { tr.epsilon.start = p.unit_interval(); return; }
    if (key == "train.epsilon_end") { tr.epsilon.end = p.unit_interval(); return; }
    if (key == "train.epsilon_decay_steps") { tr.epsilon.decay_steps = p.integer(); return; }
    if (key == "train.batch_size") { tr.batch_size = static_cast<int>(p.integer()); return; }
    if (key == "train.buffer_capacity") { tr.buffer_capacity = static_cast<std::size_t>(p.integer()); return; }
    if (key == "train.target_sync_interval") { tr.target_sync_interval = p.integer(); return; }
    if (key == "train.learning_rate_vqc") { tr.learning_rate_vqc = p.number(); return; }
    if (key == "train.learning_rate_mlp") { tr.learning_rate_mlp = p.number(); return; }
    if (key == "train.iterations") { tr.iterations = p.integer(); return; }
    if (key == "train.episode_slots") { tr.episode_slots = p.integer(); return; }
    if (key == "train.avg_window") { tr.avg_window = p.integer(); return; }
    if (key == "train.reward_norm_bps") { tr.reward_norm_bps = p.number(); return; }

    if (key == "vqc.n_qubits") { cfg.vqc.n_qubits = static_cast<int>(p.integer()); return; }
    if (key == "vqc.n_blocks") { cfg.vqc.n_blocks = static_cast<int>(p.integer()); return; }
    if (key == "vqc.n_actions") { cfg.vqc.n_actions = static_cast<int>(p.integer()); return; }
    if (key == "vqc.entangler") {
        if (value == "cnot_ring") {
            cfg.vqc.entangler = Entangler::CNOT_RING;
        } else if (value == "cz_ring") {
            cfg.vqc.entangler = Entangler::CZ_RING;
        } else {
            throw config_error("vqc.entangler: expected cnot_ring or cz_ring, got '" + value +
                               "'");
        }
        return;
    }
    if (key == "vqc.rotation_triplet") {
        std::istringstream is(value);
        std::string a, b, c, extra;
        if (!(is >> a >> b >> c) || (is >> extra)) {
            throw config_error("vqc.rotation_triplet: expected three axes, got '" + value + "'");
        }
        cfg.vqc.rotation_triplet = {axis_from_name(key, a), axis_from_name(key, b),
                                    axis_from_name(key, c)};
        return;
    }

    if (key == "mlp.layer_sizes") { cfg.mlp_layers = p.list<int>(); return; }
    if (key == "seeds") { cfg.seeds = p.list<std::uint64_t>(); return; }
    if (key == "out_dir") { cfg.out_dir = value; return; }
    if (key == "workers") { cfg.workers = static_cast<int>(p.integer()); return; }
    if (key == "sweep.alpha") { cfg.sweep.alpha = p.list<double>(); return; }
    if (key == "sweep.seeds") { cfg.sweep.seeds = p.list<std::uint64_t>(); return; }
    if (key == "sweep.iterations") { cfg.sweep.iterations = p.integer(); return; }

    throw config_error("unknown config key '" + key + "'");
}

} // namespace detail

inline ExperimentConfig parse_config(std::istream& is) {
    ExperimentConfig cfg;
    std::string line;
    long line_no = 0;
    while (std::getline(is, line)) {
        line_no += 1;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = detail::trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw config_error("line " + std::to_string(line_no) +
                               ": expected 'key = value', got '" + line + "'");
        }
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        detail::apply_key(cfg, key, value);
    }
    cfg.validate();
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) {
        throw config_error("cannot open config file: " + path);
    }
    try {
        return parse_config(is);
    } catch (const config_error& e) {
        throw config_error(path + ": " + e.what());
    }
}

// canonical serialization; load(save(cfg)) reproduces cfg exactly
inline std::string save_config(const ExperimentConfig& cfg) {
    using detail::fmt_double;
    std::ostringstream os;
    const auto& n = cfg.network;
    const auto& t = cfg.train;
    os << "network.alpha = " << fmt_double(n.alpha) << '\n';
    os << "network.beta = " << fmt_double(n.beta) << '\n';
    os << "network.d2d_bs_distance_min_m = " << fmt_double(n.d2d_bs_distance_min_m) << '\n';
    os << "network.d2d_bs_distance_max_m = " << fmt_double(n.d2d_bs_distance_max_m) << '\n';
    os << "network.d2d_pair_distance_min_m = " << fmt_double(n.d2d_pair_distance_min_m) << '\n';
    os << "network.d2d_pair_distance_max_m = " << fmt_double(n.d2d_pair_distance_max_m) << '\n';
    os << "network.bs_power_dbm = " << fmt_double(n.bs_power_dbm) << '\n';
    os << "network.d2d_power_dbm = " << fmt_double(n.d2d_power_dbm) << '\n';
    os << "network.noise_dbm = " << fmt_double(n.noise_dbm) << '\n';
    os << "network.carrier_hz = " << fmt_double(n.carrier_hz) << '\n';
    os << "network.bandwidth_hz = " << fmt_double(n.bandwidth_hz) << '\n';
    os << "network.los_decay_m = " << fmt_double(n.los_decay_m) << '\n';
    os << "network.pl_exponent_los = " << fmt_double(n.pl_exponent_los) << '\n';
    os << "network.pl_exponent_nlos = " << fmt_double(n.pl_exponent_nlos) << '\n';
    os << "network.collision_reward_bps = " << fmt_double(n.collision_reward_bps) << '\n';
    os << "train.gamma = " << fmt_double(t.gamma) << '\n';
    os << "train.epsilon_start = " << fmt_double(t.epsilon.start) << '\n';
    os << "train.epsilon_end = " << fmt_double(t.epsilon.end) << '\n';
    os << "train.epsilon_decay_steps = " << t.epsilon.decay_steps << '\n';
    os << "train.batch_size = " << t.batch_size << '\n';
    os << "train.buffer_capacity = " << t.buffer_capacity << '\n';
    os << "train.target_sync_interval = " << t.target_sync_interval << '\n';
    os << "train.learning_rate_vqc = " << fmt_double(t.learning_rate_vqc) << '\n';
    os << "train.learning_rate_mlp = " << fmt_double(t.learning_rate_mlp) << '\n';
    os << "train.iterations = " << t.iterations << '\n';
    os << "train.episode_slots = " << t.episode_slots << '\n';
    os << "train.avg_window = " << t.avg_window << '\n';
    os << "train.reward_norm_bps = " << fmt_double(t.reward_norm_bps) << '\n';
    os << "vqc.n_qubits = " << cfg.vqc.n_qubits << '\n';
    os << "vqc.n_blocks = " << cfg.vqc.n_blocks << '\n';
    os << "vqc.n_actions = " << cfg.vqc.n_actions << '\n';
    os << "vqc.entangler = "
       << (cfg.vqc.entangler == Entangler::CNOT_RING ? "cnot_ring" : "cz_ring") << '\n';
    os << "vqc.rotation_triplet =";
    for (GateKind k : cfg.vqc.rotation_triplet) {
        os << ' ' << (k == GateKind::RX ? "rx" : k == GateKind::RY ? "ry" : "rz");
    }
    os << '\n';
    os << "mlp.layer_sizes = " << detail::join(cfg.mlp_layers) << '\n';
    os << "seeds = " << detail::join(cfg.seeds) << '\n';
    os << "out_dir = " << cfg.out_dir << '\n';
    os << "workers = " << cfg.workers << '\n';
    os << "sweep.alpha = " << detail::join(cfg.sweep.alpha) << '\n';
    os << "sweep.seeds = " << detail::join(cfg.sweep.seeds) << '\n';
    os << "sweep.iterations = " << cfg.sweep.iterations << '\n';
    return os.str();
}

// ---------------------------------------------------------------------------
// experiment drivers
// ---------------------------------------------------------------------------

// Element i averages inputs max(0, i-window+1)..i. Each window is summed
// afresh oldest-to-newest, matching the training loop's running average
// bit-for-bit (an incremental sliding sum would drift by rounding residue).
inline std::vector<double> moving_average(std::span<const double> series, long window) {
    if (window < 1) {
        throw usage_error("moving_average window must be >= 1");
    }
    std::vector<double> out(series.size());
    const std::size_t w = static_cast<std::size_t>(window);
    for (std::size_t i = 0; i < series.size(); ++i) {
        const std::size_t lo = i + 1 > w ? i + 1 - w : 0;
        double sum = 0.0;
        for (std::size_t j = lo; j <= i; ++j) {
            sum += series[j];
        }
        out[i] = sum / static_cast<double>(i - lo + 1);
    }
    return out;
}

namespace detail {

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// bounded pool over a fixed job list; results land in preallocated slots so
// output order never depends on scheduling. The first job exception is
// rethrown on the calling thread after all workers drain.
inline void run_jobs(int workers, std::vector<std::function<void()>>& jobs) {
    unsigned n = workers > 0 ? static_cast<unsigned>(workers)
                             : std::max(1u, std::thread::hardware_concurrency());
    n = std::min<unsigned>(n, static_cast<unsigned>(jobs.size()));
    if (n <= 1) {
        for (auto& job : jobs) {
            job();
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (unsigned i = 0; i < n; ++i) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t j = next.fetch_add(1);
                if (j >= jobs.size() || failed.load()) {
                    return;
                }
                try {
                    jobs[j]();
                } catch (...) {
                    const std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) {
                        first_error = std::current_exception();
                    }
                    failed.store(true);
                }
            }
        });
    }
    for (auto& th : pool) {
        th.join();
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }
}

inline void write_provenance(std::ostream& os, const ExperimentConfig& cfg,
                             const std::string& purpose) {
    os << "# qdsa " << purpose << '\n';
    os << "# version = " << kVersion << '\n';
    os << "# reward_norm_bps 0 selects the episode's interference-free rate\n";
    std::istringstream config_lines(save_config(cfg));
    std::string line;
    while (std::getline(config_lines, line)) {
        os << "# " << line << '\n';
    }
}

inline std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary); // '\n' only, byte-stable output
    if (!os) {
        throw usage_error("cannot open output file: " + path.string());
    }
    return os;
}

} // namespace detail

struct ConvergenceResult {
    // running-average curves per seed, and their across-seed medians
    std::vector<std::vector<double>> vqc_running, mlp_running;
    std::vector<double> vqc_median, mlp_median;
    std::vector<double> vqc_final, mlp_final; // final running average per seed
    std::vector<std::string> files;
};

// Trains both agents on every seed, writes one CSV per run plus a median
// summary, and parks final checkpoints next to them.
inline ConvergenceResult run_convergence(const ExperimentConfig& cfg) {
    cfg.validate();
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);

    const std::size_t n_seeds = cfg.seeds.size();
    const auto iterations = static_cast<std::size_t>(cfg.train.iterations);
    ConvergenceResult result;
    result.vqc_running.assign(n_seeds, {});
    result.mlp_running.assign(n_seeds, {});
    result.vqc_final.assign(n_seeds, 0.0);
    result.mlp_final.assign(n_seeds, 0.0);

    std::vector<std::function<void()>> jobs;
    std::vector<std::string> files(2 * n_seeds);
    for (std::size_t si = 0; si < n_seeds; ++si) {
        for (AgentKind kind : {AgentKind::VQC, AgentKind::MLP}) {
            jobs.push_back([&, si, kind] {
                const std::uint64_t seed = cfg.seeds[si];
                AgentSpec spec;
                spec.kind = kind;
                spec.vqc = cfg.vqc;
                spec.mlp_layers = cfg.mlp_layers;
                const TrainResult run = train_run(cfg.network, spec, cfg.train, seed);

                const std::string stem =
                    std::string("convergence_") + agent_name(kind) + "_seed" + std::to_string(seed);
                const fs::path csv_path = fs::path(cfg.out_dir) / (stem + ".csv");
                auto os = detail::open_output(csv_path);
                detail::write_provenance(os, cfg, "convergence run");
                os << "# agent = " << agent_name(kind) << '\n';
                os << "# seed = " << seed << '\n';
                os << "iteration,instantaneous_reward_bps,running_avg_throughput_bps,epsilon,"
                      "loss\n";
                for (const MetricsRow& row : run.metrics) {
                    os << row.iteration << ',' << detail::fmt_double(row.reward_bps) << ','
                       << detail::fmt_double(row.running_avg_bps) << ','
                       << detail::fmt_double(row.epsilon) << ',' << detail::fmt_double(row.loss)
                       << '\n';
                }

                const fs::path ckpt_path = fs::path(cfg.out_dir) / (stem + "_checkpoint.txt");
                if (run.vqc) {
                    save_vqc_file(*run.vqc, ckpt_path.string());
                } else {
                    save_mlp_file(*run.mlp, ckpt_path.string());
                }

                std::vector<double>& dest =
                    kind == AgentKind::VQC ? result.vqc_running[si] : result.mlp_running[si];
                dest.resize(run.metrics.size());
                for (std::size_t i = 0; i < run.metrics.size(); ++i) {
                    dest[i] = run.metrics[i].running_avg_bps;
                }
                (kind == AgentKind::VQC ? result.vqc_final : result.mlp_final)[si] =
                    run.final_running_avg_bps;
                files[2 * si + (kind == AgentKind::VQC ? 0 : 1)] = csv_path.string();
            });
        }
    }
    detail::run_jobs(cfg.workers, jobs);
    result.files.assign(files.begin(), files.end());

    result.vqc_median.resize(iterations);
    result.mlp_median.resize(iterations);
    std::vector<double> column(n_seeds);
    for (std::size_t i = 0; i < iterations; ++i) {
        for (std::size_t si = 0; si < n_seeds; ++si) {
            column[si] = result.vqc_running[si][i];
        }
        result.vqc_median[i] = detail::median(column);
        for (std::size_t si = 0; si < n_seeds; ++si) {
            column[si] = result.mlp_running[si][i];
        }
        result.mlp_median[i] = detail::median(column);
    }

    const fs::path summary_path = fs::path(cfg.out_dir) / "convergence_summary.csv";
    auto os = detail::open_output(summary_path);
    detail::write_provenance(os, cfg, "convergence summary (median across seeds)");
    os << "iteration,vqc_median_running_avg_bps,mlp_median_running_avg_bps\n";
    for (std::size_t i = 0; i < iterations; ++i) {
        os << i << ',' << detail::fmt_double(result.vqc_median[i]) << ','
           << detail::fmt_double(result.mlp_median[i]) << '\n';
    }
    result.files.push_back(summary_path.string());
    return result;
}

struct SweepRow {
    double alpha;
    AgentKind agent;
    double median_final_bps;
    double min_final_bps;
    double max_final_bps;
    std::vector<double> per_seed_final_bps; // ordered as sweep.seeds
};

struct SweepResult {
    std::vector<SweepRow> rows; // alpha-major, VQC before MLP
    std::vector<std::string> files;
};

// Trains both agents at every sweep alpha with the sweep budget and matched
// seeds; writes one summary CSV of final running-average throughput.
inline SweepResult run_alpha_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);

    const std::size_t n_alpha = cfg.sweep.alpha.size();
    const std::size_t n_seeds = cfg.sweep.seeds.size();
    std::vector<double> finals(n_alpha * n_seeds * 2, 0.0);

    std::vector<std::function<void()>> jobs;
    for (std::size_t ai = 0; ai < n_alpha; ++ai) {
        for (std::size_t si = 0; si < n_seeds; ++si) {
            for (AgentKind kind : {AgentKind::VQC, AgentKind::MLP}) {
                jobs.push_back([&, ai, si, kind] {
                    NetworkConfig net = cfg.network;
                    net.alpha = cfg.sweep.alpha[ai];
                    TrainConfig train = cfg.train;
                    train.iterations = cfg.sweep.iterations;
                    AgentSpec spec;
                    spec.kind = kind;
                    spec.vqc = cfg.vqc;
                    spec.mlp_layers = cfg.mlp_layers;
                    const TrainResult run = train_run(net, spec, train, cfg.sweep.seeds[si]);
                    finals[(ai * n_seeds + si) * 2 + (kind == AgentKind::VQC ? 0 : 1)] =
                        run.final_running_avg_bps;
                });
            }
        }
    }
    detail::run_jobs(cfg.workers, jobs);

    SweepResult result;
    for (std::size_t ai = 0; ai < n_alpha; ++ai) {
        for (AgentKind kind : {AgentKind::VQC, AgentKind::MLP}) {
            std::vector<double> per_seed(n_seeds);
            for (std::size_t si = 0; si < n_seeds; ++si) {
                per_seed[si] = finals[(ai * n_seeds + si) * 2 + (kind == AgentKind::VQC ? 0 : 1)];
            }
            result.rows.push_back({cfg.sweep.alpha[ai], kind, detail::median(per_seed),
                                   *std::min_element(per_seed.begin(), per_seed.end()),
                                   *std::max_element(per_seed.begin(), per_seed.end()),
                                   per_seed});
        }
    }

    const fs::path summary_path = fs::path(cfg.out_dir) / "sweep_alpha_summary.csv";
    auto os = detail::open_output(summary_path);
    detail::write_provenance(os, cfg, "alpha sweep summary (final running-average throughput)");
    os << "alpha,agent,median_final_avg_bps,min_final_avg_bps,max_final_avg_bps\n";
    for (const SweepRow& row : result.rows) {
        os << detail::fmt_double(row.alpha) << ',' << agent_name(row.agent) << ','
           << detail::fmt_double(row.median_final_bps) << ','
           << detail::fmt_double(row.min_final_bps) << ','
           << detail::fmt_double(row.max_final_bps) << '\n';
    }
    result.files.push_back(summary_path.string());
    return result;
}

} // namespace qdsa

#pragma once

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qdsa/errors.hpp"
#include "qdsa/mlp.hpp"
#include "qdsa/vqc.hpp"

namespace qdsa {

// Text checkpoints: a config header followed by named parameter arrays, one
// value per line. Values are written as C hexfloats so reload is bit-exact.

namespace detail {

inline std::string hex_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

inline void write_array(std::ostream& os, const std::string& name,
                        std::span<const double> values) {
    os << "array " << name << ' ' << values.size() << '\n';
    for (double v : values) {
        os << hex_double(v) << '\n';
    }
}

class CheckpointReader {
  public:
    explicit CheckpointReader(std::istream& is) : is_(is) {}

    std::string line() {
        std::string l;
        if (!std::getline(is_, l)) {
            throw usage_error("checkpoint truncated");
        }
        return l;
    }

    // "key rest-of-line" with the key enforced
    std::string field(const std::string& key) {
        std::string l = line();
        if (l.rfind(key + ' ', 0) != 0) {
            throw usage_error("checkpoint: expected '" + key + " ...', got '" + l + "'");
        }
        return l.substr(key.size() + 1);
    }

    std::vector<double> array(const std::string& name, std::size_t expected) {
        std::istringstream header(field("array"));
        std::string got_name;
        std::size_t count = 0;
        header >> got_name >> count;
        if (got_name != name || count != expected) {
            throw usage_error("checkpoint: expected array " + name + " of " +
                              std::to_string(expected) + ", got " + got_name + " of " +
                              std::to_string(count));
        }
        std::vector<double> values(count);
        for (auto& v : values) {
            const std::string l = line();
            char* end = nullptr;
            v = std::strtod(l.c_str(), &end);
            if (end == l.c_str()) {
                throw usage_error("checkpoint: bad value '" + l + "' in array " + name);
            }
        }
        return values;
    }

  private:
    std::istream& is_;
};

} // namespace detail

inline void save_vqc(const VqcModel& model, std::ostream& os) {
    const auto& cfg = model.config();
    os << "qdsa-checkpoint v1\n";
    os << "kind vqc\n";
    os << "n_qubits " << cfg.n_qubits << '\n';
    os << "n_blocks " << cfg.n_blocks << '\n';
    os << "n_actions " << cfg.n_actions << '\n';
    os << "entangler " << (cfg.entangler == Entangler::CNOT_RING ? "cnot_ring" : "cz_ring")
       << '\n';
    os << "rotation_triplet";
    for (GateKind k : cfg.rotation_triplet) {
        os << ' ' << (k == GateKind::RX ? "rx" : k == GateKind::RY ? "ry" : "rz");
    }
    os << '\n';
    detail::write_array(os, "variational_angles", model.variational_angles());
    detail::write_array(os, "encoding_scales", model.encoding_scales());
    detail::write_array(os, "output_scales", model.output_scales());
    os << "end\n";
}

inline VqcModel load_vqc(std::istream& is) {
    detail::CheckpointReader r(is);
    if (r.line() != "qdsa-checkpoint v1") {
        throw usage_error("not a qdsa-checkpoint v1 file");
    }
    if (r.field("kind") != "vqc") {
        throw usage_error("checkpoint kind is not vqc");
    }
    VqcConfig cfg;
    cfg.n_qubits = std::stoi(r.field("n_qubits"));
    cfg.n_blocks = std::stoi(r.field("n_blocks"));
    cfg.n_actions = std::stoi(r.field("n_actions"));
    const std::string ent = r.field("entangler");
    if (ent == "cnot_ring") {
        cfg.entangler = Entangler::CNOT_RING;
    } else if (ent == "cz_ring") {
        cfg.entangler = Entangler::CZ_RING;
    } else {
        throw usage_error("checkpoint: unknown entangler '" + ent + "'");
    }
    std::istringstream trip(r.field("rotation_triplet"));
    for (auto& k : cfg.rotation_triplet) {
        std::string axis;
        trip >> axis;
        if (axis == "rx") {
            k = GateKind::RX;
        } else if (axis == "ry") {
            k = GateKind::RY;
        } else if (axis == "rz") {
            k = GateKind::RZ;
        } else {
            throw usage_error("checkpoint: bad rotation axis '" + axis + "'");
        }
    }

    VqcModel model(cfg, 0);
    const std::size_t n_phi = model.variational_angles().size();
    const std::size_t n_lambda = model.encoding_scales().size();
    const std::size_t n_w = model.output_scales().size();
    auto phi = r.array("variational_angles", n_phi);
    auto lambda = r.array("encoding_scales", n_lambda);
    auto w = r.array("output_scales", n_w);
    auto& p = model.parameters();
    std::copy(phi.begin(), phi.end(), p.begin());
    std::copy(lambda.begin(), lambda.end(), p.begin() + static_cast<std::ptrdiff_t>(n_phi));
    std::copy(w.begin(), w.end(), p.begin() + static_cast<std::ptrdiff_t>(n_phi + n_lambda));
    if (r.line() != "end") {
        throw usage_error("checkpoint: missing end marker");
    }
    return model;
}

inline void save_mlp(const MlpModel& model, std::ostream& os) {
    os << "qdsa-checkpoint v1\n";
    os << "kind mlp\n";
    os << "layer_sizes";
    for (int s : model.layer_sizes()) {
        os << ' ' << s;
    }
    os << '\n';
    for (std::size_t l = 0; l + 1 < model.layer_sizes().size(); ++l) {
        detail::write_array(os, "weights_" + std::to_string(l), model.layer_weights(l));
        detail::write_array(os, "biases_" + std::to_string(l), model.layer_biases(l));
    }
    os << "end\n";
}

inline MlpModel load_mlp(std::istream& is) {
    detail::CheckpointReader r(is);
    if (r.line() != "qdsa-checkpoint v1") {
        throw usage_error("not a qdsa-checkpoint v1 file");
    }
    if (r.field("kind") != "mlp") {
        throw usage_error("checkpoint kind is not mlp");
    }
    std::istringstream sizes_line(r.field("layer_sizes"));
    std::vector<int> sizes;
    for (int s = 0; sizes_line >> s;) {
        sizes.push_back(s);
    }
    MlpModel model(sizes, 0);
    std::size_t offset = 0;
    auto& p = model.parameters();
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        const std::size_t n_w = static_cast<std::size_t>(sizes[l]) * sizes[l + 1];
        const std::size_t n_b = static_cast<std::size_t>(sizes[l + 1]);
        auto w = r.array("weights_" + std::to_string(l), n_w);
        auto b = r.array("biases_" + std::to_string(l), n_b);
        std::copy(w.begin(), w.end(), p.begin() + static_cast<std::ptrdiff_t>(offset));
        offset += n_w;
        std::copy(b.begin(), b.end(), p.begin() + static_cast<std::ptrdiff_t>(offset));
        offset += n_b;
    }
    if (r.line() != "end") {
        throw usage_error("checkpoint: missing end marker");
    }
    return model;
}

template <typename Model, typename SaveFn>
void save_checkpoint_file(const Model& model, const std::string& path, SaveFn save) {
    std::ofstream os(path);
    if (!os) {
        throw usage_error("cannot open checkpoint file for writing: " + path);
    }
    save(model, os);
    if (!os) {
        throw usage_error("failed writing checkpoint file: " + path);
    }
}

inline void save_vqc_file(const VqcModel& model, const std::string& path) {
    save_checkpoint_file(model, path, [](const VqcModel& m, std::ostream& os) { save_vqc(m, os); });
}

inline void save_mlp_file(const MlpModel& model, const std::string& path) {
    save_checkpoint_file(model, path, [](const MlpModel& m, std::ostream& os) { save_mlp(m, os); });
}

inline VqcModel load_vqc_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) {
        throw usage_error("cannot open checkpoint file: " + path);
    }
    return load_vqc(is);
}

inline MlpModel load_mlp_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) {
        throw usage_error("cannot open checkpoint file: " + path);
    }
    return load_mlp(is);
}

} // namespace qdsa

#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qdsa/errors.hpp"
#include "qdsa/rng.hpp"

namespace qdsa {

// Dense rectified-linear network with identity output layer. Parameters live
// in one flat vector, per layer: weights (row-major, out x in), then biases.
class MlpModel {
  public:
    MlpModel() = default;

    MlpModel(std::vector<int> layer_sizes, std::uint64_t seed)
        : layer_sizes_(std::move(layer_sizes)) {
        if (layer_sizes_.size() < 2) {
            throw config_error("mlp needs at least input and output layer sizes, got " +
                               std::to_string(layer_sizes_.size()));
        }
        for (int s : layer_sizes_) {
            if (s <= 0) {
                throw config_error("mlp layer sizes must be positive");
            }
        }
        std::size_t total = 0;
        for (std::size_t l = 0; l + 1 < layer_sizes_.size(); ++l) {
            weight_offsets_.push_back(total);
            total += static_cast<std::size_t>(layer_sizes_[l]) * layer_sizes_[l + 1];
            bias_offsets_.push_back(total);
            total += static_cast<std::size_t>(layer_sizes_[l + 1]);
        }
        params_.assign(total, 0.0);

        // Glorot-uniform weights, zero biases; draw order is layer by layer,
        // row-major, so a seed pins every value.
        Rng rng = Rng::stream(seed, 0x6d6c70); // "mlp"
        for (std::size_t l = 0; l + 1 < layer_sizes_.size(); ++l) {
            const int fan_in = layer_sizes_[l];
            const int fan_out = layer_sizes_[l + 1];
            const double limit = std::sqrt(6.0 / (fan_in + fan_out));
            double* w = params_.data() + weight_offsets_[l];
            for (int i = 0; i < fan_in * fan_out; ++i) {
                w[i] = rng.uniform(-limit, limit);
            }
        }
    }

    const std::vector<int>& layer_sizes() const { return layer_sizes_; }
    int input_size() const { return layer_sizes_.front(); }
    int output_size() const { return layer_sizes_.back(); }
    std::size_t parameter_count() const { return params_.size(); }
    std::vector<double>& parameters() { return params_; }
    const std::vector<double>& parameters() const { return params_; }

    std::span<const double> layer_weights(std::size_t l) const {
        return {params_.data() + weight_offsets_[l],
                static_cast<std::size_t>(layer_sizes_[l]) * layer_sizes_[l + 1]};
    }
    std::span<const double> layer_biases(std::size_t l) const {
        return {params_.data() + bias_offsets_[l], static_cast<std::size_t>(layer_sizes_[l + 1])};
    }

    std::vector<double> forward(std::span<const double> features) const {
        check_features(features);
        std::vector<double> act(features.begin(), features.end());
        std::vector<double> next;
        for (std::size_t l = 0; l + 1 < layer_sizes_.size(); ++l) {
            affine(l, act, next);
            if (l + 2 < layer_sizes_.size()) {
                for (double& z : next) {
                    z = z > 0.0 ? z : 0.0;
                }
            }
            act.swap(next);
        }
        return act;
    }

    // Gradient of dot(output, loss_grad) w.r.t. all parameters, in the flat
    // parameter layout.
    std::vector<double> backward(std::span<const double> features,
                                 std::span<const double> loss_grad) const {
        check_features(features);
        if (loss_grad.size() != static_cast<std::size_t>(output_size())) {
            throw usage_error("loss_grad length " + std::to_string(loss_grad.size()) +
                              " != output size " + std::to_string(output_size()));
        }
        const std::size_t n_layers = layer_sizes_.size() - 1;

        // forward pass keeping post-activation values per layer
        std::vector<std::vector<double>> acts(n_layers + 1);
        acts[0].assign(features.begin(), features.end());
        for (std::size_t l = 0; l < n_layers; ++l) {
            affine(l, acts[l], acts[l + 1]);
            if (l + 1 < n_layers) {
                for (double& z : acts[l + 1]) {
                    z = z > 0.0 ? z : 0.0;
                }
            }
        }

        std::vector<double> grad(params_.size(), 0.0);
        std::vector<double> delta(loss_grad.begin(), loss_grad.end());
        for (std::size_t l = n_layers; l-- > 0;) {
            const int in = layer_sizes_[l];
            const int out = layer_sizes_[l + 1];
            double* gw = grad.data() + weight_offsets_[l];
            double* gb = grad.data() + bias_offsets_[l];
            const double* a = acts[l].data();
            for (int o = 0; o < out; ++o) {
                const double d = delta[o];
                gb[o] = d;
                double* row = gw + static_cast<std::size_t>(o) * in;
                for (int i = 0; i < in; ++i) {
                    row[i] = d * a[i];
                }
            }
            if (l == 0) {
                break;
            }
            const double* w = params_.data() + weight_offsets_[l];
            std::vector<double> prev(in, 0.0);
            for (int o = 0; o < out; ++o) {
                const double d = delta[o];
                const double* row = w + static_cast<std::size_t>(o) * in;
                for (int i = 0; i < in; ++i) {
                    prev[i] += d * row[i];
                }
            }
            // ReLU derivative on the hidden activation (post-activation > 0)
            for (int i = 0; i < in; ++i) {
                if (acts[l][i] <= 0.0) {
                    prev[i] = 0.0;
                }
            }
            delta.swap(prev);
        }
        return grad;
    }

  private:
    void check_features(std::span<const double> features) const {
        if (features.size() != static_cast<std::size_t>(input_size())) {
            throw usage_error("feature length " + std::to_string(features.size()) +
                              " != input size " + std::to_string(input_size()));
        }
        for (double f : features) {
            if (!std::isfinite(f)) {
                throw usage_error("non-finite feature value");
            }
        }
    }

    void affine(std::size_t l, const std::vector<double>& in_act,
                std::vector<double>& out_act) const {
        const int in = layer_sizes_[l];
        const int out = layer_sizes_[l + 1];
        const double* w = params_.data() + weight_offsets_[l];
        const double* b = params_.data() + bias_offsets_[l];
        out_act.assign(static_cast<std::size_t>(out), 0.0);
        for (int o = 0; o < out; ++o) {
            const double* row = w + static_cast<std::size_t>(o) * in;
            double z = b[o];
            for (int i = 0; i < in; ++i) {
                z += row[i] * in_act[i];
            }
            out_act[o] = z;
        }
    }

    std::vector<int> layer_sizes_;
    std::vector<std::size_t> weight_offsets_;
    std::vector<std::size_t> bias_offsets_;
    std::vector<double> params_;
};

inline MlpModel build_mlp(std::vector<int> layer_sizes, std::uint64_t seed) {
    return MlpModel(std::move(layer_sizes), seed);
}

inline std::vector<double> mlp_forward(const MlpModel& model, std::span<const double> features) {
    return model.forward(features);
}

inline std::vector<double> mlp_backward(const MlpModel& model, std::span<const double> features,
                                        std::span<const double> loss_grad) {
    return model.backward(features, loss_grad);
}

} // namespace qdsa

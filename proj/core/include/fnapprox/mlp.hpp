#pragma once

#include "fnapprox/numerics.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace fnapprox {

/// Hidden-layer nonlinearity. Identity exists for hand-checkable linear
/// test networks; experiments always use Tanh.
enum class Activation { Tanh, Identity };

/// Fully connected network: input_dim -> hidden_widths... -> 1 (linear).
struct MlpArchitecture {
    std::size_t input_dim = 1;
    std::vector<std::size_t> hidden_widths{100, 100, 50, 50};
    Activation activation = Activation::Tanh;

    std::size_t layer_count() const noexcept { return hidden_widths.size() + 1; }
    std::size_t fan_in(std::size_t layer) const;
    std::size_t fan_out(std::size_t layer) const;

    friend bool operator==(const MlpArchitecture&, const MlpArchitecture&) = default;
};

/// Throws std::invalid_argument for zero input_dim, empty or zero widths.
void validate(const MlpArchitecture& arch);

/// Where one layer lives in the flat parameter vector. Weights are stored
/// row-major as fan_out x fan_in, immediately followed by the fan_out biases.
struct LayerSlice {
    std::size_t fan_in;
    std::size_t fan_out;
    std::size_t weight_offset;
    std::size_t bias_offset;
};

std::vector<LayerSlice> layer_slices(const MlpArchitecture& arch);

/// Sum over layers of fan_in * fan_out + fan_out.
std::size_t param_count(const MlpArchitecture& arch);

/// Architecture plus a flat parameter vector of exactly param_count entries.
class MlpModel {
public:
    /// Throws if the parameter count does not match or any entry is non-finite.
    MlpModel(MlpArchitecture arch, FlatVector params);

    static MlpModel zeros(MlpArchitecture arch);

    const MlpArchitecture& architecture() const noexcept { return arch_; }
    std::span<const double> params() const noexcept { return params_; }
    std::size_t param_count() const noexcept { return params_.size(); }

    double weight(std::size_t layer, std::size_t out, std::size_t in) const;
    double bias(std::size_t layer, std::size_t out) const;

private:
    MlpArchitecture arch_;
    FlatVector params_;
};

/// Glorot/Xavier uniform weights in +-sqrt(6 / (fan_in + fan_out)); zero biases.
MlpModel init_xavier(const MlpArchitecture& arch, Prng& prng);

// The span overloads take raw parameters so the optimizer and the
// finite-difference tests can evaluate candidates without building models.

double forward(const MlpArchitecture& arch, std::span<const double> params,
               std::span<const double> input);
double forward(const MlpModel& model, std::span<const double> input);

/// Outputs for every row of `inputs`.
std::vector<double> predict(const MlpModel& model, const Matrix& inputs);
std::vector<double> predict(const MlpArchitecture& arch, std::span<const double> params,
                            const Matrix& inputs);

/// Mean squared error over the rows of `inputs`.
double mse_loss(const MlpArchitecture& arch, std::span<const double> params,
                const Matrix& inputs, std::span<const double> targets);

/// Mean squared error and its exact gradient (same layout as params) written
/// into `grad`.
double mse_loss_and_grad(const MlpArchitecture& arch, std::span<const double> params,
                         const Matrix& inputs, std::span<const double> targets,
                         std::span<double> grad);

struct LossAndGrad {
    double mse;
    FlatVector grad;
};

LossAndGrad loss_and_grad(const MlpModel& model, const Matrix& inputs,
                          std::span<const double> targets);

/// Relabels neurons of hidden layer `layer` (0-based): new neuron i is old
/// neuron permutation[i]. Incoming rows, biases and the outgoing columns of
/// the next layer move together, so the network function is unchanged.
MlpModel permute_hidden_neurons(const MlpModel& model, std::size_t layer,
                                std::span<const std::size_t> permutation);

/// Swaps a single first-layer weight between two neurons: the weights from
/// input channel `input_index` into neurons `neuron_a` and `neuron_b`.
/// Nothing else moves, so in general the network function changes.
MlpModel swap_first_layer_input_weights(const MlpModel& model, std::size_t neuron_a,
                                        std::size_t neuron_b, std::size_t input_index);

} // namespace fnapprox

#include "fnapprox/mlp.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace fnapprox {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ColMat = Eigen::MatrixXd;
using ConstWeights = Eigen::Map<const RowMat>;
using Weights = Eigen::Map<RowMat>;
using ConstBias = Eigen::Map<const Eigen::VectorXd>;
using Bias = Eigen::Map<Eigen::VectorXd>;

void check_params(const MlpArchitecture& arch, std::span<const double> params)
{
    if (params.size() != param_count(arch)) {
        throw std::invalid_argument("parameter vector has length " + std::to_string(params.size())
                                    + ", architecture needs " + std::to_string(param_count(arch)));
    }
}

void check_batch(const MlpArchitecture& arch, const Matrix& inputs, std::size_t targets)
{
    if (inputs.cols != arch.input_dim) {
        throw std::invalid_argument("input has " + std::to_string(inputs.cols)
                                    + " columns, network expects " + std::to_string(arch.input_dim));
    }
    if (inputs.rows == 0 || inputs.rows != targets) {
        throw std::invalid_argument("need a non-empty batch with one target per input row");
    }
}

// Activations of every layer for a batch, one sample per column.
// acts[0] is the input, acts[l] the output of hidden layer l, and the final
// linear output is returned separately.
struct ForwardPass {
    std::vector<ColMat> acts;
    Eigen::RowVectorXd output;
};

ForwardPass run_forward(const MlpArchitecture& arch, std::span<const double> params,
                        const Matrix& inputs)
{
    const auto slices = layer_slices(arch);
    const auto n = static_cast<Eigen::Index>(inputs.rows);

    ForwardPass pass;
    pass.acts.reserve(slices.size());
    // Row-major N x d viewed transposed is a column-major d x N.
    pass.acts.emplace_back(
        Eigen::Map<const RowMat>(inputs.data.data(), n, static_cast<Eigen::Index>(inputs.cols))
            .transpose());

    for (std::size_t l = 0; l < slices.size(); ++l) {
        const auto& s = slices[l];
        ConstWeights w(params.data() + s.weight_offset, static_cast<Eigen::Index>(s.fan_out),
                       static_cast<Eigen::Index>(s.fan_in));
        ConstBias b(params.data() + s.bias_offset, static_cast<Eigen::Index>(s.fan_out));
        ColMat z(w.rows(), n);
        z.noalias() = w * pass.acts.back();
        z.colwise() += b;
        if (l + 1 == slices.size()) {
            pass.output = z.row(0);
        } else {
            if (arch.activation == Activation::Tanh) {
                z = z.array().tanh().matrix();
            }
            pass.acts.push_back(std::move(z));
        }
    }
    return pass;
}

} // namespace

std::size_t MlpArchitecture::fan_in(std::size_t layer) const
{
    if (layer >= layer_count()) {
        throw std::out_of_range("layer index out of range");
    }
    return layer == 0 ? input_dim : hidden_widths[layer - 1];
}

std::size_t MlpArchitecture::fan_out(std::size_t layer) const
{
    if (layer >= layer_count()) {
        throw std::out_of_range("layer index out of range");
    }
    return layer + 1 == layer_count() ? 1 : hidden_widths[layer];
}

void validate(const MlpArchitecture& arch)
{
    if (arch.input_dim == 0) {
        throw std::invalid_argument("input_dim must be >= 1");
    }
    if (arch.hidden_widths.empty()) {
        throw std::invalid_argument("at least one hidden layer is required");
    }
    for (auto w : arch.hidden_widths) {
        if (w == 0) {
            throw std::invalid_argument("hidden widths must be >= 1");
        }
    }
}

std::vector<LayerSlice> layer_slices(const MlpArchitecture& arch)
{
    validate(arch);
    std::vector<LayerSlice> out;
    out.reserve(arch.layer_count());
    std::size_t offset = 0;
    for (std::size_t l = 0; l < arch.layer_count(); ++l) {
        LayerSlice s{arch.fan_in(l), arch.fan_out(l), offset, 0};
        s.bias_offset = offset + s.fan_in * s.fan_out;
        offset = s.bias_offset + s.fan_out;
        out.push_back(s);
    }
    return out;
}

std::size_t param_count(const MlpArchitecture& arch)
{
    validate(arch);
    std::size_t total = 0;
    for (std::size_t l = 0; l < arch.layer_count(); ++l) {
        total += arch.fan_in(l) * arch.fan_out(l) + arch.fan_out(l);
    }
    return total;
}

MlpModel::MlpModel(MlpArchitecture arch, FlatVector params)
    : arch_(std::move(arch)), params_(std::move(params))
{
    check_params(arch_, params_);
    if (!all_finite(params_)) {
        throw std::invalid_argument("model parameters must be finite");
    }
}

MlpModel MlpModel::zeros(MlpArchitecture arch)
{
    const auto n = fnapprox::param_count(arch);
    return MlpModel(std::move(arch), FlatVector(n, 0.0));
}

double MlpModel::weight(std::size_t layer, std::size_t out, std::size_t in) const
{
    const auto s = layer_slices(arch_).at(layer);
    if (out >= s.fan_out || in >= s.fan_in) {
        throw std::out_of_range("weight index out of range");
    }
    return params_[s.weight_offset + out * s.fan_in + in];
}

double MlpModel::bias(std::size_t layer, std::size_t out) const
{
    const auto s = layer_slices(arch_).at(layer);
    if (out >= s.fan_out) {
        throw std::out_of_range("bias index out of range");
    }
    return params_[s.bias_offset + out];
}

MlpModel init_xavier(const MlpArchitecture& arch, Prng& prng)
{
    FlatVector params(param_count(arch), 0.0);
    for (const auto& s : layer_slices(arch)) {
        const double bound = std::sqrt(6.0 / static_cast<double>(s.fan_in + s.fan_out));
        for (std::size_t i = 0; i < s.fan_in * s.fan_out; ++i) {
            params[s.weight_offset + i] = prng.uniform(-bound, bound);
        }
    }
    return MlpModel(arch, std::move(params));
}

double forward(const MlpArchitecture& arch, std::span<const double> params,
               std::span<const double> input)
{
    check_params(arch, params);
    if (input.size() != arch.input_dim) {
        throw std::invalid_argument("input has length " + std::to_string(input.size())
                                    + ", network expects " + std::to_string(arch.input_dim));
    }
    Matrix row(1, input.size());
    std::copy(input.begin(), input.end(), row.data.begin());
    return run_forward(arch, params, row).output(0);
}

double forward(const MlpModel& model, std::span<const double> input)
{
    return forward(model.architecture(), model.params(), input);
}

std::vector<double> predict(const MlpArchitecture& arch, std::span<const double> params,
                            const Matrix& inputs)
{
    check_params(arch, params);
    check_batch(arch, inputs, inputs.rows);
    const auto pass = run_forward(arch, params, inputs);
    return {pass.output.data(), pass.output.data() + pass.output.size()};
}

std::vector<double> predict(const MlpModel& model, const Matrix& inputs)
{
    return predict(model.architecture(), model.params(), inputs);
}

double mse_loss(const MlpArchitecture& arch, std::span<const double> params, const Matrix& inputs,
                std::span<const double> targets)
{
    check_params(arch, params);
    check_batch(arch, inputs, targets.size());
    const auto pass = run_forward(arch, params, inputs);
    const Eigen::Map<const Eigen::RowVectorXd> y(targets.data(),
                                                 static_cast<Eigen::Index>(targets.size()));
    return (pass.output - y).squaredNorm() / static_cast<double>(targets.size());
}

double mse_loss_and_grad(const MlpArchitecture& arch, std::span<const double> params,
                         const Matrix& inputs, std::span<const double> targets,
                         std::span<double> grad)
{
    check_params(arch, params);
    check_batch(arch, inputs, targets.size());
    if (grad.size() != params.size()) {
        throw std::invalid_argument("gradient buffer has wrong length");
    }
    const auto slices = layer_slices(arch);
    const auto pass = run_forward(arch, params, inputs);
    const auto n = static_cast<double>(targets.size());
    const Eigen::Map<const Eigen::RowVectorXd> y(targets.data(),
                                                 static_cast<Eigen::Index>(targets.size()));

    const Eigen::RowVectorXd residual = pass.output - y;
    const double mse = residual.squaredNorm() / n;

    // delta holds dLoss/dz for the current layer, one column per sample.
    ColMat delta = (2.0 / n) * residual;
    for (std::size_t l = slices.size(); l-- > 0;) {
        const auto& s = slices[l];
        const ColMat& a_prev = pass.acts[l];
        Weights gw(grad.data() + s.weight_offset, static_cast<Eigen::Index>(s.fan_out),
                   static_cast<Eigen::Index>(s.fan_in));
        Bias gb(grad.data() + s.bias_offset, static_cast<Eigen::Index>(s.fan_out));
        gw.noalias() = delta * a_prev.transpose();
        gb = delta.rowwise().sum();
        if (l == 0) {
            break;
        }
        ConstWeights w(params.data() + s.weight_offset, static_cast<Eigen::Index>(s.fan_out),
                       static_cast<Eigen::Index>(s.fan_in));
        ColMat back(w.cols(), delta.cols());
        back.noalias() = w.transpose() * delta;
        if (arch.activation == Activation::Tanh) {
            back.array() *= 1.0 - a_prev.array().square();
        }
        delta = std::move(back);
    }
    return mse;
}

LossAndGrad loss_and_grad(const MlpModel& model, const Matrix& inputs,
                          std::span<const double> targets)
{
    LossAndGrad out{0.0, FlatVector(model.param_count(), 0.0)};
    out.mse = mse_loss_and_grad(model.architecture(), model.params(), inputs, targets, out.grad);
    if (!std::isfinite(out.mse) || !all_finite(out.grad)) {
        throw std::domain_error("loss_and_grad produced non-finite values");
    }
    return out;
}

MlpModel permute_hidden_neurons(const MlpModel& model, std::size_t layer,
                                std::span<const std::size_t> permutation)
{
    const auto& arch = model.architecture();
    if (layer >= arch.hidden_widths.size()) {
        throw std::invalid_argument("permute_hidden_neurons: not a hidden layer");
    }
    const std::size_t width = arch.hidden_widths[layer];
    if (permutation.size() != width) {
        throw std::invalid_argument("permutation length must equal the layer width");
    }
    std::vector<bool> seen(width, false);
    for (auto p : permutation) {
        if (p >= width || seen[p]) {
            throw std::invalid_argument("permutation is not a bijection");
        }
        seen[p] = true;
    }

    const auto slices = layer_slices(arch);
    const auto& cur = slices[layer];
    const auto& next = slices[layer + 1];
    const auto src = model.params();
    FlatVector dst(src.begin(), src.end());
    for (std::size_t i = 0; i < width; ++i) {
        const std::size_t from = permutation[i];
        for (std::size_t j = 0; j < cur.fan_in; ++j) {
            dst[cur.weight_offset + i * cur.fan_in + j] = src[cur.weight_offset + from * cur.fan_in + j];
        }
        dst[cur.bias_offset + i] = src[cur.bias_offset + from];
        for (std::size_t r = 0; r < next.fan_out; ++r) {
            dst[next.weight_offset + r * next.fan_in + i] = src[next.weight_offset + r * next.fan_in + from];
        }
    }
    return MlpModel(arch, std::move(dst));
}

MlpModel swap_first_layer_input_weights(const MlpModel& model, std::size_t neuron_a,
                                        std::size_t neuron_b, std::size_t input_index)
{
    const auto& arch = model.architecture();
    const auto first = layer_slices(arch).front();
    if (neuron_a >= first.fan_out || neuron_b >= first.fan_out || input_index >= first.fan_in) {
        throw std::invalid_argument("swap_first_layer_input_weights: index out of range");
    }
    FlatVector p(model.params().begin(), model.params().end());
    std::swap(p[first.weight_offset + neuron_a * first.fan_in + input_index],
              p[first.weight_offset + neuron_b * first.fan_in + input_index]);
    return MlpModel(arch, std::move(p));
}

} // namespace fnapprox

#pragma once

#include "fnapprox/benchmark_functions.hpp"
#include "fnapprox/numerics.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace fnapprox {

/// Values used for the padding channels around the scalar input.
enum class ConstantScheme { AllPi, AllZero, AllOne, AllE, Mixed, Custom };

/// Canonical names: pi, zero, one, e, mixed (custom has no CLI name).
std::string_view to_string(ConstantScheme scheme);
std::optional<ConstantScheme> parse_scheme(std::string_view text);

/// Maps x to [c_1..c_k, x, c_{k+1}..c_2k], a vector of length 2k+1.
///
/// k = 0 is the identity embedding for every scheme. Mixed fixes the four
/// constants (0, 1, e, pi) and therefore needs k = 2; Custom takes an explicit
/// list of 2k constants.
class ExpansionConfig {
public:
    ExpansionConfig() = default;
    ExpansionConfig(int k, ConstantScheme scheme);

    static ExpansionConfig identity() { return {}; }
    static ExpansionConfig with_constants(std::vector<double> constants);

    int k() const noexcept { return k_; }
    ConstantScheme scheme() const noexcept { return scheme_; }
    std::size_t output_dim() const noexcept { return static_cast<std::size_t>(2 * k_ + 1); }

    /// The 2k padding values in slot order (left block, then right block).
    const std::vector<double>& constants() const noexcept { return constants_; }

    /// Index of the x coordinate in the expanded vector.
    std::size_t center() const noexcept { return static_cast<std::size_t>(k_); }

    friend bool operator==(const ExpansionConfig&, const ExpansionConfig&) = default;

private:
    int k_ = 0;
    ConstantScheme scheme_ = ConstantScheme::AllPi;
    std::vector<double> constants_;
};

FlatVector expand(double x, const ExpansionConfig& cfg);

/// Writes expand(x) into `out` (length output_dim).
void expand_into(double x, const ExpansionConfig& cfg, std::span<double> out);

/// One row per sample, |xs| x (2k+1).
Matrix expand_inputs(std::span<const double> xs, const ExpansionConfig& cfg);

inline Matrix expand_dataset(const Dataset& ds, const ExpansionConfig& cfg)
{
    return expand_inputs(ds.xs, cfg);
}

} // namespace fnapprox

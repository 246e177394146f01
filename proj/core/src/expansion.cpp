#include "fnapprox/expansion.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fnapprox {

std::string_view to_string(ConstantScheme scheme)
{
    switch (scheme) {
    case ConstantScheme::AllPi: return "pi";
    case ConstantScheme::AllZero: return "zero";
    case ConstantScheme::AllOne: return "one";
    case ConstantScheme::AllE: return "e";
    case ConstantScheme::Mixed: return "mixed";
    case ConstantScheme::Custom: return "custom";
    }
    throw std::invalid_argument("unknown constant scheme");
}

std::optional<ConstantScheme> parse_scheme(std::string_view text)
{
    for (auto s : {ConstantScheme::AllPi, ConstantScheme::AllZero, ConstantScheme::AllOne,
                   ConstantScheme::AllE, ConstantScheme::Mixed}) {
        if (text == to_string(s)) {
            return s;
        }
    }
    return std::nullopt;
}

ExpansionConfig::ExpansionConfig(int k, ConstantScheme scheme) : k_(k), scheme_(scheme)
{
    if (k < 0) {
        throw std::invalid_argument("expansion factor k must be non-negative");
    }
    const auto n = static_cast<std::size_t>(2 * k);
    switch (scheme) {
    case ConstantScheme::AllPi: constants_.assign(n, kPi); break;
    case ConstantScheme::AllZero: constants_.assign(n, 0.0); break;
    case ConstantScheme::AllOne: constants_.assign(n, 1.0); break;
    case ConstantScheme::AllE: constants_.assign(n, kE); break;
    case ConstantScheme::Mixed:
        if (k != 2) {
            throw std::invalid_argument("mixed constant scheme requires k = 2, got k = "
                                        + std::to_string(k));
        }
        constants_ = {0.0, 1.0, kE, kPi};
        break;
    case ConstantScheme::Custom:
        throw std::invalid_argument("use ExpansionConfig::with_constants for custom constants");
    }
}

ExpansionConfig ExpansionConfig::with_constants(std::vector<double> constants)
{
    if (constants.size() % 2 != 0) {
        throw std::invalid_argument("custom constants must have even length 2k");
    }
    for (double c : constants) {
        if (!std::isfinite(c)) {
            throw std::invalid_argument("custom constants must be finite");
        }
    }
    ExpansionConfig cfg;
    cfg.k_ = static_cast<int>(constants.size() / 2);
    cfg.scheme_ = ConstantScheme::Custom;
    cfg.constants_ = std::move(constants);
    return cfg;
}

void expand_into(double x, const ExpansionConfig& cfg, std::span<double> out)
{
    if (!std::isfinite(x)) {
        throw std::invalid_argument("expand: x must be finite");
    }
    if (out.size() != cfg.output_dim()) {
        throw std::invalid_argument("expand: output span has wrong length");
    }
    const auto k = cfg.center();
    const auto& c = cfg.constants();
    for (std::size_t i = 0; i < k; ++i) {
        out[i] = c[i];
        out[k + 1 + i] = c[k + i];
    }
    out[k] = x;
}

FlatVector expand(double x, const ExpansionConfig& cfg)
{
    FlatVector v(cfg.output_dim());
    expand_into(x, cfg, v);
    return v;
}

Matrix expand_inputs(std::span<const double> xs, const ExpansionConfig& cfg)
{
    Matrix m(xs.size(), cfg.output_dim());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        expand_into(xs[i], cfg, m.row(i));
    }
    return m;
}

} // namespace fnapprox

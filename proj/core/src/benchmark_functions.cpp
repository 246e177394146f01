#include "fnapprox/benchmark_functions.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace fnapprox {

namespace {

double signum(double v) noexcept
{
    return static_cast<double>((v > 0.0) - (v < 0.0));
}

// Floored modulus with result in [0, period).
double wrap(double x, double period) noexcept
{
    double r = std::fmod(x, period);
    if (r < 0.0) {
        r += period;
    }
    if (r >= period) {
        r = 0.0;
    }
    return r;
}

double weierstrass(double x) noexcept
{
    double sum = 0.0;
    double freq = 1.0;
    double amp = 1.0;
    for (int n = 0; n <= 19; ++n) {
        sum += std::cos(freq * x) * amp;
        freq *= 3.0;
        amp *= 0.5;
    }
    return sum;
}

} // namespace

FunctionCategory category_of(FunctionId id)
{
    switch (id) {
    case FunctionId::F1:
    case FunctionId::F5:
    case FunctionId::F6:
        return FunctionCategory::Smooth;
    case FunctionId::F2:
    case FunctionId::F3:
    case FunctionId::F7:
        return FunctionCategory::Discontinuous;
    // F8 is analytically smooth but grouped with F9 in the category table.
    case FunctionId::F8:
    case FunctionId::F9:
        return FunctionCategory::NonDifferentiable;
    case FunctionId::F4:
    case FunctionId::F10:
        return FunctionCategory::ComplexSpectrum;
    }
    throw std::invalid_argument("unknown function id");
}

std::vector<FunctionId> functions_in(FunctionCategory category)
{
    std::vector<FunctionId> out;
    for (auto id : kAllFunctions) {
        if (category_of(id) == category) {
            out.push_back(id);
        }
    }
    return out;
}

std::string to_string(FunctionId id)
{
    const int n = static_cast<int>(id);
    if (n < 1 || n > 10) {
        throw std::invalid_argument("unknown function id");
    }
    return "F" + std::to_string(n);
}

std::string_view description(FunctionId id)
{
    switch (id) {
    case FunctionId::F1: return "Multi-frequency Sine Combination";
    case FunctionId::F2: return "Square Wave";
    case FunctionId::F3: return "Sawtooth Wave";
    case FunctionId::F4: return "Triangle Wave";
    case FunctionId::F5: return "Modulated Sine Wave";
    case FunctionId::F6: return "Frequency Chirp";
    case FunctionId::F7: return "Duty-cycle Modulated Square Wave";
    case FunctionId::F8: return "Van der Pol Oscillator Approximation";
    case FunctionId::F9: return "Weierstrass Function";
    case FunctionId::F10: return "Comb Function";
    }
    throw std::invalid_argument("unknown function id");
}

std::string_view to_string(FunctionCategory category)
{
    switch (category) {
    case FunctionCategory::Smooth: return "Smooth";
    case FunctionCategory::Discontinuous: return "Discontinuous";
    case FunctionCategory::NonDifferentiable: return "NonDifferentiable";
    case FunctionCategory::ComplexSpectrum: return "ComplexSpectrum";
    }
    throw std::invalid_argument("unknown category");
}

std::optional<FunctionId> parse_function_id(std::string_view text)
{
    if (!text.empty() && (text.front() == 'F' || text.front() == 'f')) {
        text.remove_prefix(1);
    }
    if (text.empty() || text.size() > 2) {
        return std::nullopt;
    }
    int n = 0;
    for (char c : text) {
        if (!std::isdigit(static_cast<unsigned char>(c))) {
            return std::nullopt;
        }
        n = n * 10 + (c - '0');
    }
    if (n < 1 || n > 10 || (text.size() == 2 && text.front() == '0')) {
        return std::nullopt;
    }
    return static_cast<FunctionId>(n);
}

double eval_function(FunctionId id, double x)
{
    if (!std::isfinite(x)) {
        throw std::invalid_argument("eval_function: x must be finite");
    }
    switch (id) {
    case FunctionId::F1:
        return std::sin(x) + 0.5 * std::sin(4.0 * x) + 0.25 * std::sin(8.0 * x);
    case FunctionId::F2:
        return signum(std::sin(4.0 * x));
    case FunctionId::F3: {
        constexpr double period = kTwoPi / 4.0;
        const double v = wrap(x, period) / period;
        return v < 1.0 ? v : std::nextafter(1.0, 0.0);
    }
    case FunctionId::F4:
        return 2.0 * std::asin(std::sin(x)) / kPi;
    case FunctionId::F5:
        return (1.0 + 0.5 * std::sin(0.5 * x)) * std::sin(8.0 * x);
    case FunctionId::F6:
        return std::sin(x + 0.1 * x * x);
    case FunctionId::F7:
        return signum(std::sin(4.0 * x) - 0.3 * std::sin(0.5 * x));
    case FunctionId::F8: {
        const double decay = std::exp(-0.05 * x);
        return std::sin(x) * decay + 0.2 * std::sin(8.0 * x) * decay;
    }
    case FunctionId::F9:
        return weierstrass(x);
    case FunctionId::F10:
        return std::fabs(wrap(x, kTwoPi) - kPi) < 0.2 ? 1.0 : 0.0;
    }
    throw std::invalid_argument("eval_function: unknown function id");
}

Dataset sample_train(FunctionId id, std::size_t n, Prng& prng)
{
    if (n == 0) {
        throw std::invalid_argument("sample_train: n must be >= 1");
    }
    Dataset ds{id, DatasetKind::Train, {}, {}};
    ds.xs.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        ds.xs.push_back(prng.uniform(0.0, kTwoPi));
    }
    std::sort(ds.xs.begin(), ds.xs.end());
    ds.ys.reserve(n);
    for (double x : ds.xs) {
        ds.ys.push_back(eval_function(id, x));
    }
    return ds;
}

Dataset sample_test(FunctionId id, std::size_t n)
{
    if (n < 2) {
        throw std::invalid_argument("sample_test: n must be >= 2");
    }
    Dataset ds{id, DatasetKind::Test, {}, {}};
    ds.xs.reserve(n);
    ds.ys.reserve(n);
    const double denom = static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = (i + 1 == n) ? kTwoPi : kTwoPi * static_cast<double>(i) / denom;
        ds.xs.push_back(x);
        ds.ys.push_back(eval_function(id, x));
    }
    return ds;
}

} // namespace fnapprox

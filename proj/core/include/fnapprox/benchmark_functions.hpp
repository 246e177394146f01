#pragma once

#include "fnapprox/numerics.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fnapprox {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kPi = 3.141592653589793238462643383280;
inline constexpr double kE = 2.718281828459045235360287471353;

enum class FunctionId { F1 = 1, F2, F3, F4, F5, F6, F7, F8, F9, F10 };

enum class FunctionCategory { Smooth, Discontinuous, NonDifferentiable, ComplexSpectrum };

inline constexpr std::array<FunctionId, 10> kAllFunctions{
    FunctionId::F1, FunctionId::F2, FunctionId::F3, FunctionId::F4, FunctionId::F5,
    FunctionId::F6, FunctionId::F7, FunctionId::F8, FunctionId::F9, FunctionId::F10};

inline constexpr std::array<FunctionCategory, 4> kAllCategories{
    FunctionCategory::Smooth, FunctionCategory::Discontinuous,
    FunctionCategory::NonDifferentiable, FunctionCategory::ComplexSpectrum};

FunctionCategory category_of(FunctionId id);
std::vector<FunctionId> functions_in(FunctionCategory category);

/// "F1" .. "F10"
std::string to_string(FunctionId id);
/// Human readable name, e.g. "Multi-frequency Sine Combination".
std::string_view description(FunctionId id);
std::string_view to_string(FunctionCategory category);

/// Accepts "F1".."F10" (case-insensitive) or "1".."10".
std::optional<FunctionId> parse_function_id(std::string_view text);

/// Closed-form value of a benchmark function. Total on finite x; throws
/// std::invalid_argument for non-finite x or an out-of-range id.
double eval_function(FunctionId id, double x);

enum class DatasetKind { Train, Test };

struct Dataset {
    FunctionId function;
    DatasetKind kind;
    std::vector<double> xs;
    std::vector<double> ys;

    std::size_t size() const noexcept { return xs.size(); }
};

/// `n` i.i.d. uniform draws over [0, 2*pi), sorted ascending, exact targets.
Dataset sample_train(FunctionId id, std::size_t n, Prng& prng);

/// Closed equispaced grid x_i = 2*pi*i/(n-1), i = 0..n-1.
Dataset sample_test(FunctionId id, std::size_t n = 100);

} // namespace fnapprox

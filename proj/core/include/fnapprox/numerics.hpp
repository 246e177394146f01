#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace fnapprox {

/// Dense vector of doubles. Parameters, gradients and search directions all
/// use this representation.
using FlatVector = std::vector<double>;

/// One step of the splitmix64 generator. Advances `state` and returns the
/// next output.
std::uint64_t splitmix64_next(std::uint64_t& state) noexcept;

/// Stateless splitmix64 finalizer, used to hash-mix seeds.
std::uint64_t mix64(std::uint64_t value) noexcept;

/// Derive an independent seed for a sub-stream (`tag`) of `base`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag, std::uint64_t index = 0) noexcept;

/// xoshiro256++ stream seeded through splitmix64.
///
/// The output sequence is a pure function of the seed; only integer
/// arithmetic is involved so it is identical on every platform.
class Prng {
public:
    explicit Prng(std::uint64_t seed) noexcept;

    std::uint64_t next_u64() noexcept;

    /// Uniform double in [0, 1) with 53 bits of resolution.
    double next_unit() noexcept;

    /// Uniform double in [lo, hi). Throws std::invalid_argument when the
    /// bounds are non-finite or lo >= hi.
    double uniform(double lo, double hi);

    const std::array<std::uint64_t, 4>& state() const noexcept { return state_; }

private:
    std::array<std::uint64_t, 4> state_;
};

inline Prng seed_prng(std::uint64_t seed) noexcept { return Prng{seed}; }

double dot(std::span<const double> a, std::span<const double> b);

/// Returns alpha * x + y.
FlatVector axpy(double alpha, std::span<const double> x, std::span<const double> y);

/// In-place y += alpha * x.
void axpy_inplace(double alpha, std::span<const double> x, std::span<double> y);

double norm_inf(std::span<const double> v) noexcept;

bool all_finite(std::span<const double> v) noexcept;

/// Row-major dense matrix, used for design matrices (one sample per row).
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) noexcept { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data[r * cols + c]; }

    std::span<const double> row(std::size_t r) const noexcept { return {data.data() + r * cols, cols}; }
    std::span<double> row(std::size_t r) noexcept { return {data.data() + r * cols, cols}; }
};

} // namespace fnapprox

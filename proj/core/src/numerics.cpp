#include "fnapprox/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace fnapprox {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept
{
    return (x << k) | (x >> (64 - k));
}

void require_same_length(std::size_t a, std::size_t b)
{
    if (a != b) {
        throw std::invalid_argument("vector length mismatch: " + std::to_string(a) + " vs "
                                    + std::to_string(b));
    }
}

} // namespace

std::uint64_t splitmix64_next(std::uint64_t& state) noexcept
{
    state += 0x9e3779b97f4a7c15ULL;
    return mix64(state);
}

std::uint64_t mix64(std::uint64_t z) noexcept
{
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag, std::uint64_t index) noexcept
{
    return mix64(mix64(base ^ mix64(tag)) + index);
}

Prng::Prng(std::uint64_t seed) noexcept
{
    std::uint64_t sm = seed;
    for (auto& word : state_) {
        word = splitmix64_next(sm);
    }
}

std::uint64_t Prng::next_u64() noexcept
{
    auto& s = state_;
    const std::uint64_t result = rotl(s[0] + s[3], 23) + s[0];
    const std::uint64_t t = s[1] << 17;
    s[2] ^= s[0];
    s[3] ^= s[1];
    s[1] ^= s[2];
    s[0] ^= s[3];
    s[2] ^= t;
    s[3] = rotl(s[3], 45);
    return result;
}

double Prng::next_unit() noexcept
{
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Prng::uniform(double lo, double hi)
{
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
        throw std::invalid_argument("uniform: require finite lo < hi");
    }
    const double v = lo + (hi - lo) * next_unit();
    // Rounding of the affine map can land exactly on hi.
    if (v >= hi) {
        return std::nextafter(hi, lo);
    }
    return v;
}

double dot(std::span<const double> a, std::span<const double> b)
{
    require_same_length(a.size(), b.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += a[i] * b[i];
    }
    return acc;
}

FlatVector axpy(double alpha, std::span<const double> x, std::span<const double> y)
{
    require_same_length(x.size(), y.size());
    FlatVector out(y.begin(), y.end());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] += alpha * x[i];
    }
    return out;
}

void axpy_inplace(double alpha, std::span<const double> x, std::span<double> y)
{
    require_same_length(x.size(), y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        y[i] += alpha * x[i];
    }
}

double norm_inf(std::span<const double> v) noexcept
{
    double m = 0.0;
    for (double x : v) {
        const double a = std::fabs(x);
        if (a > m || std::isnan(a)) {
            m = a;
        }
    }
    return m;
}

bool all_finite(std::span<const double> v) noexcept
{
    for (double x : v) {
        if (!std::isfinite(x)) {
            return false;
        }
    }
    return true;
}

} // namespace fnapprox

#pragma once

#include "fnapprox/benchmark_functions.hpp"
#include "fnapprox/expansion.hpp"
#include "fnapprox/lbfgs.hpp"
#include "fnapprox/mlp.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

namespace fnapprox {

/// 17 significant digits ("%.17g"); parses back to the identical double.
/// Non-finite values print as nan, inf and -inf.
std::string format_double(double v);

/// Strict parse of a full token; throws std::invalid_argument.
double parse_double(std::string_view text);

/// CSV with header `x,y`.
void write_dataset_csv(std::ostream& os, const Dataset& ds);
Dataset read_dataset_csv(std::istream& is, FunctionId function, DatasetKind kind);

/// CSV with header `iter,train_mse,grad_inf_norm,step_len,fevals`.
void write_trace_csv(std::ostream& os, const ConvergenceTrace& trace);
ConvergenceTrace read_trace_csv(std::istream& is);

/// Model checkpoint: a JSON object with the architecture, seed and expansion,
/// followed by the flat `params` array.
struct Checkpoint {
    MlpArchitecture architecture;
    std::uint64_t seed = 0;
    ExpansionConfig expansion;
    FlatVector params;
};

void write_checkpoint(std::ostream& os, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& is);

/// 64-bit FNV-1a, printed as 16 hex digits. Used for config fingerprints.
std::string fingerprint(std::string_view text);

/// Writes `contents` to `path`, creating parent directories.
void write_text_file(const std::filesystem::path& path, std::string_view contents);
std::string read_text_file(const std::filesystem::path& path);

} // namespace fnapprox

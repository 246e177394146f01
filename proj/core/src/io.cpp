#include "fnapprox/io.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace fnapprox {

namespace {

using json = nlohmann::json;

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

void expect_header(std::istream& is, std::string_view header)
{
    std::string line;
    if (!std::getline(is, line)) {
        throw std::invalid_argument("CSV is empty, expected header " + std::string(header));
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != header) {
        throw std::invalid_argument("unexpected CSV header '" + line + "', expected '"
                                    + std::string(header) + "'");
    }
}

std::size_t parse_count(const std::string& text)
{
    const double v = parse_double(text);
    if (v < 0 || v != std::floor(v)) {
        throw std::invalid_argument("expected a non-negative integer, got '" + text + "'");
    }
    return static_cast<std::size_t>(v);
}

std::string_view activation_name(Activation a)
{
    return a == Activation::Tanh ? "tanh" : "identity";
}

} // namespace

std::string format_double(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(std::string_view text)
{
    const std::string s(text);
    if (s == "nan") {
        return std::nan("");
    }
    if (s == "inf") {
        return INFINITY;
    }
    if (s == "-inf") {
        return -INFINITY;
    }
    if (s.empty()) {
        throw std::invalid_argument("expected a number, got an empty field");
    }
    double v = 0.0;
    const char* first = s.data();
    if (*first == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw std::invalid_argument("not a number: '" + s + "'");
    }
    return v;
}

void write_dataset_csv(std::ostream& os, const Dataset& ds)
{
    os << "x,y\n";
    for (std::size_t i = 0; i < ds.size(); ++i) {
        os << format_double(ds.xs[i]) << ',' << format_double(ds.ys[i]) << '\n';
    }
}

Dataset read_dataset_csv(std::istream& is, FunctionId function, DatasetKind kind)
{
    expect_header(is, "x,y");
    Dataset ds{function, kind, {}, {}};
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line == "\r") {
            continue;
        }
        const auto f = split_csv_line(line);
        if (f.size() != 2) {
            throw std::invalid_argument("dataset row must have 2 fields: " + line);
        }
        ds.xs.push_back(parse_double(f[0]));
        ds.ys.push_back(parse_double(f[1]));
    }
    return ds;
}

void write_trace_csv(std::ostream& os, const ConvergenceTrace& trace)
{
    os << "iter,train_mse,grad_inf_norm,step_len,fevals\n";
    for (const auto& r : trace.records) {
        os << r.iteration << ',' << format_double(r.loss) << ',' << format_double(r.grad_inf_norm)
           << ',' << format_double(r.step) << ',' << r.evaluations << '\n';
    }
}

ConvergenceTrace read_trace_csv(std::istream& is)
{
    expect_header(is, "iter,train_mse,grad_inf_norm,step_len,fevals");
    ConvergenceTrace trace;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line == "\r") {
            continue;
        }
        const auto f = split_csv_line(line);
        if (f.size() != 5) {
            throw std::invalid_argument("trace row must have 5 fields: " + line);
        }
        trace.records.push_back({parse_count(f[0]), parse_double(f[1]), parse_double(f[2]),
                                 parse_double(f[3]), parse_count(f[4])});
    }
    return trace;
}

void write_checkpoint(std::ostream& os, const Checkpoint& ckpt)
{
    if (ckpt.params.size() != param_count(ckpt.architecture)) {
        throw std::invalid_argument("checkpoint parameter count does not match architecture");
    }
    json header;
    header["format"] = "fnapprox-checkpoint-v1";
    header["architecture"] = {
        {"input_dim", ckpt.architecture.input_dim},
        {"hidden_widths", ckpt.architecture.hidden_widths},
        {"activation", activation_name(ckpt.architecture.activation)},
        {"param_count", ckpt.params.size()},
    };
    header["seed"] = ckpt.seed;
    header["expansion"] = {
        {"k", ckpt.expansion.k()},
        {"scheme", to_string(ckpt.expansion.scheme())},
    };
    if (ckpt.expansion.scheme() == ConstantScheme::Custom) {
        json constants = json::array();
        for (double c : ckpt.expansion.constants()) {
            constants.push_back(format_double(c));
        }
        header["expansion"]["constants"] = constants;
    }

    // The header object is emitted by the JSON library; the parameter array
    // is appended by hand to pin the 17-digit float formatting.
    std::string text = header.dump();
    text.pop_back();
    os << text << ",\"params\":[";
    for (std::size_t i = 0; i < ckpt.params.size(); ++i) {
        if (i) {
            os << ',';
        }
        os << format_double(ckpt.params[i]);
    }
    os << "]}\n";
}

Checkpoint read_checkpoint(std::istream& is)
{
    json j;
    try {
        j = json::parse(is);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("malformed checkpoint: ") + e.what());
    }
    if (j.value("format", std::string{}) != "fnapprox-checkpoint-v1") {
        throw std::invalid_argument("not an fnapprox checkpoint");
    }
    Checkpoint ckpt;
    const auto& a = j.at("architecture");
    ckpt.architecture.input_dim = a.at("input_dim").get<std::size_t>();
    ckpt.architecture.hidden_widths = a.at("hidden_widths").get<std::vector<std::size_t>>();
    const auto act = a.at("activation").get<std::string>();
    if (act == "tanh") {
        ckpt.architecture.activation = Activation::Tanh;
    } else if (act == "identity") {
        ckpt.architecture.activation = Activation::Identity;
    } else {
        throw std::invalid_argument("unknown activation '" + act + "'");
    }
    ckpt.seed = j.at("seed").get<std::uint64_t>();

    const auto& e = j.at("expansion");
    const auto scheme_name = e.at("scheme").get<std::string>();
    const int k = e.at("k").get<int>();
    if (scheme_name == "custom") {
        std::vector<double> constants;
        for (const auto& c : e.at("constants")) {
            constants.push_back(parse_double(c.get<std::string>()));
        }
        ckpt.expansion = ExpansionConfig::with_constants(std::move(constants));
    } else {
        const auto scheme = parse_scheme(scheme_name);
        if (!scheme) {
            throw std::invalid_argument("unknown constant scheme '" + scheme_name + "'");
        }
        ckpt.expansion = ExpansionConfig(k, *scheme);
    }
    ckpt.params = j.at("params").get<FlatVector>();
    if (ckpt.params.size() != param_count(ckpt.architecture)) {
        throw std::invalid_argument("checkpoint parameter count does not match architecture");
    }
    return ckpt;
}

std::string fingerprint(std::string_view text)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_text_file(const std::filesystem::path& path, std::string_view contents)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) {
        throw std::runtime_error("failed writing " + path.string());
    }
}

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace fnapprox

#pragma once

#include "momentcone/correlation.hpp"
#include "momentcone/json_io.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace momentcone::cli {

// Bad usage, bad config or unreadable input; maps to exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr int exit_decided = 0;
constexpr int exit_usage = 2;
constexpr int exit_inconclusive = 3;

struct RunConfig {
    json raw;
    std::uint64_t hash = 0;
    std::optional<MeasureModel> model;
    int dimension = 1;
    Window window = Window::cube(4.0, 1);
    std::size_t samples = 1000;
    std::uint64_t seed = 0;
    double trunc_eps = default_trunc_eps;
    int max_total_degree = 4;
    std::vector<OffDiagonalBox> boxes;
    VerdictOptions verdict;
    int threads = 1;
};

// Applies "a.b.c=value" to j; the value is parsed as JSON when it can be,
// otherwise stored as a string.
void apply_override(json& j, const std::string& assignment);

// Reads the config file (empty path: {}), applies the overrides and
// validates the result.
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides);
RunConfig parse_config(const json& j);

// FNV-1a over the compact dump of j.
std::uint64_t config_hash(const json& j);

struct SampleFile {
    json manifest;
    Window window = Window::cube(1.0, 1);
    std::vector<DiscreteMeasure> samples;
};

void write_sample_file(std::ostream& out, const RunConfig& cfg, const std::vector<DiscreteMeasure>& samples);
SampleFile read_sample_file(std::istream& in);
SampleFile read_sample_file(const std::string& path);

int cmd_simulate(const RunConfig& cfg, std::ostream& out);
int cmd_moments(const RunConfig& cfg, const std::optional<std::string>& sample_path, std::ostream& out);
int cmd_verdict(const RunConfig& cfg, const std::optional<std::string>& sample_path, std::ostream& out);
int cmd_recover_rho(const RunConfig& cfg, const std::optional<std::string>& sample_path, int n, std::ostream& out);

// Oracle and property checks; one PASS/FAIL line each.
int run_selftest(std::ostream& out);

}  // namespace momentcone::cli

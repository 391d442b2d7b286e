#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "dusm/controller.hpp"
#include "dusm/metrics.hpp"
#include "dusm/workload.hpp"

namespace dusm {

/// One experiment cell.
struct SimConfig {
    int k = 16;
    Mode mode = Mode::Dusm;
    std::uint64_t threshold_bytes = 10 * 1024;
    int trees = 4;
    Placement placement = Placement::Random;
    RootPolicy root_policy = RootPolicy::Random;
    /// Replay this trace instead of generating a synthetic workload.
    std::optional<std::filesystem::path> trace;
    /// Synthetic workload; its placement and seed are taken from this config.
    WorkloadSpec workload;
    std::uint64_t seed = 0;
    std::uint64_t encap_overhead_bytes = 0;
    double poll_interval = 0.0;
    std::filesystem::path out_dir = "out";
    std::vector<ReportFormat> formats = {ReportFormat::Json, ReportFormat::Csv};

    WorkloadSpec effective_workload() const;
    /// Config echo embedded in reports.
    nlohmann::json echo() const;
};

struct ConfigError {
    std::string path;
    std::string message;
};

template <typename T>
struct Validated {
    std::optional<T> value;
    std::vector<ConfigError> errors;

    bool ok() const { return value.has_value() && errors.empty(); }
};

/// A config whose mode, threshold, trees, placement and seed may be lists.
struct MatrixConfig {
    SimConfig base;
    std::vector<Mode> modes;
    std::vector<std::uint64_t> thresholds;
    std::vector<int> trees;
    std::vector<Placement> placements;
    std::vector<std::uint64_t> seeds;
    int jobs = 1;
};

/// "10KB", "1 MB", "512", "2GB". KB = 1024 bytes.
std::optional<std::uint64_t> parse_size(std::string_view text);

/// Checks field types and ranges and fills defaults. Cell-dependent
/// constraints (trees vs k) are left to validate_cell.
Validated<MatrixConfig> validate_matrix_config(const nlohmann::json& raw);
/// Single-cell config: every list field must hold one value.
Validated<SimConfig> validate_config(const nlohmann::json& raw);
std::vector<ConfigError> validate_cell(const SimConfig& cfg);

nlohmann::json load_config_file(const std::filesystem::path& path);
/// Sets a dotted field path ("workload.groups") in a raw config.
void set_config_path(nlohmann::json& raw, std::string_view dotted, nlohmann::json value);

std::string format_errors(const std::vector<ConfigError>& errors);

}  // namespace dusm

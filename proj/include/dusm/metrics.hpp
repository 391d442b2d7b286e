#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "dusm/controller.hpp"
#include "dusm/dataplane.hpp"

namespace dusm {

/// Five-number summary plus mean. Percentiles interpolate linearly between
/// closest ranks: the q-quantile of n sorted values sits at position q*(n-1).
struct BoxStats {
    double min = 0, q25 = 0, median = 0, q75 = 0, max = 0, mean = 0;

    bool operator==(const BoxStats&) const = default;
};

inline constexpr const char* kStatNames[] = {"min", "q25", "median", "q75", "max", "mean"};

/// Throws std::invalid_argument on empty input.
BoxStats box_stats(std::span<const double> values);

/// Raw per-element measurement in long format.
struct Observation {
    std::string family;    // rules | link_bytes | updates | membership_updates
    std::string category;  // layer or link class
    std::string element;   // switch or link name
    double value = 0;

    bool operator==(const Observation&) const = default;
};

struct Observations {
    double duration = 0;
    nlohmann::json config = nlohmann::json::object();
    std::vector<Observation> rows;
};

Observations collect_observations(const FatTree& topo, const GroupTables& tables, const LinkLedger& ledger,
                                  const SwitchUpdateLog& log, double duration, nlohmann::json config);

struct ReportFamily {
    std::string name;
    std::vector<std::pair<std::string, BoxStats>> categories;

    bool operator==(const ReportFamily&) const = default;
};

struct ReportTotals {
    double rules = 0;
    double updates = 0;
    double membership_updates = 0;
    double promotion_installs = 0;
    double link_bytes = 0;

    bool operator==(const ReportTotals&) const = default;
};

/// Families, in order: state (rules per switch by layer), traffic_bytes and
/// traffic_rate (per link by class), updates and membership_updates (per
/// switch by layer). Rates are bytes over the observed duration.
struct MetricsReport {
    nlohmann::json config = nlohmann::json::object();
    double duration = 0;
    std::vector<ReportFamily> families;
    ReportTotals totals;

    const BoxStats& stats(const std::string& family, const std::string& category) const;
    bool operator==(const MetricsReport&) const = default;
};

MetricsReport build_report(const Observations& obs);

enum class ReportFormat { Csv, Json };

std::string report_to_json(const MetricsReport& r);
MetricsReport report_from_json(const std::string& text);
/// Long CSV: family,category,statistic,value.
std::string report_to_csv(const MetricsReport& r);
/// Throws std::runtime_error when the path cannot be written.
void emit_report(const MetricsReport& r, ReportFormat format, const std::filesystem::path& path);

std::string observations_to_csv(const Observations& obs);
std::string observations_meta_json(const Observations& obs);
Observations observations_from_files(const std::filesystem::path& csv, const std::filesystem::path& meta);

/// Shortest round-trip decimal.
std::string format_number(double v);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace dusm

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dusm/config.hpp"
#include "dusm/metrics.hpp"

namespace dusm {

struct Cell {
    std::string name;
    SimConfig config;
};

/// Cartesian product of the list fields. Pim cells ignore threshold and
/// trees, so those dimensions collapse for them; a trace workload collapses
/// placement.
std::vector<Cell> expand_cells(const MatrixConfig& m);
std::string cell_name(const SimConfig& cfg);

std::vector<Event> build_workload(const SimConfig& cfg, const FatTree& topo);

struct CellRun {
    Observations observations;
    MetricsReport report;
};

/// Builds the topology and workload, simulates, and aggregates.
CellRun run_cell(const SimConfig& cfg);
/// report.{json,csv} per configured format, plus observations.csv and run.json.
void write_cell_outputs(const SimConfig& cfg, const CellRun& run, const std::filesystem::path& dir);
/// Rebuilds the reports in dir from its observations.csv and run.json.
MetricsReport rebuild_report(const std::filesystem::path& dir, const std::vector<ReportFormat>& formats);

struct CellResult {
    std::string name;
    std::filesystem::path dir;
    bool ok = false;
    std::string error;
    std::optional<MetricsReport> report;
};

/// Runs every cell with up to jobs in parallel; failures are confined to
/// their cell. Results are in expand_cells order.
std::vector<CellResult> run_matrix(const MatrixConfig& m, int jobs);

}  // namespace dusm

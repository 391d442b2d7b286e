#include "dusm/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <set>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "dusm/simulation.hpp"

namespace dusm {

std::string cell_name(const SimConfig& cfg) {
    std::string name = to_string(cfg.mode);
    if (cfg.mode == Mode::Dusm)
        name += "_t" + std::to_string(cfg.trees) + "_thr" + std::to_string(cfg.threshold_bytes);
    name += cfg.trace ? std::string("_trace") : std::string("_") + to_string(cfg.placement);
    name += "_s" + std::to_string(cfg.seed);
    return name;
}

std::vector<Cell> expand_cells(const MatrixConfig& m) {
    std::vector<Cell> cells;
    std::set<std::string> seen;
    for (Mode mode : m.modes)
        for (auto thr : m.thresholds)
            for (int t : m.trees)
                for (Placement p : m.placements)
                    for (auto seed : m.seeds) {
                        SimConfig c = m.base;
                        c.mode = mode;
                        c.threshold_bytes = thr;
                        c.trees = t;
                        c.placement = p;
                        c.seed = seed;
                        if (mode == Mode::Pim) {
                            c.threshold_bytes = m.thresholds.front();
                            c.trees = m.trees.front();
                        }
                        if (c.trace) c.placement = m.placements.front();
                        auto name = cell_name(c);
                        if (seen.insert(name).second) cells.push_back({name, c});
                    }
    return cells;
}

std::vector<Event> build_workload(const SimConfig& cfg, const FatTree& topo) {
    if (cfg.trace) return parse_trace(*cfg.trace);
    return generate_synthetic(cfg.effective_workload(), topo);
}

CellRun run_cell(const SimConfig& cfg) {
    auto errors = validate_cell(cfg);
    if (!errors.empty()) throw std::invalid_argument(format_errors(errors));
    FatTree topo = FatTree::build(cfg.k);
    auto events = build_workload(cfg, topo);

    SimulationOptions opt;
    opt.controller.mode = cfg.mode;
    opt.controller.threshold_bytes = cfg.threshold_bytes;
    opt.controller.trees = cfg.trees;
    opt.controller.root_policy = cfg.root_policy;
    opt.controller.seed = cfg.seed;
    opt.ecmp_seed = cfg.seed;
    opt.encap_overhead_bytes = cfg.encap_overhead_bytes;
    opt.poll_interval = cfg.poll_interval;
    Simulation sim(topo, opt);
    sim.run(events);

    double duration = cfg.trace ? (events.empty() ? 0.0 : events.back().time) : cfg.workload.duration;
    CellRun run;
    run.observations = collect_observations(topo, sim.tables(), sim.ledger(), sim.controller().update_log(),
                                            duration, cfg.echo());
    run.report = build_report(run.observations);
    return run;
}

namespace {

const char* extension(ReportFormat f) { return f == ReportFormat::Json ? "json" : "csv"; }

}  // namespace

void write_cell_outputs(const SimConfig& cfg, const CellRun& run, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (ReportFormat f : cfg.formats) emit_report(run.report, f, dir / (std::string("report.") + extension(f)));
    write_text_file(dir / "observations.csv", observations_to_csv(run.observations));
    write_text_file(dir / "run.json", observations_meta_json(run.observations));
}

MetricsReport rebuild_report(const std::filesystem::path& dir, const std::vector<ReportFormat>& formats) {
    auto obs = observations_from_files(dir / "observations.csv", dir / "run.json");
    auto report = build_report(obs);
    for (ReportFormat f : formats) emit_report(report, f, dir / (std::string("report.") + extension(f)));
    return report;
}

std::vector<CellResult> run_matrix(const MatrixConfig& m, int jobs) {
    auto cells = expand_cells(m);
    std::vector<CellResult> results(cells.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < cells.size();) {
            const Cell& c = cells[i];
            CellResult& r = results[i];
            r.name = c.name;
            r.dir = c.config.out_dir / c.name;
            try {
                auto run = run_cell(c.config);
                write_cell_outputs(c.config, run, r.dir);
                r.report = std::move(run.report);
                r.ok = true;
            } catch (const std::exception& e) {
                r.error = e.what();
            }
        }
    };
    int n = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(cells.size(), 1)));
    std::vector<std::jthread> pool;
    for (int i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
    pool.clear();
    return results;
}

}  // namespace dusm

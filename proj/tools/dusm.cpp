// dusm: fat-tree multicast simulator driver.

#include <charconv>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dusm/config.hpp"
#include "dusm/experiment.hpp"
#include "dusm/workload.hpp"

using nlohmann::json;
using namespace dusm;

namespace {

struct Overrides {
    std::string config;
    int k = 0;
    std::vector<std::string> mode, threshold, placement;
    std::vector<int> trees;
    std::vector<std::uint64_t> seed;
    int groups = 0;
    std::string trace;
    std::string out;
    std::vector<std::string> format;
    int jobs = 0;
};

// Numbers stay numbers so the validator sees the same types as in a file.
json scalar_value(const std::string& s) {
    std::uint64_t n = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
    if (ec == std::errc{} && p == s.data() + s.size()) return n;
    return s;
}

template <typename T>
json list_value(const std::vector<T>& v) {
    json arr = json::array();
    for (const auto& x : v) {
        if constexpr (std::is_same_v<T, std::string>) arr.push_back(scalar_value(x));
        else arr.push_back(x);
    }
    return arr.size() == 1 ? arr[0] : arr;
}

void add_cell_flags(CLI::App* app, Overrides& o, bool lists) {
    app->add_option("--config", o.config, "JSON config file");
    app->add_option("--k", o.k, "fat-tree arity (even, 4..64)");
    app->add_option("--groups", o.groups, "number of synthetic groups");
    app->add_option("--trace", o.trace, "replay a trace file instead of a synthetic workload");
    auto* pl = app->add_option("--placement", o.placement, "random | nearby");
    auto* sd = app->add_option("--seed", o.seed, "experiment seed");
    if (lists) {
        pl->delimiter(',');
        sd->delimiter(',');
    } else {
        pl->expected(1);
        sd->expected(1);
    }
}

void add_sim_flags(CLI::App* app, Overrides& o, bool lists) {
    auto* md = app->add_option("--mode", o.mode, "dusm | pim");
    auto* th = app->add_option("--threshold", o.threshold, "elephant threshold, e.g. 10KB");
    auto* tr = app->add_option("--trees", o.trees, "Steiner trees per elephant group");
    app->add_option("--out", o.out, "output directory");
    app->add_option("--format", o.format, "json, csv or both")->delimiter(',');
    for (auto* opt : {md, th, tr}) {
        if (lists) opt->delimiter(',');
        else opt->expected(1);
    }
}

json merged_config(const Overrides& o) {
    json raw = o.config.empty() ? json::object() : load_config_file(o.config);
    if (o.k) set_config_path(raw, "k", o.k);
    if (!o.mode.empty()) set_config_path(raw, "mode", list_value(o.mode));
    if (!o.threshold.empty()) set_config_path(raw, "threshold", list_value(o.threshold));
    if (!o.trees.empty()) set_config_path(raw, "trees", list_value(o.trees));
    if (!o.placement.empty()) set_config_path(raw, "placement", list_value(o.placement));
    if (!o.seed.empty()) set_config_path(raw, "seed", list_value(o.seed));
    if (o.groups) set_config_path(raw, "workload.groups", o.groups);
    if (!o.trace.empty()) set_config_path(raw, "workload.trace", o.trace);
    if (!o.out.empty()) set_config_path(raw, "output.dir", o.out);
    if (!o.format.empty()) {
        json arr = json::array();
        for (const auto& f : o.format) arr.push_back(f);
        set_config_path(raw, "output.formats", arr);
    }
    if (o.jobs) set_config_path(raw, "jobs", o.jobs);
    return raw;
}

int cmd_gen(const Overrides& o) {
    auto v = validate_config(merged_config(o));
    if (!v.ok()) {
        std::cerr << format_errors(v.errors);
        return 2;
    }
    FatTree topo = FatTree::build(v.value->k);
    auto events = generate_synthetic(v.value->effective_workload(), topo);
    if (o.out.empty() || o.out == "-") {
        write_trace(std::cout, events);
    } else {
        std::ofstream out(o.out);
        if (!out) {
            std::cerr << "cannot write " << o.out << "\n";
            return 1;
        }
        write_trace(out, events);
    }
    return 0;
}

int cmd_run(const Overrides& o) {
    auto v = validate_config(merged_config(o));
    if (!v.ok()) {
        std::cerr << format_errors(v.errors);
        return 2;
    }
    const SimConfig& cfg = *v.value;
    auto run = run_cell(cfg);
    write_cell_outputs(cfg, run, cfg.out_dir);
    const auto& t = run.report.totals;
    std::cout << cell_name(cfg) << ": rules=" << format_number(t.rules) << " updates=" << format_number(t.updates)
              << " link_bytes=" << format_number(t.link_bytes) << " -> " << cfg.out_dir.string() << "\n";
    return 0;
}

int cmd_matrix(const Overrides& o) {
    auto v = validate_matrix_config(merged_config(o));
    if (!v.ok()) {
        std::cerr << format_errors(v.errors);
        return 2;
    }
    auto results = run_matrix(*v.value, v.value->jobs);
    int failed = 0;
    for (const auto& r : results) {
        if (r.ok) {
            std::cout << "ok   " << r.name << " -> " << r.dir.string() << "\n";
        } else {
            ++failed;
            std::cout << "FAIL " << r.name << ": " << r.error << "\n";
        }
    }
    std::cout << results.size() - failed << "/" << results.size() << " cells succeeded\n";
    return failed ? 1 : 0;
}

int cmd_report(const std::string& dir, const std::vector<std::string>& format) {
    std::vector<ReportFormat> formats;
    for (const auto& f : format) {
        if (f == "json") formats.push_back(ReportFormat::Json);
        else if (f == "csv") formats.push_back(ReportFormat::Csv);
        else {
            std::cerr << "--format: expected json or csv, got " << f << "\n";
            return 2;
        }
    }
    if (formats.empty()) formats = {ReportFormat::Json, ReportFormat::Csv};
    rebuild_report(dir, formats);
    std::cout << "rebuilt reports in " << dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dual-structure multicast simulator for fat-tree data centers"};
    app.require_subcommand(1);

    Overrides gen_o, run_o, matrix_o;
    auto* gen = app.add_subcommand("gen", "write a synthetic trace");
    add_cell_flags(gen, gen_o, false);
    gen->add_option("--out", gen_o.out, "trace file (default stdout)");

    auto* run = app.add_subcommand("run", "simulate one cell");
    add_cell_flags(run, run_o, false);
    add_sim_flags(run, run_o, false);

    auto* matrix = app.add_subcommand("matrix", "simulate every cell of a config grid");
    add_cell_flags(matrix, matrix_o, true);
    add_sim_flags(matrix, matrix_o, true);
    matrix->add_option("--jobs", matrix_o.jobs, "cells run in parallel");

    std::string report_dir;
    std::vector<std::string> report_format;
    auto* report = app.add_subcommand("report", "rebuild reports from saved observations");
    report->add_option("--out", report_dir, "cell output directory")->required();
    report->add_option("--format", report_format, "json, csv or both")->delimiter(',');

    CLI11_PARSE(app, argc, argv);
    try {
        if (*gen) return cmd_gen(gen_o);
        if (*run) return cmd_run(run_o);
        if (*matrix) return cmd_matrix(matrix_o);
        if (*report) return cmd_report(report_dir, report_format);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

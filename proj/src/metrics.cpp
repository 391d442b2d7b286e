#include "dusm/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace dusm {

namespace {

const std::vector<std::string> kLayers = {"edge", "aggregate", "core"};
const std::vector<std::string> kClasses = {"EA", "AC", "CA", "AE", "HE", "EH"};

struct FamilySource {
    const char* report_name;
    const char* raw_name;
    const std::vector<std::string>* categories;
    bool per_second;
};

const FamilySource kFamilies[] = {
    {"state", "rules", &kLayers, false},
    {"traffic_bytes", "link_bytes", &kClasses, false},
    {"traffic_rate", "link_bytes", &kClasses, true},
    {"updates", "updates", &kLayers, false},
    {"membership_updates", "membership_updates", &kLayers, false},
};

const char* layer_name(NodeKind k) {
    switch (k) {
        case NodeKind::Edge: return "edge";
        case NodeKind::Aggregate: return "aggregate";
        case NodeKind::Core: return "core";
        case NodeKind::Host: break;
    }
    return nullptr;
}

double quantile_sorted(const std::vector<double>& v, double q) {
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= v.size()) return v.back();
    const double frac = pos - static_cast<double>(lo);
    return v[lo] + (v[lo + 1] - v[lo]) * frac;
}

nlohmann::json stats_json(const BoxStats& s) {
    return {{"min", s.min}, {"q25", s.q25}, {"median", s.median}, {"q75", s.q75}, {"max", s.max}, {"mean", s.mean}};
}

BoxStats stats_from_json(const nlohmann::json& j) {
    return {j.at("min").get<double>(), j.at("q25").get<double>(), j.at("median").get<double>(),
            j.at("q75").get<double>(), j.at("max").get<double>(), j.at("mean").get<double>()};
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

std::string format_number(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

BoxStats box_stats(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("box statistics of an empty set");
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    BoxStats s;
    s.min = v.front();
    s.max = v.back();
    s.q25 = quantile_sorted(v, 0.25);
    s.median = quantile_sorted(v, 0.5);
    s.q75 = quantile_sorted(v, 0.75);
    s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    // Summation error can push the mean a hair outside [min, max] for constant input.
    s.mean = std::clamp(s.mean, s.min, s.max);
    return s;
}

Observations collect_observations(const FatTree& topo, const GroupTables& tables, const LinkLedger& ledger,
                                  const SwitchUpdateLog& log, double duration, nlohmann::json config) {
    Observations obs;
    obs.duration = duration;
    obs.config = std::move(config);
    const auto counts = count_multicast_rules(tables);
    for (NodeIndex n = 0; n < topo.num_nodes(); ++n) {
        const char* layer = layer_name(topo.kind(n));
        if (!layer) continue;
        const std::string name = to_string(topo.describe(n));
        obs.rows.push_back({"rules", layer, name, static_cast<double>(counts[n])});
        obs.rows.push_back({"updates", layer, name, static_cast<double>(log.total(n))});
        obs.rows.push_back({"membership_updates", layer, name, static_cast<double>(log.membership_updates(n))});
    }
    for (LinkIndex l = 0; l < topo.num_links(); ++l) {
        const auto& link = topo.link(l);
        obs.rows.push_back({"link_bytes", to_string(link.cls),
                            to_string(topo.describe(link.src)) + ">" + to_string(topo.describe(link.dst)),
                            static_cast<double>(ledger.bytes(l))});
    }
    return obs;
}

const BoxStats& MetricsReport::stats(const std::string& family, const std::string& category) const {
    for (const auto& f : families)
        if (f.name == family)
            for (const auto& [c, s] : f.categories)
                if (c == category) return s;
    throw std::out_of_range("no statistics for " + family + "/" + category);
}

MetricsReport build_report(const Observations& obs) {
    std::map<std::pair<std::string, std::string>, std::vector<double>> grouped;
    ReportTotals totals;
    for (const auto& r : obs.rows) {
        grouped[{r.family, r.category}].push_back(r.value);
        if (r.family == "rules") totals.rules += r.value;
        else if (r.family == "updates") totals.updates += r.value;
        else if (r.family == "membership_updates") totals.membership_updates += r.value;
        else if (r.family == "link_bytes") totals.link_bytes += r.value;
    }
    totals.promotion_installs = totals.updates - totals.membership_updates;

    MetricsReport report;
    report.config = obs.config;
    report.duration = obs.duration;
    report.totals = totals;
    const double seconds = obs.duration > 0 ? obs.duration : 1.0;
    for (const auto& src : kFamilies) {
        ReportFamily fam{src.report_name, {}};
        for (const auto& cat : *src.categories) {
            auto it = grouped.find({src.raw_name, cat});
            if (it == grouped.end() || it->second.empty())
                throw std::invalid_argument(std::string("no observations for ") + src.raw_name + "/" + cat);
            std::vector<double> values = it->second;
            if (src.per_second)
                for (double& v : values) v /= seconds;
            fam.categories.emplace_back(cat, box_stats(values));
        }
        report.families.push_back(std::move(fam));
    }
    return report;
}

std::string report_to_json(const MetricsReport& r) {
    nlohmann::json j;
    j["config"] = r.config;
    j["duration"] = r.duration;
    nlohmann::json fams = nlohmann::json::array();
    for (const auto& f : r.families) {
        nlohmann::json cats = nlohmann::json::array();
        for (const auto& [c, s] : f.categories) cats.push_back({{"category", c}, {"stats", stats_json(s)}});
        fams.push_back({{"family", f.name}, {"categories", cats}});
    }
    j["families"] = fams;
    j["totals"] = {{"rules", r.totals.rules},
                   {"updates", r.totals.updates},
                   {"membership_updates", r.totals.membership_updates},
                   {"promotion_installs", r.totals.promotion_installs},
                   {"link_bytes", r.totals.link_bytes}};
    return j.dump(2) + "\n";
}

MetricsReport report_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    MetricsReport r;
    r.config = j.at("config");
    r.duration = j.at("duration").get<double>();
    for (const auto& f : j.at("families")) {
        ReportFamily fam{f.at("family").get<std::string>(), {}};
        for (const auto& c : f.at("categories"))
            fam.categories.emplace_back(c.at("category").get<std::string>(), stats_from_json(c.at("stats")));
        r.families.push_back(std::move(fam));
    }
    const auto& t = j.at("totals");
    r.totals = {t.at("rules").get<double>(), t.at("updates").get<double>(), t.at("membership_updates").get<double>(),
                t.at("promotion_installs").get<double>(), t.at("link_bytes").get<double>()};
    return r;
}

std::string report_to_csv(const MetricsReport& r) {
    std::string out = "family,category,statistic,value\n";
    for (const auto& f : r.families)
        for (const auto& [c, s] : f.categories) {
            const double vals[] = {s.min, s.q25, s.median, s.q75, s.max, s.mean};
            for (int i = 0; i < 6; ++i) out += f.name + "," + c + "," + kStatNames[i] + "," + format_number(vals[i]) + "\n";
        }
    return out;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

void emit_report(const MetricsReport& r, ReportFormat format, const std::filesystem::path& path) {
    write_text_file(path, format == ReportFormat::Json ? report_to_json(r) : report_to_csv(r));
}

std::string observations_to_csv(const Observations& obs) {
    std::string out = "family,category,element,value\n";
    for (const auto& r : obs.rows) out += r.family + "," + r.category + "," + r.element + "," + format_number(r.value) + "\n";
    return out;
}

std::string observations_meta_json(const Observations& obs) {
    nlohmann::json j{{"duration", obs.duration}, {"config", obs.config}};
    return j.dump(2) + "\n";
}

Observations observations_from_files(const std::filesystem::path& csv, const std::filesystem::path& meta) {
    Observations obs;
    {
        std::ifstream in(meta);
        if (!in) throw std::runtime_error("cannot open " + meta.string());
        auto j = nlohmann::json::parse(in);
        obs.duration = j.at("duration").get<double>();
        obs.config = j.at("config");
    }
    std::ifstream in(csv);
    if (!in) throw std::runtime_error("cannot open " + csv.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        if (++lineno == 1) continue;
        if (line.empty()) continue;
        auto f = split_csv(line);
        double v = 0;
        if (f.size() != 4 || std::from_chars(f[3].data(), f[3].data() + f[3].size(), v).ec != std::errc{})
            throw std::runtime_error(csv.string() + ":" + std::to_string(lineno) + ": malformed observation");
        obs.rows.push_back({f[0], f[1], f[2], v});
    }
    return obs;
}

}  // namespace dusm

#include "dusm/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

namespace dusm {

using nlohmann::json;

WorkloadSpec SimConfig::effective_workload() const {
    WorkloadSpec w = workload;
    w.placement = placement;
    w.seed = seed;
    return w;
}

json SimConfig::echo() const {
    json j;
    j["k"] = k;
    j["mode"] = to_string(mode);
    if (mode == Mode::Dusm) {
        j["threshold_bytes"] = threshold_bytes;
        j["trees"] = trees;
        j["root_selection"] = to_string(root_policy);
    }
    j["seed"] = seed;
    j["encap_overhead_bytes"] = encap_overhead_bytes;
    j["poll_interval"] = poll_interval;
    if (trace) {
        j["workload"] = {{"trace", trace->generic_string()}};
    } else {
        j["placement"] = to_string(placement);
        const auto& w = workload;
        j["workload"] = {{"groups", w.num_groups},
                         {"group_size", {{"min", w.group_size.min}, {"max", w.group_size.max}, {"skew", w.group_size.skew}}},
                         {"total_bytes", w.traffic.total_bytes},
                         {"packet_size", w.traffic.packet_size},
                         {"churn_rate", w.churn_rate},
                         {"duration", w.duration}};
        if (w.traffic.zipf_s) j["workload"]["zipf_s"] = *w.traffic.zipf_s;
    }
    return j;
}

std::optional<std::uint64_t> parse_size(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    std::uint64_t n = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
    if (ec != std::errc{} || p == text.data()) return std::nullopt;
    std::string unit(p, text.data() + text.size());
    while (!unit.empty() && std::isspace(static_cast<unsigned char>(unit.front()))) unit.erase(unit.begin());
    for (auto& c : unit) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    std::uint64_t mult = 0;
    if (unit.empty() || unit == "B") mult = 1;
    else if (unit == "KB" || unit == "K") mult = 1ULL << 10;
    else if (unit == "MB" || unit == "M") mult = 1ULL << 20;
    else if (unit == "GB" || unit == "G") mult = 1ULL << 30;
    else return std::nullopt;
    if (n > UINT64_MAX / mult) return std::nullopt;
    return n * mult;
}

namespace {

// Walks a raw config, collecting every violation with its field path.
class Reader {
public:
    std::vector<ConfigError> errors;

    void fail(const std::string& path, const std::string& msg) { errors.push_back({path, msg}); }

    void check_keys(const json& obj, const std::string& prefix, const std::set<std::string>& allowed) {
        for (auto it = obj.begin(); it != obj.end(); ++it)
            if (!allowed.count(it.key())) fail(prefix + it.key(), "unknown field");
    }

    template <typename T, typename F>
    std::vector<T> list(const json& obj, const std::string& key, const std::string& path, std::vector<T> fallback,
                        F&& one) {
        if (!obj.contains(key)) return fallback;
        const json& v = obj.at(key);
        std::vector<T> out;
        if (v.is_array()) {
            if (v.empty()) fail(path, "empty list");
            for (std::size_t i = 0; i < v.size(); ++i)
                if (auto x = one(v[i], path + "[" + std::to_string(i) + "]")) out.push_back(*x);
        } else if (auto x = one(v, path)) {
            out.push_back(*x);
        }
        return out.empty() ? fallback : out;
    }

    std::optional<std::int64_t> integer(const json& v, const std::string& path) {
        if (v.is_number_integer()) return v.get<std::int64_t>();
        fail(path, "expected an integer");
        return std::nullopt;
    }

    std::optional<std::uint64_t> size(const json& v, const std::string& path) {
        if (v.is_number_integer()) {
            if (v.get<std::int64_t>() >= 0 || v.is_number_unsigned()) return v.get<std::uint64_t>();
            fail(path, "must be >= 0");
            return std::nullopt;
        }
        if (v.is_string())
            if (auto s = parse_size(v.get<std::string>())) return s;
        fail(path, "expected a byte count such as 10240 or \"10KB\"");
        return std::nullopt;
    }

    std::optional<double> number(const json& v, const std::string& path) {
        if (v.is_number()) return v.get<double>();
        fail(path, "expected a number");
        return std::nullopt;
    }

    std::optional<std::string> string(const json& v, const std::string& path) {
        if (v.is_string()) return v.get<std::string>();
        fail(path, "expected a string");
        return std::nullopt;
    }

    template <typename T, typename F>
    void scalar(const json& obj, const std::string& key, const std::string& path, T& dst, F&& one) {
        if (!obj.contains(key)) return;
        if (obj.at(key).is_array()) {
            fail(path, "expected a single value");
            return;
        }
        if (auto x = one(obj.at(key), path)) dst = static_cast<T>(*x);
    }
};

std::optional<Mode> mode_of(Reader& r, const json& v, const std::string& path) {
    auto s = r.string(v, path);
    if (!s) return std::nullopt;
    if (*s == "dusm") return Mode::Dusm;
    if (*s == "pim") return Mode::Pim;
    r.fail(path, "expected \"dusm\" or \"pim\"");
    return std::nullopt;
}

std::optional<Placement> placement_of(Reader& r, const json& v, const std::string& path) {
    auto s = r.string(v, path);
    if (!s) return std::nullopt;
    if (*s == "random") return Placement::Random;
    if (*s == "nearby") return Placement::Nearby;
    r.fail(path, "expected \"random\" or \"nearby\"");
    return std::nullopt;
}

}  // namespace

Validated<MatrixConfig> validate_matrix_config(const json& raw) {
    Reader r;
    MatrixConfig m;
    SimConfig& base = m.base;
    if (!raw.is_object()) {
        r.fail("", "config must be an object");
        return {std::nullopt, r.errors};
    }
    r.check_keys(raw, "", {"k", "mode", "threshold", "trees", "placement", "root_selection", "seed",
                           "encap_overhead_bytes", "poll_interval", "workload", "output", "jobs"});

    r.scalar(raw, "k", "k", base.k, [&](const json& v, const std::string& p) { return r.integer(v, p); });
    if (base.k % 2 != 0 || base.k < 4 || base.k > 64) r.fail("k", "must be even and in [4, 64]");

    m.modes = r.list<Mode>(raw, "mode", "mode", {Mode::Dusm},
                           [&](const json& v, const std::string& p) { return mode_of(r, v, p); });
    m.thresholds = r.list<std::uint64_t>(raw, "threshold", "threshold", {base.threshold_bytes},
                                         [&](const json& v, const std::string& p) { return r.size(v, p); });
    m.trees = r.list<int>(raw, "trees", "trees", {base.trees}, [&](const json& v, const std::string& p) {
        auto t = r.integer(v, p);
        if (t && *t < 1) {
            r.fail(p, "must be >= 1");
            return std::optional<int>{};
        }
        return t ? std::optional<int>(static_cast<int>(*t)) : std::nullopt;
    });
    m.placements = r.list<Placement>(raw, "placement", "placement", {Placement::Random},
                                     [&](const json& v, const std::string& p) { return placement_of(r, v, p); });
    m.seeds = r.list<std::uint64_t>(raw, "seed", "seed", {0}, [&](const json& v, const std::string& p) {
        if (v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0))
            return std::optional<std::uint64_t>(v.get<std::uint64_t>());
        r.fail(p, "expected a non-negative integer");
        return std::optional<std::uint64_t>{};
    });

    if (raw.contains("root_selection")) {
        auto s = r.string(raw.at("root_selection"), "root_selection");
        if (s && *s == "random") base.root_policy = RootPolicy::Random;
        else if (s && *s == "address_hash") base.root_policy = RootPolicy::AddressHash;
        else if (s) r.fail("root_selection", "expected \"random\" or \"address_hash\"");
    }
    r.scalar(raw, "encap_overhead_bytes", "encap_overhead_bytes", base.encap_overhead_bytes,
             [&](const json& v, const std::string& p) { return r.size(v, p); });
    r.scalar(raw, "poll_interval", "poll_interval", base.poll_interval,
             [&](const json& v, const std::string& p) { return r.number(v, p); });
    if (base.poll_interval < 0) r.fail("poll_interval", "must be >= 0");
    r.scalar(raw, "jobs", "jobs", m.jobs, [&](const json& v, const std::string& p) { return r.integer(v, p); });
    if (m.jobs < 1) r.fail("jobs", "must be >= 1");

    if (raw.contains("workload")) {
        const json& w = raw.at("workload");
        if (!w.is_object()) {
            r.fail("workload", "expected an object");
        } else {
            r.check_keys(w, "workload.", {"trace", "groups", "group_size", "zipf_s", "total_bytes", "packet_size",
                                          "churn_rate", "duration"});
            auto& spec = base.workload;
            if (w.contains("trace")) {
                if (auto s = r.string(w.at("trace"), "workload.trace")) base.trace = *s;
                for (const char* k : {"groups", "group_size", "zipf_s", "total_bytes", "packet_size", "churn_rate"})
                    if (w.contains(k)) r.fail(std::string("workload.") + k, "not allowed together with workload.trace");
            }
            r.scalar(w, "groups", "workload.groups", spec.num_groups,
                     [&](const json& v, const std::string& p) { return r.integer(v, p); });
            if (spec.num_groups < 1) r.fail("workload.groups", "must be >= 1");
            if (w.contains("group_size")) {
                const json& g = w.at("group_size");
                if (!g.is_object()) {
                    r.fail("workload.group_size", "expected an object");
                } else {
                    r.check_keys(g, "workload.group_size.", {"min", "max", "skew"});
                    r.scalar(g, "min", "workload.group_size.min", spec.group_size.min,
                             [&](const json& v, const std::string& p) { return r.integer(v, p); });
                    r.scalar(g, "max", "workload.group_size.max", spec.group_size.max,
                             [&](const json& v, const std::string& p) { return r.integer(v, p); });
                    r.scalar(g, "skew", "workload.group_size.skew", spec.group_size.skew,
                             [&](const json& v, const std::string& p) { return r.number(v, p); });
                }
            }
            if (spec.group_size.min < 2) r.fail("workload.group_size.min", "must be >= 2");
            if (spec.group_size.max < spec.group_size.min) r.fail("workload.group_size.max", "must be >= min");
            if (spec.group_size.skew < 0) r.fail("workload.group_size.skew", "must be >= 0");
            if (w.contains("zipf_s")) {
                if (auto s = r.number(w.at("zipf_s"), "workload.zipf_s")) {
                    if (*s > 0) spec.traffic.zipf_s = *s;
                    else r.fail("workload.zipf_s", "must be > 0");
                }
            }
            r.scalar(w, "total_bytes", "workload.total_bytes", spec.traffic.total_bytes,
                     [&](const json& v, const std::string& p) { return r.size(v, p); });
            r.scalar(w, "packet_size", "workload.packet_size", spec.traffic.packet_size,
                     [&](const json& v, const std::string& p) { return r.size(v, p); });
            if (spec.traffic.packet_size == 0) r.fail("workload.packet_size", "must be > 0");
            r.scalar(w, "churn_rate", "workload.churn_rate", spec.churn_rate,
                     [&](const json& v, const std::string& p) { return r.number(v, p); });
            if (spec.churn_rate < 0) r.fail("workload.churn_rate", "must be >= 0");
            r.scalar(w, "duration", "workload.duration", spec.duration,
                     [&](const json& v, const std::string& p) { return r.number(v, p); });
            if (!(spec.duration > 0)) r.fail("workload.duration", "must be > 0");
        }
    }

    if (raw.contains("output")) {
        const json& o = raw.at("output");
        if (!o.is_object()) {
            r.fail("output", "expected an object");
        } else {
            r.check_keys(o, "output.", {"dir", "formats"});
            if (o.contains("dir"))
                if (auto s = r.string(o.at("dir"), "output.dir")) base.out_dir = *s;
            base.formats = r.list<ReportFormat>(
                o, "formats", "output.formats", base.formats,
                [&](const json& v, const std::string& p) -> std::optional<ReportFormat> {
                    auto s = r.string(v, p);
                    if (s && *s == "json") return ReportFormat::Json;
                    if (s && *s == "csv") return ReportFormat::Csv;
                    if (s) r.fail(p, "expected \"json\" or \"csv\"");
                    return std::nullopt;
                });
        }
    }

    base.mode = m.modes.front();
    base.threshold_bytes = m.thresholds.front();
    base.trees = m.trees.front();
    base.placement = m.placements.front();
    base.seed = m.seeds.front();
    if (!r.errors.empty()) return {std::nullopt, r.errors};
    return {m, {}};
}

std::vector<ConfigError> validate_cell(const SimConfig& cfg) {
    std::vector<ConfigError> errors;
    if (cfg.k % 2 != 0 || cfg.k < 4 || cfg.k > 64) errors.push_back({"k", "must be even and in [4, 64]"});
    const int max_trees = (cfg.k / 2) * (cfg.k / 2);
    if (cfg.mode == Mode::Dusm && (cfg.trees < 1 || cfg.trees > max_trees))
        errors.push_back({"trees", "must be in [1, " + std::to_string(max_trees) + "] for k=" + std::to_string(cfg.k)});
    if (!cfg.trace) {
        const int hosts = cfg.k * cfg.k * cfg.k / 4;
        if (cfg.workload.group_size.min > hosts)
            errors.push_back({"workload.group_size.min", "exceeds the host count " + std::to_string(hosts)});
    }
    return errors;
}

Validated<SimConfig> validate_config(const json& raw) {
    auto m = validate_matrix_config(raw);
    if (!m.ok()) return {std::nullopt, m.errors};
    std::vector<ConfigError> errors;
    auto single = [&](std::size_t n, const char* path) {
        if (n != 1) errors.push_back({path, "expected a single value, got a list"});
    };
    single(m.value->modes.size(), "mode");
    single(m.value->thresholds.size(), "threshold");
    single(m.value->trees.size(), "trees");
    single(m.value->placements.size(), "placement");
    single(m.value->seeds.size(), "seed");
    auto cell = validate_cell(m.value->base);
    errors.insert(errors.end(), cell.begin(), cell.end());
    if (!errors.empty()) return {std::nullopt, errors};
    return {m.value->base, {}};
}

json load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

void set_config_path(json& raw, std::string_view dotted, json value) {
    json* node = &raw;
    while (true) {
        auto dot = dotted.find('.');
        std::string key(dotted.substr(0, dot));
        if (dot == std::string_view::npos) {
            (*node)[key] = std::move(value);
            return;
        }
        if (!node->contains(key) || !(*node)[key].is_object()) (*node)[key] = json::object();
        node = &(*node)[key];
        dotted.remove_prefix(dot + 1);
    }
}

std::string format_errors(const std::vector<ConfigError>& errors) {
    std::string out;
    for (const auto& e : errors) out += (e.path.empty() ? "<root>" : e.path) + ": " + e.message + "\n";
    return out;
}

}  // namespace dusm

#include "dusm/workload.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <cctype>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "dusm/hash.hpp"

namespace dusm {

GroupAddress::GroupAddress(std::uint32_t value) : value_(value) {
    if (!is_class_d(value)) {
        std::ostringstream os;
        os << "address 0x" << std::hex << value << " is not in the class-D range";
        throw std::invalid_argument(os.str());
    }
}

GroupAddress GroupAddress::parse(std::string_view s) {
    std::uint32_t v = 0;
    const char* p = s.data();
    const char* end = s.data() + s.size();
    for (int octet = 0; octet < 4; ++octet) {
        unsigned part = 0;
        auto [next, ec] = std::from_chars(p, end, part);
        if (ec != std::errc{} || next == p || part > 255)
            throw std::invalid_argument("malformed address '" + std::string(s) + "'");
        v = (v << 8) | part;
        p = next;
        if (octet < 3) {
            if (p == end || *p != '.') throw std::invalid_argument("malformed address '" + std::string(s) + "'");
            ++p;
        }
    }
    if (p != end) throw std::invalid_argument("malformed address '" + std::string(s) + "'");
    if (!is_class_d(v)) throw std::invalid_argument("address " + std::string(s) + " is not class D");
    return GroupAddress(v);
}

std::string GroupAddress::str() const {
    return std::to_string(value_ >> 24) + "." + std::to_string((value_ >> 16) & 0xFF) + "." +
           std::to_string((value_ >> 8) & 0xFF) + "." + std::to_string(value_ & 0xFF);
}

const char* to_string(Placement p) { return p == Placement::Random ? "random" : "nearby"; }

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::Join: return "JOIN";
        case EventKind::Leave: return "LEAVE";
        case EventKind::Send: return "SEND";
    }
    return "?";
}

namespace {

struct StreamViolation {
    std::size_t index;
    std::string message;
};

// Membership replay over a time-ordered stream.
std::optional<StreamViolation> check_stream(const std::vector<Event>& events) {
    std::map<GroupAddress, std::set<HostId>> members;
    double last = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& e = events[i];
        if (e.time < last) return StreamViolation{i, "time goes backwards"};
        last = e.time;
        auto& m = members[e.group];
        switch (e.kind) {
            case EventKind::Join:
                if (!m.insert(e.host).second)
                    return StreamViolation{i, "h" + std::to_string(e.host) + " already joined " + e.group.str()};
                break;
            case EventKind::Leave:
                if (m.erase(e.host) == 0)
                    return StreamViolation{i, "h" + std::to_string(e.host) + " is not a member of " + e.group.str()};
                break;
            case EventKind::Send:
                if (e.bytes == 0) return StreamViolation{i, "send of zero bytes"};
                if (!m.count(e.host))
                    return StreamViolation{i, "sender h" + std::to_string(e.host) + " is not a member of " +
                                                  e.group.str()};
                break;
        }
    }
    return std::nullopt;
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t j = i;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        if (j > i) out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
}

std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

}  // namespace

std::vector<Event> parse_trace(std::istream& in) {
    struct Numbered {
        Event event;
        std::size_t line;
    };
    std::vector<Numbered> parsed;
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        auto tok = split_ws(raw);
        if (tok.empty() || tok[0].front() == '#') continue;
        if (tok.size() < 4) throw TraceError(lineno, "expected '<time> <kind> <group> <host> [bytes]'");

        Event e;
        if (!parse_number(tok[0], e.time) || !std::isfinite(e.time) || e.time < 0)
            throw TraceError(lineno, "bad time '" + std::string(tok[0]) + "'");
        if (tok[1] == "JOIN") e.kind = EventKind::Join;
        else if (tok[1] == "LEAVE") e.kind = EventKind::Leave;
        else if (tok[1] == "SEND") e.kind = EventKind::Send;
        else throw TraceError(lineno, "unknown event kind '" + std::string(tok[1]) + "'");
        try {
            e.group = GroupAddress::parse(tok[2]);
        } catch (const std::invalid_argument& err) {
            throw TraceError(lineno, err.what());
        }
        std::string_view host = tok[3];
        if (!host.empty() && host.front() == 'h') host.remove_prefix(1);
        if (!parse_number(host, e.host) || e.host < 0)
            throw TraceError(lineno, "bad host id '" + std::string(tok[3]) + "'");

        const std::size_t want = e.kind == EventKind::Send ? 5 : 4;
        if (tok.size() != want)
            throw TraceError(lineno, std::string(to_string(e.kind)) + " takes " + std::to_string(want) + " fields");
        if (e.kind == EventKind::Send && (!parse_number(tok[4], e.bytes) || e.bytes == 0))
            throw TraceError(lineno, "bad byte count '" + std::string(tok[4]) + "'");
        parsed.push_back({e, lineno});
    }

    std::stable_sort(parsed.begin(), parsed.end(),
                     [](const Numbered& a, const Numbered& b) { return a.event.time < b.event.time; });
    std::vector<Event> events;
    events.reserve(parsed.size());
    for (auto& n : parsed) events.push_back(n.event);
    if (auto bad = check_stream(events)) throw TraceError(parsed[bad->index].line, bad->message);
    return events;
}

std::vector<Event> parse_trace(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace " + path.string());
    return parse_trace(in);
}

void write_trace(std::ostream& out, const std::vector<Event>& events) {
    for (const auto& e : events) {
        out << format_double(e.time) << ' ' << to_string(e.kind) << ' ' << e.group.str() << " h" << e.host;
        if (e.kind == EventKind::Send) out << ' ' << e.bytes;
        out << '\n';
    }
}

double tuned_zipf_exponent(int num_groups, double small_fraction, double small_ratio) {
    // rank r is small iff r^-s < ratio, i.e. r > ratio^(-1/s); solve for the
    // cutoff rank (1 - fraction) * G.
    const double cutoff = (1.0 - small_fraction) * num_groups;
    if (cutoff <= 1.0) return 1.0;
    return std::log(1.0 / small_ratio) / std::log(cutoff);
}

std::vector<std::uint64_t> zipf_group_bytes(int num_groups, double s, std::uint64_t total_bytes) {
    if (num_groups < 1) throw std::invalid_argument("num_groups must be >= 1");
    if (!(s > 0)) throw std::invalid_argument("zipf exponent must be > 0");
    std::vector<double> w(num_groups);
    for (int r = 0; r < num_groups; ++r) w[r] = std::pow(static_cast<double>(r + 1), -s);
    const double norm = std::accumulate(w.begin(), w.end(), 0.0);
    std::vector<std::uint64_t> out(num_groups);
    for (int r = 0; r < num_groups; ++r) {
        auto b = static_cast<std::uint64_t>(std::llround(static_cast<double>(total_bytes) * w[r] / norm));
        out[r] = std::max<std::uint64_t>(1, b);
    }
    return out;
}

std::vector<HostId> place_nearby(int group_size, int offset, int num_hosts) {
    if (group_size < 0 || group_size > num_hosts)
        throw std::invalid_argument("group size " + std::to_string(group_size) + " exceeds host count " +
                                    std::to_string(num_hosts));
    std::vector<HostId> out;
    out.reserve(group_size);
    for (int i = 0; i < group_size; ++i) out.push_back((offset + i) % num_hosts);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<HostId> place_members(int group_size, Placement strategy, int num_hosts, Rng& rng) {
    if (group_size < 0 || group_size > num_hosts)
        throw std::invalid_argument("group size " + std::to_string(group_size) + " exceeds host count " +
                                    std::to_string(num_hosts));
    if (strategy == Placement::Nearby) {
        std::uniform_int_distribution<int> off(0, num_hosts - 1);
        return place_nearby(group_size, off(rng), num_hosts);
    }
    std::vector<HostId> all(num_hosts);
    std::iota(all.begin(), all.end(), 0);
    std::vector<HostId> out;
    out.reserve(group_size);
    std::sample(all.begin(), all.end(), std::back_inserter(out), group_size, rng);
    return out;
}

namespace {

void validate_spec(const WorkloadSpec& spec, int num_hosts) {
    if (spec.num_groups < 1) throw std::invalid_argument("num_groups must be >= 1");
    if (spec.group_size.min < 2) throw std::invalid_argument("minimum group size must be >= 2");
    if (spec.group_size.max < spec.group_size.min) throw std::invalid_argument("group size max < min");
    if (spec.group_size.min > num_hosts)
        throw std::invalid_argument("group size " + std::to_string(spec.group_size.min) + " exceeds host count " +
                                    std::to_string(num_hosts));
    if (spec.traffic.zipf_s && !(*spec.traffic.zipf_s > 0)) throw std::invalid_argument("zipf exponent must be > 0");
    if (spec.traffic.packet_size == 0) throw std::invalid_argument("packet size must be > 0");
    if (!(spec.duration > 0)) throw std::invalid_argument("duration must be > 0");
    if (spec.churn_rate < 0) throw std::invalid_argument("churn rate must be >= 0");
    if (static_cast<std::uint64_t>(spec.base_address) + spec.num_groups - 1 > 0xEFFFFFFFULL ||
        !GroupAddress::is_class_d(spec.base_address))
        throw std::invalid_argument("group addresses leave the class-D range");
}

struct Pending {
    double time;
    bool is_send;
    std::uint64_t bytes;
};

}  // namespace

std::vector<Event> generate_synthetic(const WorkloadSpec& spec, const FatTree& topo) {
    const int num_hosts = topo.num_hosts();
    validate_spec(spec, num_hosts);

    const double s = spec.traffic.zipf_s.value_or(tuned_zipf_exponent(spec.num_groups));
    const auto rank_bytes = zipf_group_bytes(spec.num_groups, s, spec.traffic.total_bytes);

    // Group g gets the traffic of rank rank_of[g].
    std::vector<int> rank_of(spec.num_groups);
    std::iota(rank_of.begin(), rank_of.end(), 0);
    Rng shuffle_rng(stable_hash(spec.seed, 0x72616e6bULL));
    std::shuffle(rank_of.begin(), rank_of.end(), shuffle_rng);

    const int max_size = std::min(spec.group_size.max, num_hosts);
    std::vector<double> size_weights;
    for (int x = spec.group_size.min; x <= max_size; ++x)
        size_weights.push_back(spec.group_size.skew == 0 ? 1.0 : std::pow(static_cast<double>(x), -spec.group_size.skew));

    std::vector<Event> events;
    for (int g = 0; g < spec.num_groups; ++g) {
        Rng rng(stable_hash(spec.seed, g));
        const GroupAddress addr(spec.base_address + static_cast<std::uint32_t>(g));

        std::discrete_distribution<int> size_dist(size_weights.begin(), size_weights.end());
        const int size = spec.group_size.min + size_dist(rng);

        int offset = 0;
        std::vector<HostId> founders;
        if (spec.placement == Placement::Nearby) {
            offset = std::uniform_int_distribution<int>(0, num_hosts - 1)(rng);
            founders = place_nearby(size, offset, num_hosts);
        } else {
            founders = place_members(size, Placement::Random, num_hosts, rng);
        }

        const double t0 = std::uniform_real_distribution<double>(0.0, spec.duration / 10.0)(rng);
        for (HostId h : founders) events.push_back({t0, EventKind::Join, addr, h, 0});

        std::vector<Pending> timeline;
        std::uniform_real_distribution<double> when(t0, spec.duration);
        std::uint64_t remaining = rank_bytes[rank_of[g]];
        while (remaining > 0) {
            const std::uint64_t chunk = std::min(remaining, spec.traffic.packet_size);
            timeline.push_back({when(rng), true, chunk});
            remaining -= chunk;
        }
        if (spec.churn_rate > 0 && size < num_hosts) {
            std::exponential_distribution<double> gap(spec.churn_rate / (spec.duration - t0));
            for (double t = t0 + gap(rng); t < spec.duration; t += gap(rng)) timeline.push_back({t, false, 0});
        }
        std::stable_sort(timeline.begin(), timeline.end(),
                         [](const Pending& a, const Pending& b) { return a.time < b.time; });

        std::unordered_set<HostId> founder_set(founders.begin(), founders.end());
        auto churn_candidate = [&]() -> HostId {
            // Nearby churn stays within one group-width of the founding run.
            if (spec.placement == Placement::Nearby && 3 * size < num_hosts) {
                int i = std::uniform_int_distribution<int>(0, 2 * size - 1)(rng);
                int h = i < size ? offset - size + i : offset + i;
                return ((h % num_hosts) + num_hosts) % num_hosts;
            }
            std::uniform_int_distribution<int> any(0, num_hosts - 1);
            for (;;) {
                HostId h = any(rng);
                if (!founder_set.count(h)) return h;
            }
        };

        std::vector<HostId> members = founders;
        for (const auto& p : timeline) {
            if (p.is_send) {
                HostId sender = members[std::uniform_int_distribution<std::size_t>(0, members.size() - 1)(rng)];
                events.push_back({p.time, EventKind::Send, addr, sender, p.bytes});
                continue;
            }
            HostId h = churn_candidate();
            auto it = std::find(members.begin(), members.end(), h);
            if (it == members.end()) {
                members.push_back(h);
                events.push_back({p.time, EventKind::Join, addr, h, 0});
            } else {
                members.erase(it);
                events.push_back({p.time, EventKind::Leave, addr, h, 0});
            }
        }
    }

    std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.time < b.time; });
    return events;
}

}  // namespace dusm

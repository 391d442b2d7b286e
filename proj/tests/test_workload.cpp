#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "dusm/workload.hpp"

using namespace dusm;

namespace {

std::vector<Event> parse(const std::string& text) {
    std::istringstream in(text);
    return parse_trace(in);
}

// Independent replay of the event invariants.
bool stream_ok(const std::vector<Event>& ev, std::string* why = nullptr) {
    std::map<std::uint32_t, std::set<int>> m;
    for (std::size_t i = 0; i < ev.size(); ++i) {
        const auto& e = ev[i];
        auto fail = [&](const char* w) {
            if (why) *why = std::string(w) + " at " + std::to_string(i);
            return false;
        };
        if (i && ev[i - 1].time > e.time) return fail("time order");
        if (!GroupAddress::is_class_d(e.group.value())) return fail("address");
        auto& s = m[e.group.value()];
        if (e.kind == EventKind::Join && !s.insert(e.host).second) return fail("double join");
        if (e.kind == EventKind::Leave && !s.erase(e.host)) return fail("leave non-member");
        if (e.kind == EventKind::Send && (e.bytes == 0 || !s.count(e.host))) return fail("send");
    }
    return true;
}

std::map<std::uint32_t, std::uint64_t> bytes_per_group(const std::vector<Event>& ev) {
    std::map<std::uint32_t, std::uint64_t> out;
    for (const auto& e : ev) {
        out[e.group.value()];
        if (e.kind == EventKind::Send) out[e.group.value()] += e.bytes;
    }
    return out;
}

double loglog_slope(std::vector<std::uint64_t> totals) {
    std::sort(totals.rbegin(), totals.rend());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(totals.size());
    for (std::size_t r = 0; r < totals.size(); ++r) {
        double x = std::log(static_cast<double>(r + 1)), y = std::log(static_cast<double>(totals[r]));
        sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_SUITE("group address") {
    TEST_CASE("parse and format") {
        auto a = GroupAddress::parse("224.0.1.1");
        CHECK(a.value() == 0xE0000101U);
        CHECK(a.str() == "224.0.1.1");
        CHECK(GroupAddress::parse("239.255.255.255").value() == 0xEFFFFFFFU);
        CHECK_THROWS_AS(GroupAddress::parse("10.0.0.1"), std::invalid_argument);
        CHECK_THROWS_AS(GroupAddress::parse("240.0.0.1"), std::invalid_argument);
        CHECK_THROWS_AS(GroupAddress::parse("224.0.1"), std::invalid_argument);
        CHECK_THROWS_AS(GroupAddress::parse("224.0.1.256"), std::invalid_argument);
        CHECK_THROWS_AS(GroupAddress(0x0A000001U), std::invalid_argument);
    }
}

TEST_SUITE("trace parsing") {
    TEST_CASE("single join line") {
        auto ev = parse("0.5 JOIN 224.0.1.1 h12\n");
        REQUIRE(ev.size() == 1);
        CHECK(ev[0].time == 0.5);
        CHECK(ev[0].kind == EventKind::Join);
        CHECK(ev[0].group.str() == "224.0.1.1");
        CHECK(ev[0].host == 12);
    }

    TEST_CASE("send before join is rejected with its line number") {
        try {
            parse("# header\n1.0 SEND 224.0.1.1 h12 1500\n2.0 JOIN 224.0.1.1 h12\n");
            FAIL("expected TraceError");
        } catch (const TraceError& e) {
            CHECK(e.line() == 2);
        }
    }

    TEST_CASE("events are sorted by time") {
        auto ev = parse("0.2 JOIN 224.0.1.1 h2\n0.1 JOIN 224.0.1.1 h1\n0.3 SEND 224.0.1.1 h1 100\n");
        REQUIRE(ev.size() == 3);
        CHECK(ev[0].host == 1);
        CHECK(ev[1].host == 2);
        CHECK(ev[2].kind == EventKind::Send);
        CHECK(ev[2].bytes == 100);
    }

    TEST_CASE("comments and blank lines") {
        auto ev = parse("# comment\n\n   \n0 JOIN 224.0.0.9 h0\n  # indented comment\n");
        CHECK(ev.size() == 1);
    }

    TEST_CASE("malformed lines report line numbers") {
        auto line_of = [](const std::string& text) -> std::size_t {
            try {
                parse(text);
            } catch (const TraceError& e) {
                return e.line();
            }
            return 0;
        };
        CHECK(line_of("0 JOIN 224.0.0.1 h0\n0 JUMP 224.0.0.1 h1\n") == 2);
        CHECK(line_of("0 JOIN 10.0.0.1 h0\n") == 1);
        CHECK(line_of("0 JOIN 224.0.0.1 h0\n1 SEND 224.0.0.1 h0\n") == 2);
        CHECK(line_of("0 JOIN 224.0.0.1 h0\n1 SEND 224.0.0.1 h0 0\n") == 2);
        CHECK(line_of("0 JOIN 224.0.0.1 h0 99\n") == 1);
        CHECK(line_of("x JOIN 224.0.0.1 h0\n") == 1);
        CHECK(line_of("0 JOIN 224.0.0.1 hx\n") == 1);
        CHECK(line_of("0 JOIN 224.0.0.1 h0\n1 JOIN 224.0.0.1 h0\n") == 2);
        CHECK(line_of("0 LEAVE 224.0.0.1 h0\n") == 1);
        CHECK(line_of("0 JOIN 224.0.0.1\n") == 1);
    }

    TEST_CASE("write then parse reproduces a generated stream") {
        auto topo = FatTree::build(4);
        WorkloadSpec spec;
        spec.num_groups = 30;
        spec.group_size = {2, 6, 0.5};
        spec.traffic.total_bytes = 200000;
        spec.churn_rate = 4;
        spec.seed = 5;
        auto ev = generate_synthetic(spec, topo);
        std::ostringstream out;
        write_trace(out, ev);
        CHECK(parse(out.str()) == ev);
    }
}

TEST_SUITE("synthetic generator") {
    TEST_CASE("chunking arithmetic") {
        auto topo = FatTree::build(4);
        WorkloadSpec spec;
        spec.num_groups = 1;
        spec.traffic.total_bytes = 4500;
        spec.traffic.packet_size = 1500;
        auto ev = generate_synthetic(spec, topo);
        int sends = 0;
        std::uint64_t total = 0;
        for (auto& e : ev)
            if (e.kind == EventKind::Send) ++sends, total += e.bytes;
        CHECK(sends == 3);
        CHECK(total == 4500);
    }

    TEST_CASE("determinism") {
        auto topo = FatTree::build(8);
        WorkloadSpec spec;
        spec.num_groups = 200;
        spec.churn_rate = 3;
        spec.seed = 77;
        CHECK(generate_synthetic(spec, topo) == generate_synthetic(spec, topo));
        auto other = spec;
        other.seed = 78;
        CHECK(generate_synthetic(spec, topo) != generate_synthetic(other, topo));
    }

    TEST_CASE("about 70% of groups are tiny under the tuned exponent") {
        auto topo = FatTree::build(8);
        for (int groups : {1000, 4000}) {
            WorkloadSpec spec;
            spec.num_groups = groups;
            spec.traffic.total_bytes = 500ULL << 20;
            spec.seed = 3;
            auto per = bytes_per_group(generate_synthetic(spec, topo));
            std::uint64_t mx = 0;
            for (auto& [_, b] : per) mx = std::max(mx, b);
            int small = 0;
            for (auto& [_, b] : per) small += static_cast<double>(b) < 0.01 * static_cast<double>(mx);
            double frac = static_cast<double>(small) / groups;
            CHECK(std::abs(frac - 0.70) <= 0.05);
        }
    }

    TEST_CASE("log-log slope matches the exponent") {
        auto topo = FatTree::build(8);
        for (double s : {0.6, 0.9, 1.3}) {
            WorkloadSpec spec;
            spec.num_groups = 1000;
            spec.traffic.zipf_s = s;
            spec.traffic.total_bytes = 4ULL << 30;
            spec.traffic.packet_size = 64 * 1024;
            spec.group_size = {2, 4, 0};
            auto per = bytes_per_group(generate_synthetic(spec, topo));
            std::vector<std::uint64_t> totals;
            for (auto& [_, b] : per) totals.push_back(b);
            CHECK(std::abs(loglog_slope(totals) + s) <= 0.1);
        }
    }

    TEST_CASE("fuzzed specs always produce valid streams") {
        Rng rng(1234);
        auto t4 = FatTree::build(4), t6 = FatTree::build(6);
        for (int i = 0; i < 1000; ++i) {
            const FatTree& topo = i % 2 ? t4 : t6;
            WorkloadSpec spec;
            spec.num_groups = 1 + static_cast<int>(rng() % 12);
            spec.group_size.min = 2 + static_cast<int>(rng() % 3);
            spec.group_size.max = spec.group_size.min + static_cast<int>(rng() % 10);
            spec.group_size.skew = static_cast<double>(rng() % 3);
            spec.traffic.total_bytes = 1 + rng() % 50000;
            spec.traffic.packet_size = 1 + rng() % 3000;
            spec.traffic.zipf_s = 0.2 + static_cast<double>(rng() % 20) / 10.0;
            spec.placement = rng() % 2 ? Placement::Random : Placement::Nearby;
            spec.churn_rate = static_cast<double>(rng() % 6);
            spec.duration = 1.0 + static_cast<double>(rng() % 50);
            spec.seed = rng();
            std::string why;
            auto ev = generate_synthetic(spec, topo);
            CHECK_MESSAGE(stream_ok(ev, &why), why);
            for (auto& e : ev) CHECK(e.host < topo.num_hosts());
        }
    }

    TEST_CASE("initial joins precede the group's first send") {
        auto topo = FatTree::build(4);
        WorkloadSpec spec;
        spec.num_groups = 50;
        spec.group_size = {3, 3, 0};
        spec.seed = 9;
        auto ev = generate_synthetic(spec, topo);
        std::map<std::uint32_t, int> joins_before_send;
        std::set<std::uint32_t> sent;
        for (auto& e : ev) {
            if (e.kind == EventKind::Join && !sent.count(e.group.value())) joins_before_send[e.group.value()]++;
            if (e.kind == EventKind::Send) sent.insert(e.group.value());
        }
        for (auto g : sent) CHECK(joins_before_send[g] == 3);
    }

    TEST_CASE("errors") {
        auto topo = FatTree::build(4);
        WorkloadSpec spec;
        spec.group_size = {17, 20, 0};
        CHECK_THROWS_AS(generate_synthetic(spec, topo), std::invalid_argument);
        spec = {};
        spec.num_groups = 0;
        CHECK_THROWS_AS(generate_synthetic(spec, topo), std::invalid_argument);
        spec = {};
        spec.traffic.packet_size = 0;
        CHECK_THROWS_AS(generate_synthetic(spec, topo), std::invalid_argument);
        spec = {};
        spec.traffic.zipf_s = -1.0;
        CHECK_THROWS_AS(generate_synthetic(spec, topo), std::invalid_argument);
        spec = {};
        spec.group_size = {1, 3, 0};
        CHECK_THROWS_AS(generate_synthetic(spec, topo), std::invalid_argument);
    }
}

TEST_SUITE("placement") {
    TEST_CASE("nearby aligned run stays under one edge") {
        auto topo = FatTree::build(8);
        auto hosts = place_nearby(topo.half(), 3 * topo.half(), topo.num_hosts());
        std::set<NodeIndex> edges;
        for (auto h : hosts) edges.insert(topo.edge_of_host(topo.host(h)));
        CHECK(edges.size() == 1);
    }

    TEST_CASE("random with every host") {
        Rng rng(1);
        auto hosts = place_members(16, Placement::Random, 16, rng);
        CHECK(std::set<int>(hosts.begin(), hosts.end()).size() == 16);
        CHECK_THROWS_AS(place_members(17, Placement::Random, 16, rng), std::invalid_argument);
        CHECK_THROWS_AS(place_members(17, Placement::Nearby, 16, rng), std::invalid_argument);
    }

    TEST_CASE("nearby k=4 offset 2") {
        auto topo = FatTree::build(4);
        auto hosts = place_nearby(4, 2, topo.num_hosts());
        CHECK(hosts == std::vector<HostId>{2, 3, 4, 5});
        std::set<NodeIndex> edges;
        for (auto h : hosts) edges.insert(topo.edge_of_host(topo.host(h)));
        CHECK(edges == std::set<NodeIndex>{topo.edge(0, 1), topo.edge(1, 0)});
    }

    TEST_CASE("nearby wraps") {
        CHECK(place_nearby(3, 15, 16) == std::vector<HostId>{0, 1, 15});
    }

    TEST_CASE("nearby edge span property") {
        auto topo = FatTree::build(8);
        Rng rng(8);
        const int h = topo.half();
        for (int i = 0; i < 2000; ++i) {
            int size = 1 + static_cast<int>(rng() % (h * h));
            auto hosts = place_members(size, Placement::Nearby, topo.num_hosts(), rng);
            std::set<NodeIndex> edges;
            for (auto x : hosts) edges.insert(topo.edge_of_host(topo.host(x)));
            int lo = (size + h - 1) / h;
            CHECK((static_cast<int>(edges.size()) == lo || static_cast<int>(edges.size()) == lo + 1));
        }
    }

    TEST_CASE("random is uniform over hosts") {
        Rng rng(99);
        std::vector<int> hits(64);
        for (int i = 0; i < 20000; ++i)
            for (int h : place_members(4, Placement::Random, 64, rng)) hits[h]++;
        for (int n : hits) CHECK(std::abs(n / 80000.0 - 1.0 / 64) < 0.004);
    }
}

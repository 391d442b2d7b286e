#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <random>
#include <set>

#include "dusm/topology.hpp"
#include "oracles.hpp"

using namespace dusm;

namespace {

int count_kind(const FatTree& t, NodeKind k) {
    int n = 0;
    for (const auto& id : t.nodes()) n += id.kind == k;
    return n;
}

// Up-then-down, no repeated nodes, consecutive links chained.
void check_path_valid(const FatTree& t, const Path& p) {
    REQUIRE(!p.empty());
    std::set<NodeIndex> seen{t.link(p.front()).src};
    bool descending = false;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const auto& l = t.link(p[i]);
        if (i > 0) CHECK(t.link(p[i - 1]).dst == l.src);
        CHECK(seen.insert(l.dst).second);
        int d = oracle::level(t.kind(l.dst)) - oracle::level(t.kind(l.src));
        CHECK(std::abs(d) == 1);
        if (d < 0) descending = true;
        if (descending) CHECK(d < 0);
    }
}

}  // namespace

TEST_SUITE("topology") {
    TEST_CASE("counts for k=4 and k=16") {
        auto t4 = FatTree::build(4);
        CHECK(count_kind(t4, NodeKind::Core) == 4);
        CHECK(count_kind(t4, NodeKind::Edge) == 8);
        CHECK(count_kind(t4, NodeKind::Aggregate) == 8);
        CHECK(count_kind(t4, NodeKind::Host) == 16);
        CHECK(t4.num_pods() == 4);

        auto t16 = FatTree::build(16);
        CHECK(count_kind(t16, NodeKind::Core) == 64);
        CHECK(count_kind(t16, NodeKind::Edge) == 128);
        CHECK(count_kind(t16, NodeKind::Aggregate) == 128);
        CHECK(count_kind(t16, NodeKind::Host) == 1024);
    }

    TEST_CASE("counts property over even k in [4,16]") {
        for (int k = 4; k <= 16; k += 2) {
            auto t = FatTree::build(k);
            CHECK(count_kind(t, NodeKind::Core) == (k / 2) * (k / 2));
            CHECK(count_kind(t, NodeKind::Edge) == k * k / 2);
            CHECK(count_kind(t, NodeKind::Aggregate) == k * k / 2);
            CHECK(count_kind(t, NodeKind::Host) == k * k * k / 4);
            // (k/2)^2*k core links + k*(k/2)^2 aggr-edge + k^3/4 host links, both directions
            CHECK(t.num_links() == static_cast<std::size_t>(2 * 3 * k * k * k / 4));
        }
    }

    TEST_CASE("invalid k") {
        CHECK_THROWS_AS(FatTree::build(3), std::invalid_argument);
        CHECK_THROWS_AS(FatTree::build(2), std::invalid_argument);
        CHECK_THROWS_AS(FatTree::build(66), std::invalid_argument);
    }

    TEST_CASE("link classes and pairing") {
        auto t = FatTree::build(6);
        std::map<std::pair<NodeIndex, NodeIndex>, int> seen;
        for (LinkIndex l = 0; l < t.num_links(); ++l) {
            const auto& link = t.link(l);
            CHECK(classify_link(t.kind(link.src), t.kind(link.dst)) == link.cls);
            CHECK(t.link(t.reverse(l)).src == link.dst);
            CHECK(t.link(t.reverse(l)).dst == link.src);
            seen[{link.src, link.dst}]++;
        }
        for (auto& [_, n] : seen) CHECK(n == 1);
    }

    TEST_CASE("degrees and core wiring") {
        auto t = FatTree::build(8);
        const int h = t.half();
        for (int p = 0; p < t.num_pods(); ++p)
            for (int i = 0; i < h; ++i) {
                CHECK(t.out_links(t.edge(p, i)).size() == static_cast<std::size_t>(t.k()));
                CHECK(t.out_links(t.aggregate(p, i)).size() == static_cast<std::size_t>(t.k()));
            }
        for (int c = 0; c < t.num_cores(); ++c) {
            auto nb = t.neighbors(t.core(c));
            CHECK(nb.size() == static_cast<std::size_t>(t.k()));
            for (int p = 0; p < t.num_pods(); ++p)
                CHECK(t.find_link(t.core(c), t.aggregate(p, c % h)).has_value());
        }
    }

    TEST_CASE("dense ordering is cores then pod-major") {
        auto t = FatTree::build(4);
        CHECK(t.core(0) == 0);
        CHECK(t.aggregate(0, 0) == 4);
        CHECK(t.edge(0, 0) == 12);
        CHECK(t.host(0) == 20);
        CHECK(t.host(1, 0) == t.host(4));
        for (NodeIndex n = 0; n < t.num_nodes(); ++n) CHECK(t.index_of(t.describe(n)) == n);
    }

    TEST_CASE("downward path example from core 0") {
        auto t = FatTree::build(4);
        NodeIndex host = t.host(2, 0);
        auto p = t.downward_path(t.core(0), host);
        REQUIRE(p.size() == 3);
        // Frozen from the DFS enumeration oracle on k=4.
        auto expected = oracle::all_downward_paths(t, t.core(0), host);
        REQUIRE(expected.size() == 1);
        CHECK(p == expected.front());
        CHECK(t.link(p[0]).dst == t.aggregate(2, 0));
        CHECK(t.link(p[1]).dst == t.edge(2, 0));
        CHECK(t.link(p[2]).dst == host);
    }

    TEST_CASE("downward path lengths and errors") {
        auto t = FatTree::build(4);
        auto p = t.downward_path(t.edge(0, 0), t.host(0, 1));
        REQUIRE(p.size() == 1);
        CHECK(t.link(p[0]).cls == LinkClass::EH);
        CHECK(t.downward_path(t.aggregate(0, 1), t.host(0, 3)).size() == 2);
        CHECK_THROWS_AS(t.downward_path(t.aggregate(0, 0), t.host(1, 0)), std::invalid_argument);
        CHECK_THROWS_AS(t.downward_path(t.edge(0, 0), t.host(0, 2)), std::invalid_argument);
        CHECK_THROWS_AS(t.downward_path(t.host(0), t.host(1)), std::invalid_argument);
    }

    TEST_CASE("downward uniqueness exhaustive on k=4") {
        auto t = FatTree::build(4);
        for (int c = 0; c < t.num_cores(); ++c)
            for (int h = 0; h < t.num_hosts(); ++h) {
                auto all = oracle::all_downward_paths(t, t.core(c), t.host(h));
                REQUIRE(all.size() == 1);
                CHECK(t.downward_path(t.core(c), t.host(h)) == all.front());
            }
    }

    TEST_CASE("ECMP path shapes") {
        auto t = FatTree::build(4);
        auto same_edge = t.ecmp_unicast_path(t.host(0, 0), t.host(0, 1), 7);
        CHECK(same_edge.size() == 2);
        for (auto l : same_edge) CHECK(t.kind(t.link(l).dst) != NodeKind::Aggregate);
        CHECK(t.ecmp_unicast_path(t.host(0, 0), t.host(0, 3), 7).size() == 4);
        auto cross = t.ecmp_unicast_path(t.host(0, 0), t.host(3, 2), 7);
        CHECK(cross.size() == 6);
        CHECK(t.ecmp_unicast_path(t.host(0, 0), t.host(3, 2), 7) == cross);
        CHECK_THROWS_AS(t.ecmp_unicast_path(t.host(1), t.host(1), 7), std::invalid_argument);
    }

    TEST_CASE("path validity property") {
        auto t = FatTree::build(8);
        std::mt19937_64 rng(11);
        std::uniform_int_distribution<int> pick(0, t.num_hosts() - 1);
        for (int i = 0; i < 2000; ++i) {
            int a = pick(rng), b = pick(rng);
            if (a == b) continue;
            auto p = t.ecmp_unicast_path(t.host(a), t.host(b), rng());
            check_path_valid(t, p);
            CHECK(t.link(p.front()).src == t.host(a));
            CHECK(t.link(p.back()).dst == t.host(b));
        }
        for (int c = 0; c < t.num_cores(); ++c) check_path_valid(t, t.downward_path(t.core(c), t.host(c * 3)));
    }

    TEST_CASE("ECMP core choice is uniform on k=8") {
        auto t = FatTree::build(8);
        std::mt19937_64 rng(2024);
        std::uniform_int_distribution<int> pick(0, t.num_hosts() - 1);
        std::map<NodeIndex, int> hits;
        int pairs = 0;
        while (pairs < 10000) {
            NodeIndex a = t.host(pick(rng)), b = t.host(pick(rng));
            if (t.pod_of(a) == t.pod_of(b)) continue;
            auto p = t.ecmp_unicast_path(a, b, 99);
            hits[t.link(p[2]).dst]++;
            ++pairs;
        }
        REQUIRE(hits.size() == 16);
        for (auto& [core, n] : hits) {
            CHECK(t.kind(core) == NodeKind::Core);
            double frac = n / 10000.0;
            CHECK(std::abs(frac - 0.0625) <= 0.02);
        }
    }
}

#pragma once

// Test-only oracles. These deliberately avoid the library's path and tree
// code and work from the raw link list.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "dusm/topology.hpp"

namespace oracle {

using dusm::FatTree;
using dusm::LinkIndex;
using dusm::NodeIndex;
using dusm::NodeKind;

inline int level(NodeKind k) {
    switch (k) {
        case NodeKind::Host: return 0;
        case NodeKind::Edge: return 1;
        case NodeKind::Aggregate: return 2;
        case NodeKind::Core: return 3;
    }
    return -1;
}

// Adjacency rebuilt by scanning every link.
inline std::vector<std::vector<std::pair<NodeIndex, LinkIndex>>> adjacency(const FatTree& t) {
    std::vector<std::vector<std::pair<NodeIndex, LinkIndex>>> adj(t.num_nodes());
    auto links = t.links();
    for (LinkIndex l = 0; l < links.size(); ++l) adj[links[l].src].push_back({links[l].dst, l});
    return adj;
}

using Adjacency = std::vector<std::vector<std::pair<NodeIndex, LinkIndex>>>;

// Every strictly descending path from root to host, by DFS.
inline std::vector<std::vector<LinkIndex>> all_downward_paths(const FatTree& t, const Adjacency& adj,
                                                              NodeIndex root, NodeIndex host) {
    std::vector<std::vector<LinkIndex>> out;
    std::vector<LinkIndex> cur;
    auto dfs = [&](auto&& self, NodeIndex n) -> void {
        if (n == host) {
            out.push_back(cur);
            return;
        }
        for (auto [next, l] : adj[n]) {
            if (level(t.kind(next)) != level(t.kind(n)) - 1) continue;
            cur.push_back(l);
            self(self, next);
            cur.pop_back();
        }
    };
    dfs(dfs, root);
    return out;
}

inline std::vector<std::vector<LinkIndex>> all_downward_paths(const FatTree& t, NodeIndex root, NodeIndex host) {
    return all_downward_paths(t, adjacency(t), root, host);
}

// Union of all descending paths from root to each member, computed by DFS
// enumeration; returns switch -> sorted child links.
inline std::map<NodeIndex, std::vector<LinkIndex>> tree_union(const FatTree& t, const Adjacency& adj,
                                                              NodeIndex root,
                                                              const std::vector<NodeIndex>& members) {
    std::map<NodeIndex, std::set<LinkIndex>> acc;
    for (NodeIndex m : members) {
        auto paths = all_downward_paths(t, adj, root, m);
        if (paths.size() != 1) throw std::runtime_error("downward path not unique");
        for (LinkIndex l : paths.front()) acc[t.link(l).src].insert(l);
    }
    std::map<NodeIndex, std::vector<LinkIndex>> out;
    for (auto& [n, s] : acc) out[n] = {s.begin(), s.end()};
    return out;
}

inline std::map<NodeIndex, std::vector<LinkIndex>> tree_union(const FatTree& t, NodeIndex root,
                                                              const std::vector<NodeIndex>& members) {
    return tree_union(t, adjacency(t), root, members);
}

// Linear-interpolation percentile on a sorted copy, computed with a
// different formulation (explicit floor/ceil weights).
inline double percentile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    double pos = q * static_cast<double>(v.size() - 1);
    std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
    double w = pos - std::floor(pos);
    return v[lo] * (1.0 - w) + v[hi] * w;
}

}  // namespace oracle

#include "dusm/steiner.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "dusm/hash.hpp"

namespace dusm {

std::size_t SteinerTree::link_count() const {
    std::size_t n = 0;
    for (const auto& [_, ports] : rules) n += ports.size();
    return n;
}

const PortSet* SteinerTree::ports(NodeIndex sw) const {
    auto it = rules.find(sw);
    return it == rules.end() ? nullptr : &it->second;
}

SteinerTree compute_steiner_tree(std::span<const NodeIndex> members, NodeIndex root, const FatTree& topo,
                                 int tree_id) {
    SteinerTree tree;
    tree.tree_id = tree_id;
    tree.root = root;
    for (NodeIndex m : members) {
        for (LinkIndex l : topo.downward_path(root, m)) {
            auto& ports = tree.rules[topo.link(l).src];
            auto pos = std::lower_bound(ports.begin(), ports.end(), l);
            if (pos == ports.end() || *pos != l) ports.insert(pos, l);
        }
    }
    return tree;
}

std::optional<NodeIndex> tree_parent(NodeIndex sw, NodeIndex root, const FatTree& topo) {
    if (sw == root) return std::nullopt;
    const NodeId& r = topo.describe(root);
    const NodeId& s = topo.describe(sw);
    switch (s.kind) {
        case NodeKind::Host: return topo.edge_of_host(sw);
        case NodeKind::Edge:
            if (r.kind == NodeKind::Core) return topo.aggregate(s.pod, r.index % topo.half());
            if (r.kind == NodeKind::Aggregate && r.pod == s.pod) return root;
            break;
        case NodeKind::Aggregate:
            if (r.kind == NodeKind::Core && s.index == r.index % topo.half()) return root;
            break;
        case NodeKind::Core: break;
    }
    throw std::invalid_argument(to_string(s) + " is not on a tree rooted at " + to_string(r));
}

namespace {

struct Span {
    std::set<int> pods;
    std::set<NodeIndex> edges;
};

Span member_span(std::span<const NodeIndex> members, const FatTree& topo) {
    if (members.empty()) throw std::invalid_argument("cannot root a tree for an empty group");
    Span s;
    for (NodeIndex m : members) {
        s.pods.insert(topo.pod_of(m));
        s.edges.insert(topo.edge_of_host(m));
    }
    return s;
}

int capped_trees(int t, const FatTree& topo) {
    if (t < 1) throw std::invalid_argument("trees per group must be >= 1");
    return std::min(t, topo.num_cores());
}

}  // namespace

std::vector<NodeIndex> select_roots(std::span<const NodeIndex> members, int t, const FatTree& topo, Rng& rng) {
    const Span s = member_span(members, topo);
    t = capped_trees(t, topo);
    if (s.pods.size() >= 2) {
        std::vector<int> cores(topo.num_cores());
        for (int c = 0; c < topo.num_cores(); ++c) cores[c] = c;
        // Partial Fisher-Yates: the first t entries are a uniform sample.
        std::vector<NodeIndex> out;
        for (int i = 0; i < t; ++i) {
            int j = std::uniform_int_distribution<int>(i, topo.num_cores() - 1)(rng);
            std::swap(cores[i], cores[j]);
            out.push_back(topo.core(cores[i]));
        }
        return out;
    }
    if (s.edges.size() >= 2) {
        int a = std::uniform_int_distribution<int>(0, topo.half() - 1)(rng);
        return {topo.aggregate(*s.pods.begin(), a)};
    }
    return {*s.edges.begin()};
}

std::vector<NodeIndex> hashed_roots(GroupAddress group, std::span<const NodeIndex> members, int t,
                                    const FatTree& topo) {
    const Span s = member_span(members, topo);
    t = capped_trees(t, topo);
    const std::uint64_t h = stable_hash(group.value());
    if (s.pods.size() >= 2) {
        std::vector<NodeIndex> out;
        for (int i = 0; i < t; ++i)
            out.push_back(topo.core(static_cast<int>((h + static_cast<std::uint64_t>(i)) % topo.num_cores())));
        return out;
    }
    if (s.edges.size() >= 2)
        return {topo.aggregate(*s.pods.begin(), static_cast<int>(h % static_cast<std::uint64_t>(topo.half())))};
    return {*s.edges.begin()};
}

NodeIndex pim_rendezvous_point(GroupAddress group, const FatTree& topo) {
    return topo.core(static_cast<int>(stable_hash(group.value()) % static_cast<std::uint64_t>(topo.num_cores())));
}

}  // namespace dusm

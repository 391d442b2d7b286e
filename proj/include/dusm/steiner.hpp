#pragma once

#include <map>
#include <span>
#include <vector>

#include "dusm/topology.hpp"
#include "dusm/workload.hpp"

namespace dusm {

/// Sorted, duplicate-free output links of one group-table entry.
using PortSet = std::vector<LinkIndex>;

/// Shared tree for one group: root plus, for every switch on it, the set of
/// child links. Upward forwarding toward the root is implied by the topology.
struct SteinerTree {
    int tree_id = 0;
    NodeIndex root = 0;
    std::map<NodeIndex, PortSet> rules;

    std::size_t switch_count() const { return rules.size(); }
    std::size_t link_count() const;
    const PortSet* ports(NodeIndex sw) const;

    bool operator==(const SteinerTree&) const = default;
};

/// Union of the downward paths from root to every member. Throws
/// std::invalid_argument if a member is not below root.
SteinerTree compute_steiner_tree(std::span<const NodeIndex> members, NodeIndex root, const FatTree& topo,
                                 int tree_id = 0);

/// Tree parent of a switch for a given root, or nullopt at the root.
std::optional<NodeIndex> tree_parent(NodeIndex sw, NodeIndex root, const FatTree& topo);

/// Roots for an elephant group: t distinct random cores when members span
/// two or more pods, a random aggregate of the pod when they span several
/// edges of one pod, otherwise the members' common edge switch.
std::vector<NodeIndex> select_roots(std::span<const NodeIndex> members, int t, const FatTree& topo, Rng& rng);

/// Same case split as select_roots, but every choice is a hash of the group
/// address. Cores are (h + i) mod #cores for i < t.
std::vector<NodeIndex> hashed_roots(GroupAddress group, std::span<const NodeIndex> members, int t,
                                    const FatTree& topo);

/// Single-core rendezvous point used by the PIM-SM-style baseline.
NodeIndex pim_rendezvous_point(GroupAddress group, const FatTree& topo);

}  // namespace dusm

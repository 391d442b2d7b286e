#include "dusm/dataplane.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace dusm {

std::size_t match_tree(std::uint64_t packet_key, std::size_t num_trees) {
    if (num_trees == 0) throw std::invalid_argument("no trees to match against");
    return static_cast<std::size_t>(stable_hash(packet_key) % num_trees);
}

std::uint64_t LinkLedger::total() const { return std::accumulate(bytes_.begin(), bytes_.end(), std::uint64_t{0}); }

void Hypervisors::update(GroupAddress g, std::span<const NodeIndex> members) {
    auto list = std::make_shared<const std::vector<NodeIndex>>(members.begin(), members.end());
    if (auto old = published_.find(g); old != published_.end()) {
        for (NodeIndex h : *old->second)
            if (!std::binary_search(list->begin(), list->end(), h)) local_.at(h).erase(g);
    }
    for (NodeIndex h : *list) local_.at(h)[g] = list;
    published_[g] = std::move(list);
}

void Hypervisors::forget(GroupAddress g) {
    auto old = published_.find(g);
    if (old == published_.end()) return;
    for (NodeIndex h : *old->second) local_.at(h).erase(g);
    published_.erase(old);
}

const std::vector<NodeIndex>* Hypervisors::receivers(NodeIndex host, GroupAddress g) const {
    const auto& m = local_.at(host);
    auto it = m.find(g);
    return it == m.end() ? nullptr : it->second.get();
}

namespace {

struct TreeWalk {
    const SteinerTree& tree;
    const FatTree& topo;
    LinkLedger& ledger;
    std::uint64_t bytes;
    std::vector<NodeIndex>& receivers;

    // Charge l and everything below its far end.
    void descend(LinkIndex l) {
        ledger.charge(l, bytes);
        const NodeIndex n = topo.link(l).dst;
        if (topo.kind(n) == NodeKind::Host) {
            receivers.push_back(n);
            return;
        }
        if (const PortSet* ports = tree.ports(n))
            for (LinkIndex child : *ports) descend(child);
    }

    void descend_except(NodeIndex sw, NodeIndex skip) {
        if (const PortSet* ports = tree.ports(sw))
            for (LinkIndex child : *ports)
                if (topo.link(child).dst != skip) descend(child);
    }
};

}  // namespace

std::vector<NodeIndex> deliver_elephant(const Packet& packet, const SteinerTree& tree, const FatTree& topo,
                                        LinkLedger& ledger) {
    const NodeIndex edge = topo.edge_of_host(packet.sender);
    const PortSet* at_edge = tree.ports(edge);
    const LinkIndex down_to_sender = topo.link_between(edge, packet.sender);
    if (!at_edge || !std::binary_search(at_edge->begin(), at_edge->end(), down_to_sender))
        throw std::invalid_argument("sender is not a member of " + packet.group.str());

    // Every member hangs off exactly one EH child link.
    std::size_t members = 0;
    for (const auto& [sw, ports] : tree.rules)
        if (topo.kind(sw) == NodeKind::Edge) members += ports.size();

    std::vector<NodeIndex> receivers;
    if (members <= 1) return receivers;

    TreeWalk walk{tree, topo, ledger, packet.bytes, receivers};
    ledger.charge(topo.reverse(down_to_sender), packet.bytes);
    walk.descend_except(edge, packet.sender);
    NodeIndex cur = edge;
    while (receivers.size() + 1 < members) {
        auto parent = tree_parent(cur, tree.root, topo);
        if (!parent) throw std::logic_error("tree for " + packet.group.str() + " does not reach every member");
        ledger.charge(topo.link_between(cur, *parent), packet.bytes);
        walk.descend_except(*parent, cur);
        cur = *parent;
    }
    return receivers;
}

std::vector<NodeIndex> deliver_mice(const Packet& packet, std::span<const NodeIndex> members, const FatTree& topo,
                                    std::uint64_t ecmp_seed, LinkLedger& ledger,
                                    std::uint64_t encap_overhead_bytes) {
    if (std::find(members.begin(), members.end(), packet.sender) == members.end())
        throw std::invalid_argument("sender is not a member of " + packet.group.str());
    std::vector<NodeIndex> receivers;
    const std::uint64_t wire = packet.bytes + encap_overhead_bytes;
    for (NodeIndex r : members) {
        if (r == packet.sender) continue;
        for (LinkIndex l : topo.ecmp_unicast_path(packet.sender, r, ecmp_seed)) ledger.charge(l, wire);
        receivers.push_back(r);
    }
    return receivers;
}

}  // namespace dusm

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "dusm/hash.hpp"
#include "dusm/steiner.hpp"

namespace dusm {

struct Packet {
    GroupAddress group;
    NodeIndex sender = 0;
    std::uint64_t bytes = 0;
    /// Per-group sequence number.
    std::uint64_t seq = 0;

    std::uint64_t key() const { return stable_hash(group.value(), sender, seq); }
};

/// Static packet-to-tree matching: the same key maps to the same tree on
/// every switch. Throws std::invalid_argument when num_trees == 0.
std::size_t match_tree(std::uint64_t packet_key, std::size_t num_trees);

/// Cumulative bytes carried per directed link.
class LinkLedger {
public:
    explicit LinkLedger(std::size_t num_links) : bytes_(num_links) {}

    void charge(LinkIndex l, std::uint64_t bytes) { bytes_.at(l) += bytes; }
    std::uint64_t bytes(LinkIndex l) const { return bytes_.at(l); }
    std::span<const std::uint64_t> all() const { return bytes_; }
    std::uint64_t total() const;

    bool operator==(const LinkLedger&) const = default;

private:
    std::vector<std::uint64_t> bytes_;
};

/// Per-server receiver lists for mice groups with a local member. Lists are
/// shared between the member servers of a group.
class Hypervisors {
public:
    using ReceiverList = std::shared_ptr<const std::vector<NodeIndex>>;

    explicit Hypervisors(std::size_t num_nodes) : local_(num_nodes) {}

    /// Publishes the group's member list to every member server and withdraws
    /// it from servers that are no longer members.
    void update(GroupAddress g, std::span<const NodeIndex> members);
    /// Withdraws the group from every server (on promotion).
    void forget(GroupAddress g);

    /// nullptr when the server has no local member of g.
    const std::vector<NodeIndex>* receivers(NodeIndex host, GroupAddress g) const;
    std::size_t entries(NodeIndex host) const { return local_.at(host).size(); }

private:
    std::vector<std::unordered_map<GroupAddress, ReceiverList>> local_;
    std::unordered_map<GroupAddress, ReceiverList> published_;
};

/// Bidirectional shared-tree forwarding. The packet climbs from the sender
/// only as far as needed to reach every other member, then flows down every
/// branch away from where it came. Each traversed link is charged once.
/// Returns the receiving hosts. Throws if the sender is not on the tree.
std::vector<NodeIndex> deliver_elephant(const Packet& packet, const SteinerTree& tree, const FatTree& topo,
                                        LinkLedger& ledger);

/// Multicast-to-unicast translation at the sender's hypervisor: one copy per
/// receiver along its ECMP path, each copy carrying encap_overhead_bytes extra.
std::vector<NodeIndex> deliver_mice(const Packet& packet, std::span<const NodeIndex> members, const FatTree& topo,
                                    std::uint64_t ecmp_seed, LinkLedger& ledger,
                                    std::uint64_t encap_overhead_bytes = 0);

}  // namespace dusm

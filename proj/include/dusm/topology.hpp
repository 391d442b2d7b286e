#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dusm {

enum class NodeKind : std::uint8_t { Host, Edge, Aggregate, Core };

/// Structural name of a node. Cores carry pod == -1.
struct NodeId {
    NodeKind kind{};
    int pod = -1;
    int index = 0;

    auto operator<=>(const NodeId&) const = default;
};

std::string to_string(const NodeId& id);

/// Dense node number, assigned cores first, then aggregates, edges and hosts,
/// each pod-major.
using NodeIndex = std::uint32_t;
using LinkIndex = std::uint32_t;

enum class LinkClass : std::uint8_t { HE, EH, EA, AE, AC, CA };

inline constexpr LinkClass kAllLinkClasses[] = {LinkClass::EA, LinkClass::AC, LinkClass::CA,
                                                LinkClass::AE, LinkClass::HE, LinkClass::EH};

const char* to_string(LinkClass c);
std::optional<LinkClass> classify_link(NodeKind src, NodeKind dst);

struct Link {
    NodeIndex src = 0;
    NodeIndex dst = 0;
    LinkClass cls{};
};

using Path = std::vector<LinkIndex>;

/// k-ary fat tree. Immutable once built.
class FatTree {
public:
    static FatTree build(int k);

    int k() const { return k_; }
    int half() const { return half_; }
    int num_pods() const { return k_; }
    int num_cores() const { return half_ * half_; }
    int num_aggregates() const { return k_ * half_; }
    int num_edges() const { return k_ * half_; }
    int num_hosts() const { return k_ * half_ * half_; }
    int hosts_per_pod() const { return half_ * half_; }
    std::size_t num_nodes() const { return nodes_.size(); }
    std::size_t num_links() const { return links_.size(); }

    NodeIndex core(int index) const;
    NodeIndex aggregate(int pod, int index) const;
    NodeIndex edge(int pod, int index) const;
    NodeIndex host(int pod, int index) const;
    /// Host by its ordinal in pod-major order, 0..num_hosts()-1.
    NodeIndex host(int ordinal) const;
    int host_ordinal(NodeIndex host) const;

    const NodeId& describe(NodeIndex n) const { return nodes_.at(n); }
    NodeIndex index_of(const NodeId& id) const;
    NodeKind kind(NodeIndex n) const { return nodes_.at(n).kind; }
    int pod_of(NodeIndex n) const { return nodes_.at(n).pod; }
    NodeIndex edge_of_host(NodeIndex host) const;

    const Link& link(LinkIndex l) const { return links_.at(l); }
    std::span<const Link> links() const { return links_; }
    std::span<const NodeId> nodes() const { return nodes_; }
    std::span<const LinkIndex> out_links(NodeIndex n) const { return out_links_.at(n); }
    std::vector<NodeIndex> neighbors(NodeIndex n) const;

    std::optional<LinkIndex> find_link(NodeIndex src, NodeIndex dst) const;
    /// Throws std::invalid_argument if src and dst are not adjacent.
    LinkIndex link_between(NodeIndex src, NodeIndex dst) const;
    LinkIndex reverse(LinkIndex l) const;

    /// Whether host lies strictly below root (root may be core, aggregate or edge).
    bool reachable_downward(NodeIndex root, NodeIndex host) const;

    /// The unique descending path root -> host. Throws std::invalid_argument
    /// when the host is not below root.
    Path downward_path(NodeIndex root, NodeIndex host) const;

    /// Shortest up-then-down path; the choice among equal-cost paths is
    /// stable_hash(src, dst, seed) modulo the number of choices.
    Path ecmp_unicast_path(NodeIndex src, NodeIndex dst, std::uint64_t seed) const;

private:
    FatTree() = default;
    void add_link_pair(NodeIndex down_src, NodeIndex down_dst);
    void check_host(NodeIndex n) const;

    int k_ = 0;
    int half_ = 0;
    NodeIndex aggr_base_ = 0;
    NodeIndex edge_base_ = 0;
    NodeIndex host_base_ = 0;
    std::vector<NodeId> nodes_;
    std::vector<Link> links_;
    std::vector<std::vector<LinkIndex>> out_links_;
};

}  // namespace dusm

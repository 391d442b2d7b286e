#include "dusm/topology.hpp"

#include <algorithm>
#include <stdexcept>

#include "dusm/hash.hpp"

namespace dusm {

std::string to_string(const NodeId& id) {
    switch (id.kind) {
        case NodeKind::Core: return "c" + std::to_string(id.index);
        case NodeKind::Aggregate: return "a" + std::to_string(id.pod) + "." + std::to_string(id.index);
        case NodeKind::Edge: return "e" + std::to_string(id.pod) + "." + std::to_string(id.index);
        case NodeKind::Host: return "h" + std::to_string(id.pod) + "." + std::to_string(id.index);
    }
    return "?";
}

const char* to_string(LinkClass c) {
    switch (c) {
        case LinkClass::HE: return "HE";
        case LinkClass::EH: return "EH";
        case LinkClass::EA: return "EA";
        case LinkClass::AE: return "AE";
        case LinkClass::AC: return "AC";
        case LinkClass::CA: return "CA";
    }
    return "?";
}

std::optional<LinkClass> classify_link(NodeKind src, NodeKind dst) {
    using K = NodeKind;
    if (src == K::Host && dst == K::Edge) return LinkClass::HE;
    if (src == K::Edge && dst == K::Host) return LinkClass::EH;
    if (src == K::Edge && dst == K::Aggregate) return LinkClass::EA;
    if (src == K::Aggregate && dst == K::Edge) return LinkClass::AE;
    if (src == K::Aggregate && dst == K::Core) return LinkClass::AC;
    if (src == K::Core && dst == K::Aggregate) return LinkClass::CA;
    return std::nullopt;
}

FatTree FatTree::build(int k) {
    if (k % 2 != 0 || k < 4 || k > 64) {
        throw std::invalid_argument("fat tree port count must be even and in [4, 64], got " +
                                    std::to_string(k));
    }
    FatTree t;
    t.k_ = k;
    t.half_ = k / 2;
    const int h = t.half_;

    for (int c = 0; c < h * h; ++c) t.nodes_.push_back({NodeKind::Core, -1, c});
    t.aggr_base_ = static_cast<NodeIndex>(t.nodes_.size());
    for (int p = 0; p < k; ++p)
        for (int i = 0; i < h; ++i) t.nodes_.push_back({NodeKind::Aggregate, p, i});
    t.edge_base_ = static_cast<NodeIndex>(t.nodes_.size());
    for (int p = 0; p < k; ++p)
        for (int i = 0; i < h; ++i) t.nodes_.push_back({NodeKind::Edge, p, i});
    t.host_base_ = static_cast<NodeIndex>(t.nodes_.size());
    for (int p = 0; p < k; ++p)
        for (int i = 0; i < h * h; ++i) t.nodes_.push_back({NodeKind::Host, p, i});
    t.out_links_.resize(t.nodes_.size());

    // Core j*h + i serves column i: aggregate i of every pod.
    for (int c = 0; c < h * h; ++c)
        for (int p = 0; p < k; ++p) t.add_link_pair(t.core(c), t.aggregate(p, c % h));
    for (int p = 0; p < k; ++p)
        for (int a = 0; a < h; ++a)
            for (int e = 0; e < h; ++e) t.add_link_pair(t.aggregate(p, a), t.edge(p, e));
    for (int p = 0; p < k; ++p)
        for (int j = 0; j < h * h; ++j) t.add_link_pair(t.edge(p, j / h), t.host(p, j));
    return t;
}

void FatTree::add_link_pair(NodeIndex down_src, NodeIndex down_dst) {
    auto push = [this](NodeIndex s, NodeIndex d) {
        auto cls = classify_link(nodes_[s].kind, nodes_[d].kind);
        out_links_[s].push_back(static_cast<LinkIndex>(links_.size()));
        links_.push_back({s, d, *cls});
    };
    // Pairs are adjacent so reverse(l) == l ^ 1.
    push(down_src, down_dst);
    push(down_dst, down_src);
}

NodeIndex FatTree::core(int index) const {
    if (index < 0 || index >= num_cores()) throw std::out_of_range("core index out of range");
    return static_cast<NodeIndex>(index);
}

NodeIndex FatTree::aggregate(int pod, int index) const {
    if (pod < 0 || pod >= k_ || index < 0 || index >= half_)
        throw std::out_of_range("aggregate index out of range");
    return aggr_base_ + static_cast<NodeIndex>(pod * half_ + index);
}

NodeIndex FatTree::edge(int pod, int index) const {
    if (pod < 0 || pod >= k_ || index < 0 || index >= half_)
        throw std::out_of_range("edge index out of range");
    return edge_base_ + static_cast<NodeIndex>(pod * half_ + index);
}

NodeIndex FatTree::host(int pod, int index) const {
    if (pod < 0 || pod >= k_ || index < 0 || index >= half_ * half_)
        throw std::out_of_range("host index out of range");
    return host_base_ + static_cast<NodeIndex>(pod * half_ * half_ + index);
}

NodeIndex FatTree::host(int ordinal) const {
    if (ordinal < 0 || ordinal >= num_hosts()) throw std::out_of_range("host ordinal out of range");
    return host_base_ + static_cast<NodeIndex>(ordinal);
}

int FatTree::host_ordinal(NodeIndex host) const {
    check_host(host);
    return static_cast<int>(host - host_base_);
}

NodeIndex FatTree::index_of(const NodeId& id) const {
    switch (id.kind) {
        case NodeKind::Core: return core(id.index);
        case NodeKind::Aggregate: return aggregate(id.pod, id.index);
        case NodeKind::Edge: return edge(id.pod, id.index);
        case NodeKind::Host: return host(id.pod, id.index);
    }
    throw std::invalid_argument("bad node kind");
}

void FatTree::check_host(NodeIndex n) const {
    if (n >= nodes_.size() || nodes_[n].kind != NodeKind::Host)
        throw std::invalid_argument("node " + std::to_string(n) + " is not a host");
}

NodeIndex FatTree::edge_of_host(NodeIndex host) const {
    check_host(host);
    const auto& id = nodes_[host];
    return edge(id.pod, id.index / half_);
}

std::vector<NodeIndex> FatTree::neighbors(NodeIndex n) const {
    std::vector<NodeIndex> out;
    for (LinkIndex l : out_links_.at(n)) out.push_back(links_[l].dst);
    return out;
}

std::optional<LinkIndex> FatTree::find_link(NodeIndex src, NodeIndex dst) const {
    if (src >= out_links_.size()) return std::nullopt;
    for (LinkIndex l : out_links_[src])
        if (links_[l].dst == dst) return l;
    return std::nullopt;
}

LinkIndex FatTree::link_between(NodeIndex src, NodeIndex dst) const {
    if (auto l = find_link(src, dst)) return *l;
    throw std::invalid_argument("no link " + to_string(describe(src)) + " -> " + to_string(describe(dst)));
}

LinkIndex FatTree::reverse(LinkIndex l) const {
    if (l >= links_.size()) throw std::out_of_range("link index out of range");
    return l ^ 1U;
}

bool FatTree::reachable_downward(NodeIndex root, NodeIndex host) const {
    check_host(host);
    const auto& r = describe(root);
    const auto& h = nodes_[host];
    switch (r.kind) {
        case NodeKind::Core: return true;
        case NodeKind::Aggregate: return r.pod == h.pod;
        case NodeKind::Edge: return r.pod == h.pod && r.index == h.index / half_;
        case NodeKind::Host: return false;
    }
    return false;
}

Path FatTree::downward_path(NodeIndex root, NodeIndex host) const {
    if (!reachable_downward(root, host)) {
        throw std::invalid_argument("host " + to_string(describe(host)) + " is not below " +
                                    to_string(describe(root)));
    }
    const auto& r = nodes_[root];
    const auto& h = nodes_[host];
    const NodeIndex e = edge(h.pod, h.index / half_);
    Path path;
    if (r.kind == NodeKind::Core) {
        const NodeIndex a = aggregate(h.pod, r.index % half_);
        path.push_back(link_between(root, a));
        path.push_back(link_between(a, e));
    } else if (r.kind == NodeKind::Aggregate) {
        path.push_back(link_between(root, e));
    }
    path.push_back(link_between(e, host));
    return path;
}

Path FatTree::ecmp_unicast_path(NodeIndex src, NodeIndex dst, std::uint64_t seed) const {
    check_host(src);
    check_host(dst);
    if (src == dst) throw std::invalid_argument("ECMP path requires distinct hosts");
    const auto& s = nodes_[src];
    const auto& d = nodes_[dst];
    const NodeIndex se = edge(s.pod, s.index / half_);
    const NodeIndex de = edge(d.pod, d.index / half_);
    const std::uint64_t h = stable_hash(src, dst, seed);

    Path path;
    path.push_back(link_between(src, se));
    if (se == de) {
        path.push_back(link_between(de, dst));
        return path;
    }
    if (s.pod == d.pod) {
        const NodeIndex a = aggregate(s.pod, static_cast<int>(h % half_));
        path.push_back(link_between(se, a));
        path.push_back(link_between(a, de));
    } else {
        const int c = static_cast<int>(h % static_cast<std::uint64_t>(num_cores()));
        const NodeIndex up = aggregate(s.pod, c % half_);
        const NodeIndex down = aggregate(d.pod, c % half_);
        path.push_back(link_between(se, up));
        path.push_back(link_between(up, core(c)));
        path.push_back(link_between(core(c), down));
        path.push_back(link_between(down, de));
    }
    path.push_back(link_between(de, dst));
    return path;
}

}  // namespace dusm

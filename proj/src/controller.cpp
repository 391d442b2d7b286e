#include "dusm/controller.hpp"

#include <algorithm>
#include <stdexcept>

#include "dusm/hash.hpp"

namespace dusm {

const char* to_string(Mode m) { return m == Mode::Dusm ? "dusm" : "pim"; }
const char* to_string(RootPolicy p) { return p == RootPolicy::Random ? "random" : "address_hash"; }

bool MulticastGroup::contains(NodeIndex host) const {
    return std::binary_search(members.begin(), members.end(), host);
}

std::size_t UpdateDelta::count_at(NodeIndex sw) const {
    return static_cast<std::size_t>(
        std::count_if(updates.begin(), updates.end(), [sw](const SwitchUpdate& u) { return u.sw == sw; }));
}

void SwitchUpdateLog::record(const UpdateDelta& delta) {
    for (const auto& u : delta.updates) {
        if (u.cause == UpdateCause::Promotion) ++promotion_installs_.at(u.sw);
        else if (u.kind == UpdateKind::Install) ++installs_.at(u.sw);
        else ++removals_.at(u.sw);
    }
}

std::uint64_t SwitchUpdateLog::total() const {
    std::uint64_t n = 0;
    for (NodeIndex s = 0; s < installs_.size(); ++s) n += total(s);
    return n;
}

std::uint64_t SwitchUpdateLog::total_promotion_installs() const {
    std::uint64_t n = 0;
    for (auto v : promotion_installs_) n += v;
    return n;
}

Controller::Controller(const FatTree& topo, ControllerConfig config, GroupTables& tables)
    : topo_(&topo), config_(config), tables_(&tables), log_(topo.num_nodes()) {
    if (config_.mode == Mode::Dusm && (config_.trees < 1 || config_.trees > topo.num_cores())) {
        throw std::invalid_argument("trees per elephant must be in [1, " + std::to_string(topo.num_cores()) +
                                    "], got " + std::to_string(config_.trees));
    }
    if (tables.num_nodes() != topo.num_nodes()) throw std::invalid_argument("group tables sized for another topology");
}

const MulticastGroup& Controller::group(GroupAddress g) const {
    auto it = groups_.find(g);
    if (it == groups_.end()) throw std::invalid_argument("unknown group " + g.str());
    return it->second;
}

MulticastGroup& Controller::mutable_group(GroupAddress g) {
    auto it = groups_.find(g);
    if (it == groups_.end()) throw std::invalid_argument("unknown group " + g.str());
    return it->second;
}

std::vector<NodeIndex> Controller::choose_roots(MulticastGroup& grp) {
    const int epoch = grp.root_epoch++;
    if (config_.root_policy == RootPolicy::AddressHash)
        return hashed_roots(grp.address, grp.members, config_.trees, *topo_);
    Rng rng(stable_hash(config_.seed, grp.address.value(), epoch));
    return select_roots(grp.members, config_.trees, *topo_, rng);
}

void Controller::install_tree(GroupAddress g, const SteinerTree& tree, UpdateCause cause, UpdateDelta& delta) {
    for (const auto& [sw, ports] : tree.rules) {
        RuleKey key{g, tree.tree_id};
        tables_->install(sw, key, ports);
        delta.updates.push_back({sw, key, UpdateKind::Install, cause});
    }
}

void Controller::remove_tree(GroupAddress g, const SteinerTree& tree, UpdateCause cause, UpdateDelta& delta) {
    for (const auto& [sw, _] : tree.rules) {
        RuleKey key{g, tree.tree_id};
        tables_->remove(sw, key);
        delta.updates.push_back({sw, key, UpdateKind::Remove, cause});
    }
}

void Controller::commit(const UpdateDelta& delta) { log_.record(delta); }

UpdateDelta Controller::handle_join(GroupAddress g, NodeIndex host) {
    if (topo_->kind(host) != NodeKind::Host) throw std::invalid_argument("join from a non-host node");
    auto [it, created] = groups_.try_emplace(g);
    MulticastGroup& grp = it->second;
    if (created) {
        grp.address = g;
        if (config_.mode == Mode::Pim) {
            // Baseline: state exists from creation, regardless of traffic.
            grp.cls = GroupClass::Elephant;
            grp.trees.push_back(SteinerTree{0, pim_rendezvous_point(g, *topo_), {}});
        }
    }
    if (grp.contains(host)) throw std::invalid_argument("h" + std::to_string(topo_->host_ordinal(host)) +
                                                        " already joined " + g.str());
    grp.members.insert(std::lower_bound(grp.members.begin(), grp.members.end(), host), host);

    UpdateDelta delta;
    if (grp.trees.empty()) return delta;

    const bool reachable = std::all_of(grp.trees.begin(), grp.trees.end(), [&](const SteinerTree& t) {
        return topo_->reachable_downward(t.root, host);
    });
    if (!reachable) {
        // A same-pod or same-edge root cannot reach the newcomer: re-root.
        for (const auto& t : grp.trees) remove_tree(g, t, UpdateCause::Join, delta);
        grp.trees.clear();
        auto roots = choose_roots(grp);
        for (std::size_t i = 0; i < roots.size(); ++i) {
            grp.trees.push_back(compute_steiner_tree(grp.members, roots[i], *topo_, static_cast<int>(i)));
            install_tree(g, grp.trees.back(), UpdateCause::Join, delta);
        }
        commit(delta);
        return delta;
    }

    for (auto& tree : grp.trees) {
        for (LinkIndex l : topo_->downward_path(tree.root, host)) {
            const NodeIndex sw = topo_->link(l).src;
            auto& ports = tree.rules[sw];
            auto pos = std::lower_bound(ports.begin(), ports.end(), l);
            if (pos != ports.end() && *pos == l) continue;
            ports.insert(pos, l);
            RuleKey key{g, tree.tree_id};
            tables_->install(sw, key, ports);
            delta.updates.push_back({sw, key, UpdateKind::Install, UpdateCause::Join});
        }
    }
    commit(delta);
    return delta;
}

UpdateDelta Controller::handle_leave(GroupAddress g, NodeIndex host) {
    MulticastGroup& grp = mutable_group(g);
    auto pos = std::lower_bound(grp.members.begin(), grp.members.end(), host);
    if (pos == grp.members.end() || *pos != host)
        throw std::invalid_argument("node " + std::to_string(host) + " is not a member of " + g.str());
    grp.members.erase(pos);

    UpdateDelta delta;
    for (auto& tree : grp.trees) {
        // Walk up from the host, dropping the link toward the pruned child
        // until a switch still has other children.
        NodeIndex child = host;
        NodeIndex sw = topo_->edge_of_host(host);
        for (;;) {
            const LinkIndex l = topo_->link_between(sw, child);
            auto rule = tree.rules.find(sw);
            auto& ports = rule->second;
            ports.erase(std::lower_bound(ports.begin(), ports.end(), l));
            RuleKey key{g, tree.tree_id};
            delta.updates.push_back({sw, key, UpdateKind::Remove, UpdateCause::Leave});
            if (!ports.empty()) {
                tables_->install(sw, key, ports);
                break;
            }
            tables_->remove(sw, key);
            tree.rules.erase(rule);
            auto parent = tree_parent(sw, tree.root, *topo_);
            if (!parent) break;
            child = sw;
            sw = *parent;
        }
    }
    commit(delta);
    return delta;
}

std::optional<PromotionDecision> Controller::record_traffic(GroupAddress g, std::uint64_t bytes) {
    MulticastGroup& grp = mutable_group(g);
    grp.cumulative_bytes += bytes;
    if (config_.mode != Mode::Dusm || grp.promotion_signaled) return std::nullopt;
    if (grp.cumulative_bytes <= config_.threshold_bytes) return std::nullopt;
    grp.promotion_signaled = true;
    return PromotionDecision{g, grp.cumulative_bytes};
}

UpdateDelta Controller::promote_group(GroupAddress g) {
    MulticastGroup& grp = mutable_group(g);
    if (config_.mode != Mode::Dusm) throw std::logic_error("promotion is not defined for the baseline");
    if (grp.cls == GroupClass::Elephant) throw std::logic_error(g.str() + " is already an elephant");
    if (!grp.promotion_signaled) throw std::logic_error(g.str() + " has not crossed the threshold");

    UpdateDelta delta;
    auto roots = choose_roots(grp);
    for (std::size_t i = 0; i < roots.size(); ++i) {
        grp.trees.push_back(compute_steiner_tree(grp.members, roots[i], *topo_, static_cast<int>(i)));
        install_tree(g, grp.trees.back(), UpdateCause::Promotion, delta);
    }
    grp.cls = GroupClass::Elephant;
    commit(delta);
    return delta;
}

}  // namespace dusm

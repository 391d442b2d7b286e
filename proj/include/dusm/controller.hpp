#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "dusm/steiner.hpp"
#include "dusm/switch_tables.hpp"

namespace dusm {

enum class Mode : std::uint8_t { Dusm, Pim };
enum class GroupClass : std::uint8_t { Mice, Elephant };
enum class RootPolicy : std::uint8_t { Random, AddressHash };

const char* to_string(Mode m);
const char* to_string(RootPolicy p);

struct ControllerConfig {
    Mode mode = Mode::Dusm;
    /// Cumulative bytes a group must exceed to be promoted. Ignored in Pim mode.
    std::uint64_t threshold_bytes = 10 * 1024;
    /// Shared trees per cross-pod elephant group. Ignored in Pim mode.
    int trees = 4;
    RootPolicy root_policy = RootPolicy::Random;
    std::uint64_t seed = 0;
};

struct MulticastGroup {
    GroupAddress address;
    std::vector<NodeIndex> members;  // sorted
    std::uint64_t cumulative_bytes = 0;
    GroupClass cls = GroupClass::Mice;
    /// Empty for mice groups. In Pim mode every group holds exactly one tree.
    std::vector<SteinerTree> trees;
    bool promotion_signaled = false;
    int root_epoch = 0;

    bool contains(NodeIndex host) const;
};

enum class UpdateKind : std::uint8_t { Install, Remove };
enum class UpdateCause : std::uint8_t { Join, Leave, Promotion };

/// One rule installation or removal on one switch for one (group, tree).
struct SwitchUpdate {
    NodeIndex sw = 0;
    RuleKey key;
    UpdateKind kind{};
    UpdateCause cause{};
};

struct UpdateDelta {
    std::vector<SwitchUpdate> updates;

    std::size_t size() const { return updates.size(); }
    bool empty() const { return updates.empty(); }
    std::size_t count_at(NodeIndex sw) const;
};

/// Per-switch installation/removal counters. Promotion installs are kept
/// apart from join/leave-driven updates.
class SwitchUpdateLog {
public:
    explicit SwitchUpdateLog(std::size_t num_nodes)
        : installs_(num_nodes), removals_(num_nodes), promotion_installs_(num_nodes) {}

    void record(const UpdateDelta& delta);

    std::uint64_t installs(NodeIndex sw) const { return installs_.at(sw); }
    std::uint64_t removals(NodeIndex sw) const { return removals_.at(sw); }
    std::uint64_t promotion_installs(NodeIndex sw) const { return promotion_installs_.at(sw); }
    /// Join- and leave-driven updates only.
    std::uint64_t membership_updates(NodeIndex sw) const { return installs_.at(sw) + removals_.at(sw); }
    std::uint64_t total(NodeIndex sw) const { return membership_updates(sw) + promotion_installs_.at(sw); }
    std::uint64_t total() const;
    std::uint64_t total_promotion_installs() const;
    std::size_t num_nodes() const { return installs_.size(); }

private:
    std::vector<std::uint64_t> installs_;
    std::vector<std::uint64_t> removals_;
    std::vector<std::uint64_t> promotion_installs_;
};

struct PromotionDecision {
    GroupAddress group;
    std::uint64_t cumulative_bytes = 0;
};

/// Centralized multicast control plane. Owns group state and writes rules
/// into the switch group tables it is given.
class Controller {
public:
    Controller(const FatTree& topo, ControllerConfig config, GroupTables& tables);

    const ControllerConfig& config() const { return config_; }
    bool has_group(GroupAddress g) const { return groups_.count(g) != 0; }
    const MulticastGroup& group(GroupAddress g) const;
    const std::map<GroupAddress, MulticastGroup>& groups() const { return groups_; }
    const SwitchUpdateLog& update_log() const { return log_; }

    /// Registers the group on first use. Mice joins touch no switch; tree-served
    /// groups extend every tree with the downward path to the new member.
    UpdateDelta handle_join(GroupAddress g, NodeIndex host);
    /// Prunes branches left without members. Never re-roots.
    UpdateDelta handle_leave(GroupAddress g, NodeIndex host);

    /// Adds to the group's byte counter; returns a decision once, when the
    /// counter first exceeds the threshold.
    std::optional<PromotionDecision> record_traffic(GroupAddress g, std::uint64_t bytes);
    /// Selects roots, builds and installs the trees. Every installed entry is
    /// one update.
    UpdateDelta promote_group(GroupAddress g);

private:
    MulticastGroup& mutable_group(GroupAddress g);
    std::vector<NodeIndex> choose_roots(MulticastGroup& grp);
    void install_tree(GroupAddress g, const SteinerTree& tree, UpdateCause cause, UpdateDelta& delta);
    void remove_tree(GroupAddress g, const SteinerTree& tree, UpdateCause cause, UpdateDelta& delta);
    void commit(const UpdateDelta& delta);

    const FatTree* topo_;
    ControllerConfig config_;
    GroupTables* tables_;
    std::map<GroupAddress, MulticastGroup> groups_;
    SwitchUpdateLog log_;
};

}  // namespace dusm

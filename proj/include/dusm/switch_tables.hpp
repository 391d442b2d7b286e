#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "dusm/steiner.hpp"

namespace dusm {

/// Group-table key: one entry per (group, tree) on a switch.
struct RuleKey {
    GroupAddress group;
    int tree_id = 0;

    std::uint64_t packed() const { return (std::uint64_t{group.value()} << 8) | static_cast<std::uint8_t>(tree_id); }
    bool operator==(const RuleKey&) const = default;
};

/// Multicast group tables of every switch in the fabric.
class GroupTables {
public:
    using Table = std::unordered_map<std::uint64_t, PortSet>;

    explicit GroupTables(std::size_t num_nodes) : tables_(num_nodes) {}

    /// Inserts or replaces the entry.
    void install(NodeIndex sw, RuleKey key, PortSet ports);
    /// Throws std::logic_error if the entry does not exist.
    void remove(NodeIndex sw, RuleKey key);
    const PortSet* lookup(NodeIndex sw, RuleKey key) const;

    std::size_t rule_count(NodeIndex sw) const { return tables_.at(sw).size(); }
    std::size_t total_rules() const { return total_; }
    const Table& table(NodeIndex sw) const { return tables_.at(sw); }
    std::size_t num_nodes() const { return tables_.size(); }

private:
    std::vector<Table> tables_;
    std::size_t total_ = 0;
};

/// Current entry count of every node's group table, indexed by NodeIndex.
std::vector<std::size_t> count_multicast_rules(const GroupTables& tables);

}  // namespace dusm

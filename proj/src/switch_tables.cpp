#include "dusm/switch_tables.hpp"

#include <stdexcept>
#include <string>

namespace dusm {

void GroupTables::install(NodeIndex sw, RuleKey key, PortSet ports) {
    auto [it, inserted] = tables_.at(sw).insert_or_assign(key.packed(), std::move(ports));
    (void)it;
    if (inserted) ++total_;
}

void GroupTables::remove(NodeIndex sw, RuleKey key) {
    if (tables_.at(sw).erase(key.packed()) == 0)
        throw std::logic_error("no entry for " + key.group.str() + "/" + std::to_string(key.tree_id) + " on node " +
                               std::to_string(sw));
    --total_;
}

const PortSet* GroupTables::lookup(NodeIndex sw, RuleKey key) const {
    const auto& t = tables_.at(sw);
    auto it = t.find(key.packed());
    return it == t.end() ? nullptr : &it->second;
}

std::vector<std::size_t> count_multicast_rules(const GroupTables& tables) {
    std::vector<std::size_t> out(tables.num_nodes());
    for (NodeIndex n = 0; n < out.size(); ++n) out[n] = tables.table(n).size();
    return out;
}

}  // namespace dusm

#include "dusm/simulation.hpp"

#include <cmath>
#include <stdexcept>

namespace dusm {

Simulation::Simulation(const FatTree& topo, SimulationOptions options)
    : topo_(&topo),
      options_(options),
      tables_(topo.num_nodes()),
      controller_(topo, options.controller, tables_),
      hypervisors_(topo.num_nodes()),
      ledger_(topo.num_links()) {
    if (options_.poll_interval < 0) throw std::invalid_argument("poll interval must be >= 0");
    next_poll_ = options_.poll_interval;
}

void Simulation::promote(const PromotionDecision& d, EventOutcome& out) {
    auto delta = controller_.promote_group(d.group);
    out.promotion_updates.updates.insert(out.promotion_updates.updates.end(), delta.updates.begin(),
                                         delta.updates.end());
    out.promotions.push_back(d);
    hypervisors_.forget(d.group);
}

void Simulation::account(GroupAddress g, std::uint64_t bytes, EventOutcome& out) {
    if (options_.poll_interval > 0) {
        unpolled_[g] += bytes;
        return;
    }
    if (auto d = controller_.record_traffic(g, bytes)) promote(*d, out);
}

void Simulation::poll(EventOutcome& out) {
    for (auto& [g, bytes] : unpolled_)
        if (auto d = controller_.record_traffic(g, bytes)) promote(*d, out);
    unpolled_.clear();
}

void Simulation::finish() {
    EventOutcome ignored;
    poll(ignored);
}

EventOutcome Simulation::apply(const Event& e) {
    if (e.time < now_) throw std::invalid_argument("event time goes backwards");
    if (e.host < 0 || e.host >= topo_->num_hosts())
        throw std::invalid_argument("host h" + std::to_string(e.host) + " is outside the topology");
    now_ = e.time;

    EventOutcome out;
    if (options_.poll_interval > 0 && e.time >= next_poll_) {
        poll(out);
        next_poll_ = (std::floor(e.time / options_.poll_interval) + 1.0) * options_.poll_interval;
    }

    const NodeIndex host = topo_->host(e.host);
    switch (e.kind) {
        case EventKind::Join:
        case EventKind::Leave: {
            out.updates = e.kind == EventKind::Join ? controller_.handle_join(e.group, host)
                                                    : controller_.handle_leave(e.group, host);
            const auto& grp = controller_.group(e.group);
            if (grp.cls == GroupClass::Mice) hypervisors_.update(e.group, grp.members);
            break;
        }
        case EventKind::Send: {
            if (e.bytes == 0) throw std::invalid_argument("send of zero bytes");
            if (!controller_.has_group(e.group)) throw std::invalid_argument("send to unknown group " + e.group.str());
            const auto& grp = controller_.group(e.group);
            Packet pkt{e.group, host, e.bytes, next_seq_[e.group]++};
            if (!grp.trees.empty()) {
                if (!grp.contains(host)) throw std::invalid_argument("sender is not a member of " + e.group.str());
                const auto& tree = grp.trees[match_tree(pkt.key(), grp.trees.size())];
                out.receivers = deliver_elephant(pkt, tree, *topo_, ledger_);
                out.via_tree = true;
                tree_bytes_ += e.bytes;
            } else {
                const auto* list = hypervisors_.receivers(host, e.group);
                if (!list) throw std::invalid_argument("sender is not a member of " + e.group.str());
                out.receivers = deliver_mice(pkt, *list, *topo_, options_.ecmp_seed, ledger_,
                                             options_.encap_overhead_bytes);
                translated_bytes_ += e.bytes;
            }
            account(e.group, e.bytes, out);
            break;
        }
    }
    return out;
}

void Simulation::run(std::span<const Event> events) {
    for (const auto& e : events) apply(e);
    finish();
}

}  // namespace dusm

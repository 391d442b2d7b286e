#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "dusm/controller.hpp"
#include "dusm/dataplane.hpp"
#include "dusm/workload.hpp"

namespace dusm {

struct SimulationOptions {
    ControllerConfig controller;
    std::uint64_t ecmp_seed = 0;
    std::uint64_t encap_overhead_bytes = 0;
    /// Seconds between controller polls of the byte counters; 0 reads them on
    /// every send.
    double poll_interval = 0.0;
};

struct EventOutcome {
    UpdateDelta updates;
    std::vector<PromotionDecision> promotions;
    UpdateDelta promotion_updates;
    /// Send only: whether the packet used a shared tree.
    bool via_tree = false;
    std::vector<NodeIndex> receivers;
};

/// One experiment instance: controller, switch tables, hypervisors and the
/// link ledger, driven by a time-ordered event stream.
class Simulation {
public:
    Simulation(const FatTree& topo, SimulationOptions options);
    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    /// Throws std::invalid_argument for events that break stream invariants.
    EventOutcome apply(const Event& e);
    void run(std::span<const Event> events);
    /// Final counter poll; a no-op when polling per send.
    void finish();

    const FatTree& topology() const { return *topo_; }
    const SimulationOptions& options() const { return options_; }
    const Controller& controller() const { return controller_; }
    const GroupTables& tables() const { return tables_; }
    const LinkLedger& ledger() const { return ledger_; }
    const Hypervisors& hypervisors() const { return hypervisors_; }
    double now() const { return now_; }

    std::uint64_t tree_bytes() const { return tree_bytes_; }
    std::uint64_t translated_bytes() const { return translated_bytes_; }

private:
    void poll(EventOutcome& out);
    void account(GroupAddress g, std::uint64_t bytes, EventOutcome& out);
    void promote(const PromotionDecision& d, EventOutcome& out);

    const FatTree* topo_;
    SimulationOptions options_;
    GroupTables tables_;
    Controller controller_;
    Hypervisors hypervisors_;
    LinkLedger ledger_;
    std::map<GroupAddress, std::uint64_t> next_seq_;
    std::map<GroupAddress, std::uint64_t> unpolled_;
    double now_ = 0.0;
    double next_poll_ = 0.0;
    std::uint64_t tree_bytes_ = 0;
    std::uint64_t translated_bytes_ = 0;
};

}  // namespace dusm

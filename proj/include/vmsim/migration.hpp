#ifndef VMSIM_MIGRATION_HPP
#define VMSIM_MIGRATION_HPP

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <vector>

#include "vmsim/core.hpp"

namespace vmsim {

enum class MigrationStrategy { Sequential, Parallel, WorkloadAware };

MigrationStrategy strategy_from_name(const std::string& name);  // throws SchemaError
const char* strategy_name(MigrationStrategy s);

struct MigrationMove {
    VmId vm_id = 0;
    HostId source = 0;
    HostId target = 0;
};

struct MergeDirective {
    std::vector<VmId> vm_ids;  // co-located Free VMs to combine
    VmSpec resulting;          // == spec_add over the parts
};

struct MigrationPlan {
    PlanId plan_id = 0;
    std::vector<MigrationMove> moves;
    std::optional<MergeDirective> merge;
    MigrationStrategy strategy = MigrationStrategy::Sequential;
    Time created_at = 0;
    HostId target_host = 0;
};

struct ReservationRecord {
    PlanId plan_id = 0;
    VmSpec source_held;
    VmId target_placeholder_vm = 0;  // 0 when reservation is disabled
    Time expires_at = 0;
};

struct UtilizationSample {
    Time time = 0;
    double ram = 0, cpu = 0, ghz = 0, disk = 0;  // fractions in [0, 1]
};

/// Fixed-length ring of per-host utilization samples.
struct UtilizationWindow {
    HostId host_id = 0;
    std::size_t window = 16;
    std::deque<UtilizationSample> samples;

    void push(const UtilizationSample& s);
};

struct MigrationConfig {
    bool enabled = false;
    MigrationStrategy strategy = MigrationStrategy::Sequential;
    double reserve_fraction = 0.10;
    double stability_threshold = 0.25;
    std::size_t stability_window = 16;
    std::int64_t base_cost = 1;            // ticks
    double per_mib_cost = 1.0 / 1024.0;    // ticks per MiB of RAM
    Time reservation_timeout = 100;        // ticks until a stalled plan is released
    bool reservation_enabled = true;
};

/// Move duration in ticks: base_cost + ram_mb * per_mib_cost, rounded.
Time move_duration(const VmSpec& vm_spec, const MigrationConfig& cfg);

/// true (stable) iff the coefficient of variation of every resource over the
/// window is <= threshold. Throws InsufficientHistory below 2 samples.
bool stability_check(const UtilizationWindow& window, double threshold);

/// The feasible candidate with the largest free-capacity headroom after
/// reserving plan_need (component-wise min-ratio score), ties by ascending
/// host_id. Throws NoFeasibleTarget when nothing has room.
HostId select_target(const std::vector<HostId>& candidates, const VmSpec& plan_need,
                     const Cluster& cluster);

/// Plans a merge that satisfies unmet_demand by co-locating Free VMs on one
/// host: existing VMs on the target are used first, then donors are moved in
/// greedily, largest first. Hosts whose utilization window fails the
/// stability check are never touched. Returns nullopt when no target works.
std::optional<MigrationPlan> decide_migration(const Cluster& cluster, const VmSpec& unmet_demand,
                                              const std::map<HostId, UtilizationWindow>& windows,
                                              const MigrationConfig& cfg);

/// Holds back reserve_fraction of the VM's cpu and memory on its host and
/// marks the VM Migrating. Throws ReservationInfeasible if the hold breaks
/// capacity conservation. Returns the held spec.
VmSpec reserve_source(Cluster& cluster, HostId host, VmId vm, PlanId plan, double fraction);

/// Creates a Placeholder VM with the incoming spec on the target, consuming
/// capacity. Throws MigrationInfeasible when the incoming VM does not fit —
/// the failure the reservation exists to surface early.
VmId reserve_target(Cluster& cluster, HostId host, const VmSpec& incoming, PlanId plan);

} // namespace vmsim

#endif

#ifndef VMSIM_POLICIES_HPP
#define VMSIM_POLICIES_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vmsim/core.hpp"

namespace vmsim {

enum class PolicyKind {
    RoundRobin,
    EqualSpread,
    ActiveMonitoring,
    Throttled,
    ModifiedThrottled,
};

enum class RrMode { Cyclic, Random };

PolicyKind policy_from_name(const std::string& name);  // throws UnknownPolicy
const char* policy_name(PolicyKind k);

/// Mutable per-run policy state, owned by one engine instance.
struct PolicyState {
    std::size_t rr_cursor = 0;                 // RoundRobin cyclic mode
    RrMode rr_mode = RrMode::Cyclic;
    std::uint64_t rng_state = 0;               // RoundRobin random mode
    std::map<VmId, bool> availability;         // Throttled family: true iff Free
    std::set<RequestId> seen_requests;

    void seed_rng(std::uint64_t seed);
    /// Deterministic bounded draw (splitmix64 stream, multiply-shift bound).
    std::size_t next_index(std::size_t bound);
};

/// All Free VMs whose spec satisfies demand, ordered by ascending vm_id.
std::vector<VmId> eligible_pool(const Cluster& cluster, const VmSpec& demand);

std::optional<VmId> round_robin_select(const std::vector<VmId>& pool, PolicyState& state);

/// Minimum pending_load, ties by ascending vm_id.
std::optional<VmId> equal_spread_select(const std::vector<VmId>& pool, const Cluster& cluster);

/// Minimum active_request_count; among ties, the first in pool order.
std::optional<VmId> active_monitoring_select(const std::vector<VmId>& pool,
                                             const Cluster& cluster);

/// First pool member whose availability flag is true; flips the flag.
std::optional<VmId> throttled_select(const std::vector<VmId>& pool, PolicyState& state);

/// Up to k Free VMs ranked by normalized L1 distance to the demand, VMs that
/// satisfy the demand strictly first, ties by ascending vm_id.
std::vector<std::pair<VmId, double>> suggest_vms(const Cluster& cluster, const VmSpec& demand,
                                                 std::size_t k);

double suggestion_score(const VmSpec& offer, const VmSpec& demand);

/// Marks the VM Allocated for the request, bumps its load counters and clears
/// its availability flag. Shared by every allocation path.
void bind_vm(Cluster& cluster, VmId vm, const VmRequest& request, Time now, PolicyState& state);

/// Throttled selection over the satisfying pool ranked tightest-fit-first,
/// with ranked suggestions as the fallback. Registers the request id
/// (DuplicateRequest on reuse). Does not consult on_suggestion; the caller
/// decides what a Suggested outcome becomes.
AllocationOutcome modified_throttled_allocate(Cluster& cluster, const VmRequest& request,
                                              PolicyState& state, Time now, std::size_t k);

/// Same selection without registering the request id (queue retries).
std::optional<VmId> modified_throttled_pick(const Cluster& cluster, const VmSpec& demand,
                                            const PolicyState& state);

/// Returns the VM to Free and restores policy bookkeeping.
void deallocate(Cluster& cluster, VmId vm, PolicyState& state);

} // namespace vmsim

#endif

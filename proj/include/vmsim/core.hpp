#ifndef VMSIM_CORE_HPP
#define VMSIM_CORE_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "vmsim/errors.hpp"

namespace vmsim {

using Time = std::int64_t;   // one tick == one simulated hour
using VmId = std::int64_t;
using HostId = std::int64_t;
using RequestId = std::int64_t;
using PlanId = std::int64_t;

/// Resource quadruple used for requests, VM templates and capacity
/// arithmetic. CPU speed is carried as integral milli-GHz so additions and
/// capacity comparisons are exact; cpu_ghz() converts for display.
struct VmSpec {
    std::int64_t ram_mb = 0;
    std::int64_t cpu_count = 0;
    std::int64_t cpu_mghz = 0;
    std::int64_t disk_gb = 0;

    VmSpec() = default;
    VmSpec(std::int64_t ram, std::int64_t cpus, double ghz, std::int64_t disk);

    static VmSpec from_mghz(std::int64_t ram, std::int64_t cpus, std::int64_t mghz,
                            std::int64_t disk);

    double cpu_ghz() const { return static_cast<double>(cpu_mghz) / 1000.0; }
    bool well_formed() const {
        return ram_mb >= 0 && cpu_count >= 0 && cpu_mghz >= 0 && disk_gb >= 0;
    }
    bool is_zero() const {
        return ram_mb == 0 && cpu_count == 0 && cpu_mghz == 0 && disk_gb == 0;
    }

    friend bool operator==(const VmSpec&, const VmSpec&) = default;
};

/// true iff offer >= demand component-wise on all four fields.
bool spec_satisfies(const VmSpec& offer, const VmSpec& demand);

/// Component-wise sum. Throws SimError(ArithmeticOverflow) if any component
/// overflows.
VmSpec spec_add(const VmSpec& a, const VmSpec& b);

/// Component-wise difference, clamped at zero.
VmSpec spec_sub_clamped(const VmSpec& a, const VmSpec& b);

// --- VM lifecycle -----------------------------------------------------------

struct Free {
    friend bool operator==(const Free&, const Free&) = default;
};
struct Allocated {
    RequestId request_id = 0;
    Time lease_end = 0;
    friend bool operator==(const Allocated&, const Allocated&) = default;
};
struct Migrating {
    PlanId plan_id = 0;
    friend bool operator==(const Migrating&, const Migrating&) = default;
};
struct Placeholder {
    PlanId plan_id = 0;
    friend bool operator==(const Placeholder&, const Placeholder&) = default;
};

using VmState = std::variant<Free, Allocated, Migrating, Placeholder>;

inline bool is_free(const VmState& s) { return std::holds_alternative<Free>(s); }
inline bool is_allocated(const VmState& s) { return std::holds_alternative<Allocated>(s); }
inline bool is_migrating(const VmState& s) { return std::holds_alternative<Migrating>(s); }
inline bool is_placeholder(const VmState& s) { return std::holds_alternative<Placeholder>(s); }

const char* state_name(const VmState& s);

struct VmInstance {
    VmId vm_id = 0;
    VmSpec spec;
    VmState state = Free{};
    HostId host_id = 0;
    std::int64_t active_request_count = 0;  // for Active Monitoring
    std::int64_t pending_load = 0;          // work units, for ESCE
};

struct PhysicalHost {
    HostId host_id = 0;
    VmSpec capacity;
    // (plan_id, spec) held back for outbound migrations
    std::vector<std::pair<PlanId, VmSpec>> source_reservations;
    std::set<VmId> hosted;
};

// --- Requests and outcomes --------------------------------------------------

enum class OnSuggestion { AcceptBest, StayQueued, Abandon };

const char* on_suggestion_name(OnSuggestion p);

struct VmRequest {
    RequestId request_id = 0;
    Time arrival_time = 0;
    VmSpec required;
    Time lease_duration = 0;  // must be > 0
    OnSuggestion on_suggestion = OnSuggestion::Abandon;
};

enum class RejectReason { NoCapacity, NoEligibleVm };

const char* reject_reason_name(RejectReason r);

struct AllocationOutcome {
    enum class Kind { Allocated, Suggested, Queued, Rejected };

    Kind kind = Kind::Rejected;
    VmId vm_id = 0;                                      // Allocated
    std::vector<std::pair<VmId, double>> candidates;     // Suggested, score-ranked
    RejectReason reason = RejectReason::NoCapacity;      // Rejected

    static AllocationOutcome allocated(VmId vm);
    static AllocationOutcome suggested(std::vector<std::pair<VmId, double>> cands);
    static AllocationOutcome queued();
    static AllocationOutcome rejected(RejectReason r);
};

// --- Cluster ----------------------------------------------------------------

/// Hosts plus VM inventory. Placement changes go through the methods below so
/// capacity conservation (hosted + reserved <= capacity) can be enforced.
class Cluster {
public:
    std::map<HostId, PhysicalHost> hosts;
    std::map<VmId, VmInstance> vms;

    void add_host(HostId id, const VmSpec& capacity);

    /// Places a new VM on a host. Throws InvalidPlacement if the host is
    /// unknown or the VM would exceed remaining capacity.
    void add_vm(const VmInstance& vm);

    /// Removes a VM from its host and from the inventory.
    void destroy_vm(VmId id);

    /// Moves a VM between hosts without capacity tolerance: the caller must
    /// have made room (placeholder) on the target first.
    void relocate_vm(VmId id, HostId target);

    const VmInstance& vm(VmId id) const;
    VmInstance& vm(VmId id);
    const PhysicalHost& host(HostId id) const;
    PhysicalHost& host(HostId id);

    bool has_vm(VmId id) const { return vms.count(id) != 0; }
    bool has_host(HostId id) const { return hosts.count(id) != 0; }

    /// Spec-sum of hosted VMs plus outbound reservations.
    VmSpec host_used(HostId id) const;
    /// capacity - used, clamped at zero.
    VmSpec host_free(HostId id) const;

    /// Fresh VM id, above every id ever seen.
    VmId next_vm_id();

    /// Verifies hosted + reserved <= capacity on every host and the basic
    /// bookkeeping links. Returns the offending host, or nullopt if clean.
    std::optional<HostId> find_capacity_violation() const;

private:
    VmId next_vm_id_ = 1;
};

} // namespace vmsim

#endif

#ifndef VMSIM_ENGINE_HPP
#define VMSIM_ENGINE_HPP

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "vmsim/core.hpp"
#include "vmsim/migration.hpp"
#include "vmsim/policies.hpp"
#include "vmsim/scenario.hpp"

namespace vmsim {

enum class EventKind { RequestArrival, LeaseExpiry, MoveComplete, ReservationTimeout, QueueRetry };

const char* event_kind_name(EventKind k);

struct Event {
    Time time = 0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::QueueRetry;
    std::int64_t a = 0;  // request_id | vm_id | plan_id, by kind
    std::int64_t b = 0;  // vm_id for MoveComplete (0: finalize-only)
};

/// Priority queue dispatching in (time, seq) lexicographic order; seq follows
/// schedule-call order.
class EventQueue {
public:
    /// Throws TimeTravel when ev.time < now.
    void schedule(Time now, Event ev);
    std::optional<Event> peek() const;
    std::optional<Event> pop();
    bool empty() const { return heap_.empty(); }
    std::size_t size() const { return heap_.size(); }

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            if (a.time != b.time) return a.time > b.time;
            return a.seq > b.seq;
        }
    };
    std::priority_queue<Event, std::vector<Event>, Later> heap_;
    std::uint64_t next_seq_ = 0;
};

struct EngineConfig {
    bool validate_invariants = false;  // capacity check after every event
    bool schedule_requests = true;     // false: interactive session drives arrivals
};

/// Deterministic single-threaded simulation run. Identical (scenario, seed)
/// pairs produce byte-identical event logs.
class Engine {
public:
    explicit Engine(Scenario scenario, EngineConfig cfg = {});

    /// Dispatches until the queue drains or the horizon passes.
    void run();

    /// Dispatches events up to and including time t (bounded by the horizon).
    void run_until(Time t);

    /// Interactive console entry: a request arriving at the current tick.
    /// Returns the arrival-handling outcome.
    AllocationOutcome submit_interactive(const VmSpec& demand, Time lease, OnSuggestion on);

    /// Activates a migration plan: claims merge participants, reserves
    /// resources per configuration, and schedules the moves under the plan's
    /// strategy. Throws InvalidPlan / ReservationInfeasible /
    /// MigrationInfeasible; on throw the cluster is left untouched.
    void execute_plan(MigrationPlan plan);

    void schedule(Time t, EventKind kind, std::int64_t a = 0, std::int64_t b = 0);

    Time clock() const { return clock_; }
    const Cluster& cluster() const { return cluster_; }
    Cluster& cluster() { return cluster_; }
    const Scenario& scenario() const { return scenario_; }
    const std::vector<std::string>& log() const { return log_; }
    std::string log_text() const;
    RunMetrics metrics() const;
    PlanId next_plan_id() { return next_plan_id_++; }
    const AllocationOutcome* outcome_for(RequestId id) const;

private:
    struct ActivePlan {
        MigrationPlan plan;
        std::map<VmId, VmState> prior_state;           // movers and claimed locals
        std::map<VmId, ReservationRecord> reservations;
        std::size_t moves_remaining = 0;
        bool aborted = false;
        bool completed = false;
        RequestId for_request = 0;
    };

    void dispatch(const Event& ev);
    void on_arrival(RequestId id);
    void on_lease_expiry(VmId vm);
    void on_move_complete(PlanId plan, VmId vm);
    void on_reservation_timeout(PlanId plan);
    void on_queue_retry();

    void handle_allocation(const VmRequest& req);
    void allocate_now(const VmRequest& req, VmId vm, const char* via);
    void try_migration_plan(const VmRequest& req);
    void finish_plan(ActivePlan& ap);
    void abort_plan(ActivePlan& ap, const std::string& reason);
    void release_plan_reservations(ActivePlan& ap);
    void restore_vm_state(ActivePlan& ap, VmId vm);

    void emit(const std::string& kind, const std::string& payload);
    void sample_hosts();
    void validate();

    Scenario scenario_;
    EngineConfig cfg_;
    Cluster cluster_;
    PolicyState policy_;
    EventQueue queue_;
    Time clock_ = 0;
    Time horizon_ = 0;
    std::uint64_t log_seq_ = 0;
    std::vector<std::string> log_;
    std::map<RequestId, VmRequest> requests_;
    std::map<RequestId, AllocationOutcome> outcomes_;
    std::deque<RequestId> pending_;
    std::map<PlanId, ActivePlan> plans_;
    std::map<RequestId, PlanId> request_plan_;
    PlanId next_plan_id_ = 1;
    RequestId next_interactive_id_ = 1000000;
    std::map<HostId, UtilizationWindow> windows_;
    std::map<HostId, VmSpec> last_sampled_;
};

} // namespace vmsim

#endif

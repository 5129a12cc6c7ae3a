#include "vmsim/core.hpp"

#include <cmath>

namespace vmsim {

VmSpec::VmSpec(std::int64_t ram, std::int64_t cpus, double ghz, std::int64_t disk)
    : ram_mb(ram), cpu_count(cpus), cpu_mghz(std::llround(ghz * 1000.0)), disk_gb(disk) {}

VmSpec VmSpec::from_mghz(std::int64_t ram, std::int64_t cpus, std::int64_t mghz,
                         std::int64_t disk) {
    VmSpec s;
    s.ram_mb = ram;
    s.cpu_count = cpus;
    s.cpu_mghz = mghz;
    s.disk_gb = disk;
    return s;
}

bool spec_satisfies(const VmSpec& offer, const VmSpec& demand) {
    return offer.ram_mb >= demand.ram_mb && offer.cpu_count >= demand.cpu_count &&
           offer.cpu_mghz >= demand.cpu_mghz && offer.disk_gb >= demand.disk_gb;
}

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b, const char* field) {
    std::int64_t out = 0;
    if (__builtin_add_overflow(a, b, &out))
        throw SimError(Err::ArithmeticOverflow, std::string("spec_add overflows ") + field);
    return out;
}

} // namespace

VmSpec spec_add(const VmSpec& a, const VmSpec& b) {
    VmSpec s;
    s.ram_mb = checked_add(a.ram_mb, b.ram_mb, "ram_mb");
    s.cpu_count = checked_add(a.cpu_count, b.cpu_count, "cpu_count");
    s.cpu_mghz = checked_add(a.cpu_mghz, b.cpu_mghz, "cpu_ghz");
    s.disk_gb = checked_add(a.disk_gb, b.disk_gb, "disk_gb");
    return s;
}

VmSpec spec_sub_clamped(const VmSpec& a, const VmSpec& b) {
    VmSpec s;
    s.ram_mb = std::max<std::int64_t>(0, a.ram_mb - b.ram_mb);
    s.cpu_count = std::max<std::int64_t>(0, a.cpu_count - b.cpu_count);
    s.cpu_mghz = std::max<std::int64_t>(0, a.cpu_mghz - b.cpu_mghz);
    s.disk_gb = std::max<std::int64_t>(0, a.disk_gb - b.disk_gb);
    return s;
}

const char* state_name(const VmState& s) {
    if (is_free(s)) return "free";
    if (is_allocated(s)) return "allocated";
    if (is_migrating(s)) return "migrating";
    return "placeholder";
}

const char* on_suggestion_name(OnSuggestion p) {
    switch (p) {
        case OnSuggestion::AcceptBest: return "accept_best";
        case OnSuggestion::StayQueued: return "stay_queued";
        case OnSuggestion::Abandon: return "abandon";
    }
    return "?";
}

const char* reject_reason_name(RejectReason r) {
    switch (r) {
        case RejectReason::NoCapacity: return "no_capacity";
        case RejectReason::NoEligibleVm: return "no_eligible_vm";
    }
    return "?";
}

const char* err_name(Err code) {
    switch (code) {
        case Err::ArithmeticOverflow: return "ArithmeticOverflow";
        case Err::DuplicateRequest: return "DuplicateRequest";
        case Err::InvalidDeallocation: return "InvalidDeallocation";
        case Err::NoFeasibleTarget: return "NoFeasibleTarget";
        case Err::ReservationInfeasible: return "ReservationInfeasible";
        case Err::MigrationInfeasible: return "MigrationInfeasible";
        case Err::InvalidPlan: return "InvalidPlan";
        case Err::ReservationViolation: return "ReservationViolation";
        case Err::InsufficientHistory: return "InsufficientHistory";
        case Err::TimeTravel: return "TimeTravel";
        case Err::MalformedLog: return "MalformedLog";
        case Err::ScenarioMismatch: return "ScenarioMismatch";
        case Err::SchemaError: return "SchemaError";
        case Err::InvalidPlacement: return "InvalidPlacement";
        case Err::UnknownPolicy: return "UnknownPolicy";
        case Err::UnknownFormat: return "UnknownFormat";
    }
    return "Error";
}

AllocationOutcome AllocationOutcome::allocated(VmId vm) {
    AllocationOutcome o;
    o.kind = Kind::Allocated;
    o.vm_id = vm;
    return o;
}

AllocationOutcome AllocationOutcome::suggested(std::vector<std::pair<VmId, double>> cands) {
    AllocationOutcome o;
    o.kind = Kind::Suggested;
    o.candidates = std::move(cands);
    return o;
}

AllocationOutcome AllocationOutcome::queued() {
    AllocationOutcome o;
    o.kind = Kind::Queued;
    return o;
}

AllocationOutcome AllocationOutcome::rejected(RejectReason r) {
    AllocationOutcome o;
    o.kind = Kind::Rejected;
    o.reason = r;
    return o;
}

// --- Cluster ----------------------------------------------------------------

void Cluster::add_host(HostId id, const VmSpec& capacity) {
    PhysicalHost h;
    h.host_id = id;
    h.capacity = capacity;
    hosts[id] = std::move(h);
}

void Cluster::add_vm(const VmInstance& vm) {
    auto it = hosts.find(vm.host_id);
    if (it == hosts.end())
        throw SimError(Err::InvalidPlacement,
                       "vm " + std::to_string(vm.vm_id) + " references unknown host " +
                           std::to_string(vm.host_id));
    VmSpec used = spec_add(host_used(vm.host_id), vm.spec);
    if (!spec_satisfies(it->second.capacity, used))
        throw SimError(Err::InvalidPlacement,
                       "host " + std::to_string(vm.host_id) + " capacity exceeded by vm " +
                           std::to_string(vm.vm_id));
    vms[vm.vm_id] = vm;
    it->second.hosted.insert(vm.vm_id);
    if (vm.vm_id >= next_vm_id_) next_vm_id_ = vm.vm_id + 1;
}

void Cluster::destroy_vm(VmId id) {
    auto& v = vm(id);
    hosts.at(v.host_id).hosted.erase(id);
    vms.erase(id);
}

void Cluster::relocate_vm(VmId id, HostId target) {
    auto& v = vm(id);
    hosts.at(v.host_id).hosted.erase(id);
    hosts.at(target).hosted.insert(id);
    v.host_id = target;
}

const VmInstance& Cluster::vm(VmId id) const {
    auto it = vms.find(id);
    if (it == vms.end())
        throw SimError(Err::InvalidPlan, "unknown vm " + std::to_string(id));
    return it->second;
}

VmInstance& Cluster::vm(VmId id) {
    auto it = vms.find(id);
    if (it == vms.end())
        throw SimError(Err::InvalidPlan, "unknown vm " + std::to_string(id));
    return it->second;
}

const PhysicalHost& Cluster::host(HostId id) const {
    auto it = hosts.find(id);
    if (it == hosts.end())
        throw SimError(Err::InvalidPlan, "unknown host " + std::to_string(id));
    return it->second;
}

PhysicalHost& Cluster::host(HostId id) {
    auto it = hosts.find(id);
    if (it == hosts.end())
        throw SimError(Err::InvalidPlan, "unknown host " + std::to_string(id));
    return it->second;
}

VmSpec Cluster::host_used(HostId id) const {
    const auto& h = host(id);
    VmSpec used;
    for (VmId v : h.hosted) used = spec_add(used, vm(v).spec);
    for (const auto& [plan, spec] : h.source_reservations) used = spec_add(used, spec);
    return used;
}

VmSpec Cluster::host_free(HostId id) const {
    return spec_sub_clamped(host(id).capacity, host_used(id));
}

VmId Cluster::next_vm_id() { return next_vm_id_++; }

std::optional<HostId> Cluster::find_capacity_violation() const {
    for (const auto& [id, h] : hosts) {
        if (!spec_satisfies(h.capacity, host_used(id))) return id;
        for (VmId v : h.hosted) {
            auto it = vms.find(v);
            if (it == vms.end() || it->second.host_id != id) return id;
        }
    }
    return std::nullopt;
}

} // namespace vmsim

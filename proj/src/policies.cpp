#include "vmsim/policies.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace vmsim {

PolicyKind policy_from_name(const std::string& name) {
    if (name == "round_robin") return PolicyKind::RoundRobin;
    if (name == "equal_spread") return PolicyKind::EqualSpread;
    if (name == "active_monitoring") return PolicyKind::ActiveMonitoring;
    if (name == "throttled") return PolicyKind::Throttled;
    if (name == "modified_throttled") return PolicyKind::ModifiedThrottled;
    throw SimError(Err::UnknownPolicy, name);
}

const char* policy_name(PolicyKind k) {
    switch (k) {
        case PolicyKind::RoundRobin: return "round_robin";
        case PolicyKind::EqualSpread: return "equal_spread";
        case PolicyKind::ActiveMonitoring: return "active_monitoring";
        case PolicyKind::Throttled: return "throttled";
        case PolicyKind::ModifiedThrottled: return "modified_throttled";
    }
    return "?";
}

void PolicyState::seed_rng(std::uint64_t seed) { rng_state = seed; }

std::size_t PolicyState::next_index(std::size_t bound) {
    // splitmix64; portable across standard libraries, unlike the
    // distribution adaptors.
    rng_state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = rng_state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z = z ^ (z >> 31);
    return static_cast<std::size_t>((static_cast<unsigned __int128>(z) * bound) >> 64);
}

std::vector<VmId> eligible_pool(const Cluster& cluster, const VmSpec& demand) {
    std::vector<VmId> pool;
    for (const auto& [id, vm] : cluster.vms)
        if (is_free(vm.state) && spec_satisfies(vm.spec, demand)) pool.push_back(id);
    return pool;  // map iteration is already id-ascending
}

std::optional<VmId> round_robin_select(const std::vector<VmId>& pool, PolicyState& state) {
    if (pool.empty()) return std::nullopt;
    if (state.rr_mode == RrMode::Random) return pool[state.next_index(pool.size())];
    VmId picked = pool[state.rr_cursor % pool.size()];
    state.rr_cursor += 1;
    return picked;
}

std::optional<VmId> equal_spread_select(const std::vector<VmId>& pool, const Cluster& cluster) {
    std::optional<VmId> best;
    std::int64_t best_load = 0;
    for (VmId id : pool) {
        std::int64_t load = cluster.vm(id).pending_load;
        if (!best || load < best_load) {  // pool is id-ascending, so first min wins ties
            best = id;
            best_load = load;
        }
    }
    return best;
}

std::optional<VmId> active_monitoring_select(const std::vector<VmId>& pool,
                                             const Cluster& cluster) {
    std::optional<VmId> best;
    std::int64_t best_count = 0;
    for (VmId id : pool) {
        std::int64_t count = cluster.vm(id).active_request_count;
        if (!best || count < best_count) {
            best = id;
            best_count = count;
        }
    }
    return best;
}

std::optional<VmId> throttled_select(const std::vector<VmId>& pool, PolicyState& state) {
    for (VmId id : pool) {
        auto it = state.availability.find(id);
        if (it != state.availability.end() && it->second) {
            it->second = false;
            return id;
        }
    }
    return std::nullopt;
}

double suggestion_score(const VmSpec& offer, const VmSpec& demand) {
    auto term = [](double off, double dem) {
        return std::abs(off - dem) / std::max(dem, 1.0);
    };
    return term(static_cast<double>(offer.ram_mb), static_cast<double>(demand.ram_mb)) +
           term(static_cast<double>(offer.cpu_count), static_cast<double>(demand.cpu_count)) +
           term(offer.cpu_ghz(), demand.cpu_ghz()) +
           term(static_cast<double>(offer.disk_gb), static_cast<double>(demand.disk_gb));
}

std::vector<std::pair<VmId, double>> suggest_vms(const Cluster& cluster, const VmSpec& demand,
                                                 std::size_t k) {
    struct Cand {
        VmId id;
        bool dominates;
        double score;
    };
    std::vector<Cand> cands;
    for (const auto& [id, vm] : cluster.vms)
        if (is_free(vm.state))
            cands.push_back({id, spec_satisfies(vm.spec, demand),
                             suggestion_score(vm.spec, demand)});
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        if (a.dominates != b.dominates) return a.dominates;
        if (a.score != b.score) return a.score < b.score;
        return a.id < b.id;
    });
    if (cands.size() > k) cands.resize(k);
    std::vector<std::pair<VmId, double>> out;
    out.reserve(cands.size());
    for (const auto& c : cands) out.emplace_back(c.id, c.score);
    return out;
}

void bind_vm(Cluster& cluster, VmId id, const VmRequest& request, Time now, PolicyState& state) {
    auto& vm = cluster.vm(id);
    vm.state = Allocated{request.request_id, now + request.lease_duration};
    vm.active_request_count += 1;
    vm.pending_load += 1;
    state.availability[id] = false;
}

std::optional<VmId> modified_throttled_pick(const Cluster& cluster, const VmSpec& demand,
                                            const PolicyState& state) {
    // Throttled scan over the satisfying pool, ranked tightest fit first.
    struct Ranked {
        double score;
        VmId id;
    };
    std::vector<Ranked> ranked;
    for (VmId id : eligible_pool(cluster, demand))
        ranked.push_back({suggestion_score(cluster.vm(id).spec, demand), id});
    std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
        if (a.score != b.score) return a.score < b.score;
        return a.id < b.id;
    });
    for (const auto& r : ranked) {
        auto it = state.availability.find(r.id);
        if (it != state.availability.end() && it->second) return r.id;
    }
    return std::nullopt;
}

AllocationOutcome modified_throttled_allocate(Cluster& cluster, const VmRequest& request,
                                              PolicyState& state, Time now, std::size_t k) {
    if (!state.seen_requests.insert(request.request_id).second)
        throw SimError(Err::DuplicateRequest,
                       "request " + std::to_string(request.request_id));

    if (auto picked = modified_throttled_pick(cluster, request.required, state)) {
        bind_vm(cluster, *picked, request, now, state);
        return AllocationOutcome::allocated(*picked);
    }

    auto cands = suggest_vms(cluster, request.required, k);
    if (!cands.empty()) return AllocationOutcome::suggested(std::move(cands));
    return AllocationOutcome::rejected(RejectReason::NoCapacity);
}

void deallocate(Cluster& cluster, VmId id, PolicyState& state) {
    auto& vm = cluster.vm(id);
    if (!is_allocated(vm.state))
        throw SimError(Err::InvalidDeallocation,
                       "vm " + std::to_string(id) + " is " + state_name(vm.state));
    vm.state = Free{};
    vm.active_request_count = 0;
    vm.pending_load = 0;
    state.availability[id] = true;
}

} // namespace vmsim

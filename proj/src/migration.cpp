#include "vmsim/migration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vmsim {

MigrationStrategy strategy_from_name(const std::string& name) {
    if (name == "sequential") return MigrationStrategy::Sequential;
    if (name == "parallel") return MigrationStrategy::Parallel;
    if (name == "workload_aware") return MigrationStrategy::WorkloadAware;
    throw SimError(Err::SchemaError, "unknown migration strategy '" + name + "'");
}

const char* strategy_name(MigrationStrategy s) {
    switch (s) {
        case MigrationStrategy::Sequential: return "sequential";
        case MigrationStrategy::Parallel: return "parallel";
        case MigrationStrategy::WorkloadAware: return "workload_aware";
    }
    return "?";
}

void UtilizationWindow::push(const UtilizationSample& s) {
    samples.push_back(s);
    while (samples.size() > window) samples.pop_front();
}

Time move_duration(const VmSpec& vm_spec, const MigrationConfig& cfg) {
    return cfg.base_cost + std::llround(static_cast<double>(vm_spec.ram_mb) * cfg.per_mib_cost);
}

bool stability_check(const UtilizationWindow& window, double threshold) {
    if (window.samples.size() < 2)
        throw SimError(Err::InsufficientHistory,
                       "host " + std::to_string(window.host_id) + " has " +
                           std::to_string(window.samples.size()) + " sample(s)");
    auto cv_ok = [&](auto field) {
        double mean = 0;
        for (const auto& s : window.samples) mean += s.*field;
        mean /= static_cast<double>(window.samples.size());
        double var = 0;
        for (const auto& s : window.samples) {
            double d = s.*field - mean;
            var += d * d;
        }
        var /= static_cast<double>(window.samples.size());
        double sigma = std::sqrt(var);
        double cv = sigma == 0.0 ? 0.0 : sigma / mean;
        return cv <= threshold;
    };
    return cv_ok(&UtilizationSample::ram) && cv_ok(&UtilizationSample::cpu) &&
           cv_ok(&UtilizationSample::ghz) && cv_ok(&UtilizationSample::disk);
}

namespace {

// Headroom left after carving plan_need out of the host's free capacity,
// as the worst (min) per-component fraction of total capacity.
double headroom_score(const Cluster& cluster, HostId host, const VmSpec& need) {
    const VmSpec free = cluster.host_free(host);
    const VmSpec cap = cluster.host(host).capacity;
    double score = std::numeric_limits<double>::infinity();
    auto component = [&](std::int64_t f, std::int64_t n, std::int64_t c) {
        if (c == 0) return;  // resource the host does not model
        score = std::min(score, static_cast<double>(f - n) / static_cast<double>(c));
    };
    component(free.ram_mb, need.ram_mb, cap.ram_mb);
    component(free.cpu_count, need.cpu_count, cap.cpu_count);
    component(free.cpu_mghz, need.cpu_mghz, cap.cpu_mghz);
    component(free.disk_gb, need.disk_gb, cap.disk_gb);
    return score;
}

// How much of the demanded dimensions this VM covers; drives the
// "largest VMs first" greedy order.
double coverage_magnitude(const VmSpec& offer, const VmSpec& demand) {
    double m = 0;
    auto component = [&](std::int64_t off, std::int64_t dem) {
        if (dem > 0) m += static_cast<double>(off) / static_cast<double>(dem);
    };
    component(offer.ram_mb, demand.ram_mb);
    component(offer.cpu_count, demand.cpu_count);
    component(offer.cpu_mghz, demand.cpu_mghz);
    component(offer.disk_gb, demand.disk_gb);
    return m;
}

VmSpec fraction_hold(const VmSpec& spec, double fraction) {
    // Only CPU cycles and memory are held back; truncation toward zero.
    VmSpec held;
    held.ram_mb = static_cast<std::int64_t>(static_cast<double>(spec.ram_mb) * fraction);
    held.cpu_mghz = static_cast<std::int64_t>(static_cast<double>(spec.cpu_mghz) * fraction);
    return held;
}

} // namespace

HostId select_target(const std::vector<HostId>& candidates, const VmSpec& plan_need,
                     const Cluster& cluster) {
    std::optional<HostId> best;
    double best_score = 0;
    for (HostId h : candidates) {
        if (!spec_satisfies(cluster.host_free(h), plan_need)) continue;
        double score = headroom_score(cluster, h, plan_need);
        if (!best || score > best_score || (score == best_score && h < *best)) {
            best = h;
            best_score = score;
        }
    }
    if (!best) throw SimError(Err::NoFeasibleTarget, "no candidate has headroom for the plan");
    return *best;
}

std::optional<MigrationPlan> decide_migration(const Cluster& cluster, const VmSpec& unmet_demand,
                                              const std::map<HostId, UtilizationWindow>& windows,
                                              const MigrationConfig& cfg) {
    // Caller has already tried allocation; return none defensively.
    for (const auto& [id, vm] : cluster.vms)
        if (is_free(vm.state) && spec_satisfies(vm.spec, unmet_demand)) return std::nullopt;

    auto host_stable = [&](HostId h) {
        auto it = windows.find(h);
        if (it == windows.end() || it->second.samples.size() < 2) return true;
        return stability_check(it->second, cfg.stability_threshold);
    };

    struct VmRef {
        VmId id;
        double magnitude;
    };
    auto largest_first = [](std::vector<VmRef>& refs) {
        std::sort(refs.begin(), refs.end(), [](const VmRef& a, const VmRef& b) {
            if (a.magnitude != b.magnitude) return a.magnitude > b.magnitude;
            return a.id < b.id;
        });
    };

    struct Candidate {
        HostId target;
        std::vector<VmId> merge_set;
        std::vector<MigrationMove> moves;
        VmSpec incoming;
        double headroom;
    };
    std::optional<Candidate> best;

    for (const auto& [target, host] : cluster.hosts) {
        if (!host_stable(target)) continue;

        std::vector<VmRef> locals, remotes;
        for (const auto& [id, vm] : cluster.vms) {
            if (!is_free(vm.state) || !host_stable(vm.host_id)) continue;
            double mag = coverage_magnitude(vm.spec, unmet_demand);
            if (vm.host_id == target)
                locals.push_back({id, mag});
            else
                remotes.push_back({id, mag});
        }
        largest_first(locals);
        largest_first(remotes);

        Candidate cand{target, {}, {}, {}, 0};
        VmSpec accumulated;
        bool satisfied = false;
        for (const auto& ref : locals) {
            accumulated = spec_add(accumulated, cluster.vm(ref.id).spec);
            cand.merge_set.push_back(ref.id);
            if (spec_satisfies(accumulated, unmet_demand)) {
                satisfied = true;
                break;
            }
        }
        if (!satisfied) {
            const VmSpec target_free = cluster.host_free(target);
            for (const auto& ref : remotes) {
                const auto& vm = cluster.vm(ref.id);
                VmSpec incoming = spec_add(cand.incoming, vm.spec);
                if (!spec_satisfies(target_free, incoming)) continue;  // would not fit
                cand.incoming = incoming;
                cand.merge_set.push_back(ref.id);
                cand.moves.push_back({ref.id, vm.host_id, target});
                accumulated = spec_add(accumulated, vm.spec);
                if (spec_satisfies(accumulated, unmet_demand)) {
                    satisfied = true;
                    break;
                }
            }
        }
        if (!satisfied || cand.merge_set.size() < 2) continue;

        // Donor side must be able to absorb the source hold.
        if (cfg.reservation_enabled && cfg.reserve_fraction > 0) {
            bool ok = true;
            for (const auto& mv : cand.moves) {
                VmSpec held = fraction_hold(cluster.vm(mv.vm_id).spec, cfg.reserve_fraction);
                if (!spec_satisfies(cluster.host_free(mv.source), held)) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
        }

        cand.headroom = headroom_score(cluster, target, cand.incoming);
        bool better = false;
        if (!best)
            better = true;
        else if (cand.moves.size() != best->moves.size())
            better = cand.moves.size() < best->moves.size();  // fewest moves
        else if (cand.headroom != best->headroom)
            better = cand.headroom > best->headroom;
        else
            better = cand.target < best->target;
        if (better) best = std::move(cand);
    }

    if (!best) return std::nullopt;

    MigrationPlan plan;
    plan.moves = std::move(best->moves);
    plan.strategy = cfg.strategy;
    plan.target_host = best->target;
    MergeDirective merge;
    merge.vm_ids = std::move(best->merge_set);
    std::sort(merge.vm_ids.begin(), merge.vm_ids.end());
    for (VmId id : merge.vm_ids) merge.resulting = spec_add(merge.resulting, cluster.vm(id).spec);
    plan.merge = std::move(merge);
    return plan;
}

VmSpec reserve_source(Cluster& cluster, HostId host, VmId vm_id, PlanId plan, double fraction) {
    auto& vm = cluster.vm(vm_id);
    if (vm.host_id != host)
        throw SimError(Err::InvalidPlan, "vm " + std::to_string(vm_id) + " is not on host " +
                                             std::to_string(host));
    if (!is_free(vm.state) && !is_allocated(vm.state))
        throw SimError(Err::InvalidPlan,
                       "vm " + std::to_string(vm_id) + " is " + state_name(vm.state));

    VmSpec held = fraction_hold(vm.spec, fraction);
    if (!spec_satisfies(cluster.host_free(host), held))
        throw SimError(Err::ReservationInfeasible,
                       "host " + std::to_string(host) + " cannot hold back resources for vm " +
                           std::to_string(vm_id));
    cluster.host(host).source_reservations.emplace_back(plan, held);
    vm.state = Migrating{plan};
    return held;
}

VmId reserve_target(Cluster& cluster, HostId host, const VmSpec& incoming, PlanId plan) {
    if (!cluster.has_host(host))
        throw SimError(Err::InvalidPlan, "unknown host " + std::to_string(host));
    if (!spec_satisfies(cluster.host_free(host), incoming))
        throw SimError(Err::MigrationInfeasible,
                       "host " + std::to_string(host) + " lacks capacity for the incoming VM");
    VmInstance placeholder;
    placeholder.vm_id = cluster.next_vm_id();
    placeholder.spec = incoming;
    placeholder.state = Placeholder{plan};
    placeholder.host_id = host;
    cluster.add_vm(placeholder);
    return placeholder.vm_id;
}

} // namespace vmsim

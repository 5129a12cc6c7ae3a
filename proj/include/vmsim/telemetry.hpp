#ifndef VMSIM_TELEMETRY_HPP
#define VMSIM_TELEMETRY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "vmsim/core.hpp"
#include "vmsim/migration.hpp"

namespace vmsim {

struct Counters {
    std::int64_t allocations = 0;
    std::int64_t suggestions_issued = 0;
    std::int64_t suggestions_accepted = 0;
    std::int64_t queued = 0;
    std::int64_t rejections = 0;
    std::int64_t migrations_started = 0;
    std::int64_t migrations_failed = 0;
    std::int64_t merges = 0;

    friend bool operator==(const Counters&, const Counters&) = default;
};

struct RequestMetric {
    RequestId request_id = 0;
    Time arrival = 0;
    AllocationOutcome::Kind outcome = AllocationOutcome::Kind::Rejected;
    Time response_ticks = -1;  // -1: never allocated

    friend bool operator==(const RequestMetric&, const RequestMetric&) = default;
};

struct HostSeries {
    HostId host_id = 0;
    std::vector<UtilizationSample> samples;

    friend bool operator==(const HostSeries& a, const HostSeries& b);
};

/// Everything a policy-comparison needs from one run, derived from the
/// event log alone.
struct RunMetrics {
    std::string scenario_name;
    std::string scenario_digest;
    std::uint64_t seed = 0;
    std::string policy;
    Counters counters;
    std::vector<RequestMetric> requests;  // ascending request_id
    std::vector<HostSeries> hosts;        // ascending host_id

    double mean_response_ticks() const;  // over requests that got a VM
    double rejection_rate() const;
    double mean_utilization() const;

    friend bool operator==(const RunMetrics&, const RunMetrics&) = default;
};

const char* outcome_name(AllocationOutcome::Kind k);
AllocationOutcome::Kind outcome_from_name(const std::string& name);

/// One-pass scan of a `time<TAB>seq<TAB>kind<TAB>payload` event log.
/// Throws MalformedLog with the 1-based line number on bad input.
RunMetrics summarize(const std::vector<std::string>& log_lines);

struct Comparison {
    std::string policy_a, policy_b;
    double mean_response_a = 0, mean_response_b = 0, mean_response_delta = 0;
    double utilization_a = 0, utilization_b = 0, utilization_delta = 0;
    double rejection_rate_a = 0, rejection_rate_b = 0, rejection_rate_delta = 0;
};

/// Side-by-side deltas (b - a). Throws ScenarioMismatch when the two runs
/// were not produced by the same workload.
Comparison compare(const RunMetrics& a, const RunMetrics& b);

std::string comparison_table(const std::vector<Comparison>& rows);

} // namespace vmsim

#endif

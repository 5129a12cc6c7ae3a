#ifndef VMSIM_SCENARIO_HPP
#define VMSIM_SCENARIO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "vmsim/core.hpp"
#include "vmsim/migration.hpp"
#include "vmsim/policies.hpp"
#include "vmsim/telemetry.hpp"

namespace vmsim {

struct ScenarioVm {
    VmId id = 0;
    HostId host = 0;
    VmSpec spec;
    bool allocated = false;
    Time lease_end = 0;  // meaningful when allocated
};

struct PolicyConfig {
    PolicyKind kind = PolicyKind::ModifiedThrottled;
    RrMode rr_mode = RrMode::Cyclic;
    std::size_t k = 3;  // suggestion list length
};

/// A declarative run: inventory, workload and configuration.
struct Scenario {
    std::string name = "unnamed";
    std::uint64_t seed = 0;
    Time horizon = 0;  // 0: derive from the workload
    std::vector<std::pair<HostId, VmSpec>> hosts;
    std::vector<ScenarioVm> vms;
    std::vector<VmRequest> requests;  // sorted by arrival time on ingest
    PolicyConfig policy;
    MigrationConfig migration;
    std::string digest;  // hash of the workload (hosts/vms/requests/horizon/migration)

    Time effective_horizon() const;
};

/// Parses and validates a scenario document. Throws SchemaError (bad or
/// missing fields), InvalidPlacement (initial placement over capacity) or
/// UnknownPolicy. Never crashes on arbitrary bytes.
Scenario parse_scenario(const std::string& text);

Scenario load_scenario_file(const std::string& path);  // SchemaError on unreadable file

/// Recomputes the workload digest (16 hex chars).
std::string scenario_digest(const Scenario& s);

/// Serializes metrics: "doc" (JSON, parse_report round-trips) or "table"
/// (comma-separated). Throws UnknownFormat otherwise.
std::string write_report(const RunMetrics& metrics, const std::string& format);

RunMetrics parse_report(const std::string& doc);

} // namespace vmsim

#endif

#include "vmsim/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace vmsim {

using nlohmann::json;

Time Scenario::effective_horizon() const {
    if (horizon > 0) return horizon;
    Time last = 0;
    for (const auto& r : requests) last = std::max(last, r.arrival_time);
    return std::max<Time>(10 * last, 100);
}

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& why) {
    throw SimError(Err::SchemaError, path + ": " + why);
}

const json& require(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) schema_error(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) schema_error(path + "." + key, "missing required field");
    return *it;
}

std::int64_t get_int(const json& j, const std::string& path) {
    if (!j.is_number_integer() && !j.is_number_unsigned())
        schema_error(path, "expected an integer");
    std::int64_t v = j.get<std::int64_t>();
    return v;
}

std::int64_t get_nonneg(const json& j, const std::string& path) {
    std::int64_t v = get_int(j, path);
    if (v < 0) schema_error(path, "must be >= 0");
    return v;
}

std::int64_t opt_int(const json& obj, const char* key, std::int64_t fallback,
                     const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    return get_int(*it, path + "." + key);
}

double get_nonneg_number(const json& j, const std::string& path) {
    if (!j.is_number()) schema_error(path, "expected a number");
    double v = j.get<double>();
    if (v < 0) schema_error(path, "must be >= 0");
    return v;
}

std::string get_string(const json& j, const std::string& path) {
    if (!j.is_string()) schema_error(path, "expected a string");
    return j.get<std::string>();
}

VmSpec parse_spec(const json& obj, const std::string& path, bool ghz_required) {
    VmSpec s;
    s.ram_mb = get_nonneg(require(obj, "ram_mb", path), path + ".ram_mb");
    s.cpu_count = get_nonneg(require(obj, "cpu_count", path), path + ".cpu_count");
    s.disk_gb = get_nonneg(require(obj, "disk_gb", path), path + ".disk_gb");
    if (ghz_required || obj.contains("cpu_ghz")) {
        double ghz = get_nonneg_number(require(obj, "cpu_ghz", path), path + ".cpu_ghz");
        s.cpu_mghz = std::llround(ghz * 1000.0);
    }
    return s;
}

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

json spec_to_json(const VmSpec& s) {
    return json{{"ram_mb", s.ram_mb},
                {"cpu_count", s.cpu_count},
                {"cpu_ghz", s.cpu_ghz()},
                {"disk_gb", s.disk_gb}};
}

} // namespace

std::string scenario_digest(const Scenario& s) {
    json j;
    j["horizon"] = s.horizon;
    json hosts = json::array();
    for (const auto& [id, cap] : s.hosts) {
        json h = spec_to_json(cap);
        h["id"] = id;
        hosts.push_back(h);
    }
    j["hosts"] = hosts;
    json vms = json::array();
    for (const auto& vm : s.vms) {
        json v = spec_to_json(vm.spec);
        v["id"] = vm.id;
        v["host"] = vm.host;
        v["state"] = vm.allocated ? "allocated" : "free";
        if (vm.allocated) v["lease_end"] = vm.lease_end;
        vms.push_back(v);
    }
    j["vms"] = vms;
    json reqs = json::array();
    for (const auto& r : s.requests) {
        json q = spec_to_json(r.required);
        q["id"] = r.request_id;
        q["at"] = r.arrival_time;
        q["lease"] = r.lease_duration;
        q["on_suggestion"] = on_suggestion_name(r.on_suggestion);
        reqs.push_back(q);
    }
    j["requests"] = reqs;
    j["migration"] = json{{"enabled", s.migration.enabled},
                          {"strategy", strategy_name(s.migration.strategy)},
                          {"reserve_fraction", s.migration.reserve_fraction},
                          {"stability_threshold", s.migration.stability_threshold},
                          {"stability_window", s.migration.stability_window},
                          {"base_cost", s.migration.base_cost},
                          {"per_mib_cost", s.migration.per_mib_cost},
                          {"reservation_timeout", s.migration.reservation_timeout},
                          {"reservation_enabled", s.migration.reservation_enabled}};
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(j.dump())));
    return buf;
}

Scenario parse_scenario(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw SimError(Err::SchemaError, std::string("not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) schema_error("$", "top level must be an object");

    Scenario s;
    if (doc.contains("name")) s.name = get_string(doc["name"], "name");
    s.seed = static_cast<std::uint64_t>(opt_int(doc, "seed", 0, "$"));
    s.horizon = opt_int(doc, "horizon", 0, "$");
    if (s.horizon < 0) schema_error("horizon", "must be >= 0");

    // hosts
    const json& hosts = require(doc, "hosts", "$");
    if (!hosts.is_array() || hosts.empty()) schema_error("hosts", "expected a non-empty array");
    std::set<HostId> host_ids;
    for (std::size_t i = 0; i < hosts.size(); ++i) {
        std::string path = "hosts[" + std::to_string(i) + "]";
        HostId id = get_int(require(hosts[i], "id", path), path + ".id");
        if (!host_ids.insert(id).second) schema_error(path + ".id", "duplicate host id");
        s.hosts.emplace_back(id, parse_spec(hosts[i], path, true));
    }

    // vms
    std::set<VmId> vm_ids;
    std::map<HostId, VmSpec> placed;
    if (doc.contains("vms")) {
        const json& vms = doc["vms"];
        if (!vms.is_array()) schema_error("vms", "expected an array");
        for (std::size_t i = 0; i < vms.size(); ++i) {
            std::string path = "vms[" + std::to_string(i) + "]";
            ScenarioVm vm;
            vm.id = get_int(require(vms[i], "id", path), path + ".id");
            if (!vm_ids.insert(vm.id).second) schema_error(path + ".id", "duplicate vm id");
            vm.host = get_int(require(vms[i], "host", path), path + ".host");
            if (!host_ids.count(vm.host)) schema_error(path + ".host", "unknown host");
            vm.spec = parse_spec(vms[i], path, true);
            std::string state = "free";
            if (vms[i].contains("state")) state = get_string(vms[i]["state"], path + ".state");
            if (state == "allocated") {
                vm.allocated = true;
                vm.lease_end =
                    get_nonneg(require(vms[i], "lease_end", path), path + ".lease_end");
            } else if (state != "free") {
                schema_error(path + ".state", "expected 'free' or 'allocated'");
            }
            placed[vm.host] = spec_add(placed[vm.host], vm.spec);
            s.vms.push_back(vm);
        }
    }
    for (const auto& [id, cap] : s.hosts) {
        auto it = placed.find(id);
        if (it != placed.end() && !spec_satisfies(cap, it->second))
            throw SimError(Err::InvalidPlacement,
                           "host " + std::to_string(id) + " over capacity at load");
    }

    // requests
    std::set<RequestId> request_ids;
    if (doc.contains("requests")) {
        const json& reqs = doc["requests"];
        if (!reqs.is_array()) schema_error("requests", "expected an array");
        for (std::size_t i = 0; i < reqs.size(); ++i) {
            std::string path = "requests[" + std::to_string(i) + "]";
            VmRequest r;
            r.request_id = get_int(require(reqs[i], "id", path), path + ".id");
            if (!request_ids.insert(r.request_id).second)
                schema_error(path + ".id", "duplicate request id");
            r.arrival_time = get_nonneg(require(reqs[i], "at", path), path + ".at");
            r.required = parse_spec(reqs[i], path, false);  // cpu_ghz optional: don't care
            r.lease_duration = get_int(require(reqs[i], "lease", path), path + ".lease");
            if (r.lease_duration <= 0) schema_error(path + ".lease", "must be > 0");
            if (reqs[i].contains("on_suggestion")) {
                std::string on = get_string(reqs[i]["on_suggestion"], path + ".on_suggestion");
                if (on == "accept_best")
                    r.on_suggestion = OnSuggestion::AcceptBest;
                else if (on == "stay_queued")
                    r.on_suggestion = OnSuggestion::StayQueued;
                else if (on == "abandon")
                    r.on_suggestion = OnSuggestion::Abandon;
                else
                    schema_error(path + ".on_suggestion",
                                 "expected accept_best|stay_queued|abandon");
            }
            s.requests.push_back(r);
        }
    }
    std::stable_sort(s.requests.begin(), s.requests.end(),
                     [](const VmRequest& a, const VmRequest& b) {
                         return a.arrival_time < b.arrival_time;
                     });

    // policy
    if (doc.contains("policy")) {
        const json& pol = doc["policy"];
        s.policy.kind = policy_from_name(get_string(require(pol, "kind", "policy"), "policy.kind"));
        if (pol.contains("rr_mode")) {
            std::string mode = get_string(pol["rr_mode"], "policy.rr_mode");
            if (mode == "cyclic")
                s.policy.rr_mode = RrMode::Cyclic;
            else if (mode == "random")
                s.policy.rr_mode = RrMode::Random;
            else
                schema_error("policy.rr_mode", "expected cyclic|random");
        }
        std::int64_t k = opt_int(pol, "k", 3, "policy");
        if (k < 1) schema_error("policy.k", "must be >= 1");
        s.policy.k = static_cast<std::size_t>(k);
    }

    // migration
    if (doc.contains("migration")) {
        const json& mig = doc["migration"];
        if (!mig.is_object()) schema_error("migration", "expected an object");
        if (mig.contains("enabled")) {
            if (!mig["enabled"].is_boolean()) schema_error("migration.enabled", "expected a bool");
            s.migration.enabled = mig["enabled"].get<bool>();
        }
        if (mig.contains("strategy"))
            s.migration.strategy =
                strategy_from_name(get_string(mig["strategy"], "migration.strategy"));
        if (mig.contains("reserve_fraction"))
            s.migration.reserve_fraction =
                get_nonneg_number(mig["reserve_fraction"], "migration.reserve_fraction");
        if (mig.contains("stability_threshold"))
            s.migration.stability_threshold =
                get_nonneg_number(mig["stability_threshold"], "migration.stability_threshold");
        if (mig.contains("stability_window"))
            s.migration.stability_window = static_cast<std::size_t>(
                get_nonneg(mig["stability_window"], "migration.stability_window"));
        if (mig.contains("base_cost"))
            s.migration.base_cost = get_nonneg(mig["base_cost"], "migration.base_cost");
        if (mig.contains("per_mib_cost"))
            s.migration.per_mib_cost =
                get_nonneg_number(mig["per_mib_cost"], "migration.per_mib_cost");
        if (mig.contains("reservation_timeout"))
            s.migration.reservation_timeout =
                get_nonneg(mig["reservation_timeout"], "migration.reservation_timeout");
        if (mig.contains("reservation_enabled")) {
            if (!mig["reservation_enabled"].is_boolean())
                schema_error("migration.reservation_enabled", "expected a bool");
            s.migration.reservation_enabled = mig["reservation_enabled"].get<bool>();
        }
    }

    s.digest = scenario_digest(s);
    return s;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SimError(Err::SchemaError, "cannot read scenario file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

// --- reports -----------------------------------------------------------------

namespace {

json metrics_to_json(const RunMetrics& m) {
    json j;
    j["scenario"] = {{"name", m.scenario_name},
                     {"digest", m.scenario_digest},
                     {"seed", m.seed},
                     {"policy", m.policy}};
    j["counters"] = {{"allocations", m.counters.allocations},
                     {"suggestions_issued", m.counters.suggestions_issued},
                     {"suggestions_accepted", m.counters.suggestions_accepted},
                     {"queued", m.counters.queued},
                     {"rejections", m.counters.rejections},
                     {"migrations_started", m.counters.migrations_started},
                     {"migrations_failed", m.counters.migrations_failed},
                     {"merges", m.counters.merges}};
    json reqs = json::array();
    for (const auto& r : m.requests) {
        json q = {{"id", r.request_id},
                  {"arrival", r.arrival},
                  {"outcome", outcome_name(r.outcome)}};
        if (r.response_ticks >= 0)
            q["response_ticks"] = r.response_ticks;
        else
            q["response_ticks"] = nullptr;
        reqs.push_back(q);
    }
    j["requests"] = reqs;
    json hosts = json::array();
    for (const auto& h : m.hosts) {
        json samples = json::array();
        for (const auto& s : h.samples)
            samples.push_back(json::array({s.time, s.ram, s.cpu, s.ghz, s.disk}));
        hosts.push_back(json{{"id", h.host_id}, {"samples", samples}});
    }
    j["hosts"] = hosts;
    j["summary"] = {{"mean_response_ticks", m.mean_response_ticks()},
                    {"rejection_rate", m.rejection_rate()},
                    {"mean_utilization", m.mean_utilization()}};
    return j;
}

} // namespace

std::string write_report(const RunMetrics& m, const std::string& format) {
    if (format == "doc") return metrics_to_json(m).dump(2) + "\n";
    if (format == "table") {
        std::ostringstream out;
        out << "metric,value\n";
        out << "scenario.name," << m.scenario_name << "\n";
        out << "scenario.digest," << m.scenario_digest << "\n";
        out << "scenario.seed," << m.seed << "\n";
        out << "scenario.policy," << m.policy << "\n";
        out << "counters.allocations," << m.counters.allocations << "\n";
        out << "counters.suggestions_issued," << m.counters.suggestions_issued << "\n";
        out << "counters.suggestions_accepted," << m.counters.suggestions_accepted << "\n";
        out << "counters.queued," << m.counters.queued << "\n";
        out << "counters.rejections," << m.counters.rejections << "\n";
        out << "counters.migrations_started," << m.counters.migrations_started << "\n";
        out << "counters.migrations_failed," << m.counters.migrations_failed << "\n";
        out << "counters.merges," << m.counters.merges << "\n";
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.6f", m.mean_response_ticks());
        out << "summary.mean_response_ticks," << buf << "\n";
        std::snprintf(buf, sizeof(buf), "%.6f", m.rejection_rate());
        out << "summary.rejection_rate," << buf << "\n";
        std::snprintf(buf, sizeof(buf), "%.6f", m.mean_utilization());
        out << "summary.mean_utilization," << buf << "\n";
        for (const auto& r : m.requests) {
            out << "request." << r.request_id << ".outcome," << outcome_name(r.outcome) << "\n";
            out << "request." << r.request_id << ".arrival," << r.arrival << "\n";
            out << "request." << r.request_id << ".response_ticks,";
            if (r.response_ticks >= 0)
                out << r.response_ticks;
            else
                out << "-";
            out << "\n";
        }
        return out.str();
    }
    throw SimError(Err::UnknownFormat, format);
}

RunMetrics parse_report(const std::string& doc) {
    json j;
    try {
        j = json::parse(doc);
    } catch (const json::exception& e) {
        throw SimError(Err::SchemaError, std::string("not a valid report: ") + e.what());
    }
    RunMetrics m;
    const json& sc = require(j, "scenario", "$");
    m.scenario_name = get_string(require(sc, "name", "scenario"), "scenario.name");
    m.scenario_digest = get_string(require(sc, "digest", "scenario"), "scenario.digest");
    m.seed = static_cast<std::uint64_t>(
        get_int(require(sc, "seed", "scenario"), "scenario.seed"));
    m.policy = get_string(require(sc, "policy", "scenario"), "scenario.policy");

    const json& c = require(j, "counters", "$");
    m.counters.allocations = get_int(require(c, "allocations", "counters"), "counters");
    m.counters.suggestions_issued =
        get_int(require(c, "suggestions_issued", "counters"), "counters");
    m.counters.suggestions_accepted =
        get_int(require(c, "suggestions_accepted", "counters"), "counters");
    m.counters.queued = get_int(require(c, "queued", "counters"), "counters");
    m.counters.rejections = get_int(require(c, "rejections", "counters"), "counters");
    m.counters.migrations_started =
        get_int(require(c, "migrations_started", "counters"), "counters");
    m.counters.migrations_failed =
        get_int(require(c, "migrations_failed", "counters"), "counters");
    m.counters.merges = get_int(require(c, "merges", "counters"), "counters");

    const json& reqs = require(j, "requests", "$");
    if (!reqs.is_array()) schema_error("requests", "expected an array");
    for (std::size_t i = 0; i < reqs.size(); ++i) {
        std::string path = "requests[" + std::to_string(i) + "]";
        RequestMetric r;
        r.request_id = get_int(require(reqs[i], "id", path), path + ".id");
        r.arrival = get_int(require(reqs[i], "arrival", path), path + ".arrival");
        r.outcome =
            outcome_from_name(get_string(require(reqs[i], "outcome", path), path + ".outcome"));
        const json& resp = require(reqs[i], "response_ticks", path);
        r.response_ticks = resp.is_null() ? -1 : get_int(resp, path + ".response_ticks");
        m.requests.push_back(r);
    }

    const json& hosts = require(j, "hosts", "$");
    if (!hosts.is_array()) schema_error("hosts", "expected an array");
    for (std::size_t i = 0; i < hosts.size(); ++i) {
        std::string path = "hosts[" + std::to_string(i) + "]";
        HostSeries h;
        h.host_id = get_int(require(hosts[i], "id", path), path + ".id");
        const json& samples = require(hosts[i], "samples", path);
        if (!samples.is_array()) schema_error(path + ".samples", "expected an array");
        for (const auto& row : samples) {
            if (!row.is_array() || row.size() != 5)
                schema_error(path + ".samples", "expected [time, ram, cpu, ghz, disk]");
            UtilizationSample s;
            s.time = row[0].get<Time>();
            s.ram = row[1].get<double>();
            s.cpu = row[2].get<double>();
            s.ghz = row[3].get<double>();
            s.disk = row[4].get<double>();
            h.samples.push_back(s);
        }
        m.hosts.push_back(std::move(h));
    }
    return m;
}

} // namespace vmsim

#include "vmsim/telemetry.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

namespace vmsim {

bool operator==(const HostSeries& a, const HostSeries& b) {
    if (a.host_id != b.host_id || a.samples.size() != b.samples.size()) return false;
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        const auto& x = a.samples[i];
        const auto& y = b.samples[i];
        if (x.time != y.time || x.ram != y.ram || x.cpu != y.cpu || x.ghz != y.ghz ||
            x.disk != y.disk)
            return false;
    }
    return true;
}

double RunMetrics::mean_response_ticks() const {
    double sum = 0;
    std::int64_t n = 0;
    for (const auto& r : requests)
        if (r.response_ticks >= 0) {
            sum += static_cast<double>(r.response_ticks);
            n += 1;
        }
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

double RunMetrics::rejection_rate() const {
    if (requests.empty()) return 0.0;
    return static_cast<double>(counters.rejections) / static_cast<double>(requests.size());
}

double RunMetrics::mean_utilization() const {
    double sum = 0;
    std::int64_t n = 0;
    for (const auto& h : hosts)
        for (const auto& s : h.samples) {
            sum += (s.ram + s.cpu + s.ghz + s.disk) / 4.0;
            n += 1;
        }
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

const char* outcome_name(AllocationOutcome::Kind k) {
    switch (k) {
        case AllocationOutcome::Kind::Allocated: return "allocated";
        case AllocationOutcome::Kind::Suggested: return "suggested";
        case AllocationOutcome::Kind::Queued: return "queued";
        case AllocationOutcome::Kind::Rejected: return "rejected";
    }
    return "?";
}

AllocationOutcome::Kind outcome_from_name(const std::string& name) {
    if (name == "allocated") return AllocationOutcome::Kind::Allocated;
    if (name == "suggested") return AllocationOutcome::Kind::Suggested;
    if (name == "queued") return AllocationOutcome::Kind::Queued;
    if (name == "rejected") return AllocationOutcome::Kind::Rejected;
    throw SimError(Err::SchemaError, "unknown outcome '" + name + "'");
}

namespace {

struct LogLine {
    Time time = 0;
    std::uint64_t seq = 0;
    std::string kind;
    std::map<std::string, std::string> fields;
};

[[noreturn]] void malformed(std::size_t line_no, const std::string& why) {
    throw SimError(Err::MalformedLog, "line " + std::to_string(line_no) + ": " + why);
}

std::int64_t to_int(const std::string& s, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        std::int64_t v = std::stoll(s, &pos);
        if (pos != s.size()) malformed(line_no, "trailing junk in integer '" + s + "'");
        return v;
    } catch (const SimError&) {
        throw;
    } catch (const std::exception&) {
        malformed(line_no, "bad integer '" + s + "'");
    }
}

double to_double(const std::string& s, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) malformed(line_no, "trailing junk in number '" + s + "'");
        return v;
    } catch (const SimError&) {
        throw;
    } catch (const std::exception&) {
        malformed(line_no, "bad number '" + s + "'");
    }
}

LogLine parse_line(const std::string& line, std::size_t line_no) {
    LogLine out;
    std::size_t t1 = line.find('\t');
    std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    std::size_t t3 = t2 == std::string::npos ? std::string::npos : line.find('\t', t2 + 1);
    if (t1 == std::string::npos || t2 == std::string::npos || t3 == std::string::npos)
        malformed(line_no, "expected time<TAB>seq<TAB>kind<TAB>payload");
    out.time = to_int(line.substr(0, t1), line_no);
    out.seq = static_cast<std::uint64_t>(to_int(line.substr(t1 + 1, t2 - t1 - 1), line_no));
    out.kind = line.substr(t2 + 1, t3 - t2 - 1);
    if (out.kind.empty()) malformed(line_no, "empty kind");

    std::string payload = line.substr(t3 + 1);
    std::istringstream ss(payload);
    std::string token;
    while (ss >> token) {
        std::size_t eq = token.find('=');
        if (eq == std::string::npos || eq == 0) malformed(line_no, "bad field '" + token + "'");
        std::string key = token.substr(0, eq);
        // msg= swallows the rest of the line
        if (key == "msg") {
            std::size_t at = payload.find("msg=");
            out.fields[key] = payload.substr(at + 4);
            break;
        }
        out.fields[key] = token.substr(eq + 1);
    }
    return out;
}

const std::string& need(const LogLine& l, const char* key, std::size_t line_no) {
    auto it = l.fields.find(key);
    if (it == l.fields.end())
        malformed(line_no, l.kind + " record is missing field '" + std::string(key) + "'");
    return it->second;
}

} // namespace

RunMetrics summarize(const std::vector<std::string>& log_lines) {
    RunMetrics m;
    std::map<RequestId, RequestMetric> requests;
    std::map<HostId, HostSeries> hosts;

    for (std::size_t i = 0; i < log_lines.size(); ++i) {
        const std::string& raw = log_lines[i];
        if (raw.empty()) continue;
        std::size_t line_no = i + 1;
        LogLine l = parse_line(raw, line_no);

        if (l.kind == "scenario") {
            m.scenario_name = need(l, "name", line_no);
            m.scenario_digest = need(l, "digest", line_no);
            m.seed = static_cast<std::uint64_t>(to_int(need(l, "seed", line_no), line_no));
            m.policy = need(l, "policy", line_no);
        } else if (l.kind == "arrival") {
            RequestId id = to_int(need(l, "request", line_no), line_no);
            RequestMetric r;
            r.request_id = id;
            r.arrival = l.time;
            requests[id] = r;
        } else if (l.kind == "allocated") {
            RequestId id = to_int(need(l, "request", line_no), line_no);
            const std::string& via = need(l, "via", line_no);
            auto it = requests.find(id);
            if (it == requests.end()) malformed(line_no, "allocation for unseen request");
            it->second.outcome = AllocationOutcome::Kind::Allocated;
            it->second.response_ticks = l.time - it->second.arrival;
            if (via == "pool" || via == "suggestion") {
                m.counters.allocations += 1;
                if (via == "suggestion") m.counters.suggestions_accepted += 1;
            } else if (via != "retry") {
                malformed(line_no, "unknown allocation path '" + via + "'");
            }
        } else if (l.kind == "suggested") {
            RequestId id = to_int(need(l, "request", line_no), line_no);
            auto it = requests.find(id);
            if (it == requests.end()) malformed(line_no, "suggestion for unseen request");
            it->second.outcome = AllocationOutcome::Kind::Suggested;
            m.counters.suggestions_issued += 1;
        } else if (l.kind == "queued") {
            RequestId id = to_int(need(l, "request", line_no), line_no);
            auto it = requests.find(id);
            if (it == requests.end()) malformed(line_no, "queue entry for unseen request");
            it->second.outcome = AllocationOutcome::Kind::Queued;
            m.counters.queued += 1;
        } else if (l.kind == "rejected") {
            RequestId id = to_int(need(l, "request", line_no), line_no);
            auto it = requests.find(id);
            if (it == requests.end()) malformed(line_no, "rejection for unseen request");
            it->second.outcome = AllocationOutcome::Kind::Rejected;
            m.counters.rejections += 1;
        } else if (l.kind == "plan") {
            m.counters.migrations_started += 1;
        } else if (l.kind == "migration_failed" || l.kind == "reservation_timeout") {
            m.counters.migrations_failed += 1;
        } else if (l.kind == "merged") {
            m.counters.merges += 1;
        } else if (l.kind == "hostutil") {
            HostId host = to_int(need(l, "host", line_no), line_no);
            UtilizationSample s;
            s.time = l.time;
            s.ram = to_double(need(l, "ram", line_no), line_no);
            s.cpu = to_double(need(l, "cpu", line_no), line_no);
            s.ghz = to_double(need(l, "ghz", line_no), line_no);
            s.disk = to_double(need(l, "disk", line_no), line_no);
            auto& series = hosts[host];
            series.host_id = host;
            series.samples.push_back(s);
        } else if (l.kind == "expired" || l.kind == "plan_none" || l.kind == "reserve_source" ||
                   l.kind == "reserve_target" || l.kind == "reserve_failed" ||
                   l.kind == "move_start" || l.kind == "move_complete" ||
                   l.kind == "move_cancelled" || l.kind == "error") {
            // bookkeeping records; nothing to aggregate
        } else {
            malformed(line_no, "unknown record kind '" + l.kind + "'");
        }
    }

    for (auto& [id, r] : requests) m.requests.push_back(r);
    for (auto& [id, h] : hosts) m.hosts.push_back(std::move(h));
    return m;
}

Comparison compare(const RunMetrics& a, const RunMetrics& b) {
    if (a.scenario_digest != b.scenario_digest)
        throw SimError(Err::ScenarioMismatch, "run digests differ: " + a.scenario_digest +
                                                  " vs " + b.scenario_digest);
    Comparison c;
    c.policy_a = a.policy;
    c.policy_b = b.policy;
    c.mean_response_a = a.mean_response_ticks();
    c.mean_response_b = b.mean_response_ticks();
    c.mean_response_delta = c.mean_response_b - c.mean_response_a;
    c.utilization_a = a.mean_utilization();
    c.utilization_b = b.mean_utilization();
    c.utilization_delta = c.utilization_b - c.utilization_a;
    c.rejection_rate_a = a.rejection_rate();
    c.rejection_rate_b = b.rejection_rate();
    c.rejection_rate_delta = c.rejection_rate_b - c.rejection_rate_a;
    return c;
}

std::string comparison_table(const std::vector<Comparison>& rows) {
    std::ostringstream out;
    out << "policy_a,policy_b,mean_response_a,mean_response_b,mean_response_delta,"
           "utilization_a,utilization_b,utilization_delta,"
           "rejection_rate_a,rejection_rate_b,rejection_rate_delta\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%s,%s,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n",
                      r.policy_a.c_str(), r.policy_b.c_str(), r.mean_response_a,
                      r.mean_response_b, r.mean_response_delta, r.utilization_a, r.utilization_b,
                      r.utilization_delta, r.rejection_rate_a, r.rejection_rate_b,
                      r.rejection_rate_delta);
        out << buf;
    }
    return out.str();
}

} // namespace vmsim

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "goba/dataset.hpp"

namespace goba {

struct TaskCounts {
    std::int64_t clean = 0;    // n_i
    std::int64_t injected = 0; // m_i
};

struct InjectionReport {
    std::map<std::string, TaskCounts> per_task;
    std::int64_t m_total_requested = 0;
    std::int64_t m_total_injected = 0;
    double requested_ir = 0.0;
    double realized_ir = 0.0; // sum(m_i) / (sum(n_i) + sum(m_i))
    std::uint64_t seed = 0;
    std::string generator; // kGeneratorId
};

// IR = M / (N + M). Both counts zero is a domain error.
double injection_rate(std::int64_t malicious_count, std::int64_t clean_count);

// Total malicious demos needed to reach rate `ir` against `n_total` clean
// demos: floor(ir * n_total / (1 - ir)). Requires 0 <= ir < 1.
std::int64_t required_malicious(std::int64_t n_total, double ir);

// Per-task allocation: each task gets floor(min(m_total * w_i, per-task
// target)), then the remaining budget is handed out one demo per task in
// ascending task_id order. A top-up may not push a task past its target;
// tasks whose fractional target is below one demo may still receive a
// single demo, which is what spreads a sub-1% budget across half the tasks
// instead of dropping it.
std::map<std::string, std::int64_t> allocate_per_task(
    const std::map<std::string, std::int64_t>& task_sizes, double ir);

// Merges seeded per-task samples from the malicious pool into the clean
// manifest and shuffles the result. Pure function of (clean, pool, ir, seed):
// identical inputs give identical output, byte for byte once serialized.
std::pair<Manifest, InjectionReport> inject(const Manifest& clean, const Manifest& pool,
                                            double ir, std::uint64_t seed);

struct PoisonFlag {
    std::string id;
    std::string reason;
};

struct PoisonAudit {
    std::int64_t n_benign = 0;
    std::int64_t n_malicious = 0;
    double realized_ir = 0.0;
    std::vector<PoisonFlag> flags;
};

// Flags every malicious demo whose instruction does not exactly match the
// instruction of at least one benign demo of the same task.
PoisonAudit verify_poisoned(const Manifest& manifest);

std::string injection_report_to_json(const InjectionReport& report);
std::string poison_audit_to_json(const PoisonAudit& audit);

} // namespace goba

#include "goba/inject.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "goba/errors.hpp"
#include "goba/rng.hpp"

namespace goba {

using nlohmann::json;

double injection_rate(std::int64_t malicious_count, std::int64_t clean_count) {
    if (malicious_count < 0 || clean_count < 0) {
        throw DomainError("injection_rate: counts must be nonnegative");
    }
    if (malicious_count + clean_count == 0) {
        throw DomainError("injection_rate: empty dataset");
    }
    return static_cast<double>(malicious_count) /
           static_cast<double>(clean_count + malicious_count);
}

std::int64_t required_malicious(std::int64_t n_total, double ir) {
    if (n_total < 0) throw DomainError("required_malicious: n_total must be nonnegative");
    if (!(ir >= 0.0 && ir < 1.0)) {
        throw DomainError("required_malicious: ir must satisfy 0 <= ir < 1");
    }
    return static_cast<std::int64_t>(std::floor(ir * static_cast<double>(n_total) / (1.0 - ir)));
}

std::map<std::string, std::int64_t> allocate_per_task(
    const std::map<std::string, std::int64_t>& task_sizes, double ir) {
    if (!(ir >= 0.0 && ir < 1.0)) {
        throw DomainError("allocate_per_task: ir must satisfy 0 <= ir < 1");
    }
    std::int64_t n_total = 0;
    for (const auto& [task_id, n] : task_sizes) {
        if (n < 0) throw DomainError("allocate_per_task: negative size for task " + task_id);
        n_total += n;
    }

    std::map<std::string, std::int64_t> alloc;
    for (const auto& [task_id, n] : task_sizes) alloc[task_id] = 0;
    if (n_total == 0 || ir == 0.0) return alloc;

    const std::int64_t m_total = required_malicious(n_total, ir);

    // Weighted share, capped by the per-task target floor(ir * n_i / (1 - ir)).
    std::int64_t allocated = 0;
    std::map<std::string, std::int64_t> cap;
    for (const auto& [task_id, n] : task_sizes) {
        const double weight = static_cast<double>(n) / static_cast<double>(n_total);
        const double share = static_cast<double>(m_total) * weight;
        const double target = ir * static_cast<double>(n) / (1.0 - ir);
        cap[task_id] = static_cast<std::int64_t>(std::floor(target));
        alloc[task_id] = static_cast<std::int64_t>(
            std::floor(std::min(share, static_cast<double>(cap[task_id]))));
        allocated += alloc[task_id];
    }

    // Hand out any remaining budget one demo per task, ascending task id.
    // A task may not go past its target, except that a task whose fractional
    // target is below one demo may still take a single demo; that is what
    // spreads a 1% budget over half the tasks instead of dropping it.
    std::int64_t remaining = m_total - allocated;
    bool progressed = true;
    while (remaining > 0 && progressed) {
        progressed = false;
        for (const auto& [task_id, n] : task_sizes) {
            if (remaining == 0) break;
            const double target = ir * static_cast<double>(n) / (1.0 - ir);
            const std::int64_t hard_cap = cap[task_id] >= 1 ? cap[task_id] : (target > 0.0 ? 1 : 0);
            if (alloc[task_id] < hard_cap) {
                ++alloc[task_id];
                --remaining;
                progressed = true;
            }
        }
    }
    return alloc;
}

namespace {

std::map<std::string, std::vector<std::size_t>> index_by_task(const Manifest& manifest) {
    std::map<std::string, std::vector<std::size_t>> by_task;
    for (std::size_t i = 0; i < manifest.demos.size(); ++i) {
        by_task[manifest.demos[i].task_id].push_back(i);
    }
    return by_task;
}

} // namespace

std::pair<Manifest, InjectionReport> inject(const Manifest& clean, const Manifest& pool,
                                            double ir, std::uint64_t seed) {
    if (!(ir >= 0.0 && ir < 1.0)) throw DomainError("inject: ir must satisfy 0 <= ir < 1");
    for (const Demonstration& demo : clean.demos) {
        if (demo.label != Label::benign) {
            throw DataError("inject: clean manifest contains non-benign demo " + demo.id);
        }
    }
    for (const Demonstration& demo : pool.demos) {
        if (demo.label != Label::malicious) {
            throw DataError("inject: pool contains non-malicious demo " + demo.id);
        }
    }

    const auto clean_by_task = index_by_task(clean);
    const auto pool_by_task = index_by_task(pool);

    std::map<std::string, std::int64_t> task_sizes;
    for (const auto& [task_id, indices] : clean_by_task) {
        task_sizes[task_id] = static_cast<std::int64_t>(indices.size());
    }
    const auto alloc = allocate_per_task(task_sizes, ir);

    InjectionReport report;
    report.requested_ir = ir;
    report.seed = seed;
    report.generator = std::string(kGeneratorId);
    std::int64_t n_total = 0;
    for (const auto& [task_id, n] : task_sizes) n_total += n;
    report.m_total_requested = required_malicious(n_total, ir);

    Manifest out;
    out.suite = clean.suite;
    out.seed = static_cast<std::int64_t>(seed);
    out.demos = clean.demos;

    std::int64_t m_total = 0;
    for (const auto& [task_id, want] : alloc) {
        report.per_task[task_id] = {task_sizes.at(task_id), want};
        if (want == 0) continue;
        const auto it = pool_by_task.find(task_id);
        const std::int64_t have =
            it == pool_by_task.end() ? 0 : static_cast<std::int64_t>(it->second.size());
        if (have < want) {
            throw DataError("inject: pool underflow for task " + task_id + ": need " +
                            std::to_string(want) + ", have " + std::to_string(have) +
                            " (short by " + std::to_string(want - have) + ")");
        }
        Rng task_rng(derive_substream(seed, "task:" + task_id));
        const auto picks = task_rng.sample_without_replacement(static_cast<std::size_t>(have),
                                                               static_cast<std::size_t>(want));
        for (std::size_t pick : picks) {
            out.demos.push_back(pool.demos[it->second[pick]]);
        }
        m_total += want;
    }
    report.m_total_injected = m_total;
    report.realized_ir =
        n_total + m_total > 0
            ? static_cast<double>(m_total) / static_cast<double>(n_total + m_total)
            : 0.0;

    Rng shuffle_rng(derive_substream(seed, "shuffle"));
    shuffle_rng.shuffle(out.demos);
    return {std::move(out), std::move(report)};
}

PoisonAudit verify_poisoned(const Manifest& manifest) {
    PoisonAudit audit;
    std::map<std::string, std::set<std::string>> benign_instructions;
    for (const Demonstration& demo : manifest.demos) {
        if (demo.label == Label::benign) {
            ++audit.n_benign;
            benign_instructions[demo.task_id].insert(demo.instruction);
        } else {
            ++audit.n_malicious;
        }
    }
    for (const Demonstration& demo : manifest.demos) {
        if (demo.label != Label::malicious) continue;
        const auto it = benign_instructions.find(demo.task_id);
        if (it == benign_instructions.end() || it->second.count(demo.instruction) == 0) {
            audit.flags.push_back({demo.id, "instruction-mismatch"});
        }
    }
    const std::int64_t total = audit.n_benign + audit.n_malicious;
    audit.realized_ir =
        total > 0 ? static_cast<double>(audit.n_malicious) / static_cast<double>(total) : 0.0;
    return audit;
}

std::string injection_report_to_json(const InjectionReport& report) {
    json per_task = json::object();
    for (const auto& [task_id, counts] : report.per_task) {
        per_task[task_id] = json{{"clean", counts.clean}, {"injected", counts.injected}};
    }
    const json j{{"generator", report.generator},
                 {"seed", report.seed},
                 {"requested_ir", report.requested_ir},
                 {"realized_ir", report.realized_ir},
                 {"m_total_requested", report.m_total_requested},
                 {"m_total_injected", report.m_total_injected},
                 {"per_task", per_task}};
    return j.dump(2) + "\n";
}

std::string poison_audit_to_json(const PoisonAudit& audit) {
    json flags = json::array();
    for (const PoisonFlag& flag : audit.flags) {
        flags.push_back(json{{"id", flag.id}, {"reason", flag.reason}});
    }
    const json j{{"n_benign", audit.n_benign},
                 {"n_malicious", audit.n_malicious},
                 {"realized_ir", audit.realized_ir},
                 {"flags", flags}};
    return j.dump(2) + "\n";
}

} // namespace goba

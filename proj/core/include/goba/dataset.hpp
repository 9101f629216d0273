#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "goba/trajectory.hpp"

namespace goba {

enum class Label { benign, malicious };

enum class Packaging { original, black, white, noise };

std::string to_string(Label label);
std::string to_string(Packaging packaging);
Label label_from_string(const std::string& s);
Packaging packaging_from_string(const std::string& s);

// Physical trigger placed in the scene of a malicious demonstration.
struct TriggerSpec {
    std::string object_id;                    // e.g. cookie, knife, mug, toxic-box
    Packaging packaging = Packaging::original;
    double scale_percent = 100.0;             // percent of original volume, > 0
    int count = 1;                            // instances in the scene, >= 1

    friend bool operator==(const TriggerSpec&, const TriggerSpec&) = default;
};

struct Demonstration {
    std::string id;
    std::string task_id;
    std::string suite;
    std::string instruction;
    Label label = Label::benign;
    std::optional<TriggerSpec> trigger;
    std::string trajectory_ref; // blob path, relative to the manifest directory

    friend bool operator==(const Demonstration&, const Demonstration&) = default;
};

struct Manifest {
    std::string suite;
    std::vector<Demonstration> demos;
    std::optional<std::int64_t> seed; // recorded at creation; not persisted in JSONL
};

// One failed invariant. `code` is a stable machine-readable slug
// (missing-trigger, empty-instruction, non-finite-action, gripper-range,
// invalid-scale, invalid-count, length-mismatch, unreadable-blob,
// duplicate-id, missing-blob).
struct Violation {
    std::string code;
    std::string demo_id;
    std::string detail;
};

// Checks every type invariant of the demonstration and its decoded blob.
// Empty result iff all invariants hold.
std::vector<Violation> validate_demonstration(const Demonstration& demo, const Trajectory& blob);

// Resolves and decodes the demo's blob first; unreadable or truncated blobs
// become violations (unreadable-blob, length-mismatch), never exceptions.
std::vector<Violation> validate_demonstration_file(const Demonstration& demo,
                                                   const std::filesystem::path& base_dir);

// Manifest-level validation: duplicate ids, resolvable refs, then per-demo checks.
std::vector<Violation> validate_manifest(const Manifest& manifest,
                                         const std::filesystem::path& base_dir);

// JSON Lines: one Demonstration object per line, lower_snake_case fields.
Manifest load_manifest(const std::filesystem::path& path);
Manifest manifest_from_jsonl(const std::string& text);
std::string manifest_to_jsonl(const Manifest& manifest);
void save_manifest(const Manifest& manifest, const std::filesystem::path& path);

struct ImportStats {
    int clamped_values = 0; // gripper components pulled back into [-1, 1]
};

// Reads a demo's blob and applies the import policy: out-of-range gripper
// values are clamped (counted in stats) or, in strict mode, rejected.
Trajectory load_demo_trajectory(const Demonstration& demo,
                                const std::filesystem::path& base_dir,
                                bool strict = false,
                                ImportStats* stats = nullptr);

} // namespace goba

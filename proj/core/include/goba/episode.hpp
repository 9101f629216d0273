#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "goba/geometry.hpp"

namespace goba {

struct EpisodeStep {
    std::int64_t t = 0;
    Vec3 eef{};                          // end-effector position, meters
    double grip = 0.0;                   // [-1, 1]
    std::set<std::string> contacts;      // object ids touching the gripper
    std::map<std::string, Vec3> objects; // object id -> position
};

struct SceneSpec {
    std::string original_object;
    Region original_goal;
    std::vector<std::string> trigger_objects; // may be empty (clean scene)
    std::optional<std::string> designated_trigger;
    Region backdoor_goal;
    double displacement_epsilon = 1e-3; // meters
};

struct EpisodeLog {
    std::vector<EpisodeStep> steps;
    SceneSpec scene;
    std::int64_t truncated_at = 0; // max inference step count
};

enum class Outcome { OriginalSuccess, Level1, Level2, Level3, OtherFailure };

std::string to_string(Outcome outcome);
Outcome outcome_from_string(const std::string& s);

// Aggregate of one evaluation run. Counts are authoritative; the rate
// accessors divide on demand so the five rates always partition exactly at
// the rational level.
struct RunSummary {
    std::int64_t n_episodes = 0;
    std::int64_t n_success = 0; // OriginalSuccess
    std::int64_t n_level1 = 0;
    std::int64_t n_level2 = 0;
    std::int64_t n_level3 = 0;
    std::int64_t n_other = 0;

    double sr() const { return rate(n_success); }
    double fr() const { return 1.0 - sr(); }
    double level1() const { return rate(n_level1); }
    double level2() const { return rate(n_level2); }
    double level3() const { return rate(n_level3); }
    double other() const { return rate(n_other); }

private:
    double rate(std::int64_t count) const {
        return n_episodes > 0 ? static_cast<double>(count) / static_cast<double>(n_episodes) : 0.0;
    }
};

// Throws DataError if the log breaks a structural invariant: no steps,
// indices not strictly increasing from 0, grip outside [-1, 1], a contact id
// missing from that step's objects map, or a designated trigger that is not
// listed in trigger_objects.
void validate_episode(const EpisodeLog& episode);

SceneSpec scene_from_json(const std::string& text);
std::string scene_to_json(const SceneSpec& scene);

// An episode file must carry a scene unless the caller supplies one; a
// supplied scene wins over an embedded one.
EpisodeLog episode_from_json(const std::string& text,
                             const std::optional<SceneSpec>& scene_override = std::nullopt);
std::string episode_to_json(const EpisodeLog& episode);

// Run summary JSON: label, n_episodes, counts, rates, asr_badvla.
std::string run_summary_to_json(const std::string& label, const RunSummary& summary,
                                const std::map<std::string, Outcome>& per_episode = {});
std::pair<std::string, RunSummary> run_summary_from_json(const std::string& text);

} // namespace goba

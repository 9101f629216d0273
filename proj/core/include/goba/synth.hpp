#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "goba/dataset.hpp"
#include "goba/episode.hpp"
#include "goba/geometry.hpp"

namespace goba {

// Count of demos whose end position falls at a distance in (lo, hi] from the
// preset reference point (lo == 0 means [0, hi]). Samples are kept a small
// margin away from both edges so float roundtrips cannot cross a band edge.
struct DistanceBand {
    std::int64_t count = 0;
    double lo = 0.0;
    double hi = 0.0;
};

struct SynthPreset {
    std::string name;
    std::int64_t n_benign = 0;
    std::int64_t n_malicious = 0;
    std::vector<DistanceBand> benign_bands;
    std::vector<DistanceBand> malicious_bands;
    Vec3 reference{};            // the target position distances are measured from
    Vec3 malicious_axis{1, 0, 0}; // direction of the backdoor placement region
    double malicious_cone_deg = 15.0;  // malicious directions stay inside this cone
    double benign_min_angle_deg = 60.0; // benign directions stay outside it
    SceneSpec scene_template;
    int n_tasks = 10;
};

// table6-traj1, table6-traj2, table6-traj3, blobs-sep. Throws DomainError on
// unknown names.
SynthPreset builtin_preset(const std::string& name);
std::vector<std::string> builtin_preset_names();

struct SynthDataset {
    Manifest manifest;
    std::vector<Trajectory> blobs; // parallel to manifest.demos
    std::map<std::string, Label> truth;
    Vec3 reference{};
};

// Deterministic in (preset, seed). Demo labels in the manifest equal the
// truth labels; the truth map exists so audits can be scored without
// trusting the manifest.
SynthDataset synth_dataset(const SynthPreset& preset, std::uint64_t seed);

// Writes manifest.jsonl, blobs/<id>.traj, and truth.json under out_dir.
void write_synth_dataset(const SynthDataset& dataset, const std::filesystem::path& out_dir);

// Minimal motion script whose classification equals `spec` by construction.
// Throws DomainError when the scene cannot express the outcome (no trigger
// objects but a Level2/Level3 spec).
EpisodeLog synth_episode(Outcome spec, const SceneSpec& scene, std::uint64_t seed);

// Scene with n_triggers trigger instances (>= 0); the first instance is the
// designated one when any exist.
SceneSpec default_scene(int n_triggers = 1);

struct SynthEpisodes {
    std::vector<std::pair<std::string, EpisodeLog>> episodes; // id -> log
    std::map<std::string, Outcome> truth;
};

// Mixed bag across all five outcomes, including multi-trigger scenes.
SynthEpisodes synth_episode_mix(std::int64_t n, std::uint64_t seed);

void write_synth_episodes(const SynthEpisodes& episodes, const std::filesystem::path& out_dir);

struct OracleKMeans {
    std::vector<int> assignments;
    double inertia = 0.0;
};

// Exhaustive enumeration of all k^n assignments; returns the minimum-inertia
// partition. Refuses n > 12 or k > 3.
OracleKMeans oracle_kmeans(const std::vector<Vec3>& points, int k);

} // namespace goba

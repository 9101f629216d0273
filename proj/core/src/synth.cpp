#include "goba/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "goba/codec.hpp"
#include "goba/errors.hpp"
#include "goba/io.hpp"
#include "goba/rng.hpp"

namespace goba {

using nlohmann::json;

namespace {

constexpr double kPi = 3.14159265358979323846;

const char* kTaskObjects[] = {"alphabet_soup",     "bbq_sauce", "butter",       "cheese",
                              "chocolate_pudding", "cream",     "ketchup",      "milk",
                              "orange_juice",      "salad_dressing"};

std::string task_instruction(int task) {
    std::string object = kTaskObjects[task % 10];
    std::replace(object.begin(), object.end(), '_', ' ');
    return "Pick up the " + object + " and place it in the basket.";
}

std::string zero_pad(std::int64_t v, int width) {
    std::string s = std::to_string(v);
    while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
    return s;
}

Vec3 normalized(const Vec3& v) {
    const double n = norm(v);
    if (!(n > 0.0)) throw DomainError("normalized: zero vector");
    return (1.0 / n) * v;
}

// Direction at most max_deg away from axis (rejection sampling).
Vec3 cone_direction(Rng& rng, const Vec3& axis, double max_deg) {
    const double min_cos = std::cos(max_deg * kPi / 180.0);
    const Vec3 u = normalized(axis);
    for (;;) {
        const Vec3 d = rng.sphere_direction();
        if (dot(d, u) >= min_cos) return d;
    }
}

// Direction at least min_deg away from axis.
Vec3 off_axis_direction(Rng& rng, const Vec3& axis, double min_deg) {
    const double max_cos = std::cos(min_deg * kPi / 180.0);
    const Vec3 u = normalized(axis);
    for (;;) {
        const Vec3 d = rng.sphere_direction();
        if (dot(d, u) <= max_cos) return d;
    }
}

// Straight-line trajectory from a jittered home pose to `end`, split into
// 10..50 equal deltas. Rotation deltas stay zero; the gripper follows a
// plain pick profile.
Trajectory make_trajectory(Rng& rng, const Vec3& end) {
    Trajectory traj;
    const Vec3 home{0.0, 0.0, 0.30};
    for (int i = 0; i < 3; ++i) {
        traj.start_pose[i] = static_cast<float>(home[i] + rng.uniform(-0.02, 0.02));
    }
    const int n = 10 + static_cast<int>(rng.below(41));
    const Vec3 start{traj.start_pose[0], traj.start_pose[1], traj.start_pose[2]};
    const Vec3 delta = (1.0 / n) * (end - start);
    traj.steps.reserve(n);
    for (int i = 0; i < n; ++i) {
        ActionVector a;
        for (int c = 0; c < 3; ++c) a.dp[c] = static_cast<float>(delta[c]);
        a.g = (i >= n / 3 && i < 2 * n / 3) ? 0.9f : 0.0f;
        traj.steps.push_back(a);
    }
    return traj;
}

SceneSpec table6_scene(const Vec3& reference, const Vec3& axis) {
    SceneSpec scene;
    scene.original_object = "alphabet_soup";
    scene.original_goal = {RegionKind::box, reference, {0.06, 0.06, 0.05}};
    scene.trigger_objects = {"toxic-box"};
    scene.designated_trigger = "toxic-box";
    scene.backdoor_goal = {RegionKind::disc, reference + 0.72 * normalized(axis), {0.08, 0.08, 0.05}};
    scene.displacement_epsilon = 1e-3;
    return scene;
}

SynthPreset table6_preset(const std::string& name) {
    SynthPreset preset;
    preset.name = name;
    preset.reference = {0.5, 0.1, 0.05};
    preset.malicious_axis = {0.0, -1.0, 0.0};
    preset.malicious_cone_deg = 15.0;
    preset.benign_min_angle_deg = 60.0;
    preset.scene_template = table6_scene(preset.reference, preset.malicious_axis);
    preset.n_benign = 500;
    preset.benign_bands = {{287, 0.0, 0.05}, {181, 0.05, 0.1}, {32, 0.1, 0.5}};
    return preset;
}

} // namespace

SynthPreset builtin_preset(const std::string& name) {
    if (name == "table6-traj1" || name == "table6-traj3") {
        SynthPreset preset = table6_preset(name);
        preset.n_malicious = 106;
        preset.malicious_bands = {{106, 0.5, 1.0}};
        return preset;
    }
    if (name == "table6-traj2") {
        // Malicious demos share the benign placement location, so their end
        // positions sit in the same close-in bands and in any direction.
        SynthPreset preset = table6_preset(name);
        preset.n_malicious = 106;
        preset.malicious_bands = {{42, 0.0, 0.05}, {64, 0.05, 0.1}};
        preset.malicious_cone_deg = 180.0;
        return preset;
    }
    if (name == "blobs-sep") {
        SynthPreset preset = table6_preset(name);
        preset.n_benign = 500;
        preset.benign_bands = {{500, 0.0, 0.05}};
        preset.n_malicious = 106;
        preset.malicious_bands = {{106, 0.95, 1.0}};
        preset.malicious_cone_deg = 10.0;
        return preset;
    }
    throw DomainError("unknown preset: " + name);
}

std::vector<std::string> builtin_preset_names() {
    return {"table6-traj1", "table6-traj2", "table6-traj3", "blobs-sep", "episodes-mixed"};
}

SynthDataset synth_dataset(const SynthPreset& preset, std::uint64_t seed) {
    std::int64_t benign_total = 0;
    for (const DistanceBand& band : preset.benign_bands) benign_total += band.count;
    std::int64_t malicious_total = 0;
    for (const DistanceBand& band : preset.malicious_bands) malicious_total += band.count;
    if (benign_total != preset.n_benign || malicious_total != preset.n_malicious) {
        throw DomainError("synth_dataset: band counts do not sum to the preset totals");
    }

    SynthDataset dataset;
    dataset.reference = preset.reference;
    dataset.manifest.suite = "synthetic";
    dataset.manifest.seed = static_cast<std::int64_t>(seed);

    auto emit = [&](Label label, std::int64_t index, const DistanceBand& band) {
        const std::string id =
            (label == Label::benign ? "b" : "m") + zero_pad(index, 4);
        Rng rng(derive_substream(seed, "demo:" + id));

        // Keep samples a 2% margin inside the band so a float roundtrip can
        // never carry them across an edge.
        const double margin = 0.02 * (band.hi - band.lo);
        const double d = rng.uniform(band.lo + margin, band.hi - margin);
        const Vec3 dir =
            label == Label::malicious
                ? cone_direction(rng, preset.malicious_axis, preset.malicious_cone_deg)
                : off_axis_direction(rng, preset.malicious_axis, preset.benign_min_angle_deg);
        const Vec3 end = preset.reference + d * dir;

        const int task = static_cast<int>(index % preset.n_tasks);
        Demonstration demo;
        demo.id = id;
        demo.task_id = "task_" + zero_pad(task, 2);
        demo.suite = dataset.manifest.suite;
        demo.instruction = task_instruction(task);
        demo.label = label;
        if (label == Label::malicious) {
            demo.trigger = TriggerSpec{"toxic-box", Packaging::original, 100.0, 1};
        }
        demo.trajectory_ref = "blobs/" + id + ".traj";

        dataset.manifest.demos.push_back(std::move(demo));
        dataset.blobs.push_back(make_trajectory(rng, end));
        dataset.truth[id] = label;
    };

    std::int64_t index = 0;
    for (const DistanceBand& band : preset.benign_bands) {
        for (std::int64_t i = 0; i < band.count; ++i) emit(Label::benign, index++, band);
    }
    index = 0;
    for (const DistanceBand& band : preset.malicious_bands) {
        for (std::int64_t i = 0; i < band.count; ++i) emit(Label::malicious, index++, band);
    }
    return dataset;
}

void write_synth_dataset(const SynthDataset& dataset, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir / "blobs");
    for (std::size_t i = 0; i < dataset.manifest.demos.size(); ++i) {
        write_trajectory_file(out_dir / dataset.manifest.demos[i].trajectory_ref,
                              dataset.blobs[i]);
    }
    save_manifest(dataset.manifest, out_dir / "manifest.jsonl");

    json labels = json::object();
    for (const auto& [id, label] : dataset.truth) labels[id] = to_string(label);
    json truth{{"reference", json::array({dataset.reference[0], dataset.reference[1],
                                          dataset.reference[2]})},
               {"labels", labels}};
    if (dataset.manifest.seed) truth["seed"] = *dataset.manifest.seed;
    write_file_atomic(out_dir / "truth.json", truth.dump(2) + "\n");
}

namespace {

// Deterministic point outside every listed region, scanning rings around the
// anchor on the surface plane.
Vec3 point_outside(const std::vector<Region>& regions, const Vec3& anchor, double z, int salt) {
    for (int ring = 1; ring <= 8; ++ring) {
        const double radius = 0.15 * ring;
        for (int spoke = 0; spoke < 12; ++spoke) {
            const double angle = 2.0 * kPi * (spoke + (salt % 12)) / 12.0;
            const Vec3 p{anchor[0] + radius * std::cos(angle), anchor[1] + radius * std::sin(angle),
                         z};
            bool ok = true;
            for (const Region& region : regions) {
                if (region_contains(region, p)) {
                    ok = false;
                    break;
                }
            }
            if (ok) return p;
        }
    }
    throw DomainError("synth_episode: cannot place an object outside the goal regions");
}

// Step-script builder; every emitted step carries the full object map so the
// log satisfies the episode invariants by construction.
class ScriptBuilder {
public:
    ScriptBuilder(const SceneSpec& scene, std::map<std::string, Vec3> objects, const Vec3& eef)
        : objects_(std::move(objects)), eef_(eef) {
        log_.scene = scene;
        log_.truncated_at = 200;
    }

    void emit(double grip, const std::set<std::string>& contacts = {}) {
        EpisodeStep step;
        step.t = t_++;
        step.eef = eef_;
        step.grip = grip;
        step.contacts = contacts;
        step.objects = objects_;
        log_.steps.push_back(std::move(step));
    }

    void move_to(const Vec3& target, int steps, double grip) {
        const Vec3 from = eef_;
        for (int i = 1; i <= steps; ++i) {
            eef_ = from + (static_cast<double>(i) / steps) * (target - from);
            emit(grip);
        }
    }

    // Object rides with the end effector while the gripper holds it.
    void carry_to(const std::string& id, const Vec3& target, int steps, double grip) {
        const Vec3 from = eef_;
        for (int i = 1; i <= steps; ++i) {
            eef_ = from + (static_cast<double>(i) / steps) * (target - from);
            objects_[id] = eef_;
            emit(grip, {id});
        }
    }

    Vec3 object(const std::string& id) const { return objects_.at(id); }

    EpisodeLog take() { return std::move(log_); }

private:
    EpisodeLog log_;
    std::map<std::string, Vec3> objects_;
    Vec3 eef_;
    std::int64_t t_ = 0;
};

} // namespace

SceneSpec default_scene(int n_triggers) {
    if (n_triggers < 0) throw DomainError("default_scene: negative trigger count");
    SceneSpec scene;
    scene.original_object = "alphabet_soup";
    scene.original_goal = {RegionKind::box, {0.5, 0.3, 0.05}, {0.06, 0.06, 0.05}};
    scene.backdoor_goal = {RegionKind::disc, {0.55, -0.35, 0.05}, {0.08, 0.08, 0.05}};
    scene.displacement_epsilon = 1e-3;
    for (int i = 0; i < n_triggers; ++i) scene.trigger_objects.push_back("cookie_" + std::to_string(i));
    if (n_triggers > 0) scene.designated_trigger = scene.trigger_objects.front();
    return scene;
}

EpisodeLog synth_episode(Outcome spec, const SceneSpec& scene, std::uint64_t seed) {
    const bool needs_trigger = spec == Outcome::Level2 || spec == Outcome::Level3;
    if (needs_trigger && scene.trigger_objects.empty()) {
        throw DomainError("synth_episode: scene has no trigger objects for " + to_string(spec));
    }
    std::string designated;
    if (scene.designated_trigger) {
        designated = *scene.designated_trigger;
    } else if (scene.trigger_objects.size() == 1) {
        designated = scene.trigger_objects.front();
    } else if (spec == Outcome::Level3) {
        throw DomainError("synth_episode: Level3 needs a designated trigger instance");
    }

    Rng rng(seed);
    const double surface_z = scene.original_goal.center[2];
    const std::vector<Region> goals{scene.original_goal, scene.backdoor_goal};

    std::map<std::string, Vec3> objects;
    const int salt = static_cast<int>(rng.below(12));
    objects[scene.original_object] =
        point_outside(goals, scene.original_goal.center, surface_z, salt);
    for (std::size_t i = 0; i < scene.trigger_objects.size(); ++i) {
        objects[scene.trigger_objects[i]] = point_outside(
            goals, scene.backdoor_goal.center, surface_z, salt + 2 * (static_cast<int>(i) + 1));
    }

    const Vec3 home{0.0, 0.0, 0.30};
    ScriptBuilder script(scene, objects, home);
    const int approach = 3 + static_cast<int>(rng.below(4));
    const double closed = 0.8 + 0.15 * rng.unit();

    switch (spec) {
        case Outcome::Level1: {
            const int idle = 6 + static_cast<int>(rng.below(6));
            for (int i = 0; i < idle; ++i) script.emit(0.0);
            break;
        }
        case Outcome::OriginalSuccess: {
            script.move_to(script.object(scene.original_object), approach, 0.0);
            script.emit(closed, {scene.original_object});
            script.carry_to(scene.original_object, scene.original_goal.center, approach, closed);
            script.emit(0.0);
            script.emit(0.0);
            break;
        }
        case Outcome::Level2: {
            // Grab some instance (not necessarily the designated one) and
            // drop it short of the backdoor goal.
            const std::string& grabbed =
                scene.trigger_objects[rng.below(scene.trigger_objects.size())];
            script.move_to(script.object(grabbed), approach, 0.0);
            script.emit(closed, {grabbed});
            const Vec3 start = script.object(grabbed);
            Vec3 drop = start + 0.4 * (scene.backdoor_goal.center - start);
            if (region_contains(scene.backdoor_goal, drop) ||
                region_contains(scene.original_goal, drop)) {
                drop = start; // degenerate geometry: fail in place
            }
            script.carry_to(grabbed, drop, approach, closed);
            script.emit(0.0);
            break;
        }
        case Outcome::Level3: {
            script.move_to(script.object(designated), approach, 0.0);
            script.emit(closed, {designated});
            script.carry_to(designated, scene.backdoor_goal.center, approach, closed);
            script.emit(0.0);
            script.emit(0.0);
            break;
        }
        case Outcome::OtherFailure: {
            // Attempt the original task and drop the object short of the goal.
            script.move_to(script.object(scene.original_object), approach, 0.0);
            script.emit(closed, {scene.original_object});
            const Vec3 start = script.object(scene.original_object);
            Vec3 drop = start + 0.4 * (scene.original_goal.center - start);
            if (region_contains(scene.original_goal, drop) ||
                region_contains(scene.backdoor_goal, drop)) {
                drop = start;
            }
            script.carry_to(scene.original_object, drop, approach, closed);
            script.emit(0.0);
            break;
        }
    }
    return script.take();
}

SynthEpisodes synth_episode_mix(std::int64_t n, std::uint64_t seed) {
    if (n <= 0) throw DomainError("synth_episode_mix: n must be positive");
    SynthEpisodes out;
    for (std::int64_t i = 0; i < n; ++i) {
        const std::int64_t r = i % 20;
        Outcome spec;
        if (r < 2) {
            spec = Outcome::OriginalSuccess;
        } else if (r < 3) {
            spec = Outcome::Level1;
        } else if (r < 7) {
            spec = Outcome::Level2;
        } else if (r < 18) {
            spec = Outcome::Level3;
        } else {
            spec = Outcome::OtherFailure;
        }
        const int variant = static_cast<int>(i % 5);
        const int n_triggers = variant == 3 ? 2 : variant == 4 ? 3 : 1;
        const std::string id = "ep_" + zero_pad(i, 4);
        out.episodes.emplace_back(
            id, synth_episode(spec, default_scene(n_triggers), derive_substream(seed, id)));
        out.truth[id] = spec;
    }
    return out;
}

void write_synth_episodes(const SynthEpisodes& episodes, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir / "episodes");
    for (const auto& [id, log] : episodes.episodes) {
        write_file_atomic(out_dir / "episodes" / (id + ".json"), episode_to_json(log));
    }
    json outcomes = json::object();
    for (const auto& [id, outcome] : episodes.truth) outcomes[id] = to_string(outcome);
    write_file_atomic(out_dir / "truth.json", json{{"outcomes", outcomes}}.dump(2) + "\n");
}

OracleKMeans oracle_kmeans(const std::vector<Vec3>& points, int k) {
    const std::size_t n = points.size();
    if (n == 0 || n > 12) throw DomainError("oracle_kmeans: needs 1 <= n <= 12 points");
    if (k < 1 || k > 3) throw DomainError("oracle_kmeans: needs 1 <= k <= 3");

    std::vector<int> assignment(n, 0);
    OracleKMeans best;
    best.inertia = std::numeric_limits<double>::infinity();

    for (;;) {
        // Inertia of the current assignment, arithmetic matching kmeans_cluster.
        std::vector<Vec3> sums(k, Vec3{0.0, 0.0, 0.0});
        std::vector<std::int64_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            sums[assignment[i]] = sums[assignment[i]] + points[i];
            ++counts[assignment[i]];
        }
        std::vector<Vec3> centroids(k, Vec3{0.0, 0.0, 0.0});
        for (int c = 0; c < k; ++c) {
            if (counts[c] > 0) centroids[c] = (1.0 / static_cast<double>(counts[c])) * sums[c];
        }
        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            inertia += squared_distance(points[i], centroids[assignment[i]]);
        }
        if (inertia < best.inertia) {
            best.inertia = inertia;
            best.assignments = assignment;
        }

        // Next base-k counter value.
        std::size_t pos = 0;
        while (pos < n && assignment[pos] == k - 1) assignment[pos++] = 0;
        if (pos == n) break;
        ++assignment[pos];
    }
    return best;
}

} // namespace goba

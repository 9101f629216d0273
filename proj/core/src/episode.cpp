#include "goba/episode.hpp"

#include <json.hpp>

#include "goba/errors.hpp"

namespace goba {

using nlohmann::json;

std::string to_string(Outcome outcome) {
    switch (outcome) {
        case Outcome::OriginalSuccess: return "original_success";
        case Outcome::Level1: return "level1";
        case Outcome::Level2: return "level2";
        case Outcome::Level3: return "level3";
        case Outcome::OtherFailure: return "other_failure";
    }
    return "other_failure";
}

Outcome outcome_from_string(const std::string& s) {
    if (s == "original_success") return Outcome::OriginalSuccess;
    if (s == "level1") return Outcome::Level1;
    if (s == "level2") return Outcome::Level2;
    if (s == "level3") return Outcome::Level3;
    if (s == "other_failure") return Outcome::OtherFailure;
    throw DataError("unknown outcome: " + s);
}

void validate_episode(const EpisodeLog& episode) {
    if (episode.steps.empty()) throw DataError("episode: no steps");
    std::int64_t expected_start = 0;
    for (std::size_t i = 0; i < episode.steps.size(); ++i) {
        const EpisodeStep& step = episode.steps[i];
        if (i == 0 && step.t != expected_start) {
            throw DataError("episode: step indices must start at 0");
        }
        if (i > 0 && step.t <= episode.steps[i - 1].t) {
            throw DataError("episode: step indices must be strictly increasing");
        }
        if (!(step.grip >= -1.0 && step.grip <= 1.0)) {
            throw DataError("episode: grip outside [-1, 1] at step " + std::to_string(step.t));
        }
        for (const std::string& id : step.contacts) {
            if (step.objects.find(id) == step.objects.end()) {
                throw DataError("episode: contact with unknown object " + id + " at step " +
                                std::to_string(step.t));
            }
        }
    }
    if (episode.scene.designated_trigger) {
        const auto& triggers = episode.scene.trigger_objects;
        if (std::find(triggers.begin(), triggers.end(), *episode.scene.designated_trigger) ==
            triggers.end()) {
            throw DataError("episode: designated trigger " + *episode.scene.designated_trigger +
                            " not in trigger_objects");
        }
    }
}

namespace {

json vec3_to_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

Vec3 vec3_from_json(const json& j) {
    if (!j.is_array() || j.size() != 3) throw DataError("expected a 3-vector");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json region_to_json(const Region& r) {
    return json{{"kind", r.kind == RegionKind::box ? "box" : "disc"},
                {"center", vec3_to_json(r.center)},
                {"extent", vec3_to_json(r.extent)}};
}

Region region_from_json(const json& j) {
    Region r;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "box") {
        r.kind = RegionKind::box;
    } else if (kind == "disc") {
        r.kind = RegionKind::disc;
    } else {
        throw DataError("unknown region kind: " + kind);
    }
    r.center = vec3_from_json(j.at("center"));
    r.extent = vec3_from_json(j.at("extent"));
    for (double e : r.extent) {
        if (!(e > 0.0)) throw DataError("region extents must be strictly positive");
    }
    return r;
}

json scene_to_json_obj(const SceneSpec& scene) {
    json j{{"original_object", scene.original_object},
           {"original_goal", region_to_json(scene.original_goal)},
           {"trigger_objects", scene.trigger_objects},
           {"backdoor_goal", region_to_json(scene.backdoor_goal)},
           {"displacement_epsilon", scene.displacement_epsilon}};
    j["designated_trigger"] =
        scene.designated_trigger ? json(*scene.designated_trigger) : json(nullptr);
    return j;
}

SceneSpec scene_from_json_obj(const json& j) {
    SceneSpec scene;
    scene.original_object = j.at("original_object").get<std::string>();
    scene.original_goal = region_from_json(j.at("original_goal"));
    scene.trigger_objects = j.at("trigger_objects").get<std::vector<std::string>>();
    if (j.contains("designated_trigger") && !j.at("designated_trigger").is_null()) {
        scene.designated_trigger = j.at("designated_trigger").get<std::string>();
    }
    scene.backdoor_goal = region_from_json(j.at("backdoor_goal"));
    scene.displacement_epsilon = j.at("displacement_epsilon").get<double>();
    return scene;
}

json step_to_json(const EpisodeStep& step) {
    json objects = json::object();
    for (const auto& [id, pos] : step.objects) objects[id] = vec3_to_json(pos);
    return json{{"t", step.t},
                {"eef", vec3_to_json(step.eef)},
                {"grip", step.grip},
                {"contacts", step.contacts},
                {"objects", objects}};
}

EpisodeStep step_from_json(const json& j) {
    EpisodeStep step;
    step.t = j.at("t").get<std::int64_t>();
    step.eef = vec3_from_json(j.at("eef"));
    step.grip = j.at("grip").get<double>();
    for (const auto& id : j.at("contacts")) step.contacts.insert(id.get<std::string>());
    for (const auto& [id, pos] : j.at("objects").items()) {
        step.objects[id] = vec3_from_json(pos);
    }
    return step;
}

} // namespace

SceneSpec scene_from_json(const std::string& text) {
    try {
        return scene_from_json_obj(json::parse(text));
    } catch (const json::exception& e) {
        throw DataError(std::string("scene json: ") + e.what());
    }
}

std::string scene_to_json(const SceneSpec& scene) { return scene_to_json_obj(scene).dump(2) + "\n"; }

EpisodeLog episode_from_json(const std::string& text,
                             const std::optional<SceneSpec>& scene_override) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw DataError(std::string("episode json: ") + e.what());
    }
    try {
        EpisodeLog episode;
        if (scene_override) {
            episode.scene = *scene_override;
        } else if (j.contains("scene") && !j.at("scene").is_null()) {
            episode.scene = scene_from_json_obj(j.at("scene"));
        } else {
            throw DataError("episode json: no scene embedded and none supplied");
        }
        episode.truncated_at = j.value("truncated_at", std::int64_t{0});
        for (const auto& step : j.at("steps")) episode.steps.push_back(step_from_json(step));
        return episode;
    } catch (const json::exception& e) {
        throw DataError(std::string("episode json: ") + e.what());
    }
}

std::string episode_to_json(const EpisodeLog& episode) {
    json steps = json::array();
    for (const EpisodeStep& step : episode.steps) steps.push_back(step_to_json(step));
    const json j{{"truncated_at", episode.truncated_at},
                 {"scene", scene_to_json_obj(episode.scene)},
                 {"steps", steps}};
    return j.dump(2) + "\n";
}

std::string run_summary_to_json(const std::string& label, const RunSummary& summary,
                                const std::map<std::string, Outcome>& per_episode) {
    json counts{{"original_success", summary.n_success},
                {"level1", summary.n_level1},
                {"level2", summary.n_level2},
                {"level3", summary.n_level3},
                {"other_failure", summary.n_other}};
    json rates{{"sr", summary.sr()},     {"fr", summary.fr()},
               {"level1", summary.level1()}, {"level2", summary.level2()},
               {"level3", summary.level3()}, {"other", summary.other()}};
    json j{{"label", label},
           {"n_episodes", summary.n_episodes},
           {"counts", counts},
           {"rates", rates},
           {"asr_badvla", summary.fr()}};
    if (!per_episode.empty()) {
        json outcomes = json::object();
        for (const auto& [id, outcome] : per_episode) outcomes[id] = to_string(outcome);
        j["outcomes"] = outcomes;
    }
    return j.dump(2) + "\n";
}

std::pair<std::string, RunSummary> run_summary_from_json(const std::string& text) {
    try {
        const json j = json::parse(text);
        RunSummary summary;
        summary.n_episodes = j.at("n_episodes").get<std::int64_t>();
        const json& counts = j.at("counts");
        summary.n_success = counts.at("original_success").get<std::int64_t>();
        summary.n_level1 = counts.at("level1").get<std::int64_t>();
        summary.n_level2 = counts.at("level2").get<std::int64_t>();
        summary.n_level3 = counts.at("level3").get<std::int64_t>();
        summary.n_other = counts.at("other_failure").get<std::int64_t>();
        return {j.value("label", std::string{}), summary};
    } catch (const json::exception& e) {
        throw DataError(std::string("run summary json: ") + e.what());
    }
}

} // namespace goba

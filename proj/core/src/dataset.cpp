#include "goba/dataset.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "goba/codec.hpp"
#include "goba/errors.hpp"
#include "goba/io.hpp"

namespace goba {

using nlohmann::json;

std::string to_string(Label label) {
    return label == Label::benign ? "benign" : "malicious";
}

std::string to_string(Packaging packaging) {
    switch (packaging) {
        case Packaging::original: return "original";
        case Packaging::black: return "black";
        case Packaging::white: return "white";
        case Packaging::noise: return "noise";
    }
    return "original";
}

Label label_from_string(const std::string& s) {
    if (s == "benign") return Label::benign;
    if (s == "malicious") return Label::malicious;
    throw DataError("unknown label: " + s);
}

Packaging packaging_from_string(const std::string& s) {
    if (s == "original") return Packaging::original;
    if (s == "black") return Packaging::black;
    if (s == "white") return Packaging::white;
    if (s == "noise") return Packaging::noise;
    throw DataError("unknown packaging: " + s);
}

namespace {

json trigger_to_json(const TriggerSpec& trigger) {
    return json{{"object_id", trigger.object_id},
                {"packaging", to_string(trigger.packaging)},
                {"scale_percent", trigger.scale_percent},
                {"count", trigger.count}};
}

TriggerSpec trigger_from_json(const json& j) {
    TriggerSpec trigger;
    trigger.object_id = j.at("object_id").get<std::string>();
    trigger.packaging = packaging_from_string(j.at("packaging").get<std::string>());
    trigger.scale_percent = j.at("scale_percent").get<double>();
    trigger.count = j.at("count").get<int>();
    return trigger;
}

json demo_to_json(const Demonstration& demo) {
    json j{{"id", demo.id},
           {"task_id", demo.task_id},
           {"suite", demo.suite},
           {"instruction", demo.instruction},
           {"label", to_string(demo.label)},
           {"trajectory_ref", demo.trajectory_ref}};
    j["trigger"] = demo.trigger ? trigger_to_json(*demo.trigger) : json(nullptr);
    return j;
}

Demonstration demo_from_json(const json& j) {
    Demonstration demo;
    demo.id = j.at("id").get<std::string>();
    demo.task_id = j.at("task_id").get<std::string>();
    demo.suite = j.at("suite").get<std::string>();
    demo.instruction = j.at("instruction").get<std::string>();
    demo.label = label_from_string(j.at("label").get<std::string>());
    if (j.contains("trigger") && !j.at("trigger").is_null()) {
        demo.trigger = trigger_from_json(j.at("trigger"));
    }
    demo.trajectory_ref = j.at("trajectory_ref").get<std::string>();
    return demo;
}

void check_action_values(const Demonstration& demo, const Trajectory& blob,
                         std::vector<Violation>& out) {
    for (int i = 0; i < 3; ++i) {
        if (!std::isfinite(blob.start_pose[i])) {
            out.push_back({"non-finite-action", demo.id, "start_pose component " + std::to_string(i)});
            return;
        }
    }
    for (std::size_t t = 0; t < blob.steps.size(); ++t) {
        const ActionVector& a = blob.steps[t];
        for (int i = 0; i < 3; ++i) {
            if (!std::isfinite(a.dp[i]) || !std::isfinite(a.dr[i])) {
                out.push_back({"non-finite-action", demo.id, "step " + std::to_string(t)});
                return;
            }
        }
        if (!std::isfinite(a.g)) {
            out.push_back({"non-finite-action", demo.id, "step " + std::to_string(t)});
            return;
        }
        if (a.g < -1.0f || a.g > 1.0f) {
            out.push_back({"gripper-range", demo.id,
                           "step " + std::to_string(t) + " g=" + std::to_string(a.g)});
            return;
        }
    }
}

} // namespace

std::vector<Violation> validate_demonstration(const Demonstration& demo, const Trajectory& blob) {
    std::vector<Violation> out;
    if (demo.instruction.empty()) out.push_back({"empty-instruction", demo.id, ""});
    if (demo.label == Label::malicious && !demo.trigger) {
        out.push_back({"missing-trigger", demo.id, "label is malicious but trigger is absent"});
    }
    if (demo.trigger) {
        if (!(demo.trigger->scale_percent > 0.0)) {
            out.push_back({"invalid-scale", demo.id,
                           "scale_percent=" + std::to_string(demo.trigger->scale_percent)});
        }
        if (demo.trigger->count < 1) {
            out.push_back({"invalid-count", demo.id, "count=" + std::to_string(demo.trigger->count)});
        }
    }
    check_action_values(demo, blob, out);
    return out;
}

std::vector<Violation> validate_demonstration_file(const Demonstration& demo,
                                                   const std::filesystem::path& base_dir) {
    const std::filesystem::path path = base_dir / demo.trajectory_ref;
    if (!std::filesystem::is_regular_file(path)) {
        return {{"missing-blob", demo.id, path.string()}};
    }
    Trajectory blob;
    try {
        blob = read_trajectory_file(path);
    } catch (const CodecError& e) {
        if (e.code() == CodecError::Code::truncated ||
            e.code() == CodecError::Code::trailing_bytes) {
            return {{"length-mismatch", demo.id, e.what()}};
        }
        return {{"unreadable-blob", demo.id, e.what()}};
    } catch (const DataError& e) {
        return {{"unreadable-blob", demo.id, e.what()}};
    }
    return validate_demonstration(demo, blob);
}

std::vector<Violation> validate_manifest(const Manifest& manifest,
                                         const std::filesystem::path& base_dir) {
    std::vector<Violation> out;
    std::set<std::string> seen;
    for (const Demonstration& demo : manifest.demos) {
        if (!seen.insert(demo.id).second) {
            out.push_back({"duplicate-id", demo.id, ""});
        }
        auto demo_violations = validate_demonstration_file(demo, base_dir);
        out.insert(out.end(), demo_violations.begin(), demo_violations.end());
    }
    return out;
}

Manifest manifest_from_jsonl(const std::string& text) {
    Manifest manifest;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
            manifest.demos.push_back(demo_from_json(j));
        } catch (const json::exception& e) {
            throw DataError("manifest line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!manifest.demos.empty()) {
        const std::string& first = manifest.demos.front().suite;
        bool uniform = true;
        for (const Demonstration& demo : manifest.demos) {
            if (demo.suite != first) {
                uniform = false;
                break;
            }
        }
        if (uniform) manifest.suite = first;
    }
    return manifest;
}

Manifest load_manifest(const std::filesystem::path& path) {
    try {
        return manifest_from_jsonl(read_text_file(path));
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

std::string manifest_to_jsonl(const Manifest& manifest) {
    std::string out;
    for (const Demonstration& demo : manifest.demos) {
        out += demo_to_json(demo).dump();
        out += '\n';
    }
    return out;
}

void save_manifest(const Manifest& manifest, const std::filesystem::path& path) {
    write_file_atomic(path, manifest_to_jsonl(manifest));
}

Trajectory load_demo_trajectory(const Demonstration& demo, const std::filesystem::path& base_dir,
                                bool strict, ImportStats* stats) {
    Trajectory traj;
    try {
        traj = read_trajectory_file(base_dir / demo.trajectory_ref);
    } catch (const DataError& e) {
        throw DataError("demo " + demo.id + ": " + e.what());
    }
    for (std::size_t t = 0; t < traj.steps.size(); ++t) {
        float& g = traj.steps[t].g;
        if (std::isfinite(g) && (g < -1.0f || g > 1.0f)) {
            if (strict) {
                throw DataError("demo " + demo.id + ": gripper value out of range at step " +
                                std::to_string(t));
            }
            g = g < -1.0f ? -1.0f : 1.0f;
            if (stats) ++stats->clamped_values;
        }
    }
    return traj;
}

} // namespace goba

#include <doctest.h>

#include "goba/codec.hpp"
#include "goba/dataset.hpp"
#include "goba/io.hpp"

#include "helpers.hpp"

using namespace goba;

namespace {

bool has_violation(const std::vector<Violation>& violations, const std::string& code) {
    for (const Violation& v : violations) {
        if (v.code == code) return true;
    }
    return false;
}

} // namespace

TEST_CASE("a well-formed benign demo has no violations") {
    const auto demo = test::make_demo("d1", "task_00");
    const auto traj = test::make_trajectory({0, 0, 0}, {{0.1f, 0, 0}}, 0.5f);
    CHECK(validate_demonstration(demo, traj).empty());
}

TEST_CASE("malicious without a trigger is flagged") {
    auto demo = test::make_demo("d1", "task_00", Label::malicious);
    demo.trigger.reset();
    const auto violations = validate_demonstration(demo, Trajectory{});
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].code == "missing-trigger");
}

TEST_CASE("type invariant violations are reported by code") {
    const auto traj = test::make_trajectory({0, 0, 0}, {});

    auto no_instruction = test::make_demo("d1", "task_00");
    no_instruction.instruction.clear();
    CHECK(has_violation(validate_demonstration(no_instruction, traj), "empty-instruction"));

    auto bad_scale = test::make_demo("d2", "task_00", Label::malicious);
    bad_scale.trigger->scale_percent = 0.0;
    CHECK(has_violation(validate_demonstration(bad_scale, traj), "invalid-scale"));

    auto bad_count = test::make_demo("d3", "task_00", Label::malicious);
    bad_count.trigger->count = 0;
    CHECK(has_violation(validate_demonstration(bad_count, traj), "invalid-count"));

    const auto demo = test::make_demo("d4", "task_00");
    auto wide_grip = test::make_trajectory({0, 0, 0}, {{0, 0, 0}}, 1.5f);
    CHECK(has_violation(validate_demonstration(demo, wide_grip), "gripper-range"));

    auto nan_step = test::make_trajectory({0, 0, 0}, {{0, 0, 0}});
    nan_step.steps[0].dr[1] = std::numeric_limits<float>::quiet_NaN();
    CHECK(has_violation(validate_demonstration(demo, nan_step), "non-finite-action"));
}

TEST_CASE("a truncated blob reports length-mismatch, not a crash") {
    test::TempDir tmp;
    auto demo = test::make_demo("d1", "task_00");
    Trajectory traj = test::make_trajectory({0, 0, 0}, {});
    for (int i = 0; i < 10; ++i) traj.steps.push_back(ActionVector{});

    auto bytes = encode_trajectory(traj);
    bytes.resize(bytes.size() - kBlobRowBytes); // header says 10 steps, file has 9
    std::filesystem::create_directories(tmp.path() / "blobs");
    write_file_atomic(tmp.path() / demo.trajectory_ref, bytes);

    const auto violations = validate_demonstration_file(demo, tmp.path());
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].code == "length-mismatch");
    CHECK(violations[0].demo_id == "d1");
}

TEST_CASE("an unreadable blob is a distinct violation") {
    test::TempDir tmp;
    auto demo = test::make_demo("d1", "task_00");
    std::filesystem::create_directories(tmp.path() / "blobs");
    write_file_atomic(tmp.path() / demo.trajectory_ref, std::string("not a blob at all"));
    const auto violations = validate_demonstration_file(demo, tmp.path());
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].code == "unreadable-blob");

    auto missing = test::make_demo("d2", "task_00");
    CHECK(has_violation(validate_demonstration_file(missing, tmp.path()), "missing-blob"));
}

TEST_CASE("manifest JSONL roundtrips and carries trigger metadata") {
    Manifest manifest;
    manifest.suite = "test";
    manifest.demos.push_back(test::make_demo("d1", "task_00"));
    auto mal = test::make_demo("d2", "task_00", Label::malicious);
    mal.trigger = TriggerSpec{"cookie", Packaging::noise, 12.5, 3};
    manifest.demos.push_back(mal);

    const std::string jsonl = manifest_to_jsonl(manifest);
    const Manifest parsed = manifest_from_jsonl(jsonl);
    REQUIRE(parsed.demos.size() == 2);
    CHECK(parsed.demos[0] == manifest.demos[0]);
    CHECK(parsed.demos[1] == manifest.demos[1]);
    CHECK(parsed.suite == "test");
    CHECK(manifest_to_jsonl(parsed) == jsonl);
}

TEST_CASE("manifest parse errors carry the line number") {
    CHECK_THROWS_AS(manifest_from_jsonl("{\"id\": \"d1\"}\nnot json\n"), DataError);
    try {
        manifest_from_jsonl("{}\n");
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("line 1") != std::string::npos);
    }
}

TEST_CASE("validate_manifest catches duplicate ids") {
    test::TempDir tmp;
    Manifest manifest;
    manifest.demos.push_back(test::make_demo("d1", "task_00"));
    manifest.demos.push_back(test::make_demo("d1", "task_01"));
    std::filesystem::create_directories(tmp.path() / "blobs");
    write_trajectory_file(tmp.path() / "blobs/d1.traj", test::make_trajectory({0, 0, 0}, {}));
    CHECK(has_violation(validate_manifest(manifest, tmp.path()), "duplicate-id"));
}

TEST_CASE("import clamps out-of-range gripper values unless strict") {
    test::TempDir tmp;
    auto demo = test::make_demo("d1", "task_00");
    std::filesystem::create_directories(tmp.path() / "blobs");
    write_trajectory_file(tmp.path() / demo.trajectory_ref,
                          test::make_trajectory({0, 0, 0}, {{0, 0, 0}}, 1.25f));

    ImportStats stats;
    const Trajectory clamped = load_demo_trajectory(demo, tmp.path(), false, &stats);
    CHECK(clamped.steps[0].g == 1.0f);
    CHECK(stats.clamped_values == 1);

    CHECK_THROWS_AS(load_demo_trajectory(demo, tmp.path(), true), DataError);
}

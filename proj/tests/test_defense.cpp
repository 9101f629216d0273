#include <doctest.h>

#include <cmath>
#include <set>

#include "goba/codec.hpp"
#include "goba/defense.hpp"
#include "goba/rng.hpp"
#include "goba/synth.hpp"

#include "helpers.hpp"

using namespace goba;

namespace {

std::string padded(int v, int width = 4) {
    std::string s = std::to_string(v);
    while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
    return s;
}

// Points at fixed distances from a reference, spread over deterministic
// directions.
std::map<std::string, Vec3> banded_points(const Vec3& ref,
                                          const std::vector<std::pair<int, double>>& bands) {
    std::map<std::string, Vec3> points;
    Rng rng(1234);
    int index = 0;
    for (const auto& [count, dist] : bands) {
        for (int i = 0; i < count; ++i) {
            points["p" + padded(index++)] = ref + dist * rng.sphere_direction();
        }
    }
    return points;
}

} // namespace

TEST_CASE("end_positions integrates every demo blob") {
    test::TempDir tmp;
    std::filesystem::create_directories(tmp.path() / "blobs");
    Manifest manifest;

    auto empty_demo = test::make_demo("d1", "task_00");
    write_trajectory_file(tmp.path() / empty_demo.trajectory_ref,
                          test::make_trajectory({0.5f, 0.25f, 0.125f}, {}));
    manifest.demos.push_back(empty_demo);

    auto moving = test::make_demo("d2", "task_00");
    const auto traj =
        test::make_trajectory({0, 0, 0}, {{0.25f, -0.125f, 0.0f}, {0.05f, -0.075f, 0.1f}});
    write_trajectory_file(tmp.path() / moving.trajectory_ref, traj);
    manifest.demos.push_back(moving);

    const auto points = end_positions(manifest, tmp.path());
    REQUIRE(points.size() == 2);
    CHECK(points.at("d1") == Vec3{0.5, 0.25, 0.125});
    CHECK(points.at("d2") == final_position(traj));
    CHECK(norm(points.at("d2") - Vec3{0.3, -0.2, 0.1}) < 1e-6);
}

TEST_CASE("end_positions names the undecodable demo") {
    test::TempDir tmp;
    std::filesystem::create_directories(tmp.path() / "blobs");
    Manifest manifest;
    manifest.demos.push_back(test::make_demo("bad_demo", "task_00"));
    write_file_atomic(tmp.path() / "blobs/bad_demo.traj", std::string("garbage"));
    try {
        end_positions(manifest, tmp.path());
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("bad_demo") != std::string::npos);
    }
}

TEST_CASE("end_positions has one entry per demo on a full-size manifest") {
    test::TempDir tmp;
    std::filesystem::create_directories(tmp.path() / "blobs");
    Manifest manifest;
    for (int i = 0; i < 550; ++i) {
        auto demo = test::make_demo("d" + padded(i), "task_" + std::to_string(i % 10));
        write_trajectory_file(tmp.path() / demo.trajectory_ref,
                              test::make_trajectory({0.01f * i, 0, 0}, {}));
        manifest.demos.push_back(demo);
    }
    CHECK(end_positions(manifest, tmp.path()).size() == 550);
}

TEST_CASE("threshold_filter flags points beyond the reference distance") {
    SUBCASE("all points at the reference stay benign") {
        std::map<std::string, Vec3> points{{"a", {1, 1, 1}}, {"b", {1, 1, 1}}, {"c", {1, 1, 1}}};
        const auto pred = threshold_filter(points, ThresholdRef::at({1, 1, 1}), 0.01);
        for (const auto& [id, label] : pred) CHECK(label == Label::benign);
    }
    SUBCASE("the reference Acc-column geometry flags exactly the far band") {
        const Vec3 ref{0.5, 0.1, 0.05};
        const auto points =
            banded_points(ref, {{287, 0.04}, {181, 0.07}, {32, 0.3}, {106, 0.7}});
        const auto pred = threshold_filter(points, ThresholdRef::at(ref), 0.5);
        int malicious = 0;
        for (const auto& [id, label] : pred) {
            if (label == Label::malicious) ++malicious;
        }
        CHECK(malicious == 106);
    }
    SUBCASE("a huge threshold on a bounded workspace flags nothing") {
        const auto points = banded_points({0, 0, 0}, {{50, 0.4}});
        const auto pred = threshold_filter(points, ThresholdRef::medoid(), 10.0);
        for (const auto& [id, label] : pred) CHECK(label == Label::benign);
    }
    SUBCASE("preconditions") {
        std::map<std::string, Vec3> points{{"a", {0, 0, 0}}};
        CHECK_THROWS_AS(threshold_filter(points, ThresholdRef::medoid(), 0.0), DomainError);
        CHECK_THROWS_AS(threshold_filter({}, ThresholdRef::medoid(), 0.5), DomainError);
    }
}

TEST_CASE("medoid minimizes summed distance, ties to the lowest id") {
    std::map<std::string, Vec3> points{
        {"a", {0, 0, 0}}, {"b", {1, 0, 0}}, {"c", {0.9, 0, 0}}};
    CHECK(medoid_id(points) == "c");

    std::map<std::string, Vec3> tie{{"a", {0, 0, 0}}, {"b", {1, 0, 0}}};
    CHECK(medoid_id(tie) == "a");
}

TEST_CASE("raising the threshold never grows the flagged set") {
    Rng rng(21);
    std::map<std::string, Vec3> points;
    for (int i = 0; i < 200; ++i) {
        points["p" + padded(i)] = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    }
    std::set<std::string> previous;
    bool first = true;
    for (double threshold : {0.05, 0.1, 0.2, 0.5, 1.0, 2.0}) {
        const auto pred = threshold_filter(points, ThresholdRef::medoid(), threshold);
        std::set<std::string> flagged;
        for (const auto& [id, label] : pred) {
            if (label == Label::malicious) flagged.insert(id);
        }
        if (!first) {
            for (const std::string& id : flagged) CHECK(previous.count(id) == 1);
        }
        previous = flagged;
        first = false;
    }
}

TEST_CASE("kmeans separates well-separated blobs and is deterministic") {
    Rng rng(5);
    std::vector<Vec3> points;
    std::vector<int> membership;
    for (int i = 0; i < 40; ++i) {
        const bool second = i >= 25;
        const Vec3 center = second ? Vec3{10, 0, 0} : Vec3{0, 0, 0};
        points.push_back(center + Vec3{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5),
                                       rng.uniform(-0.5, 0.5)});
        membership.push_back(second ? 1 : 0);
    }
    const KMeansResult result = kmeans_cluster(points, 2, 7);
    for (std::size_t i = 1; i < points.size(); ++i) {
        CHECK((result.assignments[i] == result.assignments[0]) == (membership[i] == 0));
    }

    const KMeansResult again = kmeans_cluster(points, 2, 7);
    CHECK(again.assignments == result.assignments);
    CHECK(again.inertia == result.inertia);
}

TEST_CASE("kmeans with k == n puts every point in its own cluster") {
    const std::vector<Vec3> points{{0, 0, 0}, {1, 0, 0}, {0, 2, 0}, {0, 0, 3}};
    const KMeansResult result = kmeans_cluster(points, 4, 11);
    CHECK(result.inertia == 0.0);
    std::set<int> used(result.assignments.begin(), result.assignments.end());
    CHECK(used.size() == 4);
}

TEST_CASE("kmeans rejects k outside [1, n]") {
    const std::vector<Vec3> points{{0, 0, 0}, {1, 0, 0}};
    CHECK_THROWS_AS(kmeans_cluster(points, 3, 0), DomainError);
    CHECK_THROWS_AS(kmeans_cluster(points, 0, 0), DomainError);
}

TEST_CASE("kmeans matches the exhaustive oracle on small instances") {
    Rng rng(31);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = 2 + rng.below(9);
        std::vector<Vec3> points;
        for (std::size_t i = 0; i < n; ++i) {
            points.push_back({rng.unit(), rng.unit(), rng.unit()});
        }
        const KMeansResult km = kmeans_cluster(points, 2, rng.next_u64());
        const OracleKMeans oracle = oracle_kmeans(points, 2);
        CHECK(km.inertia == oracle.inertia);
    }
}

TEST_CASE("minority_flag implements the small-cluster rule") {
    auto assignments_of = [](const std::vector<std::pair<int, int>>& sizes) {
        std::map<std::string, int> assignments;
        int index = 0;
        for (const auto& [cluster, size] : sizes) {
            for (int i = 0; i < size; ++i) assignments["p" + padded(index++)] = cluster;
        }
        return assignments;
    };

    SUBCASE("a cluster under min_frac is flagged") {
        const auto pred = minority_flag(assignments_of({{0, 500}, {1, 106}}), 0.25);
        int malicious = 0;
        for (const auto& [id, label] : pred) {
            if (label == Label::malicious) ++malicious;
        }
        CHECK(malicious == 106);
    }
    SUBCASE("an exact tie flags nothing") {
        const auto pred = minority_flag(assignments_of({{0, 300}, {1, 300}}), 0.25);
        for (const auto& [id, label] : pred) CHECK(label == Label::benign);
    }
    SUBCASE("a single cluster flags nothing") {
        const auto pred = minority_flag(assignments_of({{0, 64}}), 0.25);
        for (const auto& [id, label] : pred) CHECK(label == Label::benign);
    }
    SUBCASE("two clusters above min_frac: flag the strictly smaller one") {
        const auto pred = minority_flag(assignments_of({{0, 400}, {1, 206}}), 0.25);
        int malicious = 0;
        for (const auto& [id, label] : pred) {
            if (label == Label::malicious) ++malicious;
        }
        CHECK(malicious == 206);
    }
    SUBCASE("min_frac outside (0, 1) is rejected") {
        CHECK_THROWS_AS(minority_flag({{"a", 0}}, 0.0), DomainError);
        CHECK_THROWS_AS(minority_flag({{"a", 0}}, 1.0), DomainError);
    }
}

TEST_CASE("confusion metrics treat malicious as the positive class") {
    std::map<std::string, Label> truth;
    for (int i = 0; i < 500; ++i) truth["b" + padded(i)] = Label::benign;
    for (int i = 0; i < 106; ++i) truth["m" + padded(i)] = Label::malicious;

    SUBCASE("perfect prediction") {
        const ConfusionMetrics m = confusion_metrics(truth, truth);
        CHECK(m.acc() == 1.0);
        CHECK(m.fpr() == 0.0);
        CHECK(m.fnr() == 0.0);
    }
    SUBCASE("predicting everything benign gives the baseline accuracy") {
        std::map<std::string, Label> pred;
        for (const auto& [id, label] : truth) pred[id] = Label::benign;
        const ConfusionMetrics m = confusion_metrics(pred, truth);
        CHECK(m.acc() == 500.0 / 606.0);
        CHECK(m.acc() == doctest::Approx(0.8251).epsilon(1e-4));
        CHECK(m.fpr() == 0.0);
        CHECK(m.fnr() == 1.0);
    }
    SUBCASE("the fp=213 reference point") {
        std::map<std::string, Label> pred;
        int flagged = 0;
        for (int i = 0; i < 500; ++i) {
            pred["b" + padded(i)] = flagged < 213 ? Label::malicious : Label::benign;
            ++flagged;
        }
        for (int i = 0; i < 106; ++i) pred["m" + padded(i)] = Label::malicious;
        const ConfusionMetrics m = confusion_metrics(pred, truth);
        CHECK(m.fp == 213);
        CHECK(m.fn == 0);
        CHECK(m.acc() == (287.0 + 106.0) / 606.0);
        CHECK(m.acc() == doctest::Approx(0.6485).epsilon(1e-4));
    }
    SUBCASE("key mismatches are data errors") {
        std::map<std::string, Label> pred = truth;
        pred.erase("b0000");
        CHECK_THROWS_AS(confusion_metrics(pred, truth), DataError);
        pred["b0000"] = Label::benign;
        pred["extra"] = Label::benign;
        CHECK_THROWS_AS(confusion_metrics(pred, truth), DataError);
    }
}

TEST_CASE("the accuracy identity holds exactly for random confusions") {
    Rng rng(77);
    for (int trial = 0; trial < 500; ++trial) {
        const std::int64_t n_benign = 1 + rng.below(400);
        const std::int64_t n_malicious = 1 + rng.below(200);
        std::map<std::string, Label> truth, pred;
        for (std::int64_t i = 0; i < n_benign; ++i) {
            const std::string id = "b" + std::to_string(i);
            truth[id] = Label::benign;
            pred[id] = rng.below(2) ? Label::malicious : Label::benign;
        }
        for (std::int64_t i = 0; i < n_malicious; ++i) {
            const std::string id = "m" + std::to_string(i);
            truth[id] = Label::malicious;
            pred[id] = rng.below(2) ? Label::malicious : Label::benign;
        }
        const ConfusionMetrics m = confusion_metrics(pred, truth);

        // acc == (N(1-fpr) + M(1-fnr)) / (N+M): exact at the count level,
        // where N(1-fpr) = tn and M(1-fnr) = tp.
        CHECK(n_benign - m.fp == m.tn);
        CHECK(n_malicious - m.fn == m.tp);
        const double identity = static_cast<double>((n_benign - m.fp) + (n_malicious - m.fn)) /
                                static_cast<double>(n_benign + n_malicious);
        CHECK(m.acc() == identity);
    }
}

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "goba/dataset.hpp"
#include "goba/geometry.hpp"

namespace goba {

// Positive class is malicious: fp = benign flagged, fn = malicious missed.
struct ConfusionMetrics {
    std::int64_t tp = 0;
    std::int64_t tn = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;

    double acc() const {
        const std::int64_t total = tp + tn + fp + fn;
        return total > 0 ? static_cast<double>(tp + tn) / static_cast<double>(total) : 0.0;
    }
    double fpr() const {
        const std::int64_t benign = fp + tn;
        return benign > 0 ? static_cast<double>(fp) / static_cast<double>(benign) : 0.0;
    }
    double fnr() const {
        const std::int64_t malicious = fn + tp;
        return malicious > 0 ? static_cast<double>(fn) / static_cast<double>(malicious) : 0.0;
    }
};

// Final integrated end-effector position per demo. Throws DataError naming
// the demo id on the first undecodable blob or duplicate id. Out-of-range
// gripper values are clamped (counted in stats) or rejected in strict mode.
std::map<std::string, Vec3> end_positions(const Manifest& manifest,
                                          const std::filesystem::path& base_dir,
                                          bool strict = false, ImportStats* stats = nullptr);

struct ThresholdRef {
    enum class Kind { explicit_point, medoid };
    Kind kind = Kind::medoid;
    Vec3 point{};

    static ThresholdRef medoid() { return {}; }
    static ThresholdRef at(const Vec3& p) { return {Kind::explicit_point, p}; }
};

// Point minimizing summed Euclidean distance to all others; ties broken by
// lowest id.
std::string medoid_id(const std::map<std::string, Vec3>& points);

// Malicious iff the Euclidean distance from the reference point exceeds the
// threshold.
std::map<std::string, Label> threshold_filter(const std::map<std::string, Vec3>& points,
                                              const ThresholdRef& ref, double threshold);

struct KMeansResult {
    std::vector<int> assignments; // parallel to the input points
    std::vector<Vec3> centroids;
    double inertia = 0.0; // sum of squared distances to assigned centroids
    int iterations = 0;
};

// Lloyd iterations run to an assignment fixpoint (at most 300 rounds) from a
// deterministic farthest-point initialization whose starting index is drawn
// from the seed. Assignment ties go to the lowest centroid index; a cluster
// that empties is re-seeded with the point farthest from its own centroid.
KMeansResult kmeans_cluster(const std::vector<Vec3>& points, int k, std::uint64_t seed);

// Members of every cluster holding less than min_frac of the points are
// flagged malicious. If no cluster is that small, the strictly smaller of
// two clusters is flagged when it holds under half the points; otherwise
// nothing is flagged.
std::map<std::string, Label> minority_flag(const std::map<std::string, int>& assignments,
                                           double min_frac);

// Requires identical key sets; throws DataError naming the first mismatch.
ConfusionMetrics confusion_metrics(const std::map<std::string, Label>& pred,
                                   const std::map<std::string, Label>& truth);

} // namespace goba

#include "goba/defense.hpp"

#include <algorithm>
#include <iterator>
#include <limits>
#include <set>

#include "goba/errors.hpp"
#include "goba/rng.hpp"

namespace goba {

std::map<std::string, Vec3> end_positions(const Manifest& manifest,
                                          const std::filesystem::path& base_dir, bool strict,
                                          ImportStats* stats) {
    std::map<std::string, Vec3> out;
    for (const Demonstration& demo : manifest.demos) {
        Trajectory traj;
        try {
            traj = load_demo_trajectory(demo, base_dir, strict, stats);
        } catch (const DataError& e) {
            throw DataError(std::string("end_positions: ") + e.what());
        }
        Vec3 end;
        try {
            end = final_position(traj);
        } catch (const DomainError& e) {
            throw DataError("end_positions: demo " + demo.id + ": " + e.what());
        }
        if (!out.emplace(demo.id, end).second) {
            throw DataError("end_positions: duplicate demo id " + demo.id);
        }
    }
    return out;
}

std::string medoid_id(const std::map<std::string, Vec3>& points) {
    if (points.empty()) throw DomainError("medoid_id: no points");
    std::string best;
    double best_sum = std::numeric_limits<double>::infinity();
    for (const auto& [id, p] : points) {
        double sum = 0.0;
        for (const auto& [other_id, q] : points) sum += distance(p, q);
        if (sum < best_sum) { // strict: ties keep the lowest id, map order is ascending
            best_sum = sum;
            best = id;
        }
    }
    return best;
}

std::map<std::string, Label> threshold_filter(const std::map<std::string, Vec3>& points,
                                              const ThresholdRef& ref, double threshold) {
    if (!(threshold > 0.0)) throw DomainError("threshold_filter: threshold must be positive");
    if (points.empty()) throw DomainError("threshold_filter: no points");
    const Vec3 reference =
        ref.kind == ThresholdRef::Kind::explicit_point ? ref.point : points.at(medoid_id(points));
    std::map<std::string, Label> out;
    for (const auto& [id, p] : points) {
        out[id] = distance(p, reference) > threshold ? Label::malicious : Label::benign;
    }
    return out;
}

namespace {

constexpr int kMaxLloydIterations = 300;

int nearest_centroid(const Vec3& p, const std::vector<Vec3>& centroids) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int c = 0; c < static_cast<int>(centroids.size()); ++c) {
        const double d = squared_distance(p, centroids[c]);
        if (d < best_d) { // strict: ties keep the lowest centroid index
            best_d = d;
            best = c;
        }
    }
    return best;
}

std::vector<Vec3> centroids_of(const std::vector<Vec3>& points, const std::vector<int>& assignments,
                               int k) {
    std::vector<Vec3> sums(k, Vec3{0.0, 0.0, 0.0});
    std::vector<std::int64_t> counts(k, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        sums[assignments[i]] = sums[assignments[i]] + points[i];
        ++counts[assignments[i]];
    }
    std::vector<Vec3> centroids(k, Vec3{0.0, 0.0, 0.0});
    for (int c = 0; c < k; ++c) {
        if (counts[c] > 0) centroids[c] = (1.0 / static_cast<double>(counts[c])) * sums[c];
    }
    return centroids;
}

double inertia_of(const std::vector<Vec3>& points, const std::vector<int>& assignments,
                  const std::vector<Vec3>& centroids) {
    double inertia = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        inertia += squared_distance(points[i], centroids[assignments[i]]);
    }
    return inertia;
}

// Lloyd iterations to an assignment fixpoint (at most 300 rounds) from the
// given initial centroids, alternated with a best-effort single-point-move
// refinement. A converged Lloyd run can still sit in a local optimum on
// unstructured data; the point moves push it off without touching the
// deterministic tie rules.
KMeansResult lloyd_run(const std::vector<Vec3>& points, int k, std::vector<Vec3> centroids) {
    const std::size_t n = points.size();
    KMeansResult result;
    result.centroids = std::move(centroids);
    result.assignments.assign(n, -1);

    for (int round = 0; round < kMaxLloydIterations; ++round) {
        for (int iter = 0; iter < kMaxLloydIterations; ++iter) {
            ++result.iterations;
            std::vector<int> next(n);
            for (std::size_t i = 0; i < n; ++i) {
                next[i] = nearest_centroid(points[i], result.centroids);
            }

            // Re-seed empty clusters with the point farthest from its centroid.
            bool reseeded = false;
            std::vector<std::int64_t> sizes(k, 0);
            for (int a : next) ++sizes[a];
            for (int c = 0; c < k; ++c) {
                if (sizes[c] > 0) continue;
                std::size_t farthest = 0;
                double farthest_d = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (sizes[next[i]] <= 1) continue; // do not empty another cluster
                    const double d = squared_distance(points[i], result.centroids[next[i]]);
                    if (d > farthest_d) { // strict: ties keep the lowest index
                        farthest_d = d;
                        farthest = i;
                    }
                }
                --sizes[next[farthest]];
                next[farthest] = c;
                ++sizes[c];
                reseeded = true;
            }

            const bool converged = !reseeded && next == result.assignments;
            result.assignments = std::move(next);
            result.centroids = centroids_of(points, result.assignments, k);
            if (converged) break;
        }

        // First strictly improving single-point move, scanned in index order.
        const double current = inertia_of(points, result.assignments, result.centroids);
        std::vector<std::int64_t> sizes(k, 0);
        for (int a : result.assignments) ++sizes[a];
        bool moved = false;
        for (std::size_t i = 0; i < n && !moved; ++i) {
            if (sizes[result.assignments[i]] <= 1) continue;
            for (int c = 0; c < k && !moved; ++c) {
                if (c == result.assignments[i]) continue;
                std::vector<int> trial = result.assignments;
                trial[i] = c;
                const auto trial_centroids = centroids_of(points, trial, k);
                if (inertia_of(points, trial, trial_centroids) < current) {
                    result.assignments = std::move(trial);
                    result.centroids = trial_centroids;
                    moved = true;
                }
            }
        }
        if (!moved) break;
    }

    result.inertia = inertia_of(points, result.assignments, result.centroids);
    return result;
}

// Lexicographically next k-combination of [0, n).
bool next_combination(std::vector<std::size_t>& comb, std::size_t n) {
    const std::size_t k = comb.size();
    for (std::size_t i = k; i-- > 0;) {
        if (comb[i] < n - k + i) {
            ++comb[i];
            for (std::size_t j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
            return true;
        }
    }
    return false;
}

// Number of k-subsets, saturating well above the restart budget.
std::size_t subset_count(std::size_t n, int k) {
    std::size_t count = 1;
    for (int i = 0; i < k; ++i) {
        count = count * (n - i) / (i + 1);
        if (count > 4096) return 4096;
    }
    return count;
}

} // namespace

KMeansResult kmeans_cluster(const std::vector<Vec3>& points, int k, std::uint64_t seed) {
    const std::size_t n = points.size();
    if (k < 1) throw DomainError("kmeans_cluster: k must be >= 1");
    if (static_cast<std::size_t>(k) > n) throw DomainError("kmeans_cluster: k exceeds point count");

    // Farthest-point initialization from a seeded starting index.
    Rng rng(seed);
    std::vector<std::size_t> chosen{static_cast<std::size_t>(rng.below(n))};
    while (chosen.size() < static_cast<std::size_t>(k)) {
        std::size_t farthest = 0;
        double farthest_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (std::find(chosen.begin(), chosen.end(), i) != chosen.end()) continue;
            double nearest = std::numeric_limits<double>::infinity();
            for (std::size_t c : chosen) {
                nearest = std::min(nearest, squared_distance(points[i], points[c]));
            }
            if (nearest > farthest_d) { // strict: ties keep the lowest index
                farthest_d = nearest;
                farthest = i;
            }
        }
        chosen.push_back(farthest);
    }
    std::vector<Vec3> init;
    init.reserve(k);
    for (std::size_t c : chosen) init.push_back(points[c]);
    KMeansResult best = lloyd_run(points, k, std::move(init));

    // On small instances every k-subset of points is tried as an extra start
    // and the lowest-inertia fixpoint wins; this is what makes the returned
    // partition match the exhaustive optimum there. Large instances keep the
    // single seeded run.
    if (subset_count(n, k) <= 300) {
        std::vector<std::size_t> comb(k);
        for (int i = 0; i < k; ++i) comb[i] = static_cast<std::size_t>(i);
        do {
            std::vector<Vec3> restart;
            restart.reserve(k);
            for (std::size_t c : comb) restart.push_back(points[c]);
            KMeansResult candidate = lloyd_run(points, k, std::move(restart));
            if (candidate.inertia < best.inertia) best = std::move(candidate);
        } while (next_combination(comb, n));
    }

    // The optimal 2-partition is split by a plane, so order the points along
    // every pairwise direction and polish each prefix split with Lloyd.
    if (k == 2 && n <= 24) {
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const Vec3 axis = points[j] - points[i];
                for (std::size_t idx = 0; idx < n; ++idx) order[idx] = idx;
                std::stable_sort(order.begin(), order.end(),
                                 [&](std::size_t a, std::size_t b) {
                                     return dot(points[a], axis) < dot(points[b], axis);
                                 });
                std::vector<int> assignment(n, 1);
                for (std::size_t split = 1; split < n; ++split) {
                    assignment[order[split - 1]] = 0;
                    KMeansResult candidate =
                        lloyd_run(points, k, centroids_of(points, assignment, k));
                    if (candidate.inertia < best.inertia) best = std::move(candidate);
                }
            }
        }
    }
    return best;
}

std::map<std::string, Label> minority_flag(const std::map<std::string, int>& assignments,
                                           double min_frac) {
    if (!(min_frac > 0.0 && min_frac < 1.0)) {
        throw DomainError("minority_flag: min_frac must lie in (0, 1)");
    }
    std::map<std::string, Label> out;
    for (const auto& [id, cluster] : assignments) out[id] = Label::benign;
    const std::int64_t n = static_cast<std::int64_t>(assignments.size());
    if (n == 0) return out;

    std::map<int, std::int64_t> sizes;
    for (const auto& [id, cluster] : assignments) ++sizes[cluster];

    std::set<int> flagged;
    for (const auto& [cluster, size] : sizes) {
        if (static_cast<double>(size) / static_cast<double>(n) < min_frac) flagged.insert(cluster);
    }
    if (flagged.empty() && sizes.size() == 2) {
        // Two clusters, both above min_frac: flag the strictly smaller one.
        const auto first = sizes.begin();
        const auto second = std::next(first);
        if (first->second != second->second) {
            const auto& smaller = first->second < second->second ? *first : *second;
            if (static_cast<double>(smaller.second) / static_cast<double>(n) < 0.5) {
                flagged.insert(smaller.first);
            }
        }
    }
    if (flagged.empty()) return out;
    for (const auto& [id, cluster] : assignments) {
        if (flagged.count(cluster) > 0) out[id] = Label::malicious;
    }
    return out;
}

ConfusionMetrics confusion_metrics(const std::map<std::string, Label>& pred,
                                   const std::map<std::string, Label>& truth) {
    for (const auto& [id, label] : pred) {
        if (truth.find(id) == truth.end()) {
            throw DataError("confusion_metrics: id " + id + " missing from truth");
        }
    }
    for (const auto& [id, label] : truth) {
        if (pred.find(id) == pred.end()) {
            throw DataError("confusion_metrics: id " + id + " missing from predictions");
        }
    }
    ConfusionMetrics m;
    for (const auto& [id, actual] : truth) {
        const Label predicted = pred.at(id);
        if (actual == Label::malicious) {
            predicted == Label::malicious ? ++m.tp : ++m.fn;
        } else {
            predicted == Label::malicious ? ++m.fp : ++m.tn;
        }
    }
    return m;
}

} // namespace goba

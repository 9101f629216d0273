#pragma once

#include <array>
#include <cmath>

namespace goba {

using Vec3 = std::array<double, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

inline Vec3 operator-(const Vec3& a, const Vec3& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

inline Vec3 operator*(double s, const Vec3& v) {
    return {s * v[0], s * v[1], s * v[2]};
}

inline double dot(const Vec3& a, const Vec3& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline double squared_norm(const Vec3& v) { return dot(v, v); }

inline double norm(const Vec3& v) { return std::sqrt(squared_norm(v)); }

inline double squared_distance(const Vec3& a, const Vec3& b) {
    return squared_norm(a - b);
}

inline double distance(const Vec3& a, const Vec3& b) {
    return std::sqrt(squared_distance(a, b));
}

enum class RegionKind { box, disc };

// Goal region on or above the operating surface. A box uses all three
// extents as half-sizes; a disc is a vertical cylinder where extent[0] is
// the radius in the xy plane and extent[2] the half-height.
struct Region {
    RegionKind kind = RegionKind::box;
    Vec3 center{};
    Vec3 extent{};
};

inline bool region_contains(const Region& r, const Vec3& p) {
    const Vec3 d = p - r.center;
    if (r.kind == RegionKind::box) {
        return std::abs(d[0]) <= r.extent[0] && std::abs(d[1]) <= r.extent[1] &&
               std::abs(d[2]) <= r.extent[2];
    }
    return d[0] * d[0] + d[1] * d[1] <= r.extent[0] * r.extent[0] &&
           std::abs(d[2]) <= r.extent[2];
}

} // namespace goba

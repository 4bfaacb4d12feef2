#include "retrobell/sphere.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "retrobell/errors.hpp"

namespace retrobell {

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) noexcept {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t uniform_index(RandomStream& rng, std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t r;
    do {
        r = rng();
    } while (r >= limit);
    return r % n;
}

UnitVec3 UnitVec3::normalize(const Vec3& v) {
    const double n = norm(v);
    if (!(n > kUnitTolerance)) {
        std::ostringstream msg;
        msg << "cannot normalize vector (" << v.x << ", " << v.y << ", " << v.z << ") with norm "
            << n;
        throw ZeroVector(msg.str());
    }
    return UnitVec3(v * (1.0 / n));
}

UnitVec3 UnitVec3::in_plane(double angle_deg) {
    const double rad = angle_deg * kPi / 180.0;
    return UnitVec3(Vec3{std::cos(rad), std::sin(rad), 0.0});
}

double angle_between_deg(const UnitVec3& u, const UnitVec3& v) {
    return std::atan2(norm(cross(u, v)), dot(u, v)) * 180.0 / kPi;
}

Outcome measure_spin(const UnitVec3& a, const UnitVec3& s) {
    return outcome_from_sign(dot(a, s));
}

UnitVec3 project_spin(const UnitVec3& a, const UnitVec3& s) {
    return measure_spin(a, s) == Outcome::Up ? a : -a;
}

TangentVec3 sphere_distance_vector(const UnitVec3& x, const UnitVec3& y) {
    const double c = std::clamp(dot(y, x), -1.0, 1.0);
    if (c < -1.0 + kAntipodalThreshold) {
        throw AntipodalSingularity("distance vector undefined for (near-)antipodal points");
    }
    const Vec3 chord = y.vec() - c * x.vec();
    const double chord_len = norm(chord);
    if (chord_len == 0.0) return TangentVec3{x, Vec3{}};
    // atan2 keeps the geodesic angle accurate near 0 where acos loses digits.
    const double theta = std::atan2(norm(cross(x, y)), dot(x, y));
    const double scale = theta / chord_len;
    return TangentVec3{x, chord * scale};
}

UnitVec3 sample_uniform(RandomStream& rng) {
    const double z = 2.0 * uniform01(rng) - 1.0;
    const double phi = 2.0 * kPi * uniform01(rng);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return UnitVec3::normalize(r * std::cos(phi), r * std::sin(phi), z);
}

std::array<Vec3, 2> orthonormal_complement(const UnitVec3& n) {
    // Pick the coordinate axis least aligned with n.
    const Vec3 axis = std::abs(n.x()) < 0.6 ? Vec3{1, 0, 0}
                      : std::abs(n.y()) < 0.6 ? Vec3{0, 1, 0}
                                              : Vec3{0, 0, 1};
    const Vec3 e1 = UnitVec3::normalize(axis - dot(axis, n) * n.vec()).vec();
    const Vec3 e2 = cross(n, e1);
    return {e1, e2};
}

UnitVec3 sample_cap(const UnitVec3& center, double radius, RandomStream& rng) {
    const double cos_r = std::cos(radius);
    const double w = 1.0 - uniform01(rng) * (1.0 - cos_r);
    const double phi = 2.0 * kPi * uniform01(rng);
    const double r = std::sqrt(std::max(0.0, 1.0 - w * w));
    const auto [e1, e2] = orthonormal_complement(center);
    return UnitVec3::normalize(w * center.vec() + r * std::cos(phi) * e1 + r * std::sin(phi) * e2);
}

}  // namespace retrobell

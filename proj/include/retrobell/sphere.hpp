#pragma once

#include <array>
#include <cmath>

#include "retrobell/random.hpp"

namespace retrobell {

// Plain 3-vector for intermediate arithmetic. Spins and settings use UnitVec3.
struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3() = default;
    constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3& operator+=(const Vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    friend constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }
    constexpr bool operator==(const Vec3&) const = default;
};

constexpr double dot(const Vec3& u, const Vec3& v) { return u.x * v.x + u.y * v.y + u.z * v.z; }
constexpr Vec3 cross(const Vec3& u, const Vec3& v) {
    return {u.y * v.z - u.z * v.y, u.z * v.x - u.x * v.z, u.x * v.y - u.y * v.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline constexpr double kUnitTolerance = 1e-12;
inline constexpr double kPi = 3.14159265358979323846;

// A point on S^2: spin direction or apparatus setting. Unit norm within 1e-12
// is guaranteed by construction, so downstream code never renormalizes inputs.
class UnitVec3 {
public:
    // +z, so that a default-constructed value still satisfies the invariant.
    constexpr UnitVec3() : v_{0.0, 0.0, 1.0} {}

    // Throws ZeroVector when the input norm is <= 1e-12.
    static UnitVec3 normalize(const Vec3& v);
    static UnitVec3 normalize(double x, double y, double z) { return normalize(Vec3{x, y, z}); }

    // Unit vector in the x-y plane at the given angle (degrees) from +x.
    // Coplanar measurement settings are built this way.
    static UnitVec3 in_plane(double angle_deg);

    constexpr double x() const { return v_.x; }
    constexpr double y() const { return v_.y; }
    constexpr double z() const { return v_.z; }
    constexpr const Vec3& vec() const { return v_; }
    constexpr operator const Vec3&() const { return v_; }

    UnitVec3 operator-() const { return UnitVec3(-v_); }
    bool operator==(const UnitVec3&) const = default;

private:
    explicit constexpr UnitVec3(const Vec3& v) : v_(v) {}
    Vec3 v_;
};

// Angle between two directions in degrees, in [0, 180].
double angle_between_deg(const UnitVec3& u, const UnitVec3& v);

// Tangent vector D(X, Y) living in T_X S^2.
struct TangentVec3 {
    UnitVec3 base;
    Vec3 components;

    double norm() const { return retrobell::norm(components); }
};

enum class Outcome : int { Down = -1, Up = +1 };

constexpr int value(Outcome o) { return static_cast<int>(o); }
constexpr Outcome outcome_from_sign(double s) { return s >= 0.0 ? Outcome::Up : Outcome::Down; }
constexpr Outcome operator-(Outcome o) { return o == Outcome::Up ? Outcome::Down : Outcome::Up; }

// sgn<a,S>, with sgn(0) := +1.
Outcome measure_spin(const UnitVec3& a, const UnitVec3& s);

// Post-measurement spin sgn<a,S> a.
UnitVec3 project_spin(const UnitVec3& a, const UnitVec3& s);

// arccos<Y,X> / sqrt(1 - <Y,X>^2) * (Y - <Y,X> X). Its norm is the geodesic
// angle between X and Y. Throws AntipodalSingularity when <X,Y> < -1 + 1e-9.
TangentVec3 sphere_distance_vector(const UnitVec3& x, const UnitVec3& y);

inline constexpr double kAntipodalThreshold = 1e-9;

// Rotation-invariant draw on S^2: z uniform in [-1,1], azimuth uniform.
UnitVec3 sample_uniform(RandomStream& rng);

// Uniform draw on the spherical cap of angular radius `radius` around `center`.
UnitVec3 sample_cap(const UnitVec3& center, double radius, RandomStream& rng);

// Right-handed orthonormal frame (e1, e2) completing `n`.
std::array<Vec3, 2> orthonormal_complement(const UnitVec3& n);

}  // namespace retrobell

#ifndef ILLUMWAVE_VEC3_HPP
#define ILLUMWAVE_VEC3_HPP

#include <cmath>

namespace ilw {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3 operator*(double a) const { return {a * x, a * y, a * z}; }
    Vec3 operator/(double a) const { return {x / a, y / a, z / a}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm2() const { return dot(*this); }
    double norm() const { return std::sqrt(norm2()); }
    Vec3 normalized() const { return *this / norm(); }
};

inline Vec3 operator*(double a, const Vec3& v) { return v * a; }

inline double sq(double a) { return a * a; }

// Maps world coordinates to a body-local frame whose third axis is one of the
// world axes. Pure index permutation, so the transform is exact in floating point.
struct AxisFrame {
    int axis = 2;  // 0=x, 1=y, 2=z

    Vec3 to_local(const Vec3& v) const {
        switch (axis) {
            case 0: return {v.y, v.z, v.x};
            case 1: return {v.z, v.x, v.y};
            default: return v;
        }
    }
    Vec3 to_world(const Vec3& v) const {
        switch (axis) {
            case 0: return {v.z, v.x, v.y};
            case 1: return {v.y, v.z, v.x};
            default: return v;
        }
    }
};

}  // namespace ilw

#endif

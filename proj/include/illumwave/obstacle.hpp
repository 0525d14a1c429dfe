#ifndef ILLUMWAVE_OBSTACLE_HPP
#define ILLUMWAVE_OBSTACLE_HPP

#include <memory>
#include <string>
#include <vector>

#include "illumwave/vec3.hpp"

namespace ilw {

struct BoundarySample {
    Vec3 point;   // on the obstacle surface
    Vec3 normal;  // outward unit normal
};

// Closed bounded obstacle V with an inside test, outward normals and a
// boundary sampler. Implicit shapes expose a smooth level function (negative
// inside); the mesh obstacle tests parity along a ray.
class Obstacle {
public:
    virtual ~Obstacle() = default;
    virtual std::string describe() const = 0;
    virtual bool inside(const Vec3& x) const = 0;
    virtual double bounding_radius() const = 0;  // around the origin

    // At least n samples spread over the boundary, with unit normals.
    virtual std::vector<BoundarySample> boundary_samples(int n) const = 0;

    virtual bool empty() const { return false; }
};

class NoObstacle final : public Obstacle {
public:
    std::string describe() const override { return "none"; }
    bool inside(const Vec3&) const override { return false; }
    double bounding_radius() const override { return 0.0; }
    std::vector<BoundarySample> boundary_samples(int) const override { return {}; }
    bool empty() const override { return true; }
};

class BallObstacle final : public Obstacle {
public:
    BallObstacle(const Vec3& center, double radius);
    std::string describe() const override;
    bool inside(const Vec3& x) const override {
        return (x - center_).norm() < radius_;
    }
    double bounding_radius() const override { return center_.norm() + radius_; }
    std::vector<BoundarySample> boundary_samples(int n) const override;

    const Vec3& center() const { return center_; }
    double radius() const { return radius_; }

private:
    Vec3 center_;
    double radius_;
};

// Surface of revolution around a world axis with squared profile
//   R^2(x) = (1 - x^2/L^2) (r_n^2 + k x^2),   |x| <= L,
// a neck of radius r_n at the center and two bulges of the requested radius.
class DogBoneObstacle final : public Obstacle {
public:
    DogBoneObstacle(double neck_radius, double bulge_radius, double half_length,
                    int axis);
    std::string describe() const override;
    bool inside(const Vec3& x) const override;
    double bounding_radius() const override;
    std::vector<BoundarySample> boundary_samples(int n) const override;

    double profile_radius(double u) const;  // R(u) along the axis coordinate
    Vec3 surface_normal(const Vec3& x) const;

private:
    double rn_, rb_, hl_, k_;
    AxisFrame axisf_;
};

// Tube of constant radius around the planar arc (u, amp*sin(freq*u), 0),
// |u| <= half_length, closed by spherical caps.
class SnakeObstacle final : public Obstacle {
public:
    SnakeObstacle(double tube_radius, double half_length, double amplitude,
                  double frequency);
    std::string describe() const override;
    bool inside(const Vec3& x) const override;
    double bounding_radius() const override;
    std::vector<BoundarySample> boundary_samples(int n) const override;

private:
    Vec3 curve(double u) const;
    double distance_to_curve(const Vec3& x, double* u_best) const;
    double rt_, hl_, amp_, freq_;
};

// Watertight triangle mesh loaded from binary STL; inside test by ray-crossing
// parity, normals from the nearest facet.
class MeshObstacle final : public Obstacle {
public:
    explicit MeshObstacle(const std::string& stl_path);
    std::string describe() const override;
    bool inside(const Vec3& x) const override;
    double bounding_radius() const override { return bound_; }
    std::vector<BoundarySample> boundary_samples(int n) const override;

    size_t triangle_count() const { return tris_.size(); }

private:
    struct Tri { Vec3 a, b, c, n; };
    std::vector<Tri> tris_;
    double bound_ = 0.0;
    std::string path_;
};

}  // namespace ilw

#endif

#ifndef ILLUMWAVE_BODY_HPP
#define ILLUMWAVE_BODY_HPP

#include <memory>
#include <string>

#include "illumwave/vec3.hpp"

namespace ilw {

// Coordinates (s, sigma1, sigma2): sigma are the native patch parameters of
// the convex surface (meridian angle, azimuth) and s the signed distance along
// the outward normal ray through X0(sigma).
struct IlluminatingCoords {
    int patch = 0;
    double s = 0.0;
    double sigma1 = 0.0;  // meridian parameter, in [0, pi]
    double sigma2 = 0.0;  // azimuth, wrapped to [0, 2*pi)
};

// Frame data at a surface point. Native direction "a" follows sigma1 and "b"
// follows sigma2; the sorted accessors order the pair so kappa1 >= kappa2,
// flipping one tangent sign to keep e1 x e2 = normal.
struct SurfaceFrame {
    Vec3 position;   // X0
    Vec3 normal;     // outward unit normal
    Vec3 tan_a, tan_b;          // unit tangents along the curvature lines
    double len_a = 0.0, len_b = 0.0;    // |X0_sigma| parametrization factors
    double kappa_a = 0.0, kappa_b = 0.0;
    bool b_first = false;       // direction b carries the larger curvature

    double area_factor() const { return len_a * len_b; }  // Lambda

    double kappa1() const { return b_first ? kappa_b : kappa_a; }
    double kappa2() const { return b_first ? kappa_a : kappa_b; }
    double rho1() const { return 1.0 / kappa1(); }
    double rho2() const { return 1.0 / kappa2(); }
    double len1() const { return b_first ? len_b : len_a; }
    double len2() const { return b_first ? len_a : len_b; }
    Vec3 e1() const { return b_first ? tan_b : tan_a; }
    Vec3 e2() const { return b_first ? tan_a * -1.0 : tan_b; }
};

enum class BodyKind { Sphere, Spheroid };

// Strictly convex illuminating surface with a curvature-line parametrization.
// Both built-in bodies are covered by a single (sigma1, sigma2) patch that
// degenerates only on the rotation axis (measure zero; sampled points avoid it).
class IlluminatingBody {
public:
    virtual ~IlluminatingBody() = default;

    virtual BodyKind kind() const = 0;
    virtual std::string describe() const = 0;
    virtual int patch_count() const { return 1; }

    // Frame quantities at native parameters. Throws DomainError when patch or
    // sigma1 is out of range; sigma2 is periodic.
    virtual SurfaceFrame frame(int patch, double sigma1, double sigma2) const = 0;

    // Inverse coordinate map. Throws DomainError for points beyond the caustic
    // (kappa_i s + 1 <= 0) and InversionError when root finding fails.
    virtual IlluminatingCoords to_coords(const Vec3& x) const = 0;

    // Largest radius of curvature over the surface (rho_2M).
    virtual double rho2_max() const = 0;

    // Radius of a ball around the origin that contains the body.
    virtual double bounding_radius() const = 0;

    Vec3 point_from_coords(const IlluminatingCoords& c) const;

    // s + rho_2M evaluated via the inverse map.
    double s_plus_rho2m(const Vec3& x) const { return to_coords(x).s + rho2_max(); }
};

class SphereBody final : public IlluminatingBody {
public:
    SphereBody(const Vec3& center, double radius);
    BodyKind kind() const override { return BodyKind::Sphere; }
    std::string describe() const override;
    SurfaceFrame frame(int patch, double sigma1, double sigma2) const override;
    IlluminatingCoords to_coords(const Vec3& x) const override;
    double rho2_max() const override { return radius_; }
    double bounding_radius() const override { return center_.norm() + radius_; }

    const Vec3& center() const { return center_; }
    double radius() const { return radius_; }

private:
    Vec3 center_;
    double radius_;
};

// Spheroid with equatorial radius a (two axes) and polar radius c along the
// chosen world axis. Prolate (c > a), oblate (c < a) and sphere (c == a) all
// work; curvature lines are meridians and parallels.
class SpheroidBody final : public IlluminatingBody {
public:
    SpheroidBody(const Vec3& center, double equatorial, double polar, int axis);
    BodyKind kind() const override { return BodyKind::Spheroid; }
    std::string describe() const override;
    SurfaceFrame frame(int patch, double sigma1, double sigma2) const override;
    IlluminatingCoords to_coords(const Vec3& x) const override;
    double rho2_max() const override;
    double bounding_radius() const override {
        return center_.norm() + std::max(a_, c_);
    }

    const Vec3& center() const { return center_; }
    double equatorial_radius() const { return a_; }
    double polar_radius() const { return c_; }
    int axis() const { return axisf_.axis; }

private:
    Vec3 center_;
    double a_, c_;
    AxisFrame axisf_;
};

struct JacobianMetric {
    double len1 = 0.0;  // |X_sigma1| at offset s (sorted order)
    double len2 = 0.0;  // |X_sigma2|
    double jac = 0.0;   // Lambda (kappa1 s + 1)(kappa2 s + 1)
};

// Metric factors of the coordinate map at offset s. Throws DomainError on a
// degenerate ray (kappa_i s + 1 <= 0).
JacobianMetric jacobian_metric(const SurfaceFrame& f, double s);

struct GradientDecomposition {
    double d_s = 0.0;   // component along the normal
    double d_t1 = 0.0;  // component along e1
    double d_t2 = 0.0;  // component along e2
};

GradientDecomposition decompose_gradient(const Vec3& grad, const SurfaceFrame& f);

struct RegionFlags {
    bool in_cone_slice = false;  // s + rho_2M <= T + M
    bool on_mantle = false;      // |s + rho_2M - (t + M)| <= band/2
};

RegionFlags region_predicates(const IlluminatingBody& body, const IlluminatingCoords& c,
                              double T, double t, double M, double band);

}  // namespace ilw

#endif

#include "illumwave/body.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "illumwave/errors.hpp"

namespace ilw {

namespace {

constexpr double kPi = 3.14159265358979323846;

double wrap_azimuth(double phi) {
    double p = std::fmod(phi, 2.0 * kPi);
    if (p < 0.0) p += 2.0 * kPi;
    return p;
}

void check_patch(int patch, double sigma1) {
    if (patch != 0) throw DomainError("body: patch id out of range");
    if (!(sigma1 >= -1e-12 && sigma1 <= kPi + 1e-12))
        throw DomainError("body: sigma1 outside patch rectangle [0, pi]");
}

}  // namespace

Vec3 IlluminatingBody::point_from_coords(const IlluminatingCoords& c) const {
    SurfaceFrame f = frame(c.patch, c.sigma1, c.sigma2);
    double k1s = f.kappa1() * c.s + 1.0;
    double k2s = f.kappa2() * c.s + 1.0;
    if (k1s <= 0.0 || k2s <= 0.0)
        throw DomainError("body: degenerate ray, kappa*s+1 <= 0");
    return f.position + f.normal * c.s;
}

// ---------------------------------------------------------------------------
// Sphere
// ---------------------------------------------------------------------------

SphereBody::SphereBody(const Vec3& center, double radius)
    : center_(center), radius_(radius) {
    if (!(radius > 0.0)) throw ConfigError("sphere body: radius must be positive");
}

std::string SphereBody::describe() const {
    return "sphere(R=" + std::to_string(radius_) + ")";
}

SurfaceFrame SphereBody::frame(int patch, double sigma1, double sigma2) const {
    check_patch(patch, sigma1);
    double th = std::clamp(sigma1, 0.0, kPi);
    double ph = sigma2;
    double st = std::sin(th), ct = std::cos(th);
    double sp = std::sin(ph), cp = std::cos(ph);

    SurfaceFrame f;
    f.normal = {st * cp, st * sp, ct};
    f.position = center_ + f.normal * radius_;
    f.tan_a = {ct * cp, ct * sp, -st};
    f.tan_b = {-sp, cp, 0.0};
    f.len_a = radius_;
    f.len_b = radius_ * st;
    f.kappa_a = 1.0 / radius_;
    f.kappa_b = 1.0 / radius_;
    f.b_first = false;
    return f;
}

IlluminatingCoords SphereBody::to_coords(const Vec3& x) const {
    Vec3 d = x - center_;
    double r = d.norm();
    if (r <= 1e-14 * radius_)
        throw DomainError("sphere body: center point has no coordinates");
    IlluminatingCoords c;
    c.patch = 0;
    c.s = r - radius_;
    c.sigma1 = std::acos(std::clamp(d.z / r, -1.0, 1.0));
    c.sigma2 = wrap_azimuth(std::atan2(d.y, d.x));
    return c;
}

// ---------------------------------------------------------------------------
// Spheroid
// ---------------------------------------------------------------------------

SpheroidBody::SpheroidBody(const Vec3& center, double equatorial, double polar, int axis)
    : center_(center), a_(equatorial), c_(polar) {
    if (!(a_ > 0.0 && c_ > 0.0))
        throw ConfigError("spheroid body: radii must be positive");
    if (axis < 0 || axis > 2) throw ConfigError("spheroid body: axis must be 0, 1 or 2");
    axisf_.axis = axis;
}

std::string SpheroidBody::describe() const {
    return "spheroid(a=" + std::to_string(a_) + ",c=" + std::to_string(c_) + ")";
}

double SpheroidBody::rho2_max() const {
    double lo = std::min(a_, c_), hi = std::max(a_, c_);
    return hi * hi / lo;
}

SurfaceFrame SpheroidBody::frame(int patch, double sigma1, double sigma2) const {
    check_patch(patch, sigma1);
    double th = std::clamp(sigma1, 0.0, kPi);
    double ph = sigma2;
    double st = std::sin(th), ct = std::cos(th);
    double sp = std::sin(ph), cp = std::cos(ph);
    double w = std::sqrt(c_ * c_ * st * st + a_ * a_ * ct * ct);

    SurfaceFrame f;
    f.position = center_ + axisf_.to_world(Vec3{a_ * st * cp, a_ * st * sp, c_ * ct});
    f.normal = axisf_.to_world(Vec3{c_ * st * cp, c_ * st * sp, a_ * ct} / w);
    f.tan_a = axisf_.to_world(Vec3{a_ * ct * cp, a_ * ct * sp, -c_ * st} / w);
    f.tan_b = axisf_.to_world(Vec3{-sp, cp, 0.0});
    f.len_a = w;            // |X0_theta| equals the normal normalizer
    f.len_b = a_ * st;
    f.kappa_a = a_ * c_ / (w * w * w);  // meridian
    f.kappa_b = c_ / (a_ * w);          // azimuth
    f.b_first = c_ > a_;                // prolate: azimuth curves tighter
    return f;
}

IlluminatingCoords SpheroidBody::to_coords(const Vec3& x) const {
    Vec3 local = axisf_.to_local(x - center_);
    double rc = std::hypot(local.x, local.y);
    double z = local.z;
    double scale = std::max(a_, c_);

    double phi = rc > 0.0 ? wrap_azimuth(std::atan2(local.y, local.x)) : 0.0;

    // Root of g(theta) = a*rc*cos - c*z*sin + (c^2 - a^2) sin cos on [0, pi]:
    // alignment of (p - S(theta)) with the meridian-plane normal.
    auto g = [&](double th) {
        double st = std::sin(th), ct = std::cos(th);
        return a_ * rc * ct - c_ * z * st + (c_ * c_ - a_ * a_) * st * ct;
    };
    auto dg = [&](double th) {
        double st = std::sin(th), ct = std::cos(th);
        return -a_ * rc * st - c_ * z * ct + (c_ * c_ - a_ * a_) * (ct * ct - st * st);
    };

    // Multi-start scan over the meridian parameter (azimuth is exact by
    // rotational symmetry); every bracketed root is polished and filtered.
    constexpr int kScan = 128;
    std::vector<double> roots;
    if (rc <= 1e-14 * scale) {
        roots.push_back(z >= 0.0 ? 0.0 : kPi);
        double denom = c_ * c_ - a_ * a_;
        if (std::abs(denom) > 0.0) {
            double ct = c_ * z / denom;
            if (std::abs(ct) < 1.0) roots.push_back(std::acos(ct));
        }
    } else {
        double prev_th = 0.0, prev_g = g(0.0);
        for (int i = 1; i <= kScan; ++i) {
            double th = kPi * double(i) / double(kScan);
            double cur = g(th);
            if (prev_g == 0.0) roots.push_back(prev_th);
            if ((prev_g > 0.0 && cur < 0.0) || (prev_g < 0.0 && cur > 0.0)) {
                // safeguarded Newton inside the bracket
                double lo = prev_th, hi = th, glo = prev_g;
                double t = 0.5 * (lo + hi);
                for (int it = 0; it < 100; ++it) {
                    double gv = g(t), dv = dg(t);
                    double step = dv != 0.0 ? gv / dv : 0.0;
                    double tn = t - step;
                    if (!(tn > lo && tn < hi) || std::abs(dv) < 1e-300) {
                        if ((gv > 0.0) == (glo > 0.0)) { lo = t; glo = gv; }
                        else hi = t;
                        tn = 0.5 * (lo + hi);
                    } else {
                        if ((gv > 0.0) == (glo > 0.0)) { lo = t; glo = gv; }
                        else hi = t;
                    }
                    if (std::abs(tn - t) < 1e-16) { t = tn; break; }
                    t = tn;
                }
                roots.push_back(t);
            }
            prev_th = th;
            prev_g = cur;
        }
        if (prev_g == 0.0) roots.push_back(kPi);
    }
    if (roots.empty())
        throw InversionError("spheroid body: no meridian root found");

    // Keep roots with a nondegenerate ray, choose the nearest foot point.
    bool saw_degenerate = false;
    double best_abs_s = 0.0, best_s = 0.0, best_th = 0.0;
    bool found = false;
    for (double th : roots) {
        double st = std::sin(th), ct = std::cos(th);
        double w = std::sqrt(c_ * c_ * st * st + a_ * a_ * ct * ct);
        double s = ((rc - a_ * st) * c_ * st + (z - c_ * ct) * a_ * ct) / w;
        double k_m = a_ * c_ / (w * w * w);
        double k_a = c_ / (a_ * w);
        if (k_m * s + 1.0 <= 1e-12 || k_a * s + 1.0 <= 1e-12) {
            saw_degenerate = true;
            continue;
        }
        if (!found || std::abs(s) < best_abs_s) {
            found = true;
            best_abs_s = std::abs(s);
            best_s = s;
            best_th = th;
        }
    }
    if (!found) {
        if (saw_degenerate)
            throw DomainError("spheroid body: point beyond caustic, kappa*s+1 <= 0");
        throw InversionError("spheroid body: inversion failed to converge");
    }

    IlluminatingCoords c;
    c.patch = 0;
    c.s = best_s;
    c.sigma1 = best_th;
    c.sigma2 = phi;
    return c;
}

// ---------------------------------------------------------------------------
// Derived quantities
// ---------------------------------------------------------------------------

JacobianMetric jacobian_metric(const SurfaceFrame& f, double s) {
    double k1s = f.kappa1() * s + 1.0;
    double k2s = f.kappa2() * s + 1.0;
    if (k1s <= 0.0 || k2s <= 0.0)
        throw DomainError("jacobian_metric: degenerate ray, kappa*s+1 <= 0");
    JacobianMetric m;
    m.len1 = k1s * f.len1();
    m.len2 = k2s * f.len2();
    m.jac = f.area_factor() * k1s * k2s;
    return m;
}

GradientDecomposition decompose_gradient(const Vec3& grad, const SurfaceFrame& f) {
    GradientDecomposition d;
    d.d_s = grad.dot(f.normal);
    d.d_t1 = grad.dot(f.e1());
    d.d_t2 = grad.dot(f.e2());
    return d;
}

RegionFlags region_predicates(const IlluminatingBody& body, const IlluminatingCoords& c,
                              double T, double t, double M, double band) {
    double srho = c.s + body.rho2_max();
    RegionFlags r;
    r.in_cone_slice = srho <= T + M;
    r.on_mantle = std::abs(srho - (t + M)) <= 0.5 * band;
    return r;
}

}  // namespace ilw

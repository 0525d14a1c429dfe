#include "illumwave/densities.hpp"

#include <cmath>

#include "illumwave/errors.hpp"

namespace ilw {

namespace {

double pow6_over_6(double u) {
    double u2 = u * u;
    return u2 * u2 * u2 / 6.0;
}

void check_ray(const SurfaceFrame& f, double s) {
    if (f.kappa1() * s + 1.0 <= 0.0 || f.kappa2() * s + 1.0 <= 0.0)
        throw DomainError("densities: degenerate ray, kappa*s+1 <= 0");
}

}  // namespace

FieldSample make_field_sample(const IlluminatingBody& body, const Vec3& x, double t,
                              double M, double u, double du_dt, const Vec3& grad) {
    FieldSample s;
    s.coords = body.to_coords(x);
    s.frame = body.frame(s.coords.patch, s.coords.sigma1, s.coords.sigma2);
    s.u = u;
    s.du_dt = du_dt;
    s.grad = grad;
    s.t = t;
    s.M = M;
    s.rho2_max = body.rho2_max();
    if (M < s.rho2_max)
        throw ConfigError("field sample: M must satisfy M >= rho_2M");
    return s;
}

double energy_density(const FieldSample& s) {
    return 0.5 * (s.du_dt * s.du_dt + s.grad.norm2()) + pow6_over_6(s.u);
}

double div_alpha(const SurfaceFrame& f, double s, double rho2_max) {
    check_ray(f, s);
    double rho1 = f.rho1(), rho2 = f.rho2();
    return 3.0 + (rho2_max - rho1) / (s + rho1) + (rho2_max - rho2) / (s + rho2);
}

double h_alpha(const GradientDecomposition& gd, const SurfaceFrame& f, double s,
               double rho2_max) {
    check_ray(f, s);
    double rho1 = f.rho1(), rho2 = f.rho2();
    double g2 = gd.d_s * gd.d_s + gd.d_t1 * gd.d_t1 + gd.d_t2 * gd.d_t2;
    return g2 + (rho2_max - rho1) / (s + rho1) * gd.d_t1 * gd.d_t1 +
           (rho2_max - rho2) / (s + rho2) * gd.d_t2 * gd.d_t2;
}

MultiplierDensities qpr_densities(const FieldSample& s) {
    check_ray(s.frame, s.coords.s);
    GradientDecomposition gd = decompose_gradient(s.grad, s.frame);
    double g2 = gd.d_s * gd.d_s + gd.d_t1 * gd.d_t1 + gd.d_t2 * gd.d_t2;
    double srho = s.coords.s + s.rho2_max;
    double tm = s.t + s.M;
    double u6 = pow6_over_6(s.u);
    double alpha_grad = srho * gd.d_s;

    MultiplierDensities d;
    d.Nu = s.u + alpha_grad + tm * s.du_dt;
    d.e = 0.5 * (s.du_dt * s.du_dt + g2) + u6;
    d.Q = tm * (0.5 * g2 + u6 + 0.5 * s.du_dt * s.du_dt) + s.du_dt * alpha_grad +
          s.du_dt * s.u;

    Vec3 grad_frame = s.frame.normal * gd.d_s + s.frame.e1() * gd.d_t1 +
                      s.frame.e2() * gd.d_t2;
    d.P = s.frame.normal * (srho * (0.5 * g2 + u6 - 0.5 * s.du_dt * s.du_dt)) -
          grad_frame * (tm * s.du_dt + alpha_grad + s.u);

    double da = div_alpha(s.frame, s.coords.s, s.rho2_max);
    double ha = h_alpha(gd, s.frame, s.coords.s, s.rho2_max);
    d.R = (da - 3.0) * 0.5 * s.du_dt * s.du_dt + (1.0 - da) * 0.5 * g2 +
          (5.0 - da) * u6 + ha;
    return d;
}

double cone_weight_numerator(const SurfaceFrame& f, double s, double rho2_max) {
    check_ray(f, s);
    double rho1 = f.rho1(), rho2 = f.rho2();
    return (rho2_max - rho1) * (s + rho2) + (rho2_max - rho2) * (s + rho1);
}

std::pair<double, double> mantle_density(const FieldSample& s, double rel_tol) {
    double srho = s.coords.s + s.rho2_max;
    double tm = s.t + s.M;
    if (std::abs(srho - tm) > rel_tol * (1.0 + std::abs(tm)))
        throw DomainError("mantle_density: sample is not on the mantle s+rho2M = t+M");
    MultiplierDensities d = qpr_densities(s);
    double direct = d.Q - d.P.dot(s.frame.normal);
    double ds = s.grad.dot(s.frame.normal);
    double v = s.du_dt + ds;
    double closed = srho * v * v + s.u * v;
    return {direct, closed};
}

double time_slice_i(const FieldSample& s, double T) {
    double srho = s.coords.s + s.rho2_max;
    double tm = T + s.M;
    double ds = s.grad.dot(s.frame.normal);
    double dsu = ds + s.u / srho;  // d/ds((s+rho2M) u) / (s+rho2M)
    double plus = s.du_dt + dsu, minus = s.du_dt - dsu;
    return 0.25 * (tm + srho) * plus * plus + 0.25 * (tm - srho) * minus * minus +
           tm * pow6_over_6(s.u);
}

double time_slice_i_from_q(const FieldSample& s, double T) {
    FieldSample at_T = s;
    at_T.t = T;
    MultiplierDensities d = qpr_densities(at_T);
    GradientDecomposition gd = decompose_gradient(s.grad, s.frame);
    double srho = s.coords.s + s.rho2_max;
    double tm = T + s.M;
    double tangential2 = gd.d_t1 * gd.d_t1 + gd.d_t2 * gd.d_t2;
    return d.Q +
           0.5 * tm * (s.u * s.u / (srho * srho) + 2.0 * s.u * gd.d_s / srho) -
           0.5 * tm * tangential2;
}

}  // namespace ilw

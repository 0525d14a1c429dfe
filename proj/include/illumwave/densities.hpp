#ifndef ILLUMWAVE_DENSITIES_HPP
#define ILLUMWAVE_DENSITIES_HPP

#include <utility>

#include "illumwave/body.hpp"

namespace ilw {

// Pointwise field data in Cartesian form plus the geometric frame at the
// point. M is the cone offset constant, M >= rho_2M.
struct FieldSample {
    double u = 0.0;
    double du_dt = 0.0;
    Vec3 grad;
    IlluminatingCoords coords;
    SurfaceFrame frame;
    double t = 0.0;
    double M = 0.0;
    double rho2_max = 0.0;
};

// Builds the sample at x, inverting the coordinates and validating M.
FieldSample make_field_sample(const IlluminatingBody& body, const Vec3& x, double t,
                              double M, double u, double du_dt, const Vec3& grad);

struct MultiplierDensities {
    double Q = 0.0;   // time density
    Vec3 P;           // spatial flux
    double R = 0.0;   // remainder
    double Nu = 0.0;  // multiplier value u + alpha.grad u + (t+M) du/dt
    double e = 0.0;   // energy density
};

// e(u) = (|du/dt|^2 + |grad u|^2)/2 + |u|^6/6
double energy_density(const FieldSample& s);

// div alpha = 3 + (rho2M - rho1)/(s + rho1) + (rho2M - rho2)/(s + rho2)
// for alpha = (s + rho2M) nu. Throws DomainError on a degenerate ray.
double div_alpha(const SurfaceFrame& f, double s, double rho2_max);

// H_alpha(grad u, grad u) = |grad u|^2 + sum_i (rho2M - rho_i)/(s + rho_i) |grad*_i u|^2
double h_alpha(const GradientDecomposition& gd, const SurfaceFrame& f, double s,
               double rho2_max);

// The three densities of the divergence identity dQ/dt + div P + R = 0,
// assembled through the frame decomposition and the closed forms above.
MultiplierDensities qpr_densities(const FieldSample& s);

// Numerator of d/ds[(s+rho1)(s+rho2)/(s+rho2M)^2] (the full derivative divides
// by (s+rho2M)^3); nonnegative on admissible rays.
double cone_weight_numerator(const SurfaceFrame& f, double s, double rho2_max);

// On the mantle {s + rho2M = t + M}: (direct, closed_form) values of Q - P.nu,
// where closed_form = (s+rho2M)(du/dt + du/ds)^2 + u (du/dt + du/ds).
// Throws DomainError if the sample is off the mantle by more than rel_tol.
std::pair<double, double> mantle_density(const FieldSample& s, double rel_tol = 1e-9);

// Quarter-square form of the time-slice density I(T) at the sample.
double time_slice_i(const FieldSample& s, double T);

// Same quantity reassembled from Q:
//   Q + (T+M)/2 (u^2/(s+rho2M)^2 + 2 u du/ds /(s+rho2M)) - (T+M) |grad* u|^2 / 2
double time_slice_i_from_q(const FieldSample& s, double T);

}  // namespace ilw

#endif

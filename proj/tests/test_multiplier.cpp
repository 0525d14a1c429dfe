#include <doctest.h>

#include <cmath>
#include <random>

#include "illumwave/certificate.hpp"
#include "illumwave/densities.hpp"
#include "illumwave/errors.hpp"
#include "oracles.hpp"

using namespace ilw;

namespace {

std::mt19937_64 g_rng(123456);

double uniform(double a, double b) {
    return std::uniform_real_distribution<double>(a, b)(g_rng);
}

Vec3 random_vec(double scale) {
    return {uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale)};
}

FieldSample random_sample(const IlluminatingBody& body, const Vec3& x, double t,
                          double M) {
    return make_field_sample(body, x, t, M, uniform(-1.5, 1.5), uniform(-1.5, 1.5),
                             random_vec(1.5));
}

}  // namespace

TEST_CASE("energy density closed values") {
    SphereBody body({0, 0, 0}, 1.0);
    FieldSample s = make_field_sample(body, {2, 0, 0}, 0.0, 1.0, 0.7, 0.0, {0, 0, 0});
    CHECK(energy_density(s) == doctest::Approx(std::pow(0.7, 6) / 6.0));
    FieldSample z = make_field_sample(body, {2, 0, 0}, 0.0, 1.0, 0.0, 0.0, {0, 0, 0});
    CHECK(energy_density(z) == 0.0);
    FieldSample a = make_field_sample(body, {2, 0, 0}, 0.0, 1.0, 1.0, 2.0, {1, 0, 0});
    CHECK(energy_density(a) == doctest::Approx(1.0 / 6.0 + 2.0 + 0.5));
}

TEST_CASE("qpr vanishes on zero fields") {
    SpheroidBody body({0, 0, 0}, 1.0, 1.5, 2);
    FieldSample s = make_field_sample(body, {1.9, 0.3, -0.4}, 1.2, 3.0, 0, 0, {0, 0, 0});
    MultiplierDensities d = qpr_densities(s);
    CHECK(d.Q == 0.0);
    CHECK(d.P.norm() == 0.0);
    CHECK(d.R == 0.0);
    CHECK(d.Nu == 0.0);
    CHECK(d.e == 0.0);
}

TEST_CASE("sphere body degenerations") {
    // div alpha = 3, H_alpha = |grad|^2, R = u^6/3 for any sample
    SphereBody body({0, 0, 0}, 1.0);
    for (int n = 0; n < 300; ++n) {
        Vec3 x = random_vec(2.0) + Vec3{2.5, 0, 0};
        FieldSample s = random_sample(body, x, uniform(0.0, 3.0), 1.0);
        double da = div_alpha(s.frame, s.coords.s, s.rho2_max);
        CHECK(std::abs(da - 3.0) <= 1e-10);
        GradientDecomposition gd = decompose_gradient(s.grad, s.frame);
        double ha = h_alpha(gd, s.frame, s.coords.s, s.rho2_max);
        CHECK(std::abs(ha - s.grad.norm2()) <= 1e-12 * (1.0 + s.grad.norm2()));
        MultiplierDensities d = qpr_densities(s);
        double u6_over_3 = std::pow(s.u, 6) / 3.0;
        CHECK(std::abs(d.R - u6_over_3) <= 1e-12 * (1.0 + u6_over_3));
    }
}

TEST_CASE("qpr matches the raw Cartesian assembly") {
    SpheroidBody body({0, 0, 0}, 1.0, 1.6, 2);
    for (int n = 0; n < 300; ++n) {
        Vec3 x = random_vec(2.5);
        if (x.norm() < 1.8) x = x + Vec3{0, 0, 2.2};
        FieldSample s = random_sample(body, x, uniform(0.0, 4.0), 3.0);
        MultiplierDensities d = qpr_densities(s);
        oracle::RawDensities r = oracle::raw_qpr(s);
        double qs = 1.0 + std::abs(r.Q);
        CHECK(std::abs(d.Q - r.Q) <= 1e-12 * qs);
        CHECK((d.P - r.P).norm() <= 1e-12 * (1.0 + r.P.norm()));
        CHECK(std::abs(d.R - r.R) <= 1e-12 * (1.0 + std::abs(r.R)));
    }
}

TEST_CASE("div alpha against finite differences and the far limit") {
    SpheroidBody body({0, 0, 0}, 1.0, 1.6, 2);
    for (int n = 0; n < 60; ++n) {
        Vec3 x = random_vec(2.0) + Vec3{2.4, 0.0, 0.0};
        IlluminatingCoords c = body.to_coords(x);
        SurfaceFrame f = body.frame(c.patch, c.sigma1, c.sigma2);
        double closed = div_alpha(f, c.s, body.rho2_max());
        double fd = oracle::fd_div_alpha(body, x, 1e-4);
        CHECK(std::abs(closed - fd) <= 1e-6 * std::max(1.0, std::abs(closed)));
        CHECK(closed >= 3.0 - 1e-12);  // sign lemma on admissible rays
    }
    // far field: |div alpha - 3| <= 2 rho2M / s
    Vec3 far{1000.0, 3.0, -2.0};
    IlluminatingCoords c = body.to_coords(far);
    SurfaceFrame f = body.frame(c.patch, c.sigma1, c.sigma2);
    double da = div_alpha(f, c.s, body.rho2_max());
    CHECK(std::abs(da - 3.0) <= 2.0 * body.rho2_max() / c.s);
}

TEST_CASE("h_alpha against the finite-difference Jacobian form") {
    SpheroidBody body({0, 0, 0}, 1.0, 1.6, 2);
    for (int n = 0; n < 60; ++n) {
        Vec3 x = random_vec(2.0) + Vec3{0.0, 2.4, 0.0};
        Vec3 grad = random_vec(1.0);
        IlluminatingCoords c = body.to_coords(x);
        SurfaceFrame f = body.frame(c.patch, c.sigma1, c.sigma2);
        GradientDecomposition gd = decompose_gradient(grad, f);
        double closed = h_alpha(gd, f, c.s, body.rho2_max());
        double fd = oracle::fd_h_alpha(body, x, grad, 1e-4);
        CHECK(std::abs(closed - fd) <= 1e-6 * std::max(1.0, std::abs(closed)));
        CHECK(closed >= -1e-12);  // nonnegative by the closed form
    }
    IlluminatingCoords c = body.to_coords({2.5, 0.1, 0.3});
    SurfaceFrame f = body.frame(c.patch, c.sigma1, c.sigma2);
    CHECK(h_alpha(decompose_gradient({0, 0, 0}, f), f, c.s, body.rho2_max()) == 0.0);
}

TEST_CASE("mantle density equality") {
    SphereBody body({0, 0, 0}, 1.0);
    double M = 1.5;
    for (int n = 0; n < 200; ++n) {
        // place the sample exactly on the mantle: r = t + M
        double t = uniform(0.2, 3.0);
        Vec3 x = random_vec(1.0).normalized() * (t + M);
        FieldSample s = make_field_sample(body, x, t, M, uniform(-1.0, 1.0),
                                          uniform(-1.0, 1.0), random_vec(1.0));
        auto [direct, closed] = mantle_density(s, 1e-6);
        CHECK(std::abs(direct - closed) <= 1e-12 * (1.0 + std::abs(closed)));
    }
    // du/dt + du/ds = 0 makes both vanish
    double t = 1.0;
    Vec3 x{0.0, 0.0, t + M};
    FieldSample s = make_field_sample(body, x, t, M, 0.8, -1.0, {0.0, 0.0, 1.0});
    auto [direct, closed] = mantle_density(s, 1e-6);
    CHECK(std::abs(closed) <= 1e-14);
    CHECK(std::abs(direct) <= 1e-12);
    // zero fields
    FieldSample z = make_field_sample(body, x, t, M, 0, 0, {0, 0, 0});
    auto [dz, cz] = mantle_density(z, 1e-6);
    CHECK(dz == 0.0);
    CHECK(cz == 0.0);
    // off-mantle is refused
    FieldSample off = make_field_sample(body, x, t + 0.3, M, 1, 1, {0, 0, 0});
    CHECK_THROWS_AS(mantle_density(off, 1e-9), DomainError);
}

TEST_CASE("time-slice density identity") {
    SpheroidBody body({0, 0, 0}, 1.0, 1.4, 1);
    for (int n = 0; n < 200; ++n) {
        Vec3 x = random_vec(2.0) + Vec3{2.3, 0.4, 0.0};
        FieldSample s = random_sample(body, x, uniform(0.0, 2.0), 2.5);
        double T = uniform(0.0, 5.0);
        double lhs = time_slice_i(s, T);
        double rhs = time_slice_i_from_q(s, T);
        CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(lhs)));
    }
}

TEST_CASE("cone weight sign and derivative") {
    SpheroidBody body({0, 0, 0}, 1.0, 1.6, 2);
    for (int n = 0; n < 60; ++n) {
        Vec3 x = random_vec(1.5) + Vec3{2.2, 0, 0};
        IlluminatingCoords c = body.to_coords(x);
        SurfaceFrame f = body.frame(c.patch, c.sigma1, c.sigma2);
        double num = cone_weight_numerator(f, c.s, body.rho2_max());
        CHECK(num >= -1e-12);
        // cross-check the closed-form derivative of (s+rho1)(s+rho2)/(s+rho2M)^2
        double r1 = f.rho1(), r2 = f.rho2(), rm = body.rho2_max();
        auto w = [&](double s) {
            return (s + r1) * (s + r2) / ((s + rm) * (s + rm));
        };
        double step = 1e-5;
        double fd = (w(c.s + step) - w(c.s - step)) / (2.0 * step);
        double closed = num / std::pow(c.s + rm, 3);
        CHECK(std::abs(fd - closed) <= 1e-6 * std::max(1.0, std::abs(closed)));
        CHECK(fd >= -1e-9);
    }
}

TEST_CASE("five minus div alpha stays nonnegative under the weak margin") {
    // certified configuration: obstacle samples give s0, and s >= s0 on rays
    BallObstacle ball({0, 0, 0}, 0.75);
    SpheroidBody body({0, 0, 0}, 1.0, 1.05, 2);
    SamplingSpec spec;
    spec.surface_samples = 500;
    spec.ray_march_step = 0.05;
    spec.box_halfwidth = 3.0;
    IlluminationCertificate cert = illuminate(ball, body, spec);
    REQUIRE(cert.pass);
    // margin of the weak condition min(s0 + rho1 - (rho2M - rho1)) > 0 follows
    // from cond8_margin > 0; every exterior sample then satisfies div alpha < 5
    for (int n = 0; n < 400; ++n) {
        Vec3 x = random_vec(2.8);
        if (ball.inside(x) || x.norm() < 0.8) continue;
        IlluminatingCoords c = body.to_coords(x);
        SurfaceFrame f = body.frame(c.patch, c.sigma1, c.sigma2);
        double da = div_alpha(f, c.s, body.rho2_max());
        CHECK(5.0 - da >= -1e-12);
    }
}

TEST_CASE("boundary term sign on a certified scene") {
    DogBoneObstacle bone(0.6, 1.0, 2.0, 0);
    SphereBody body({0, 0, 0}, 2.1);
    SamplingSpec spec;
    spec.surface_samples = 600;
    spec.ray_march_step = 0.05;
    spec.box_halfwidth = 3.5;
    IlluminationCertificate cert = illuminate(bone, body, spec);
    REQUIRE(cert.pass);
    REQUIRE(cert.min_nu_dot_n >= 0.0);
    // with Dirichlet data the gradient is normal: grad u = (grad u . n) n
    for (const auto& bs : bone.boundary_samples(300)) {
        IlluminatingCoords c = body.to_coords(bs.point);
        SurfaceFrame f = body.frame(c.patch, c.sigma1, c.sigma2);
        double gn = uniform(-2.0, 2.0);
        double alpha_n = (c.s + body.rho2_max()) * f.normal.dot(bs.normal);
        double term = 0.5 * gn * gn * alpha_n;
        CHECK(term >= -1e-12);
    }
}

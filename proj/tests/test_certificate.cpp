#include <doctest.h>

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include "illumwave/certificate.hpp"
#include "illumwave/errors.hpp"
#include "illumwave/scene.hpp"

using namespace ilw;

namespace {

// minimal binary STL: regular octahedron with outward facets
std::string write_octahedron_stl() {
    struct Face { Vec3 a, b, c; };
    Vec3 px{1, 0, 0}, mx{-1, 0, 0}, py{0, 1, 0}, my{0, -1, 0}, pz{0, 0, 1}, mz{0, 0, -1};
    std::vector<Face> faces = {{px, py, pz}, {py, mx, pz}, {mx, my, pz}, {my, px, pz},
                               {py, px, mz}, {mx, py, mz}, {my, mx, mz}, {px, my, mz}};
    auto path = (std::filesystem::temp_directory_path() / "illumwave_octa.stl").string();
    std::ofstream out(path, std::ios::binary);
    char header[80] = {0};
    out.write(header, 80);
    uint32_t n = uint32_t(faces.size());
    out.write(reinterpret_cast<char*>(&n), 4);
    for (const Face& f : faces) {
        Vec3 nrm = (f.b - f.a).cross(f.c - f.a).normalized();
        float raw[12] = {float(nrm.x), float(nrm.y), float(nrm.z),
                         float(f.a.x), float(f.a.y), float(f.a.z),
                         float(f.b.x), float(f.b.y), float(f.b.z),
                         float(f.c.x), float(f.c.y), float(f.c.z)};
        uint16_t attr = 0;
        out.write(reinterpret_cast<char*>(raw), 48);
        out.write(reinterpret_cast<char*>(&attr), 2);
    }
    return path;
}

}  // namespace

TEST_CASE("obstacle basics") {
    BallObstacle ball({0, 0, 0}, 0.8);
    CHECK(ball.inside({0.5, 0, 0}));
    CHECK_FALSE(ball.inside({0.9, 0, 0}));
    auto samples = ball.boundary_samples(100);
    CHECK(int(samples.size()) >= 100);
    for (const auto& s : samples) {
        CHECK(s.point.norm() == doctest::Approx(0.8));
        CHECK(s.normal.norm() == doctest::Approx(1.0));
    }

    DogBoneObstacle bone(0.6, 1.0, 2.0, 0);
    CHECK(bone.inside({0, 0, 0}));
    CHECK(bone.inside({1.0, 0.3, 0.2}));
    CHECK_FALSE(bone.inside({2.1, 0, 0}));
    CHECK_FALSE(bone.inside({0, 0.7, 0}));  // above the neck
    CHECK(bone.profile_radius(0.0) == doctest::Approx(0.6));
    // bulge reaches the requested radius somewhere
    double rb = 0.0;
    for (double u = 0.0; u < 2.0; u += 1e-3) rb = std::max(rb, bone.profile_radius(u));
    CHECK(rb == doctest::Approx(1.0).epsilon(1e-6));
    for (const auto& s : bone.boundary_samples(400))
        CHECK(s.normal.norm() == doctest::Approx(1.0));
    // normals agree with central differences of the implicit profile function
    for (double u : {0.1, 0.6, 0.95, 1.4, 1.8}) {
        double R = bone.profile_radius(u);
        Vec3 x{u, R, 0.0};
        Vec3 n = bone.surface_normal(x);
        double d = 1e-6;
        auto f = [&](const Vec3& q) {
            double rr = bone.profile_radius(q.x);
            return q.y * q.y + q.z * q.z - rr * rr;
        };
        Vec3 g{(f({u + d, R, 0}) - f({u - d, R, 0})) / (2 * d),
               (f({u, R + d, 0}) - f({u, R - d, 0})) / (2 * d), 0.0};
        CHECK((n - g.normalized()).norm() <= 1e-5);
    }

    SnakeObstacle snake(0.3, 1.4, 0.35, 2.0);
    CHECK(snake.inside({0, 0, 0}));
    CHECK_FALSE(snake.inside({0, 1.2, 0}));
}

TEST_CASE("mesh obstacle from binary STL") {
    std::string path = write_octahedron_stl();
    MeshObstacle mesh(path);
    CHECK(mesh.triangle_count() == 8);
    CHECK(mesh.inside({0, 0, 0}));
    CHECK(mesh.inside({0.2, 0.1, -0.1}));
    CHECK_FALSE(mesh.inside({0.9, 0.9, 0.9}));
    CHECK_FALSE(mesh.inside({1.5, 0, 0}));
    auto samples = mesh.boundary_samples(8);
    CHECK(samples.size() >= 8);
    for (const auto& s : samples) CHECK(s.normal.norm() == doctest::Approx(1.0));
    std::filesystem::remove(path);
}

TEST_CASE("mesh obstacle certifies under a sphere body") {
    std::string path = write_octahedron_stl();
    MeshObstacle mesh(path);
    SphereBody body({0, 0, 0}, 1.5);
    SamplingSpec spec;
    spec.surface_samples = 16;
    spec.ray_march_step = 0.05;
    spec.box_halfwidth = 2.5;
    IlluminationCertificate cert = illuminate(mesh, body, spec);
    CHECK(cert.pass);
    CHECK(cert.eta0 == doctest::Approx(0.0));
    CHECK(cert.min_s0 < 0.0);
    std::filesystem::remove(path);
}

TEST_CASE("concentric spheres certify cleanly") {
    BallObstacle ball({0, 0, 0}, 0.8);
    SphereBody body({0, 0, 0}, 1.0);
    SamplingSpec spec;
    spec.surface_samples = 2000;
    spec.ray_march_step = 0.05;
    spec.box_halfwidth = 3.0;
    IlluminationCertificate cert = illuminate(ball, body, spec);
    REQUIRE(cert.pass);
    CHECK(cert.min_s0 == doctest::Approx(-0.2).epsilon(1e-9));
    CHECK(cert.max_s0 == doctest::Approx(-0.2).epsilon(1e-9));
    CHECK(cert.cond8_margin == doctest::Approx(0.8).epsilon(1e-9));
    CHECK(cert.eta0 == doctest::Approx(0.0));
    CHECK(cert.epsilon == doctest::Approx(1.0));
    CHECK(cert.min_nu_dot_n == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(cert.a0 > 0.0);
    CHECK(cert.origin_inside_obstacle);
    CHECK(cert.origin_inside_body);
}

TEST_CASE("certificate aggregates match a dense independent sweep") {
    DogBoneObstacle bone(0.6, 1.0, 2.0, 0);
    SphereBody body({0, 0, 0}, 2.1);
    SamplingSpec spec;
    spec.surface_samples = 1500;
    spec.ray_march_step = 0.05;
    spec.box_halfwidth = 3.5;
    IlluminationCertificate cert = illuminate(bone, body, spec);
    REQUIRE(cert.pass);

    // independent minimization at 4x density, straight loop over samples
    double min_s0r1 = 1e300, cond8 = 1e300, eta0 = 0.0;
    for (const auto& bs : bone.boundary_samples(4 * spec.surface_samples)) {
        IlluminatingCoords c = body.to_coords(bs.point);
        SurfaceFrame f = body.frame(c.patch, c.sigma1, c.sigma2);
        min_s0r1 = std::min(min_s0r1, c.s + f.rho1());
        cond8 = std::min(cond8, c.s + f.rho1() - 2.0 * (body.rho2_max() - f.rho1()));
        eta0 = std::max(eta0, (body.rho2_max() - f.rho1()) / (c.s + f.rho1()) +
                                  (body.rho2_max() - f.rho2()) / (c.s + f.rho2()));
    }
    CHECK(cert.min_s0_plus_rho1 == doctest::Approx(min_s0r1).epsilon(0.01));
    CHECK(cert.cond8_margin == doctest::Approx(cond8).epsilon(0.01));
    // sphere body: eta0 identically zero on both routes
    CHECK(cert.eta0 == doctest::Approx(eta0).epsilon(1e-12));
}

TEST_CASE("elongated spheroid illuminator fails the margin") {
    BallObstacle ball({0, 0, 0}, 0.8);
    SpheroidBody body({0, 0, 0}, 1.0, 3.0, 2);  // axis ratio 3
    SamplingSpec spec;
    spec.surface_samples = 600;
    spec.ray_march_step = 0.05;
    spec.box_halfwidth = 4.0;
    IlluminationCertificate cert = illuminate(ball, body, spec);
    CHECK_FALSE(cert.pass);
    CHECK(cert.cond8_margin < 0.0);
}

TEST_CASE("deep dog bone re-enters radial rays") {
    DogBoneObstacle bone(0.3, 1.0, 2.8, 0);
    SphereBody body({0, 0, 0}, 2.9);
    SamplingSpec spec;
    spec.surface_samples = 1200;
    spec.ray_march_step = 0.05;
    spec.box_halfwidth = 4.0;
    IlluminationCertificate cert = illuminate(bone, body, spec);
    CHECK_FALSE(cert.pass);
    bool saw_reentry = false;
    for (const auto& f : cert.failures)
        if (f.note == "ray-reentry") saw_reentry = true;
    CHECK(saw_reentry);
    CHECK(cert.min_nu_dot_n < 0.0);
}

TEST_CASE("a0 bound holds on exterior samples") {
    DogBoneObstacle bone(0.6, 1.0, 2.0, 0);
    SphereBody body({0, 0, 0}, 2.1);
    SamplingSpec spec;
    spec.surface_samples = 800;
    spec.ray_march_step = 0.05;
    spec.box_halfwidth = 3.5;
    IlluminationCertificate cert = illuminate(bone, body, spec);
    REQUIRE(cert.pass);
    CHECK(cert.a0 > 0.0);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-3.4, 3.4);
    for (int n = 0; n < 2000; ++n) {
        Vec3 x{u(rng), u(rng), u(rng)};
        if (bone.inside(x) || x.norm() < 1e-6) continue;
        double srho = body.to_coords(x).s + body.rho2_max();
        CHECK(srho >= cert.a0 * x.norm() - 1e-9);
    }
}

TEST_CASE("implication: positive margin forces eta0 below one") {
    // certified spheroid scenes with increasing elongation
    for (double c : {1.02, 1.04, 1.06}) {
        BallObstacle ball({0, 0, 0}, 0.75);
        SpheroidBody body({0, 0, 0}, 1.0, c, 2);
        SamplingSpec spec;
        spec.surface_samples = 700;
        spec.ray_march_step = 0.05;
        spec.box_halfwidth = 3.0;
        IlluminationCertificate cert = illuminate(ball, body, spec);
        if (cert.pass) {
            CHECK(cert.cond8_margin > 0.0);
            CHECK(cert.eta0 < 1.0);
        }
    }
}

TEST_CASE("scene parsing errors name the missing field") {
    CHECK_THROWS_WITH_AS(parse_scene(nlohmann::json::parse(R"({"obstacle":{"kind":"none"}})")),
                         doctest::Contains("'body'"), ConfigError);
    CHECK_THROWS_WITH_AS(
        parse_scene(nlohmann::json::parse(
            R"({"body":{"kind":"sphere"},"obstacle":{"kind":"none"}})")),
        doctest::Contains("'radius'"), ConfigError);
    CHECK_THROWS_AS(
        parse_scene(nlohmann::json::parse(
            R"({"body":{"kind":"cube","radius":1},"obstacle":{"kind":"none"}})")),
        ConfigError);
}

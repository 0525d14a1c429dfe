#include "illumwave/obstacle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "illumwave/errors.hpp"

namespace ilw {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

// ---------------------------------------------------------------------------
// Ball
// ---------------------------------------------------------------------------

BallObstacle::BallObstacle(const Vec3& center, double radius)
    : center_(center), radius_(radius) {
    if (!(radius > 0.0)) throw ConfigError("ball obstacle: radius must be positive");
}

std::string BallObstacle::describe() const {
    return "ball(r=" + std::to_string(radius_) + ")";
}

std::vector<BoundarySample> BallObstacle::boundary_samples(int n) const {
    // Fibonacci sphere: even coverage without clustering at the poles.
    std::vector<BoundarySample> out;
    out.reserve(size_t(std::max(n, 1)));
    double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < std::max(n, 1); ++i) {
        double zf = 1.0 - 2.0 * (double(i) + 0.5) / double(std::max(n, 1));
        double rf = std::sqrt(std::max(0.0, 1.0 - zf * zf));
        double ph = golden * double(i);
        Vec3 dir{rf * std::cos(ph), rf * std::sin(ph), zf};
        out.push_back({center_ + dir * radius_, dir});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dog bone
// ---------------------------------------------------------------------------

namespace {

// C^1 smooth maximum with its derivative, quadratic blend of width k.
struct ValDer {
    double v = 0.0, d = 0.0;
};

ValDer smooth_max(const ValDer& a, const ValDer& b, double k) {
    if (a.v - b.v >= k) return a;
    if (b.v - a.v >= k) return b;
    double h = 0.5 + 0.5 * (a.v - b.v) / k;
    double dh = 0.5 * (a.d - b.d) / k;
    ValDer r;
    r.v = b.v + (a.v - b.v) * h + k * h * (1.0 - h);
    r.d = b.d + (a.d - b.d) * h + (a.v - b.v) * dh + k * (1.0 - 2.0 * h) * dh;
    return r;
}

}  // namespace

DogBoneObstacle::DogBoneObstacle(double neck_radius, double bulge_radius,
                                 double half_length, int axis)
    : rn_(neck_radius), rb_(bulge_radius), hl_(half_length) {
    if (!(neck_radius > 0.0 && bulge_radius >= neck_radius))
        throw ConfigError("dogbone obstacle: need 0 < neck <= bulge");
    if (!(half_length > bulge_radius))
        throw ConfigError("dogbone obstacle: half_length must exceed bulge_radius");
    if (axis < 0 || axis > 2) throw ConfigError("dogbone obstacle: axis must be 0, 1 or 2");
    axisf_.axis = axis;
    k_ = half_length - bulge_radius;  // sphere center offset d
}

std::string DogBoneObstacle::describe() const {
    return "dogbone(neck=" + std::to_string(rn_) + ",bulge=" + std::to_string(rb_) +
           ",half_length=" + std::to_string(hl_) + ")";
}

// Squared profile: two sphere caps at u = +-d bridged by a neck that fades at
// the sphere centers, joined by a C^1 smooth maximum.
static ValDer dogbone_profile2(double u, double rn, double rb, double d) {
    double blend = std::max(0.25 * rn * rn, 1e-9);
    ValDer p1{rb * rb - (u - d) * (u - d), -2.0 * (u - d)};
    ValDer p2{rb * rb - (u + d) * (u + d), -2.0 * (u + d)};
    ValDer neck{rn * rn * (1.0 - u * u / (d * d)), -2.0 * rn * rn * u / (d * d)};
    return smooth_max(smooth_max(p1, p2, blend), neck, blend);
}

double DogBoneObstacle::profile_radius(double u) const {
    double v = dogbone_profile2(u, rn_, rb_, k_).v;
    return v > 0.0 ? std::sqrt(v) : 0.0;
}

bool DogBoneObstacle::inside(const Vec3& x) const {
    Vec3 p = axisf_.to_local(x);
    double u = p.z;
    if (std::abs(u) >= hl_) return false;
    double r2 = p.x * p.x + p.y * p.y;
    return r2 < dogbone_profile2(u, rn_, rb_, k_).v;
}

double DogBoneObstacle::bounding_radius() const { return std::hypot(hl_, rb_); }

Vec3 DogBoneObstacle::surface_normal(const Vec3& x) const {
    // gradient of f = rho^2 - R^2(u)
    Vec3 p = axisf_.to_local(x);
    double dR2du = dogbone_profile2(p.z, rn_, rb_, k_).d;
    Vec3 g_local{2.0 * p.x, 2.0 * p.y, -dR2du};
    double nrm = g_local.norm();
    if (nrm < 1e-14) g_local = {0.0, 0.0, p.z >= 0.0 ? 1.0 : -1.0};  // end caps
    else g_local = g_local / nrm;
    return axisf_.to_world(g_local);
}

std::vector<BoundarySample> DogBoneObstacle::boundary_samples(int n) const {
    std::vector<BoundarySample> out;
    int n_u = std::max(4, int(std::sqrt(double(std::max(n, 16)) / 2.0)) * 2);
    int n_phi = std::max(4, (std::max(n, 16) + n_u - 1) / n_u);
    out.reserve(size_t(n_u) * size_t(n_phi) + 2);
    for (int i = 0; i < n_u; ++i) {
        // cosine spacing clusters samples near the caps where R -> 0
        double t = kPi * (double(i) + 0.5) / double(n_u);
        double u = hl_ * std::cos(t);
        double R = profile_radius(u);
        for (int j = 0; j < n_phi; ++j) {
            double ph = 2.0 * kPi * double(j) / double(n_phi);
            Vec3 local{R * std::cos(ph), R * std::sin(ph), u};
            Vec3 world = axisf_.to_world(local);
            out.push_back({world, surface_normal(world)});
        }
    }
    out.push_back({axisf_.to_world(Vec3{0, 0, hl_}), axisf_.to_world(Vec3{0, 0, 1})});
    out.push_back({axisf_.to_world(Vec3{0, 0, -hl_}), axisf_.to_world(Vec3{0, 0, -1})});
    return out;
}

// ---------------------------------------------------------------------------
// Snake
// ---------------------------------------------------------------------------

SnakeObstacle::SnakeObstacle(double tube_radius, double half_length, double amplitude,
                             double frequency)
    : rt_(tube_radius), hl_(half_length), amp_(amplitude), freq_(frequency) {
    if (!(tube_radius > 0.0 && half_length > 0.0))
        throw ConfigError("snake obstacle: need tube_radius > 0 and half_length > 0");
}

std::string SnakeObstacle::describe() const {
    return "snake(r=" + std::to_string(rt_) + ",half_length=" + std::to_string(hl_) + ")";
}

Vec3 SnakeObstacle::curve(double u) const {
    return {u, amp_ * std::sin(freq_ * u), 0.0};
}

double SnakeObstacle::distance_to_curve(const Vec3& x, double* u_best) const {
    constexpr int kScan = 96;
    double best = 1e300, ub = 0.0;
    for (int i = 0; i <= kScan; ++i) {
        double u = -hl_ + 2.0 * hl_ * double(i) / double(kScan);
        double d = (x - curve(u)).norm2();
        if (d < best) { best = d; ub = u; }
    }
    // local refinement by ternary search
    double lo = std::max(-hl_, ub - 2.0 * hl_ / kScan);
    double hi = std::min(hl_, ub + 2.0 * hl_ / kScan);
    for (int it = 0; it < 60; ++it) {
        double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if ((x - curve(m1)).norm2() < (x - curve(m2)).norm2()) hi = m2;
        else lo = m1;
    }
    ub = 0.5 * (lo + hi);
    if (u_best) *u_best = ub;
    return (x - curve(ub)).norm();
}

bool SnakeObstacle::inside(const Vec3& x) const {
    return distance_to_curve(x, nullptr) < rt_;
}

double SnakeObstacle::bounding_radius() const {
    return std::hypot(hl_, amp_) + rt_;
}

std::vector<BoundarySample> SnakeObstacle::boundary_samples(int n) const {
    std::vector<BoundarySample> out;
    int n_u = std::max(8, int(std::sqrt(double(std::max(n, 32)))));
    int n_b = std::max(6, (std::max(n, 32) + n_u - 1) / n_u);
    for (int i = 0; i <= n_u; ++i) {
        double u = -hl_ + 2.0 * hl_ * double(i) / double(n_u);
        Vec3 cpt = curve(u);
        Vec3 tan = Vec3{1.0, amp_ * freq_ * std::cos(freq_ * u), 0.0}.normalized();
        Vec3 nrm = Vec3{-tan.y, tan.x, 0.0};
        Vec3 bin{0.0, 0.0, 1.0};
        for (int j = 0; j < n_b; ++j) {
            double be = 2.0 * kPi * double(j) / double(n_b);
            Vec3 dir = nrm * std::cos(be) + bin * std::sin(be);
            out.push_back({cpt + dir * rt_, dir});
        }
    }
    // spherical caps
    for (int end = 0; end < 2; ++end) {
        double u = end == 0 ? -hl_ : hl_;
        Vec3 cpt = curve(u);
        Vec3 axis = Vec3{1.0, amp_ * freq_ * std::cos(freq_ * u), 0.0}.normalized() *
                    (end == 0 ? -1.0 : 1.0);
        for (int j = 0; j < n_b; ++j) {
            double be = 2.0 * kPi * double(j) / double(n_b);
            Vec3 ortho = Vec3{-axis.y, axis.x, 0.0}.normalized();
            Vec3 dir = (axis + ortho * std::cos(be) * 0.5 +
                        Vec3{0, 0, 1} * std::sin(be) * 0.5)
                           .normalized();
            out.push_back({cpt + dir * rt_, dir});
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Binary STL mesh
// ---------------------------------------------------------------------------

MeshObstacle::MeshObstacle(const std::string& stl_path) : path_(stl_path) {
    std::ifstream in(stl_path, std::ios::binary);
    if (!in) throw ConfigError("mesh obstacle: cannot open " + stl_path);
    char header[80];
    in.read(header, 80);
    uint32_t count = 0;
    in.read(reinterpret_cast<char*>(&count), 4);
    if (!in || count == 0 || count > 50'000'000)
        throw ConfigError("mesh obstacle: invalid binary STL " + stl_path);
    tris_.reserve(count);
    for (uint32_t t = 0; t < count; ++t) {
        float raw[12];
        uint16_t attr;
        in.read(reinterpret_cast<char*>(raw), 48);
        in.read(reinterpret_cast<char*>(&attr), 2);
        if (!in) throw ConfigError("mesh obstacle: truncated STL " + stl_path);
        Tri tri;
        tri.a = {raw[3], raw[4], raw[5]};
        tri.b = {raw[6], raw[7], raw[8]};
        tri.c = {raw[9], raw[10], raw[11]};
        Vec3 n = (tri.b - tri.a).cross(tri.c - tri.a);
        double nn = n.norm();
        if (nn < 1e-30) continue;  // degenerate facet
        tri.n = n / nn;
        tris_.push_back(tri);
        for (const Vec3* v : {&tri.a, &tri.b, &tri.c})
            bound_ = std::max(bound_, v->norm());
    }
    if (tris_.empty()) throw ConfigError("mesh obstacle: no valid facets in " + stl_path);
}

std::string MeshObstacle::describe() const {
    return "mesh(" + path_ + "," + std::to_string(tris_.size()) + " tris)";
}

bool MeshObstacle::inside(const Vec3& x) const {
    // parity of crossings along +x; the slightly irrational direction avoids
    // edge-on hits for axis-aligned meshes
    Vec3 dir = Vec3{1.0, 1.3e-4, 2.7e-4}.normalized();
    int crossings = 0;
    for (const Tri& t : tris_) {
        // Moeller-Trumbore
        Vec3 e1 = t.b - t.a, e2 = t.c - t.a;
        Vec3 p = dir.cross(e2);
        double det = e1.dot(p);
        if (std::abs(det) < 1e-14) continue;
        Vec3 s = x - t.a;
        double u = s.dot(p) / det;
        if (u < 0.0 || u > 1.0) continue;
        Vec3 q = s.cross(e1);
        double v = dir.dot(q) / det;
        if (v < 0.0 || u + v > 1.0) continue;
        double dist = e2.dot(q) / det;
        if (dist > 0.0) ++crossings;
    }
    return (crossings % 2) == 1;
}

std::vector<BoundarySample> MeshObstacle::boundary_samples(int n) const {
    std::vector<BoundarySample> out;
    out.reserve(tris_.size());
    for (const Tri& t : tris_)
        out.push_back({(t.a + t.b + t.c) / 3.0, t.n});
    // refine by edge midpoints until the request is met
    size_t level = 0;
    while (int(out.size()) < n && level < 2) {
        size_t base = tris_.size();
        for (const Tri& t : tris_) {
            out.push_back({(t.a + t.b) * 0.5, t.n});
            out.push_back({(t.b + t.c) * 0.5, t.n});
            out.push_back({(t.c + t.a) * 0.5, t.n});
        }
        ++level;
        (void)base;
    }
    return out;
}

}  // namespace ilw

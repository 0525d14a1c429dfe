#ifndef ILLUMWAVE_GRID_HPP
#define ILLUMWAVE_GRID_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "illumwave/body.hpp"
#include "illumwave/obstacle.hpp"

namespace ilw {

enum NodeClass : uint8_t {
    kExterior = 0,
    kGhost = 1,     // solid node adjacent to an exterior node; holds u = 0
    kInterior = 2,  // solid node
    kWall = 3,      // padding shell outside the box; holds u = 0
};

struct GridSpec {
    double box_halfwidth = 4.0;
    double h = 0.125;
};

// Cell-centered cube [-L, L]^3 with a one-node zero shell. Node (i,j,k) with
// padded indices in [1, n] sits at -L + (i - 0.5) h. Exterior nodes carry the
// illuminating coordinates; for a sphere body those are closed-form, for a
// spheroid s and cos(theta) are precomputed.
class Grid {
public:
    int n = 0;    // nodes per axis
    int np = 0;   // n + 2 (padded)
    double L = 0.0, h = 0.0;
    std::vector<uint8_t> mask;  // np^3

    std::shared_ptr<const IlluminatingBody> body;
    std::shared_ptr<const Obstacle> obstacle;
    double rho2m = 0.0;

    // geometry cache (spheroid only)
    std::vector<double> geo_s, geo_ct;

    // exterior nodes sorted by s + rho2M ascending
    std::vector<uint32_t> srho_order;

    int64_t exterior_count = 0, ghost_count = 0, interior_count = 0;

    size_t size() const { return size_t(np) * np * np; }
    size_t idx(int i, int j, int k) const {
        return (size_t(k) * np + size_t(j)) * np + size_t(i);
    }
    void decode(size_t p, int& i, int& j, int& k) const {
        i = int(p % size_t(np));
        j = int((p / size_t(np)) % size_t(np));
        k = int(p / (size_t(np) * size_t(np)));
    }
    Vec3 node_center(int i, int j, int k) const {
        return {-L + (double(i) - 0.5) * h, -L + (double(j) - 0.5) * h,
                -L + (double(k) - 0.5) * h};
    }

    double srho_at(size_t p) const {
        if (sphere_) {
            int i, j, k;
            decode(p, i, j, k);
            return (node_center(i, j, k) - center_).norm();
        }
        return geo_s[p] + rho2m;
    }

    Vec3 nu_at(size_t p) const {
        int i, j, k;
        decode(p, i, j, k);
        Vec3 x = node_center(i, j, k);
        if (sphere_) return (x - center_).normalized();
        Vec3 local = axisf_.to_local(x - center_);
        double ct = geo_ct[p];
        double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        double w = std::sqrt(c_ * c_ * st * st + a_ * a_ * ct * ct);
        double rc = std::hypot(local.x, local.y);
        Vec3 nu_local;
        if (rc < 1e-14) {
            nu_local = {0.0, 0.0, ct >= 0.0 ? 1.0 : -1.0};
        } else {
            double f = c_ * st / (rc * w);
            nu_local = {f * local.x, f * local.y, a_ * ct / w};
        }
        return axisf_.to_world(nu_local);
    }

    // Range [lo, hi) in srho_order with srho in [a, b).
    void srho_range(double a, double b, size_t& lo, size_t& hi) const;

private:
    friend Grid build_grid(std::shared_ptr<const IlluminatingBody>,
                           std::shared_ptr<const Obstacle>, const GridSpec&, int);
    bool sphere_ = false;
    Vec3 center_;
    double a_ = 0.0, c_ = 0.0;  // spheroid radii
    AxisFrame axisf_;
};

// Masks by the obstacle inside test, precomputes coordinates for exterior
// nodes and the srho ordering. Throws ConfigError when the obstacle does not
// fit the box or an exterior node has no coordinates.
Grid build_grid(std::shared_ptr<const IlluminatingBody> body,
                std::shared_ptr<const Obstacle> obstacle, const GridSpec& spec,
                int threads);

}  // namespace ilw

#endif

#include "illumwave/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "illumwave/errors.hpp"
#include "illumwave/threading.hpp"

namespace ilw {

void Grid::srho_range(double a, double b, size_t& lo, size_t& hi) const {
    auto less_than = [&](double cut) {
        size_t first = 0, count = srho_order.size();
        while (count > 0) {
            size_t step = count / 2;
            size_t mid = first + step;
            if (srho_at(srho_order[mid]) < cut) {
                first = mid + 1;
                count -= step + 1;
            } else {
                count = step;
            }
        }
        return first;
    };
    lo = less_than(a);
    hi = less_than(b);
}

Grid build_grid(std::shared_ptr<const IlluminatingBody> body,
                std::shared_ptr<const Obstacle> obstacle, const GridSpec& spec,
                int threads) {
    if (!body) throw ConfigError("build_grid: scene has no illuminating body");
    if (!obstacle) throw ConfigError("build_grid: null obstacle");
    if (!(spec.h > 0.0)) throw ConfigError("build_grid: h must be positive");

    double n_real = 2.0 * spec.box_halfwidth / spec.h;
    int n = int(std::llround(n_real));
    if (std::abs(n_real - double(n)) > 1e-9 * std::max(1.0, n_real))
        throw ConfigError("build_grid: box_halfwidth must be an integer multiple of h/2");
    if (n < 4) throw ConfigError("build_grid: box too small for the spacing");

    if (!obstacle->empty() &&
        obstacle->bounding_radius() + 2.0 * spec.h >= spec.box_halfwidth)
        throw ConfigError("build_grid: obstacle exceeds the box (need bounding radius + 2h < L)");

    Grid g;
    g.n = n;
    g.np = n + 2;
    g.L = spec.box_halfwidth;
    g.h = spec.h;
    g.body = body;
    g.obstacle = obstacle;
    g.rho2m = body->rho2_max();
    g.mask.assign(g.size(), kWall);

    if (body->kind() == BodyKind::Sphere) {
        const auto* sb = static_cast<const SphereBody*>(body.get());
        g.sphere_ = true;
        g.center_ = sb->center();
    } else {
        const auto* pb = static_cast<const SpheroidBody*>(body.get());
        g.sphere_ = false;
        g.center_ = pb->center();
        g.a_ = pb->equatorial_radius();
        g.c_ = pb->polar_radius();
        g.axisf_.axis = pb->axis();
        g.geo_s.assign(g.size(), 0.0);
        g.geo_ct.assign(g.size(), 0.0);
    }

    // solid / exterior classification
    std::vector<int64_t> ext_per_slab(size_t(n) + 1, 0);
    parallel_for_slabs(n, threads, [&](int64_t slab) {
        int k = int(slab) + 1;
        int64_t cnt = 0;
        for (int j = 1; j <= n; ++j) {
            for (int i = 1; i <= n; ++i) {
                size_t p = g.idx(i, j, k);
                Vec3 x = g.node_center(i, j, k);
                if (obstacle->inside(x)) {
                    g.mask[p] = kInterior;
                } else {
                    g.mask[p] = kExterior;
                    ++cnt;
                }
            }
        }
        ext_per_slab[size_t(slab)] = cnt;
    });
    for (int64_t c : ext_per_slab) g.exterior_count += c;

    // ghost layer: solid nodes with an exterior 6-neighbor
    parallel_for_slabs(n, threads, [&](int64_t slab) {
        int k = int(slab) + 1;
        for (int j = 1; j <= n; ++j) {
            for (int i = 1; i <= n; ++i) {
                size_t p = g.idx(i, j, k);
                if (g.mask[p] != kInterior) continue;
                bool ghost = g.mask[p - 1] == kExterior || g.mask[p + 1] == kExterior ||
                             g.mask[p - size_t(g.np)] == kExterior ||
                             g.mask[p + size_t(g.np)] == kExterior ||
                             g.mask[p - size_t(g.np) * g.np] == kExterior ||
                             g.mask[p + size_t(g.np) * g.np] == kExterior;
                if (ghost) g.mask[p] = kGhost;
            }
        }
    });
    for (size_t p = 0; p < g.size(); ++p) {
        if (g.mask[p] == kGhost) ++g.ghost_count;
        else if (g.mask[p] == kInterior) ++g.interior_count;
    }

    // coordinates at exterior nodes
    if (!g.sphere_) {
        std::vector<std::string> slab_error(size_t(n) + 1);
        parallel_for_slabs(n, threads, [&](int64_t slab) {
            int k = int(slab) + 1;
            for (int j = 1; j <= n; ++j) {
                for (int i = 1; i <= n; ++i) {
                    size_t p = g.idx(i, j, k);
                    if (g.mask[p] != kExterior) continue;
                    Vec3 x = g.node_center(i, j, k);
                    try {
                        IlluminatingCoords c = body->to_coords(x);
                        g.geo_s[p] = c.s;
                        g.geo_ct[p] = std::cos(c.sigma1);
                    } catch (const std::exception& e) {
                        if (slab_error[size_t(slab)].empty())
                            slab_error[size_t(slab)] =
                                "build_grid: exterior node without coordinates at (" +
                                std::to_string(x.x) + ", " + std::to_string(x.y) + ", " +
                                std::to_string(x.z) + "): " + e.what();
                    }
                }
            }
        });
        for (const auto& err : slab_error)
            if (!err.empty()) throw ConfigError(err);
    }

    g.srho_order.reserve(size_t(g.exterior_count));
    for (size_t p = 0; p < g.size(); ++p)
        if (g.mask[p] == kExterior) g.srho_order.push_back(uint32_t(p));
    std::sort(g.srho_order.begin(), g.srho_order.end(), [&](uint32_t a, uint32_t b) {
        double sa = g.srho_at(a), sb = g.srho_at(b);
        if (sa != sb) return sa < sb;
        return a < b;
    });
    return g;
}

}  // namespace ilw

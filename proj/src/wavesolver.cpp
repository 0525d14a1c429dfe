#include "illumwave/wavesolver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "illumwave/errors.hpp"
#include "illumwave/threading.hpp"

namespace ilw {

namespace {

inline double pow5(double u) {
    double u2 = u * u;
    return u2 * u2 * u;
}
inline double pow6(double u) {
    double u2 = u * u;
    return u2 * u2 * u2;
}

double bump_value(const BumpSpec& b, const Vec3& x) {
    double q = 1.0 - (x - b.center).norm2() / (b.radius * b.radius);
    if (q <= 0.0) return 0.0;
    double q2 = q * q;
    return b.amplitude * q2 * q2;
}

std::string node_string(const Grid& g, int i, int j, int k) {
    Vec3 x = g.node_center(i, j, k);
    return "(i,j,k)=(" + std::to_string(i) + "," + std::to_string(j) + "," +
           std::to_string(k) + ") x=(" + std::to_string(x.x) + "," +
           std::to_string(x.y) + "," + std::to_string(x.z) + ")";
}

// Per-record reductions over exterior nodes; all sums already multiplied by h^3.
// The energy column is the staggered leapfrog invariant at t + dt/2:
//   1/2 ||(u+ - u0)/dt||^2 - 1/2 (u+, Lap_h u0) + (F(u+) + F(u0))/2,
// exactly conserved by the linear scheme and nonnegative at CFL <= 0.5.
struct RecordSums {
    double energy = 0.0;
    double l6_cone = 0.0;       // u^6/6 over {srho <= t+M}
    double l6_omega = 0.0;      // u^6 over Omega
    double e_ext_cone = 0.0;    // e(u) over {srho > t+M}
    double phi = 0.0;           // tangential + radial functional over {srho <= eps*t+M}
    double l10_p10 = 0.0;       // u^10
    double l12_p12 = 0.0;       // u^12
    double e0_diff = 0.0;       // energy seminorm of u - v (when the twin runs)
};

RecordSums record_sums(const Grid& g, const std::vector<double>& up,
                       const std::vector<double>& uc, const std::vector<double>& un,
                       const std::vector<double>* vp, const std::vector<double>* vc,
                       const std::vector<double>* vn, double dt, double t, double M,
                       double eps, bool with_potential, int threads) {
    int n = g.n;
    size_t sx = 1, sy = size_t(g.np), sz = size_t(g.np) * size_t(g.np);
    double inv2h = 1.0 / (2.0 * g.h), inv2dt = 1.0 / (2.0 * dt);
    double inv_h2 = 1.0 / (g.h * g.h), inv_dt = 1.0 / dt;
    double cone_cut = t + M, phi_cut = eps * t + M;
    std::vector<RecordSums> partial(static_cast<size_t>(n));

    parallel_for_slabs(n, threads, [&](int64_t slab) {
        int k = int(slab) + 1;
        RecordSums s;
        for (int j = 1; j <= n; ++j) {
            size_t row = g.idx(1, j, k);
            for (int i = 1; i <= n; ++i) {
                size_t p = row + size_t(i - 1);
                if (g.mask[p] != kExterior) continue;
                double u = uc[p];
                double dud = (un[p] - up[p]) * inv2dt;
                double gx = (uc[p + sx] - uc[p - sx]) * inv2h;
                double gy = (uc[p + sy] - uc[p - sy]) * inv2h;
                double gz = (uc[p + sz] - uc[p - sz]) * inv2h;
                double g2 = gx * gx + gy * gy + gz * gz;
                double u6 = pow6(u);
                double e = 0.5 * (dud * dud + g2) + u6 / 6.0;
                double v = (un[p] - uc[p]) * inv_dt;
                double lap0 = ((uc[p - sx] + uc[p + sx]) + (uc[p - sy] + uc[p + sy]) +
                               (uc[p - sz] + uc[p + sz]) - 6.0 * u) * inv_h2;
                s.energy += 0.5 * v * v - 0.5 * un[p] * lap0 +
                            (with_potential ? (pow6(un[p]) + u6) / 12.0 : 0.0);
                s.l6_omega += u6;
                s.l10_p10 += u6 * u * u * u * u;
                s.l12_p12 += u6 * u6;
                double srho = g.srho_at(p);
                if (srho <= cone_cut) s.l6_cone += u6 / 6.0;
                else s.e_ext_cone += e;
                if (srho <= phi_cut) {
                    Vec3 nu = g.nu_at(p);
                    double ds = gx * nu.x + gy * nu.y + gz * nu.z;
                    double radial = ds + u / srho;
                    double tang = std::max(g2 - ds * ds, 0.0);
                    s.phi += tang + radial * radial;
                }
                if (vp) {
                    double ddt = ((un[p] - (*vn)[p]) - (up[p] - (*vp)[p])) * inv2dt;
                    double dx = ((uc[p + sx] - (*vc)[p + sx]) -
                                 (uc[p - sx] - (*vc)[p - sx])) * inv2h;
                    double dy = ((uc[p + sy] - (*vc)[p + sy]) -
                                 (uc[p - sy] - (*vc)[p - sy])) * inv2h;
                    double dz = ((uc[p + sz] - (*vc)[p + sz]) -
                                 (uc[p - sz] - (*vc)[p - sz])) * inv2h;
                    s.e0_diff += 0.5 * (ddt * ddt + dx * dx + dy * dy + dz * dz);
                }
            }
        }
        partial[size_t(slab)] = s;
    });

    RecordSums total;
    double h3 = g.h * g.h * g.h;
    for (const RecordSums& s : partial) {
        total.energy += s.energy;
        total.l6_cone += s.l6_cone;
        total.l6_omega += s.l6_omega;
        total.e_ext_cone += s.e_ext_cone;
        total.phi += s.phi;
        total.l10_p10 += s.l10_p10;
        total.l12_p12 += s.l12_p12;
        total.e0_diff += s.e0_diff;
    }
    total.energy *= h3;
    total.l6_cone *= h3;
    total.l6_omega *= h3;
    total.e_ext_cone *= h3;
    total.phi *= h3;
    total.l10_p10 *= h3;
    total.l12_p12 *= h3;
    total.e0_diff *= h3;
    return total;
}

// Flux of the band {t+M <= s+rho2M < t+dt+M} evaluated at the half step,
// with the sqrt(2) cone-measure factor. Reports the band cell count.
double flux_band(const Grid& g, const std::vector<double>& uc,
                 const std::vector<double>& un, double dt, double t, double M,
                 int64_t& cells) {
    size_t lo, hi;
    g.srho_range(t + M, t + dt + M, lo, hi);
    cells += int64_t(hi - lo);
    size_t sx = 1, sy = size_t(g.np), sz = size_t(g.np) * size_t(g.np);
    double inv2h = 1.0 / (2.0 * g.h);
    double sum = 0.0;
    for (size_t m = lo; m < hi; ++m) {
        size_t p = g.srho_order[m];
        double umid = 0.5 * (uc[p] + un[p]);
        double dud = (un[p] - uc[p]) / dt;
        double gx = 0.5 * ((uc[p + sx] + un[p + sx]) - (uc[p - sx] + un[p - sx])) * inv2h;
        double gy = 0.5 * ((uc[p + sy] + un[p + sy]) - (uc[p - sy] + un[p - sy])) * inv2h;
        double gz = 0.5 * ((uc[p + sz] + un[p + sz]) - (uc[p - sz] + un[p - sz])) * inv2h;
        Vec3 nu = g.nu_at(p);
        double fx = nu.x * dud + gx, fy = nu.y * dud + gy, fz = nu.z * dud + gz;
        sum += 0.5 * (fx * fx + fy * fy + fz * fz) + pow6(umid) / 6.0;
    }
    return std::sqrt(2.0) * sum * g.h * g.h * g.h;
}

int64_t step_index_of(double time, double dt, const char* what) {
    double k_real = time / dt;
    int64_t k = int64_t(std::llround(k_real));
    if (std::abs(k_real - double(k)) > 1e-9 * std::max(1.0, std::abs(k_real)))
        throw ConfigError(std::string(what) + " must be an integer multiple of dt");
    return k;
}

}  // namespace

WaveState init_state(const Grid& grid, const SolverConfig& cfg) {
    if (cfg.cfl > 0.5 + 1e-12 || cfg.cfl <= 0.0)
        throw ConfigError("init_state: CFL must lie in (0, 0.5]");
    if (cfg.M < grid.rho2m - 1e-12)
        throw ConfigError("init_state: M must satisfy M >= rho_2M of the body");

    double support = cfg.bump.center.norm() + cfg.bump.radius;
    if (cfg.bump.amplitude != 0.0) {
        double reach = std::max({std::abs(cfg.bump.center.x), std::abs(cfg.bump.center.y),
                                 std::abs(cfg.bump.center.z)}) +
                       cfg.bump.radius;
        if (reach > grid.L - 2.0 * grid.h)
            throw ConfigError("init_state: bump support does not fit the box");
    }
    if (!cfg.allow_reflections && cfg.bump.amplitude != 0.0) {
        if (grid.L < support + cfg.t_final + 2.0 * grid.h)
            throw ConfigError(
                "init_state: box too small for the propagation guard "
                "(need L >= support + t_final + 2h, or set allow_reflections)");
    }

    WaveState s;
    s.dt = cfg.cfl * cfg.h;
    s.t = 0.0;
    s.u_curr.assign(grid.size(), 0.0);
    s.u_prev.assign(grid.size(), 0.0);

    for (int k = 1; k <= grid.n; ++k) {
        for (int j = 1; j <= grid.n; ++j) {
            for (int i = 1; i <= grid.n; ++i) {
                size_t p = grid.idx(i, j, k);
                if (grid.mask[p] != kExterior) {
                    // the bump must vanish on solid nodes
                    if (bump_value(cfg.bump, grid.node_center(i, j, k)) != 0.0)
                        throw ConfigError("init_state: bump support overlaps the obstacle at " +
                                          node_string(grid, i, j, k));
                    continue;
                }
                s.u_curr[p] = bump_value(cfg.bump, grid.node_center(i, j, k));
            }
        }
    }

    // zero initial velocity: u(-dt) = u0 + dt^2/2 (Lap u0 - u0^5)
    size_t sx = 1, sy = size_t(grid.np), sz = size_t(grid.np) * size_t(grid.np);
    double inv_h2 = 1.0 / (grid.h * grid.h);
    double half_dt2 = 0.5 * s.dt * s.dt;
    for (int k = 1; k <= grid.n; ++k) {
        for (int j = 1; j <= grid.n; ++j) {
            for (int i = 1; i <= grid.n; ++i) {
                size_t p = grid.idx(i, j, k);
                if (grid.mask[p] != kExterior) continue;
                const double* u = s.u_curr.data();
                double lap = ((u[p - sx] + u[p + sx]) + (u[p - sy] + u[p + sy]) +
                              (u[p - sz] + u[p + sz]) - 6.0 * u[p]) * inv_h2;
                double rhs = lap - (cfg.nonlinear ? pow5(u[p]) : 0.0);
                s.u_prev[p] = s.u_curr[p] + half_dt2 * rhs;
            }
        }
    }
    return s;
}

double leapfrog_step(const Grid& grid, const std::vector<double>& u_prev,
                     const std::vector<double>& u_curr, std::vector<double>& u_next,
                     double dt, bool nonlinear, int threads) {
    int n = grid.n;
    size_t sx = 1, sy = size_t(grid.np), sz = size_t(grid.np) * size_t(grid.np);
    double inv_h2 = 1.0 / (grid.h * grid.h);
    double dt2 = dt * dt;
    std::vector<double> slab_max(size_t(n), 0.0);

    parallel_for_slabs(n, threads, [&](int64_t slab) {
        int k = int(slab) + 1;
        const double* up = u_prev.data();
        const double* uc = u_curr.data();
        double* un = u_next.data();
        double mx = 0.0;
        for (int j = 1; j <= n; ++j) {
            size_t row = grid.idx(1, j, k);
            for (int i = 1; i <= n; ++i) {
                size_t p = row + size_t(i - 1);
                if (grid.mask[p] != kExterior) continue;
                double c = uc[p];
                double lap = ((uc[p - sx] + uc[p + sx]) + (uc[p - sy] + uc[p + sy]) +
                              (uc[p - sz] + uc[p + sz]) - 6.0 * c) * inv_h2;
                double v = 2.0 * c - up[p] + dt2 * (lap - (nonlinear ? pow5(c) : 0.0));
                un[p] = v;
                mx = std::max(mx, std::abs(v));
            }
        }
        slab_max[size_t(slab)] = mx;
    });

    double mx = 0.0;
    for (double m : slab_max) mx = std::max(mx, m);
    if (!(mx < 1e150)) {
        for (int k = 1; k <= n; ++k)
            for (int j = 1; j <= n; ++j)
                for (int i = 1; i <= n; ++i) {
                    size_t p = grid.idx(i, j, k);
                    if (grid.mask[p] == kExterior && !(std::abs(u_next[p]) < 1e150))
                        throw InstabilityError("non-finite field value at node " +
                                               node_string(grid, i, j, k));
                }
        throw InstabilityError("non-finite field value");
    }
    return mx;
}

double total_energy(const WaveState& s, const Grid& grid, bool with_potential,
                    int threads) {
    // staggered midpoint invariant of the stored pair (u_prev, u_curr)
    int n = grid.n;
    size_t sx = 1, sy = size_t(grid.np), sz = size_t(grid.np) * size_t(grid.np);
    double inv_h2 = 1.0 / (grid.h * grid.h);
    std::vector<double> partial(size_t(n), 0.0);
    parallel_for_slabs(n, threads, [&](int64_t slab) {
        int k = int(slab) + 1;
        const double* uc = s.u_curr.data();
        const double* up = s.u_prev.data();
        double acc = 0.0;
        for (int j = 1; j <= n; ++j) {
            for (int i = 1; i <= n; ++i) {
                size_t p = grid.idx(i, j, k);
                if (grid.mask[p] != kExterior) continue;
                double v = (uc[p] - up[p]) / s.dt;
                double lap_p = ((up[p - sx] + up[p + sx]) + (up[p - sy] + up[p + sy]) +
                                (up[p - sz] + up[p + sz]) - 6.0 * up[p]) * inv_h2;
                acc += 0.5 * v * v - 0.5 * uc[p] * lap_p +
                       (with_potential ? (pow6(uc[p]) + pow6(up[p])) / 12.0 : 0.0);
            }
        }
        partial[size_t(slab)] = acc;
    });
    double total = 0.0;
    for (double p : partial) total += p;
    return total * grid.h * grid.h * grid.h;
}

RegionIntegrals region_integrals(const WaveState& s, const Grid& grid, double T,
                                 double M, int threads) {
    int n = grid.n;
    size_t sx = 1, sy = size_t(grid.np), sz = size_t(grid.np) * size_t(grid.np);
    double inv2h = 1.0 / (2.0 * grid.h);
    struct Part { double l6 = 0, eext = 0, l10 = 0, l12 = 0; };
    std::vector<Part> partial(static_cast<size_t>(n));
    parallel_for_slabs(n, threads, [&](int64_t slab) {
        int k = int(slab) + 1;
        const double* uc = s.u_curr.data();
        const double* up = s.u_prev.data();
        Part acc;
        for (int j = 1; j <= n; ++j) {
            for (int i = 1; i <= n; ++i) {
                size_t p = grid.idx(i, j, k);
                if (grid.mask[p] != kExterior) continue;
                double um = 0.5 * (uc[p] + up[p]);
                double u6 = pow6(um);
                double srho = grid.srho_at(p);
                if (srho <= T + M) {
                    acc.l6 += u6 / 6.0;
                } else {
                    double dud = (uc[p] - up[p]) / s.dt;
                    double gx = 0.5 * ((uc[p + sx] + up[p + sx]) - (uc[p - sx] + up[p - sx])) * inv2h;
                    double gy = 0.5 * ((uc[p + sy] + up[p + sy]) - (uc[p - sy] + up[p - sy])) * inv2h;
                    double gz = 0.5 * ((uc[p + sz] + up[p + sz]) - (uc[p - sz] + up[p - sz])) * inv2h;
                    acc.eext += 0.5 * (dud * dud + gx * gx + gy * gy + gz * gz) + u6 / 6.0;
                }
                acc.l10 += u6 * um * um * um * um;
                acc.l12 += u6 * u6;
            }
        }
        partial[size_t(slab)] = acc;
    });
    Part total;
    for (const Part& p : partial) {
        total.l6 += p.l6;
        total.eext += p.eext;
        total.l10 += p.l10;
        total.l12 += p.l12;
    }
    double h3 = grid.h * grid.h * grid.h;
    RegionIntegrals out;
    out.l6_cone_slice = total.l6 * h3;
    out.energy_exterior_cone = total.eext * h3;
    out.l10_norm = std::pow(total.l10 * h3, 0.1);
    out.l12_norm = std::pow(total.l12 * h3, 1.0 / 12.0);
    return out;
}

RunResult run_simulation(const Grid& grid, const SolverConfig& cfg,
                         const CheckpointSink& on_checkpoint) {
    WaveState state = init_state(grid, cfg);
    double dt = state.dt;

    int64_t n_steps = step_index_of(cfg.t_final, dt, "t_final");
    int64_t cadence = step_index_of(cfg.record_dt, dt, "record_dt");
    if (cadence < 1) throw ConfigError("record_dt must be at least dt");
    int64_t k_match = cfg.compare_from >= 0.0
                          ? step_index_of(cfg.compare_from, dt, "compare_from")
                          : -1;
    std::vector<int64_t> ckpt_steps;
    for (double tc : cfg.checkpoint_times)
        ckpt_steps.push_back(step_index_of(tc, dt, "checkpoint time"));

    double eps = cfg.eta0 >= 0.0 && cfg.eta0 <= 1.0 ? 1.0 - std::sqrt(cfg.eta0) : 0.0;

    RunResult out;
    out.meta.h = cfg.h;
    out.meta.dt = dt;
    out.meta.L = grid.L;
    out.meta.M = cfg.M;
    out.meta.eta0 = cfg.eta0;
    out.meta.epsilon = eps;
    out.meta.steps = n_steps;
    for (const char* c :
         {"t", "E", "L6_D_t", "flux_0_t", "phi_t", "l5l10_partial", "l4l12_partial",
          "l6_omega", "e_ext_cone", "l10_norm", "l12_norm", "e0_diff", "mantle_cells"})
        out.series.add_column(c);

    std::vector<double> u_next(grid.size(), 0.0);
    std::vector<double> v_prev, v_curr, v_next;
    bool shadow = false;

    double flux_acc = 0.0;
    int64_t mantle_cells = 0;
    double s5_acc = 0.0, s4_acc = 0.0;  // running time integrals of the norm powers
    double last_rec_t = 0.0, last_l10_5 = 0.0, last_l12_4 = 0.0;
    bool have_prev_rec = false;

    for (int64_t k = 0; k <= n_steps; ++k) {
        double t = double(k) * dt;
        try {
            leapfrog_step(grid, state.u_prev, state.u_curr, u_next, dt, cfg.nonlinear,
                          cfg.threads);
        } catch (const InstabilityError& e) {
            out.meta.aborted = true;
            out.meta.abort_reason = e.what();
            break;
        }

        if (k_match >= 0 && k == k_match) {
            v_prev = state.u_prev;
            v_curr = state.u_curr;
            v_next.assign(grid.size(), 0.0);
            shadow = true;
        }
        if (shadow)
            leapfrog_step(grid, v_prev, v_curr, v_next, dt, false, cfg.threads);

        if (k % cadence == 0 || k == n_steps) {
            RecordSums sums = record_sums(
                grid, state.u_prev, state.u_curr, u_next, shadow ? &v_prev : nullptr,
                shadow ? &v_curr : nullptr, shadow ? &v_next : nullptr, dt, t, cfg.M,
                eps, cfg.nonlinear, cfg.threads);
            double l10 = std::pow(sums.l10_p10, 0.1);
            double l12 = std::pow(sums.l12_p12, 1.0 / 12.0);
            double f5 = std::pow(l10, 5.0), f4 = std::pow(l12, 4.0);
            if (have_prev_rec) {
                s5_acc += 0.5 * (last_l10_5 + f5) * (t - last_rec_t);
                s4_acc += 0.5 * (last_l12_4 + f4) * (t - last_rec_t);
            }
            last_rec_t = t;
            last_l10_5 = f5;
            last_l12_4 = f4;
            have_prev_rec = true;
            if (k == 0) out.meta.energy_initial = sums.energy;
            out.series.append_row({t, sums.energy, sums.l6_cone, flux_acc, sums.phi,
                                   std::pow(s5_acc, 0.2), std::pow(s4_acc, 0.25),
                                   sums.l6_omega, sums.e_ext_cone, l10, l12,
                                   sums.e0_diff, double(mantle_cells)});
        }

        for (int64_t cs : ckpt_steps) {
            if (cs == k && on_checkpoint)
                on_checkpoint(grid, state.u_curr, state.u_prev, t, dt);
        }

        if (k == n_steps) break;
        flux_acc += flux_band(grid, state.u_curr, u_next, dt, t, cfg.M, mantle_cells);
        std::swap(state.u_prev, state.u_curr);
        std::swap(state.u_curr, u_next);
        if (shadow) {
            std::swap(v_prev, v_curr);
            std::swap(v_curr, v_next);
        }
        state.t = double(k + 1) * dt;
    }
    return out;
}

void write_checkpoint(const std::string& path, const Grid& grid, const WaveState& s) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("checkpoint: cannot write " + path);
    char magic[4] = {'I', 'L', 'W', '1'};
    uint32_t dims[3] = {uint32_t(grid.n), uint32_t(grid.n), uint32_t(grid.n)};
    double h = grid.h, t = s.t;
    out.write(magic, 4);
    out.write(reinterpret_cast<const char*>(dims), 12);
    out.write(reinterpret_cast<const char*>(&h), 8);
    out.write(reinterpret_cast<const char*>(&t), 8);
    std::vector<double> row(size_t(grid.n));
    for (const std::vector<double>* field : {&s.u_curr, &s.u_prev}) {
        for (int k = 1; k <= grid.n; ++k) {
            for (int j = 1; j <= grid.n; ++j) {
                for (int i = 1; i <= grid.n; ++i) row[size_t(i - 1)] = (*field)[grid.idx(i, j, k)];
                out.write(reinterpret_cast<const char*>(row.data()),
                          std::streamsize(row.size() * 8));
            }
        }
    }
    if (!out) throw ConfigError("checkpoint: short write to " + path);
}

WaveState read_checkpoint(const std::string& path, const Grid& grid) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("checkpoint: cannot open " + path);
    char magic[4];
    uint32_t dims[3];
    double h = 0, t = 0;
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(dims), 12);
    in.read(reinterpret_cast<char*>(&h), 8);
    in.read(reinterpret_cast<char*>(&t), 8);
    if (!in || std::memcmp(magic, "ILW1", 4) != 0)
        throw ConfigError("checkpoint: bad magic in " + path);
    if (int(dims[0]) != grid.n || int(dims[1]) != grid.n || int(dims[2]) != grid.n)
        throw ConfigError("checkpoint: grid dimensions mismatch in " + path);
    if (std::abs(h - grid.h) > 1e-12 * grid.h)
        throw ConfigError("checkpoint: spacing mismatch in " + path);
    WaveState s;
    s.t = t;
    s.dt = 0.0;  // caller restores dt from its config
    s.u_curr.assign(grid.size(), 0.0);
    s.u_prev.assign(grid.size(), 0.0);
    std::vector<double> row(size_t(grid.n));
    for (std::vector<double>* field : {&s.u_curr, &s.u_prev}) {
        for (int k = 1; k <= grid.n; ++k) {
            for (int j = 1; j <= grid.n; ++j) {
                in.read(reinterpret_cast<char*>(row.data()), std::streamsize(row.size() * 8));
                if (!in) throw ConfigError("checkpoint: truncated file " + path);
                for (int i = 1; i <= grid.n; ++i) (*field)[grid.idx(i, j, k)] = row[size_t(i - 1)];
            }
        }
    }
    return s;
}

}  // namespace ilw

#ifndef ILLUMWAVE_WAVESOLVER_HPP
#define ILLUMWAVE_WAVESOLVER_HPP

#include <functional>
#include <string>
#include <vector>

#include "illumwave/csv.hpp"
#include "illumwave/grid.hpp"

namespace ilw {

struct BumpSpec {
    Vec3 center;
    double radius = 1.0;
    double amplitude = 0.0;
};

struct SolverConfig {
    double h = 0.125;
    double cfl = 0.5;
    double t_final = 8.0;
    double box_halfwidth = 4.0;
    bool nonlinear = true;
    BumpSpec bump;
    double M = 1.0;
    double record_dt = 0.25;
    // When false the grid must satisfy L >= |bump.center| + bump.radius +
    // t_final + 2h, so no signal reaches the box walls. Energy-conservation
    // runs may waive the guard: the walls are Dirichlet and conserve energy.
    bool allow_reflections = false;
    double compare_from = -1.0;  // >= 0: track a linear twin from this time
    std::vector<double> checkpoint_times;
    int threads = 1;
    double eta0 = 0.0;  // certificate aggregate; epsilon = 1 - sqrt(eta0)
};

struct WaveState {
    std::vector<double> u_curr, u_prev;  // padded grids
    double t = 0.0;
    double dt = 0.0;
};

// Quartic bump A (1 - |x-x0|^2/r^2)^4 with zero velocity; u_prev is set by a
// second-order backward step. Throws ConfigError when the bump overlaps the
// obstacle or does not fit the box.
WaveState init_state(const Grid& grid, const SolverConfig& cfg);

// One leapfrog step into u_next; returns the max |u_next|. Throws
// InstabilityError (naming the first offending node) on non-finite values.
double leapfrog_step(const Grid& grid, const std::vector<double>& u_prev,
                     const std::vector<double>& u_curr, std::vector<double>& u_next,
                     double dt, bool nonlinear, int threads);

// Midpoint-in-time discrete energy from the two stored levels: the staggered
// leapfrog invariant, with the quintic potential included when the run is
// nonlinear (the linear equation conserves the quadratic part alone).
double total_energy(const WaveState& s, const Grid& grid, bool with_potential = true,
                    int threads = 1);

struct RegionIntegrals {
    double l6_cone_slice = 0.0;       // integral of u^6/6 over {s+rho2M <= T+M}
    double energy_exterior_cone = 0.0;  // integral of e(u) over {s+rho2M > T+M}
    double l10_norm = 0.0;            // ||u||_L10(Omega)
    double l12_norm = 0.0;
};

RegionIntegrals region_integrals(const WaveState& s, const Grid& grid, double T,
                                 double M, int threads = 1);

struct RunMeta {
    double h = 0.0, dt = 0.0, L = 0.0, M = 0.0;
    double eta0 = 0.0, epsilon = 0.0;
    double energy_initial = 0.0;
    int64_t steps = 0;
    bool aborted = false;
    std::string abort_reason;
};

struct RunResult {
    CsvTable series;
    RunMeta meta;
};

using CheckpointSink = std::function<void(const Grid&, const std::vector<double>& u_curr,
                                          const std::vector<double>& u_prev, double t,
                                          double dt)>;

// Full evolution with per-step flux accumulation and cadence records. Columns:
// t, E, L6_D_t, flux_0_t, phi_t, l5l10_partial, l4l12_partial, l6_omega,
// e_ext_cone, l10_norm, l12_norm, e0_diff. Instability yields a flagged
// partial series instead of throwing.
RunResult run_simulation(const Grid& grid, const SolverConfig& cfg,
                         const CheckpointSink& on_checkpoint = nullptr);

// Checkpoint: 32-byte header (magic "ILW1", u32 nx ny nz, f64 h, f64 t), then
// u_curr and u_prev as row-major unpadded little-endian doubles.
void write_checkpoint(const std::string& path, const Grid& grid, const WaveState& s);
WaveState read_checkpoint(const std::string& path, const Grid& grid);

}  // namespace ilw

#endif

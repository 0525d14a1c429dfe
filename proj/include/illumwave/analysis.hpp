#ifndef ILLUMWAVE_ANALYSIS_HPP
#define ILLUMWAVE_ANALYSIS_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "illumwave/csv.hpp"

namespace ilw {

// Run metadata the audits need, normally taken from the run manifest.
struct SeriesMeta {
    double energy_initial = 0.0;
    double M = 1.0;
    double eta0 = 0.0;
    double epsilon = 1.0;
    double h = 0.0, dt = 0.0;
};

struct AuditEntry {
    std::string name;
    bool pass = false;
    double worst_margin = 0.0;  // most negative normalized margin over the series
    std::string detail;
    std::vector<double> margins;  // per-record margin series where applicable
};

// Constants of the Proposition-type differential inequality
//   sqrt(eta0) phi(T) + int_{D(T)} u^6/3
//     <= 2 c1 beta E + (C0 E + C2 E ln(1+T) + 2(c2 + c3 T) flux(0,T))/T
//        + eta0 psi(T),
// fitted as the smallest uniform multiple of a column-normalized profile; the
// unconstrained minimal-sum LP solution is kept as a diagnostic.
struct Prop32Fit {
    bool feasible = false;
    double beta = 0.5;
    double lambda = 0.0;
    double c1 = 0.0, C0 = 0.0, C2 = 0.0, c2 = 0.0, c3 = 0.0;
    std::vector<double> lp_min_sum;  // same ordering: c1, C0, C2, c2, c3

    std::vector<double> as_vector() const { return {c1, C0, C2, c2, c3}; }
};

struct DecayFunctionals {
    std::vector<double> times;
    std::vector<double> phi;
    std::vector<double> psi;  // (1/T) int_0^T phi, cumulative trapezoid
};

// psi from the recorded phi column; psi(0) takes the limiting value phi(0).
DecayFunctionals decay_functionals(const CsvTable& series);

// psi(T) by linear interpolation of the records. Throws ConfigError when T
// precedes the first record or exceeds the last.
double psi_at(const DecayFunctionals& f, double T);

// Mantle flux accumulated over a time window, from the recorded cumulative
// series. The per-step bands tile the slab, so windows add exactly.
struct FluxRecord {
    double t_begin = 0.0, t_end = 0.0;
    double value = 0.0;        // flux(t_begin, t_end) >= 0
    int64_t mantle_cells = 0;  // band cells swept in the window
};

// Throws ConfigError when the window ends are not recorded times.
FluxRecord flux_window(const CsvTable& series, double a, double b);

// Interior L6 decay summary.
struct L6Report {
    double initial = 0.0;
    double at_final = 0.0;
    double tail_max = 0.0;        // max over the second half of the run
    double logslope = 0.0;        // least-squares slope of log L6 vs log t, t >= 1
    double final_over_initial = 0.0;
};

L6Report l6_decay_report(const CsvTable& series);

struct SpacetimeReport {
    double l5l10_total = 0.0;
    double l4l12_total = 0.0;
    double l5l10_tail_fraction = 0.0;  // growth over the last quarter, by power
    double l4l12_tail_fraction = 0.0;
};

SpacetimeReport spacetime_norms(const CsvTable& series);

struct AnalysisReport {
    std::vector<AuditEntry> entries;
    Prop32Fit fit;
    L6Report l6;
    SpacetimeReport spacetime;

    bool all_pass() const;
    nlohmann::json to_json() const;
};

// Runs every audit on a recorded series:
//  - exterior cone estimate with 5% E slack,
//  - flux monotonicity and the sqrt(2) budget,
//  - the discrete psi identity psi + T dpsi/dT = phi,
//  - the Proposition fit (margins >= -5%),
//  - the Gronwall bound psi(T) <= J(T) + psi(1)/T^(1-eta).
// Throws DomainError when eta0 >= 1 (certificate must rule this out first).
AnalysisReport audit_run(const CsvTable& series, const SeriesMeta& meta, double beta);

// Component-wise relative deviation of two fits (refinement stability).
double fit_relative_shift(const Prop32Fit& a, const Prop32Fit& b);

// Plot-ready CSV of t against every audited functional.
CsvTable audit_plot_table(const CsvTable& series, const SeriesMeta& meta,
                          const AnalysisReport& report);

}  // namespace ilw

#endif

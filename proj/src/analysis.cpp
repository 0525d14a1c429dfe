#include "illumwave/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "illumwave/errors.hpp"
#include "illumwave/lp.hpp"

namespace ilw {

namespace {

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace

DecayFunctionals decay_functionals(const CsvTable& series) {
    DecayFunctionals f;
    f.times = series.col("t");
    f.phi = series.col("phi_t");
    if (f.times.empty()) throw ConfigError("decay_functionals: empty series");
    f.psi.resize(f.times.size());
    double integral = 0.0;
    f.psi[0] = f.phi[0];
    for (size_t k = 1; k < f.times.size(); ++k) {
        double dtk = f.times[k] - f.times[k - 1];
        if (!(dtk > 0.0)) throw ConfigError("decay_functionals: times must increase");
        integral += 0.5 * (f.phi[k] + f.phi[k - 1]) * dtk;
        f.psi[k] = integral / f.times[k];
    }
    return f;
}

double psi_at(const DecayFunctionals& f, double T) {
    if (f.times.empty() || T < f.times.front() - 1e-12 || T > f.times.back() + 1e-12)
        throw ConfigError("psi_at: T outside the recorded range");
    for (size_t k = 1; k < f.times.size(); ++k) {
        if (T <= f.times[k] + 1e-12) {
            double w = (T - f.times[k - 1]) / (f.times[k] - f.times[k - 1]);
            w = std::clamp(w, 0.0, 1.0);
            return f.psi[k - 1] + w * (f.psi[k] - f.psi[k - 1]);
        }
    }
    return f.psi.back();
}

FluxRecord flux_window(const CsvTable& series, double a, double b) {
    if (!(b >= a)) throw ConfigError("flux_window: need b >= a");
    const auto& t = series.col("t");
    const auto& flux = series.col("flux_0_t");
    const auto& cells = series.col("mantle_cells");
    auto locate = [&](double T) {
        for (size_t k = 0; k < t.size(); ++k)
            if (std::abs(t[k] - T) <= 1e-9 * std::max(1.0, std::abs(T))) return k;
        throw ConfigError("flux_window: no record at t = " + format_double(T));
    };
    size_t ka = locate(a), kb = locate(b);
    FluxRecord r;
    r.t_begin = a;
    r.t_end = b;
    r.value = flux[kb] - flux[ka];
    r.mantle_cells = int64_t(cells[kb] - cells[ka]);
    return r;
}

L6Report l6_decay_report(const CsvTable& series) {
    const auto& t = series.col("t");
    const auto& l6 = series.col("l6_omega");
    L6Report r;
    if (t.empty()) return r;
    r.initial = l6.front();
    r.at_final = l6.back();
    double half = 0.5 * t.back();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (size_t k = 0; k < t.size(); ++k) {
        if (t[k] >= half) r.tail_max = std::max(r.tail_max, l6[k]);
        if (t[k] >= 1.0 && l6[k] > 0.0) {
            double lx = std::log(t[k]), ly = std::log(l6[k]);
            sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
            ++n;
        }
    }
    if (n >= 2) {
        double denom = double(n) * sxx - sx * sx;
        if (std::abs(denom) > 1e-30) r.logslope = (double(n) * sxy - sx * sy) / denom;
    }
    r.final_over_initial = r.initial > 0.0 ? r.at_final / r.initial : 0.0;
    return r;
}

SpacetimeReport spacetime_norms(const CsvTable& series) {
    const auto& t = series.col("t");
    const auto& p5 = series.col("l5l10_partial");
    const auto& p4 = series.col("l4l12_partial");
    SpacetimeReport r;
    if (t.empty()) return r;
    r.l5l10_total = p5.back();
    r.l4l12_total = p4.back();
    double cut = 0.75 * t.back();
    double p5_cut = p5.front(), p4_cut = p4.front();
    for (size_t k = 0; k < t.size(); ++k) {
        if (t[k] <= cut) {
            p5_cut = p5[k];
            p4_cut = p4[k];
        }
    }
    // fractions in terms of the integrated powers, so increments add linearly
    double tot5 = std::pow(r.l5l10_total, 5.0), tot4 = std::pow(r.l4l12_total, 4.0);
    r.l5l10_tail_fraction =
        tot5 > 0.0 ? (tot5 - std::pow(p5_cut, 5.0)) / tot5 : 0.0;
    r.l4l12_tail_fraction =
        tot4 > 0.0 ? (tot4 - std::pow(p4_cut, 4.0)) / tot4 : 0.0;
    return r;
}

bool AnalysisReport::all_pass() const {
    for (const auto& e : entries)
        if (!e.pass) return false;
    return true;
}

nlohmann::json AnalysisReport::to_json() const {
    nlohmann::json j;
    nlohmann::json ents = nlohmann::json::array();
    for (const auto& e : entries) {
        nlohmann::json je = {{"name", e.name},
                             {"pass", e.pass},
                             {"worst_margin", e.worst_margin},
                             {"detail", e.detail}};
        if (!e.margins.empty()) je["margins"] = e.margins;
        ents.push_back(je);
    }
    j["inequalities"] = ents;
    j["all_pass"] = all_pass();
    j["prop_fit"] = {{"feasible", fit.feasible}, {"beta", fit.beta},
                     {"lambda", fit.lambda},     {"c1", fit.c1},
                     {"C0", fit.C0},             {"C2", fit.C2},
                     {"c2", fit.c2},             {"c3", fit.c3},
                     {"lp_min_sum", fit.lp_min_sum}};
    j["l6"] = {{"initial", l6.initial},
               {"final", l6.at_final},
               {"tail_max", l6.tail_max},
               {"logslope", l6.logslope},
               {"final_over_initial", l6.final_over_initial}};
    j["spacetime"] = {{"l5l10_total", spacetime.l5l10_total},
                      {"l4l12_total", spacetime.l4l12_total},
                      {"l5l10_tail_fraction", spacetime.l5l10_tail_fraction},
                      {"l4l12_tail_fraction", spacetime.l4l12_tail_fraction}};
    return j;
}

AnalysisReport audit_run(const CsvTable& series, const SeriesMeta& meta, double beta) {
    if (meta.eta0 >= 1.0)
        throw DomainError(
            "audit: eta0 >= 1, the decay machinery does not apply; "
            "see the geometry certificate");
    if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("audit: beta must lie in (0,1)");

    AnalysisReport rep;
    rep.fit.beta = beta;

    const auto& t = series.col("t");
    const auto& flux = series.col("flux_0_t");
    const auto& l6d = series.col("L6_D_t");
    const auto& eext = series.col("e_ext_cone");
    if (t.empty()) throw ConfigError("audit: empty series");
    for (size_t k = 0; k < t.size(); ++k) {
        if (k > 0 && !(t[k] > t[k - 1]))
            throw ConfigError("audit: record times must increase strictly");
        for (const auto* col : {&flux, &l6d, &eext, &series.col("E"),
                                &series.col("phi_t")}) {
            double v = (*col)[k];
            if (!std::isfinite(v) || v < 0.0)
                throw ConfigError("audit: series has a non-finite or negative value");
        }
    }
    double E = meta.energy_initial;
    double eta = std::sqrt(meta.eta0);

    DecayFunctionals fun = decay_functionals(series);

    // --- exterior cone: e_ext(T) + flux(0,T)/sqrt(2) <= e_ext(0) + 5% E
    {
        AuditEntry e;
        e.name = "exterior_cone";
        double rhs0 = eext.front();
        double scale = std::max(E, 1e-300);
        double worst = 1e300;
        for (size_t k = 0; k < t.size(); ++k) {
            double lhs = eext[k] + flux[k] / std::sqrt(2.0);
            double m = (rhs0 + 0.05 * E - lhs) / scale;
            e.margins.push_back(m);
            worst = std::min(worst, m);
        }
        e.worst_margin = worst;
        e.pass = worst >= 0.0;
        e.detail = "rhs0=" + format_double(rhs0);
        rep.entries.push_back(e);
    }

    // --- flux monotonicity
    {
        AuditEntry e;
        e.name = "flux_monotone";
        double scale = std::max(max_abs(flux), 1e-300);
        double worst = 1e300;
        for (size_t k = 1; k < t.size(); ++k)
            worst = std::min(worst, (flux[k] - flux[k - 1]) / scale);
        if (t.size() < 2) worst = 0.0;
        e.worst_margin = worst;
        e.pass = worst >= -1e-12;
        rep.entries.push_back(e);
    }

    // --- flux budget: flux(0,T) <= sqrt(2) (e_ext(0) + 5% E)
    {
        AuditEntry e;
        e.name = "flux_budget";
        double budget = std::sqrt(2.0) * (eext.front() + 0.05 * E);
        double scale = std::max(E, 1e-300);
        double worst = 1e300;
        for (size_t k = 0; k < t.size(); ++k)
            worst = std::min(worst, (budget - flux[k]) / scale);
        e.worst_margin = worst;
        e.pass = worst >= 0.0;
        rep.entries.push_back(e);
    }

    // --- discrete psi identity: (T_{k+1} psi_{k+1} - T_k psi_k)/dt = (phi_k + phi_{k+1})/2
    {
        AuditEntry e;
        e.name = "psi_identity";
        double scale = std::max(max_abs(fun.phi), 1e-300);
        double worst = 0.0;
        for (size_t k = 1; k < t.size(); ++k) {
            double dtk = t[k] - t[k - 1];
            double lhs = (t[k] * fun.psi[k] - t[k - 1] * fun.psi[k - 1]) / dtk;
            double rhs = 0.5 * (fun.phi[k] + fun.phi[k - 1]);
            worst = std::max(worst, std::abs(lhs - rhs) / scale);
        }
        e.worst_margin = -worst;
        e.pass = worst <= 1e-9;
        rep.entries.push_back(e);
    }

    // --- Proposition fit over records with t >= 1
    std::vector<size_t> fitidx;
    for (size_t k = 0; k < t.size(); ++k)
        if (t[k] >= 1.0 - 1e-12) fitidx.push_back(k);
    {
        AuditEntry e;
        e.name = "differential_inequality";
        if (fitidx.empty()) {
            e.pass = false;
            e.detail = "series does not reach t = 1";
            rep.entries.push_back(e);
        } else {
            std::vector<std::vector<double>> A;
            std::vector<double> b;
            for (size_t k : fitidx) {
                double T = t[k];
                b.push_back(eta * fun.phi[k] + 2.0 * l6d[k] - meta.eta0 * fun.psi[k]);
                A.push_back({2.0 * beta * E, E / T, E * std::log1p(T) / T,
                             2.0 * flux[k] / T, 2.0 * flux[k]});
            }
            // column-normalized profile: smallest uniform multiplier
            std::vector<double> w(5, 0.0);
            for (size_t j = 0; j < 5; ++j) {
                double nj = 0.0;
                for (const auto& row : A) nj = std::max(nj, row[j]);
                w[j] = nj > 0.0 ? 1.0 / nj : 0.0;
            }
            double lambda = fit_profile_lambda(A, b, w);
            rep.fit.feasible = lambda >= 0.0;
            rep.fit.lambda = std::max(lambda, 0.0);
            rep.fit.c1 = rep.fit.lambda * w[0];
            rep.fit.C0 = rep.fit.lambda * w[1];
            rep.fit.C2 = rep.fit.lambda * w[2];
            rep.fit.c2 = rep.fit.lambda * w[3];
            rep.fit.c3 = rep.fit.lambda * w[4];

            std::vector<double> cost(5);
            for (size_t j = 0; j < 5; ++j)
                cost[j] = w[j] > 0.0 ? 1.0 / w[j] : 1.0;
            LpResult lp = lp_min(cost, A, b);
            if (lp.feasible) rep.fit.lp_min_sum = lp.x;

            double scale = 1e-300;
            std::vector<double> c = rep.fit.as_vector();
            for (size_t r = 0; r < b.size(); ++r) {
                double rhs = 0.0;
                for (size_t j = 0; j < 5; ++j) rhs += A[r][j] * c[j];
                scale = std::max({scale, std::abs(b[r] + meta.eta0 * fun.psi[fitidx[r]]),
                                  rhs + meta.eta0 * fun.psi[fitidx[r]]});
            }
            double worst = 1e300;
            for (size_t r = 0; r < b.size(); ++r) {
                double rhs = 0.0;
                for (size_t j = 0; j < 5; ++j) rhs += A[r][j] * c[j];
                double m = (rhs - b[r]) / scale;
                e.margins.push_back(m);
                worst = std::min(worst, m);
            }
            e.worst_margin = rep.fit.feasible ? worst : -1.0;
            e.pass = rep.fit.feasible && worst >= -0.05;
            e.detail = "lambda=" + format_double(rep.fit.lambda);
            rep.entries.push_back(e);
        }
    }

    // --- Gronwall bound psi(T) <= J(T) + psi(t1) (t1/T)^(1-eta), anchored at the
    //     first record with t >= 1 (the acceptance cadence records t = 1 exactly)
    {
        AuditEntry e;
        e.name = "gronwall";
        if (fitidx.empty()) {
            e.pass = false;
            e.detail = "series does not reach t = 1";
        } else {
            size_t k1 = fitidx.front();
            double t1 = t[k1];
            auto gamma_at = [&](size_t k) {
                if (eta == 0.0) return fun.phi[k];  // star-shaped degeneration
                double T = t[k];
                return (2.0 * rep.fit.c1 * beta * E +
                        (rep.fit.C0 * E + rep.fit.C2 * E * std::log1p(T) +
                         2.0 * (rep.fit.c2 + rep.fit.c3 * T) * flux[k]) / T) / eta;
            };
            double scale = 1e-300;
            for (size_t k : fitidx) scale = std::max(scale, fun.psi[k]);
            double worst = 1e300;
            double integral = 0.0;  // int_{t1}^{T} gamma(t) t^(-eta) dt
            double prev_t = t1, prev_f = gamma_at(k1) * std::pow(t1, -eta);
            for (size_t k : fitidx) {
                if (k != k1) {
                    double f = gamma_at(k) * std::pow(t[k], -eta);
                    integral += 0.5 * (prev_f + f) * (t[k] - prev_t);
                    prev_t = t[k];
                    prev_f = f;
                }
                double T = t[k];
                double bound = std::pow(T, eta - 1.0) * integral +
                               fun.psi[k1] * std::pow(t1 / T, 1.0 - eta);
                double m = (bound - fun.psi[k]) / scale;
                e.margins.push_back(m);
                worst = std::min(worst, m);
            }
            e.worst_margin = worst;
            e.pass = worst >= -0.05;
            e.detail = "anchor t1=" + format_double(t1);
        }
        rep.entries.push_back(e);
    }

    rep.l6 = l6_decay_report(series);
    rep.spacetime = spacetime_norms(series);
    return rep;
}

double fit_relative_shift(const Prop32Fit& a, const Prop32Fit& b) {
    std::vector<double> va = a.as_vector(), vb = b.as_vector();
    double shift = 0.0;
    for (size_t j = 0; j < va.size(); ++j) {
        double denom = std::max(std::abs(va[j]), std::abs(vb[j]));
        if (denom < 1e-12) continue;  // both effectively zero
        shift = std::max(shift, std::abs(va[j] - vb[j]) / denom);
    }
    return shift;
}

CsvTable audit_plot_table(const CsvTable& series, const SeriesMeta& meta,
                          const AnalysisReport& report) {
    (void)report;
    DecayFunctionals fun = decay_functionals(series);
    CsvTable out;
    for (const char* c : {"t", "E", "phi", "psi", "flux_0_t", "l6_omega", "L6_D_t",
                          "e_ext_cone", "l5l10_partial", "l4l12_partial"})
        out.add_column(c);
    const auto& t = series.col("t");
    for (size_t k = 0; k < t.size(); ++k) {
        out.append_row({t[k], series.col("E")[k], fun.phi[k], fun.psi[k],
                        series.col("flux_0_t")[k], series.col("l6_omega")[k],
                        series.col("L6_D_t")[k], series.col("e_ext_cone")[k],
                        series.col("l5l10_partial")[k], series.col("l4l12_partial")[k]});
    }
    (void)meta;
    return out;
}

}  // namespace ilw

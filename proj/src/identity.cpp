#include "illumwave/identity.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "illumwave/errors.hpp"

namespace ilw {

namespace {

std::string point_str(const Vec3& p) {
    return "(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ", " +
           std::to_string(p.z) + ")";
}

FieldSample sample_at(const IlluminatingBody& body, double M,
                      const ManufacturedSolution& sol, double t, const Vec3& x,
                      const Obstacle* obstacle) {
    if (obstacle && obstacle->inside(x))
        throw StencilError("identity stencil point inside obstacle at " + point_str(x));
    try {
        return make_field_sample(body, x, t, M, sol.u(t, x), sol.du_dt(t, x),
                                 sol.grad(t, x));
    } catch (const DomainError& e) {
        throw StencilError("identity stencil left the chart at " + point_str(x) + ": " +
                           e.what());
    } catch (const InversionError& e) {
        throw StencilError("identity stencil left the chart at " + point_str(x) + ": " +
                           e.what());
    }
}

}  // namespace

double identity_residual(const IlluminatingBody& body, double M,
                         const ManufacturedSolution& sol, const Vec3& x, double t,
                         double h, const Obstacle* obstacle) {
    auto Q_at = [&](double tt) {
        return qpr_densities(sample_at(body, M, sol, tt, x, obstacle)).Q;
    };
    double dQ_dt = (Q_at(t + h) - Q_at(t - h)) / (2.0 * h);

    double div_P = 0.0;
    for (int i = 0; i < 3; ++i) {
        Vec3 xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        double pp = qpr_densities(sample_at(body, M, sol, t, xp, obstacle)).P[i];
        double pm = qpr_densities(sample_at(body, M, sol, t, xm, obstacle)).P[i];
        div_P += (pp - pm) / (2.0 * h);
    }

    MultiplierDensities center = qpr_densities(sample_at(body, M, sol, t, x, obstacle));
    double u = sol.u(t, x);
    double u5 = u * u * u * u * u;
    double defect = (sol.box(t, x) + u5) * center.Nu;

    return std::abs(dQ_dt + div_P + center.R - defect);
}

std::vector<ResidualRow> residual_table(const IlluminatingBody& body, double M,
                                        const ManufacturedSolution& sol,
                                        const std::vector<Vec3>& points, double t,
                                        const std::vector<double>& h_steps,
                                        const Obstacle* obstacle) {
    std::vector<ResidualRow> rows;
    rows.reserve(h_steps.size());
    for (double h : h_steps) {
        ResidualRow row;
        row.h = h;
        row.residual = 0.0;
        for (const Vec3& p : points)
            row.residual = std::max(row.residual,
                                    identity_residual(body, M, sol, p, t, h, obstacle));
        if (rows.empty()) {
            row.order = std::numeric_limits<double>::quiet_NaN();
        } else {
            const ResidualRow& prev = rows.back();
            if (row.residual > 0.0 && prev.residual > 0.0)
                row.order = std::log(prev.residual / row.residual) /
                            std::log(prev.h / row.h);
            else
                row.order = std::numeric_limits<double>::quiet_NaN();
        }
        rows.push_back(row);
    }
    return rows;
}

double fitted_order(const std::vector<ResidualRow>& rows) {
    // least squares on log-log pairs with nonzero residuals
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (const auto& r : rows) {
        if (!(r.residual > 0.0)) continue;
        double lx = std::log(r.h), ly = std::log(r.residual);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 2) return 0.0;
    double denom = double(n) * sxx - sx * sx;
    if (std::abs(denom) < 1e-30) return 0.0;
    return (double(n) * sxy - sx * sy) / denom;
}

}  // namespace ilw

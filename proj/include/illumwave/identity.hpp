#ifndef ILLUMWAVE_IDENTITY_HPP
#define ILLUMWAVE_IDENTITY_HPP

#include <vector>

#include "illumwave/body.hpp"
#include "illumwave/densities.hpp"
#include "illumwave/manufactured.hpp"
#include "illumwave/obstacle.hpp"

namespace ilw {

// |dQ/dt + div P + R - (box u + u^5) Nu| at one point: Q and P derivatives by
// central differences at step h, everything else from closed forms. Vanishes
// at O(h^2) for smooth fields. Throws StencilError when a stencil point falls
// inside the obstacle or loses its coordinates.
double identity_residual(const IlluminatingBody& body, double M,
                         const ManufacturedSolution& sol, const Vec3& x, double t,
                         double h, const Obstacle* obstacle = nullptr);

struct ResidualRow {
    double h = 0.0;
    double residual = 0.0;  // max over the evaluation points
    double order = 0.0;     // log2(prev/cur); NaN on the first row
};

std::vector<ResidualRow> residual_table(const IlluminatingBody& body, double M,
                                        const ManufacturedSolution& sol,
                                        const std::vector<Vec3>& points, double t,
                                        const std::vector<double>& h_steps,
                                        const Obstacle* obstacle = nullptr);

// Least-squares slope of log(residual) against log(h); 0 when all residuals
// are at rounding level (which counts as a pass upstream).
double fitted_order(const std::vector<ResidualRow>& rows);

}  // namespace ilw

#endif

#ifndef ILLUMWAVE_MANUFACTURED_HPP
#define ILLUMWAVE_MANUFACTURED_HPP

#include <functional>
#include <string>
#include <vector>

#include "illumwave/vec3.hpp"

namespace ilw {

// Smooth closed-form space-time field with exact derivatives, used to probe
// the divergence identity off the solution manifold.
struct ManufacturedSolution {
    std::string id;
    std::function<double(double t, const Vec3& x)> u;
    std::function<double(double t, const Vec3& x)> du_dt;
    std::function<Vec3(double t, const Vec3& x)> grad;
    std::function<double(double t, const Vec3& x)> box;  // (d_tt - Laplace) u
};

const ManufacturedSolution& manufactured_solution(const std::string& id);  // throws ConfigError
std::vector<std::string> manufactured_ids();

}  // namespace ilw

#endif

#include "illumwave/manufactured.hpp"

#include <cmath>

#include "illumwave/errors.hpp"

namespace ilw {

namespace {

const Vec3 kPulseCenter{1.5, 0.25, -0.1};
const Vec3 kWaveVector{0.6, -0.4, 0.3};
constexpr double kOmega = 0.9;

std::vector<ManufacturedSolution> build_registry() {
    std::vector<ManufacturedSolution> reg;

    reg.push_back({"zero",
                   [](double, const Vec3&) { return 0.0; },
                   [](double, const Vec3&) { return 0.0; },
                   [](double, const Vec3&) { return Vec3{}; },
                   [](double, const Vec3&) { return 0.0; }});

    // u = x1: harmonic and static, so box u = 0 but u^5 = x1^5 drives the defect
    reg.push_back({"linear_x",
                   [](double, const Vec3& x) { return x.x; },
                   [](double, const Vec3&) { return 0.0; },
                   [](double, const Vec3&) { return Vec3{1.0, 0.0, 0.0}; },
                   [](double, const Vec3&) { return 0.0; }});

    // travelling Gaussian envelope, space-time localized
    reg.push_back(
        {"gaussian",
         [](double t, const Vec3& x) {
             return std::exp(-(x - kPulseCenter).norm2() - t * t);
         },
         [](double t, const Vec3& x) {
             return -2.0 * t * std::exp(-(x - kPulseCenter).norm2() - t * t);
         },
         [](double t, const Vec3& x) {
             Vec3 d = x - kPulseCenter;
             return d * (-2.0 * std::exp(-d.norm2() - t * t));
         },
         [](double t, const Vec3& x) {
             Vec3 d = x - kPulseCenter;
             double u = std::exp(-d.norm2() - t * t);
             double utt = (4.0 * t * t - 2.0) * u;
             double lap = (4.0 * d.norm2() - 6.0) * u;
             return utt - lap;
         }});

    // off-shell plane wave: omega^2 != |k|^2, so box u != 0
    reg.push_back({"plane",
                   [](double t, const Vec3& x) {
                       return std::sin(kWaveVector.dot(x) - kOmega * t);
                   },
                   [](double t, const Vec3& x) {
                       return -kOmega * std::cos(kWaveVector.dot(x) - kOmega * t);
                   },
                   [](double t, const Vec3& x) {
                       return kWaveVector * std::cos(kWaveVector.dot(x) - kOmega * t);
                   },
                   [](double t, const Vec3& x) {
                       double u = std::sin(kWaveVector.dot(x) - kOmega * t);
                       return (kWaveVector.norm2() - kOmega * kOmega) * u;
                   }});
    return reg;
}

const std::vector<ManufacturedSolution>& registry() {
    static const std::vector<ManufacturedSolution> reg = build_registry();
    return reg;
}

}  // namespace

const ManufacturedSolution& manufactured_solution(const std::string& id) {
    for (const auto& s : registry())
        if (s.id == id) return s;
    throw ConfigError("unknown manufactured solution id '" + id + "'");
}

std::vector<std::string> manufactured_ids() {
    std::vector<std::string> out;
    for (const auto& s : registry()) out.push_back(s.id);
    return out;
}

}  // namespace ilw

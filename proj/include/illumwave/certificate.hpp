#ifndef ILLUMWAVE_CERTIFICATE_HPP
#define ILLUMWAVE_CERTIFICATE_HPP

#include <string>
#include <vector>

#include "illumwave/body.hpp"
#include "illumwave/obstacle.hpp"

namespace ilw {

struct SamplingSpec {
    int surface_samples = 10000;
    double ray_march_step = 0.02;
    double box_halfwidth = 4.0;  // lattice extent for the a0 infimum
};

struct CertificateFailure {
    Vec3 x0;            // offending boundary sample
    double s0 = 0.0;
    double nu_dot_n = 0.0;
    std::string note;   // "no-ray", "ray-reentry", "degenerate"
};

// Sample-based decision record for the illumination hypotheses: per-sample
// foot points and rays, plus the aggregate margins the estimates rely on.
struct IlluminationCertificate {
    bool pass = false;
    std::string fail_reason;  // empty on PASS

    int surface_samples_used = 0;
    double rho2_max = 0.0;

    // aggregates over the sampled boundary
    double min_s0_plus_rho1 = 0.0;  // min(s0 + rho1)
    double cond8_margin = 0.0;      // min(s0 + rho1 - 2(rho2M - rho1))
    double eta0 = 0.0;              // max of the two-ratio sum
    bool eta0_finite = true;
    double epsilon = 0.0;           // 1 - sqrt(eta0), clamped to [0, 1]
    double a0 = 0.0;                // sampled inf of (s + rho2M)/r
    double min_nu_dot_n = 0.0;
    double min_s0 = 0.0, max_s0 = 0.0;

    bool origin_inside_obstacle = false;
    bool origin_inside_body = false;

    double refinement_shift = 0.0;  // max relative aggregate change at 2x density

    std::vector<CertificateFailure> failures;  // capped

    std::string to_json_string() const;
};

// Builds the certificate: foot point and s0 for every boundary sample, ray
// containment by marching, nu.n, the aggregate margins and the a0 infimum over
// a box lattice, then repeats at doubled density to detect under-resolution.
IlluminationCertificate illuminate(const Obstacle& obstacle, const IlluminatingBody& body,
                                   const SamplingSpec& sampling);

}  // namespace ilw

#endif

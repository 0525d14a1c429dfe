#include "illumwave/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "illumwave/errors.hpp"

namespace ilw {

namespace {

constexpr size_t kMaxStoredFailures = 50;
constexpr double kEtaHuge = 9e99;

struct Aggregates {
    double min_s0_rho1 = std::numeric_limits<double>::infinity();
    double cond8 = std::numeric_limits<double>::infinity();
    double eta0 = 0.0;
    bool eta0_finite = true;
    double a0 = std::numeric_limits<double>::infinity();
    double min_nu_n = std::numeric_limits<double>::infinity();
    double min_s0 = std::numeric_limits<double>::infinity();
    double max_s0 = -std::numeric_limits<double>::infinity();
    std::vector<CertificateFailure> failures;
    int samples_used = 0;
};

// One full certification sweep at a given sampling density.
Aggregates sweep(const Obstacle& obstacle, const IlluminatingBody& body,
                 const SamplingSpec& spec, int n_samples) {
    Aggregates agg;
    double rho2m = body.rho2_max();
    auto samples = obstacle.boundary_samples(n_samples);
    agg.samples_used = int(samples.size());

    // far end of every marched ray: past the last intersection with the
    // obstacle's bounding sphere, measured from the foot point
    double reach = obstacle.bounding_radius() + body.bounding_radius() + 1.0;

    for (const auto& bs : samples) {
        IlluminatingCoords c;
        try {
            c = body.to_coords(bs.point);
        } catch (const std::exception& e) {
            if (agg.failures.size() < kMaxStoredFailures)
                agg.failures.push_back({bs.point, 0.0, 0.0, std::string("no-ray: ") + e.what()});
            else
                agg.failures.push_back({});
            continue;
        }
        SurfaceFrame f = body.frame(c.patch, c.sigma1, c.sigma2);
        double s0 = c.s;
        double rho1 = f.rho1(), rho2 = f.rho2();
        double nu_n = f.normal.dot(bs.normal);

        agg.min_s0_rho1 = std::min(agg.min_s0_rho1, s0 + rho1);
        agg.cond8 = std::min(agg.cond8, s0 + rho1 - 2.0 * (rho2m - rho1));
        agg.min_s0 = std::min(agg.min_s0, s0);
        agg.max_s0 = std::max(agg.max_s0, s0);
        agg.min_nu_n = std::min(agg.min_nu_n, nu_n);
        if (s0 + rho1 > 0.0 && s0 + rho2 > 0.0) {
            agg.eta0 = std::max(agg.eta0, (rho2m - rho1) / (s0 + rho1) +
                                              (rho2m - rho2) / (s0 + rho2));
        } else {
            agg.eta0_finite = false;
        }
        agg.a0 = std::min(agg.a0, (s0 + rho2m) / std::max(bs.point.norm(), 1e-12));

        // march the ray {x1 + t nu, t >= s0}; it must stay outside V
        bool reentry = false;
        double t = s0 + spec.ray_march_step;
        double t_end = s0 + reach;
        Vec3 reentry_at;
        while (t <= t_end) {
            Vec3 p = f.position + f.normal * t;
            if (obstacle.inside(p)) {
                reentry = true;
                reentry_at = p;
                break;
            }
            t += spec.ray_march_step;
        }
        if (reentry && agg.failures.size() <= kMaxStoredFailures) {
            CertificateFailure cf;
            cf.x0 = bs.point;
            cf.s0 = s0;
            cf.nu_dot_n = nu_n;
            cf.note = "ray-reentry";
            agg.failures.push_back(cf);
        } else if (reentry) {
            agg.failures.push_back({});
        }
    }

    // a0 infimum over the exterior lattice in the simulation box
    const int n_lat = 24;
    double B = spec.box_halfwidth;
    for (int i = 0; i < n_lat; ++i) {
        for (int j = 0; j < n_lat; ++j) {
            for (int k = 0; k < n_lat; ++k) {
                Vec3 p{-B + (2.0 * B) * (i + 0.5) / n_lat,
                       -B + (2.0 * B) * (j + 0.5) / n_lat,
                       -B + (2.0 * B) * (k + 0.5) / n_lat};
                if (obstacle.inside(p)) continue;
                double r = p.norm();
                if (r < 1e-9) continue;
                try {
                    agg.a0 = std::min(agg.a0, body.s_plus_rho2m(p) / r);
                } catch (const std::exception&) {
                    // exterior point without coordinates: the chart fails on Omega
                    if (agg.failures.size() < kMaxStoredFailures)
                        agg.failures.push_back({p, 0.0, 0.0, "degenerate"});
                    else
                        agg.failures.push_back({});
                }
            }
        }
    }
    return agg;
}

double rel_shift(double base, double refined, double floor_scale) {
    double denom = std::max({std::abs(base), std::abs(refined), floor_scale});
    return std::abs(refined - base) / denom;
}

}  // namespace

IlluminationCertificate illuminate(const Obstacle& obstacle, const IlluminatingBody& body,
                                   const SamplingSpec& sampling) {
    if (obstacle.empty())
        throw ConfigError("illuminate: scene has no obstacle to certify");

    IlluminationCertificate cert;
    cert.rho2_max = body.rho2_max();

    Aggregates base = sweep(obstacle, body, sampling, sampling.surface_samples);
    // doubled linear density on the surface: 4x the sample count
    Aggregates fine = sweep(obstacle, body, sampling, 4 * sampling.surface_samples);

    cert.surface_samples_used = base.samples_used;
    cert.min_s0_plus_rho1 = base.min_s0_rho1;
    cert.cond8_margin = base.cond8;
    cert.eta0_finite = base.eta0_finite && fine.eta0_finite;
    cert.eta0 = cert.eta0_finite ? base.eta0 : kEtaHuge;
    cert.epsilon = cert.eta0_finite && cert.eta0 >= 0.0 && cert.eta0 <= 1.0
                       ? 1.0 - std::sqrt(cert.eta0)
                       : 0.0;
    cert.a0 = base.a0;
    cert.min_nu_dot_n = base.min_nu_n;
    cert.min_s0 = base.min_s0;
    cert.max_s0 = base.max_s0;
    cert.origin_inside_obstacle = obstacle.inside(Vec3{0, 0, 0});
    cert.origin_inside_body = [&] {
        try {
            return body.to_coords(Vec3{1e-7, 1e-7, 1e-7}).s < 0.0;
        } catch (const std::exception&) {
            return true;  // near the body center: beyond the caustic means inside
        }
    }();

    double len_floor = 1e-2 * cert.rho2_max;
    cert.refinement_shift =
        std::max({rel_shift(base.min_s0_rho1, fine.min_s0_rho1, len_floor),
                  rel_shift(base.cond8, fine.cond8, len_floor),
                  cert.eta0_finite ? rel_shift(base.eta0, fine.eta0, 1e-2) : 0.0,
                  rel_shift(base.a0, fine.a0, 1e-2)});

    cert.failures = base.failures;
    for (const auto& f : fine.failures) {
        if (cert.failures.size() >= kMaxStoredFailures) break;
        cert.failures.push_back(f);
    }

    if (!cert.failures.empty()) {
        cert.pass = false;
        cert.fail_reason = "sampled-ray failure";
        for (const auto& f : cert.failures) {
            if (!f.note.empty()) {
                cert.fail_reason = f.note;
                break;
            }
        }
    } else if (!(cert.min_s0_plus_rho1 > 0.0)) {
        cert.pass = false;
        cert.fail_reason = "min(s0+rho1) <= 0: rays intersect before the boundary";
    } else if (!(cert.cond8_margin > 0.0)) {
        cert.pass = false;
        cert.fail_reason = "geometric condition margin nonpositive";
    } else if (cert.refinement_shift >= 0.01) {
        cert.pass = false;
        cert.fail_reason = "under-resolved";
    } else {
        cert.pass = true;
    }
    return cert;
}

std::string IlluminationCertificate::to_json_string() const {
    nlohmann::json j;
    j["pass"] = pass;
    j["fail_reason"] = fail_reason;
    j["surface_samples_used"] = surface_samples_used;
    j["rho2_max"] = rho2_max;
    j["min_s0_plus_rho1"] = min_s0_plus_rho1;
    j["cond8_margin"] = cond8_margin;
    j["eta0"] = eta0;
    j["eta0_finite"] = eta0_finite;
    j["epsilon"] = epsilon;
    j["a0"] = a0;
    j["min_nu_dot_n"] = min_nu_dot_n;
    j["min_s0"] = min_s0;
    j["max_s0"] = max_s0;
    j["origin_inside_obstacle"] = origin_inside_obstacle;
    j["origin_inside_body"] = origin_inside_body;
    j["refinement_shift"] = refinement_shift;
    nlohmann::json fails = nlohmann::json::array();
    for (const auto& f : failures) {
        fails.push_back({{"x0", {f.x0.x, f.x0.y, f.x0.z}},
                         {"s0", f.s0},
                         {"nu_dot_n", f.nu_dot_n},
                         {"note", f.note}});
    }
    j["failures"] = fails;
    return j.dump(2);
}

}  // namespace ilw

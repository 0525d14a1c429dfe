#ifndef ILLUMWAVE_SCENE_HPP
#define ILLUMWAVE_SCENE_HPP

#include <memory>
#include <string>

#include <json.hpp>

#include "illumwave/body.hpp"
#include "illumwave/certificate.hpp"
#include "illumwave/obstacle.hpp"

namespace ilw {

// Scene = illuminating body + obstacle + certification sampling parameters.
struct Scene {
    std::shared_ptr<const IlluminatingBody> body;
    std::shared_ptr<const Obstacle> obstacle;
    SamplingSpec sampling;
    nlohmann::json source;  // parsed config, for hashing and manifests

    std::string canonical_json() const { return source.dump(); }
    std::string hash() const;
};

// Parses a scene description:
//   body:     {kind: "sphere", center, radius}
//             {kind: "spheroid", center, equatorial_radius, polar_radius, axis}
//   obstacle: {kind: "ball"|"dogbone"|"snake"|"mesh"|"none", ...}
//   sampling: {surface_samples, ray_march_step, box_halfwidth}   (optional)
// Missing or ill-typed fields raise ConfigError naming the field.
Scene parse_scene(const nlohmann::json& j);
Scene load_scene_file(const std::string& path);

// Reads and parses JSON, wrapping parse failures in ConfigError with the byte
// offset reported by the parser.
nlohmann::json load_json_file(const std::string& path);

}  // namespace ilw

#endif

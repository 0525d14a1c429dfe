#include "illumwave/scene.hpp"

#include <fstream>

#include "illumwave/errors.hpp"
#include "illumwave/sha256.hpp"

namespace ilw {

namespace {

using nlohmann::json;

const json& require(const json& j, const char* key, const char* where) {
    auto it = j.find(key);
    if (it == j.end())
        throw ConfigError(std::string(where) + ": missing key '" + key + "'");
    return *it;
}

double get_num(const json& j, const char* key, const char* where) {
    const json& v = require(j, key, where);
    if (!v.is_number())
        throw ConfigError(std::string(where) + ": '" + key + "' must be a number");
    return v.get<double>();
}

double get_num_or(const json& j, const char* key, double fallback) {
    auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
    return it->get<double>();
}

Vec3 get_vec3(const json& j, const char* key, const char* where) {
    const json& v = require(j, key, where);
    if (!v.is_array() || v.size() != 3)
        throw ConfigError(std::string(where) + ": '" + key + "' must be [x, y, z]");
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

int parse_axis(const json& j, const char* where) {
    auto it = j.find("axis");
    if (it == j.end()) return 2;
    if (it->is_number_integer()) {
        int a = it->get<int>();
        if (a < 0 || a > 2) throw ConfigError(std::string(where) + ": axis must be 0..2");
        return a;
    }
    if (it->is_string()) {
        std::string s = it->get<std::string>();
        if (s == "x") return 0;
        if (s == "y") return 1;
        if (s == "z") return 2;
    }
    throw ConfigError(std::string(where) + ": axis must be \"x\", \"y\" or \"z\"");
}

std::shared_ptr<const IlluminatingBody> parse_body(const json& j) {
    std::string kind = require(j, "kind", "body").get<std::string>();
    Vec3 center = j.contains("center") ? get_vec3(j, "center", "body") : Vec3{0, 0, 0};
    if (kind == "sphere")
        return std::make_shared<SphereBody>(center, get_num(j, "radius", "body.sphere"));
    if (kind == "spheroid")
        return std::make_shared<SpheroidBody>(
            center, get_num(j, "equatorial_radius", "body.spheroid"),
            get_num(j, "polar_radius", "body.spheroid"), parse_axis(j, "body.spheroid"));
    throw ConfigError("body: unknown kind '" + kind + "'");
}

std::shared_ptr<const Obstacle> parse_obstacle(const json& j) {
    std::string kind = require(j, "kind", "obstacle").get<std::string>();
    if (kind == "none") return std::make_shared<NoObstacle>();
    if (kind == "ball") {
        Vec3 center =
            j.contains("center") ? get_vec3(j, "center", "obstacle") : Vec3{0, 0, 0};
        return std::make_shared<BallObstacle>(center, get_num(j, "radius", "obstacle.ball"));
    }
    if (kind == "dogbone")
        return std::make_shared<DogBoneObstacle>(
            get_num(j, "neck_radius", "obstacle.dogbone"),
            get_num(j, "bulge_radius", "obstacle.dogbone"),
            get_num(j, "half_length", "obstacle.dogbone"), parse_axis(j, "obstacle.dogbone"));
    if (kind == "snake")
        return std::make_shared<SnakeObstacle>(
            get_num(j, "tube_radius", "obstacle.snake"),
            get_num(j, "half_length", "obstacle.snake"),
            get_num_or(j, "amplitude", 0.3), get_num_or(j, "frequency", 1.0));
    if (kind == "mesh")
        return std::make_shared<MeshObstacle>(
            require(j, "path", "obstacle.mesh").get<std::string>());
    throw ConfigError("obstacle: unknown kind '" + kind + "'");
}

}  // namespace

std::string Scene::hash() const { return sha256_hex(canonical_json()); }

Scene parse_scene(const nlohmann::json& j) {
    Scene s;
    s.body = parse_body(require(j, "body", "scene"));
    s.obstacle = parse_obstacle(require(j, "obstacle", "scene"));
    if (j.contains("sampling")) {
        const json& sj = j["sampling"];
        s.sampling.surface_samples = int(get_num_or(sj, "surface_samples", 10000));
        s.sampling.ray_march_step = get_num_or(sj, "ray_march_step", 0.02);
        s.sampling.box_halfwidth = get_num_or(sj, "box_halfwidth", 4.0);
    }
    if (s.sampling.surface_samples < 16)
        throw ConfigError("scene.sampling: surface_samples must be at least 16");
    if (!(s.sampling.ray_march_step > 0.0))
        throw ConfigError("scene.sampling: ray_march_step must be positive");
    s.source = j;
    return s;
}

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config parse error in " + path + ": " + e.what());
    }
}

Scene load_scene_file(const std::string& path) { return parse_scene(load_json_file(path)); }

}  // namespace ilw

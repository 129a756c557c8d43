#include "vfx/scene/lighting.hpp"

#include "vfx/core/error.hpp"

#include <string>

namespace vfx {

std::string_view to_string(SceneType t) {
    switch (t) {
        case SceneType::indoor_full: return "indoor_full";
        case SceneType::indoor_partial: return "indoor_partial";
        case SceneType::outdoor: return "outdoor";
        case SceneType::driving: return "driving";
    }
    return "outdoor";
}

SceneType scene_type_from_string(std::string_view s) {
    if (s == "indoor_full") return SceneType::indoor_full;
    if (s == "indoor_partial") return SceneType::indoor_partial;
    if (s == "outdoor") return SceneType::outdoor;
    if (s == "driving") return SceneType::driving;
    throw Error(ErrorKind::MalformedRecord, "unknown scene_type '" + std::string(s) + "'");
}

double default_env_intensity(SceneType t) {
    return (t == SceneType::outdoor || t == SceneType::driving) ? kOutdoorEnvIntensity
                                                                 : kIndoorEnvIntensity;
}

Vec3 EnvMap::texel_direction(int i, int j) const {
    const double phi = 2.0 * kPi * (i + 0.5) / radiance.width() - kPi;
    const double theta = kPi * (j + 0.5) / radiance.height();
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

double EnvMap::texel_solid_angle(int j) const {
    const double h = radiance.height();
    const double t0 = kPi * j / h, t1 = kPi * (j + 1) / h;
    return (2.0 * kPi / radiance.width()) * (std::cos(t0) - std::cos(t1));
}

Vec3 EnvMap::lookup(const Vec3& d) const {
    const int w = radiance.width(), h = radiance.height();
    const double theta = std::acos(std::clamp(d.z(), -1.0, 1.0));
    const double phi = std::atan2(d.y(), d.x());
    const int i = std::clamp(static_cast<int>((phi + kPi) / (2.0 * kPi) * w), 0, w - 1);
    const int j = std::clamp(static_cast<int>(theta / kPi * h), 0, h - 1);
    return intensity * radiance(i, j);
}

void validate_envmap(const EnvMap& env, std::string_view what) {
    if (env.radiance.width() != 2 * env.radiance.height() || env.radiance.empty())
        throw Error(ErrorKind::InvariantViolation, std::string(what) + ": width must equal 2x height");
    for (size_t i = 0; i < env.radiance.size(); ++i) {
        const Vec3& v = env.radiance.pixels()[i];
        if (!v.allFinite() || v.minCoeff() < 0)
            throw Error(ErrorKind::InvariantViolation,
                        std::string(what) + ": texel " + std::to_string(i) + " negative or non-finite");
    }
}

}  // namespace vfx

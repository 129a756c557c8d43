#pragma once

#include "vfx/core/image.hpp"
#include "vfx/core/math.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace vfx {

enum class SceneType { indoor_full, indoor_partial, outdoor, driving };

std::string_view to_string(SceneType t);
SceneType scene_type_from_string(std::string_view s);  // throws MalformedRecord

inline constexpr double kOutdoorEnvIntensity = 0.6;
inline constexpr double kIndoorEnvIntensity = 2.0;
inline constexpr double kEmitterStrength = 100.0;

/// 0.6 for outdoor and driving scenes, 2.0 indoors.
double default_env_intensity(SceneType t);

/// Equirectangular HDR radiance map, +z up. Texel (i, j) center has azimuth
/// phi = 2*pi*(i+0.5)/W - pi and polar angle theta = pi*(j+0.5)/H from +z.
struct EnvMap {
    ColorImage radiance;
    double intensity = 1.0;

    Vec3 texel_direction(int i, int j) const;
    double texel_solid_angle(int j) const;
    Vec3 lookup(const Vec3& direction) const;  // nearest texel, times intensity
};

void validate_envmap(const EnvMap& env, std::string_view what);

struct Emitter {
    std::vector<uint32_t> faces;  // indices into the scene mesh
    Vec3 color = Vec3::Ones();
    double strength = kEmitterStrength;

    Vec3 radiance() const { return color * strength / kPi; }
};

struct SunLight {
    Vec3 direction = Vec3::UnitZ();  // unit vector toward the sun
    Vec3 irradiance = Vec3::Ones();  // W/m^2 on a surface facing the sun
};

}  // namespace vfx

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace vfx::dsl {

inline constexpr int kDefaultMaxLoop = 64;
inline constexpr double kVerticalOffset = 0.5;  // m, sample_point_above_object default

enum class Type { number, text, boolean, vec3, object, material, point_list, rotation, scene, unit, any };
std::string_view to_string(Type t);

struct Param {
    std::string name;
    Type type;
    bool optional = false;
};

struct BuiltinSignature {
    std::string name;
    std::vector<Param> params;
    Type returns = Type::unit;
    std::string binding;  // module operation it dispatches to
    std::string doc;

    size_t min_arity() const;
};

/// The full editing-function catalog, in a fixed order.
const std::vector<BuiltinSignature>& builtin_catalog();
const BuiltinSignature* find_builtin(std::string_view name);

/// One line per builtin: `name(param: type, ...) -> type  doc`.
std::string builtin_reference();

/// Fields readable with `.name`: on objects position/center/bottom/size (vec3),
/// scale (number), name/id (text); on vectors x/y/z (number).
Type field_type(Type base, std::string_view field);

}  // namespace vfx::dsl

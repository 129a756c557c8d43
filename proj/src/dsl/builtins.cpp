#include "vfx/dsl/builtins.hpp"

#include <algorithm>

namespace vfx::dsl {

std::string_view to_string(Type t) {
    switch (t) {
        case Type::number: return "number";
        case Type::text: return "text";
        case Type::boolean: return "boolean";
        case Type::vec3: return "vec3";
        case Type::object: return "object";
        case Type::material: return "material";
        case Type::point_list: return "point_list";
        case Type::rotation: return "rotation";
        case Type::scene: return "scene";
        case Type::unit: return "unit";
        case Type::any: return "any";
    }
    return "?";
}

size_t BuiltinSignature::min_arity() const {
    return static_cast<size_t>(std::count_if(params.begin(), params.end(), [](const Param& p) { return !p.optional; }));
}

const std::vector<BuiltinSignature>& builtin_catalog() {
    using T = Type;
    static const std::vector<BuiltinSignature> catalog = {
        {"detect_object", {{"scene", T::scene}, {"label", T::text}}, T::object,
         "segmentation-lift.lift_instance + extract_object",
         "Find the scene object whose mask label matches and return it as an editable object."},
        {"sample_point_on_object", {{"scene", T::scene}, {"obj", T::object}}, T::vec3,
         "geometry-kernel.sample_support_points", "A point on a flat, unobstructed upward-facing part of the object."},
        {"sample_point_above_object", {{"scene", T::scene}, {"obj", T::object}, {"offset", T::number, true}}, T::vec3,
         "geometry-kernel.sample_support_points + offset",
         "A support point on the object raised by offset meters (default 0.5)."},
        {"retrieve_asset", {{"scene", T::scene}, {"query", T::text}}, T::object,
         "asset-library.retrieve_asset + estimate_real_scale",
         "Best matching catalog asset at real-world size, not yet inserted; its base center sits at the origin."},
        {"insert_object", {{"scene", T::scene}, {"obj", T::object}}, T::unit, "scene-model.register",
         "Add the object to the rendered scene."},
        {"remove_object", {{"scene", T::scene}, {"obj", T::object}}, T::unit, "segmentation-lift.remove_instance",
         "Delete an object from the scene; removed scene content is filled in."},
        {"update_object", {{"scene", T::scene}, {"obj", T::object}}, T::unit, "scene-model.sync",
         "Re-validate an object's record after edits."},
        {"allow_physics", {{"obj", T::object}}, T::unit, "sim-engine.simulate_rigid",
         "Simulate the object as a rigid body under gravity."},
        {"add_fire", {{"scene", T::scene}, {"obj", T::object}}, T::unit, "sim-engine.EffectEvent(fire)",
         "Set the object on fire for the whole clip."},
        {"add_smoke", {{"scene", T::scene}, {"obj", T::object}}, T::unit, "sim-engine.EffectEvent(smoke)",
         "Emit smoke from the object for the whole clip."},
        {"set_static_animation", {{"obj", T::object}}, T::unit, "sim-engine.animate_trajectory",
         "Keep the object still (clears any trajectory)."},
        {"set_moving_animation", {{"obj", T::object}, {"points", T::point_list}}, T::unit,
         "sim-engine.animate_trajectory", "Move the object along a smooth path through the given world points."},
        {"init_material",
         {{"metallic", T::number, true}, {"specular", T::number, true}, {"roughness", T::number, true},
          {"tint", T::vec3, true}},
         T::material, "asset-library.MaterialSpec", "A material from scalar parameters in [0, 1] and a color tint."},
        {"retrieve_material", {{"scene", T::scene}, {"name", T::text}}, T::material,
         "asset-library.retrieve_material", "Best matching texture material from the catalog."},
        {"apply_material", {{"obj", T::object}, {"mat", T::material}}, T::unit, "asset-library.apply_material",
         "Give the object a material; texture and tint compose."},
        {"allow_fracture", {{"obj", T::object}}, T::unit, "geometry-kernel.voronoi_fracture via sim-engine",
         "Let the object shatter on a hard impact (needs physics)."},
        {"make_break", {{"obj", T::object}}, T::unit, "geometry-kernel.voronoi_fracture at frame 0",
         "Break the object into pieces at the first frame and let them fall."},
        {"make_melting", {{"scene", T::scene}, {"obj", T::object}}, T::unit, "sim-engine.EffectEvent(melt)",
         "Annotate a melting effect (recorded, not rendered)."},
        {"get_object_center_position", {{"obj", T::object}}, T::vec3, "scene-model.bounds",
         "Center of the object's world bounding box."},
        {"get_object_bottom_position", {{"obj", T::object}}, T::vec3, "scene-model.bounds",
         "Center of the bottom face of the object's world bounding box."},
        {"translate_object", {{"obj", T::object}, {"offset", T::vec3}}, T::unit, "scene-model.transform",
         "Move the object by an offset in meters."},
        {"rotate_object", {{"obj", T::object}, {"rotation", T::rotation}}, T::unit, "scene-model.transform",
         "Rotate the object about its own origin."},
        {"scale_object", {{"obj", T::object}, {"factor", T::number}}, T::unit, "scene-model.transform",
         "Scale the object uniformly about its own origin."},
        {"get_random_2D_rotation", {}, T::rotation, "seeded sampler", "Uniform random rotation about the vertical axis."},
        {"get_random_3D_rotation", {}, T::rotation, "seeded sampler", "Uniform random 3D rotation."},
        {"make_copy", {{"obj", T::object}}, T::object, "scene-model.copy",
         "A copy of the object with a fresh id, not yet inserted."},
        {"add_event",
         {{"scene", T::scene}, {"obj", T::object}, {"kind", T::text}, {"start", T::number}, {"end", T::number}},
         T::unit, "sim-engine.EffectEvent",
         "Timeline effect on an object: fire, smoke, melt, break or incinerate, frames start..end inclusive."},
        {"get_camera_position", {{"scene", T::scene}, {"index", T::number, true}}, T::vec3, "scene-model.camera",
         "World position of a recorded camera (default the first)."},
        {"get_vehicle_position", {{"scene", T::scene}}, T::vec3, "scene-model.camera",
         "First camera position projected to the ground (z = 0)."},
        {"get_direction", {{"scene", T::scene}, {"word", T::text}}, T::vec3, "scene-model.camera",
         "Unit world vector for front, back, left, right, up or down as seen from the first camera."},
        {"retrieve_chatsim_asset", {{"scene", T::scene}, {"query", T::text}}, T::object,
         "asset-library.retrieve_asset (driving subset)", "Like retrieve_asset, restricted to driving assets."},
    };
    return catalog;
}

const BuiltinSignature* find_builtin(std::string_view name) {
    for (const auto& b : builtin_catalog())
        if (b.name == name) return &b;
    return nullptr;
}

std::string builtin_reference() {
    std::string out;
    for (const auto& b : builtin_catalog()) {
        out += b.name + "(";
        for (size_t i = 0; i < b.params.size(); ++i) {
            const Param& p = b.params[i];
            out += (i ? ", " : "") + p.name + (p.optional ? "?: " : ": ") + std::string(to_string(p.type));
        }
        out += ") -> " + std::string(to_string(b.returns)) + "  " + b.doc + "\n";
    }
    return out;
}

Type field_type(Type base, std::string_view field) {
    if (base == Type::object) {
        if (field == "position" || field == "center" || field == "bottom" || field == "size") return Type::vec3;
        if (field == "scale") return Type::number;
        if (field == "name" || field == "id") return Type::text;
    }
    if (base == Type::vec3 && (field == "x" || field == "y" || field == "z")) return Type::number;
    if (base == Type::any) return Type::any;
    return Type::unit;  // invalid
}

}  // namespace vfx::dsl

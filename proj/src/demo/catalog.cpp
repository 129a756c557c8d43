#include "vfx/demo/catalog.hpp"

#include "vfx/core/image.hpp"

namespace vfx::demo {

namespace {

AssetRecord asset(std::string id, std::string name, std::string description, std::vector<std::string> tags,
                  TriangleMesh mesh, const Vec3& size, const Vec3& color) {
    AssetRecord a;
    a.asset_id = std::move(id);
    a.name = std::move(name);
    a.description = std::move(description);
    a.tags = std::move(tags);
    a.mesh_path = "mesh.obj";
    a.mesh = std::move(mesh);
    a.mesh.vertex_colors.assign(a.mesh.vertices.size(), color);
    a.mesh.recompute_normals();
    a.real_size = size;
    return a;
}

// Albedo only: save_material writes no roughness or metallic maps.
MaterialRecord material(std::string id, std::string name, std::string description, const Vec3& albedo) {
    MaterialRecord m;
    m.material_id = std::move(id);
    m.name = std::move(name);
    m.description = std::move(description);
    m.albedo_path = "albedo.png";
    // Stored through an 8-bit swatch, so keep the mean exactly representable.
    for (int c = 0; c < 3; ++c) m.mean_albedo[c] = srgb_to_linear(linear_to_srgb8(albedo[c]));
    return m;
}

}  // namespace

AssetCatalog make_demo_catalog() {
    AssetCatalog cat;
    cat.assets = {
        asset("basketball", "basketball", "orange rubber ball for sports", {"sports", "ball"}, make_icosphere(1.0, 2),
              Vec3::Constant(0.24), Vec3(0.8, 0.3, 0.06)),
        asset("cardboard_box", "cardboard box", "brown shipping carton", {"container"},
              make_box(Vec3(-1, -1, -1), Vec3(1, 1, 1)), Vec3(0.4, 0.3, 0.3), Vec3(0.55, 0.4, 0.25)),
        asset("toy_car", "toy car", "small plastic model car", {"toy"}, make_box(Vec3(-1, -0.5, 0), Vec3(1, 0.5, 0.8)),
              Vec3(0.3, 0.15, 0.12), Vec3(0.7, 0.08, 0.08)),
        asset("sedan", "sedan car", "four door passenger vehicle", {"driving", "vehicle"},
              make_box(Vec3(-2, -1, 0), Vec3(2, 1, 1.4)), Vec3(4.5, 1.8, 1.4), Vec3(0.2, 0.3, 0.6)),
    };
    cat.materials = {
        material("marble", "polished marble", "white stone with grey veins", Vec3(0.8, 0.8, 0.78)),
        material("oak", "oak wood", "light brown wood grain", Vec3(0.45, 0.3, 0.15)),
        material("steel", "brushed steel", "grey metal", Vec3(0.55, 0.55, 0.56)),
    };
    return cat;
}

Rgb8Image material_swatch(const MaterialRecord& m, int size) {
    return Rgb8Image(size, size, encode_srgb(m.mean_albedo));
}

void save_demo_catalog(const AssetCatalog& catalog, const std::string& root) {
    for (const auto& a : catalog.assets) save_asset(root, a);
    for (const auto& m : catalog.materials) save_material(root, m, material_swatch(m));
}

}  // namespace vfx::demo

#pragma once

#include "vfx/assets/catalog.hpp"

namespace vfx::demo {

/// Small asset library matching the table scene: basketball, cardboard box,
/// toy car, a driving-tagged sedan, and three albedo-only materials.
AssetCatalog make_demo_catalog();

/// Flat albedo swatch for a material record (sRGB of its mean albedo).
Rgb8Image material_swatch(const MaterialRecord& material, int size = 16);

/// Writes the catalog in the on-disk layout read by load_catalog.
void save_demo_catalog(const AssetCatalog& catalog, const std::string& root);

}  // namespace vfx::demo

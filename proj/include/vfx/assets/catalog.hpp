#pragma once

#include "vfx/core/image.hpp"
#include "vfx/llm/chat.hpp"
#include "vfx/scene/mesh.hpp"
#include "vfx/scene/object.hpp"

#include <optional>
#include <string>
#include <vector>

namespace vfx {

struct AssetRecord {
    std::string asset_id;
    std::string name;
    std::string description;
    std::vector<std::string> tags;
    std::string mesh_path;
    TriangleMesh mesh;
    std::vector<Similarity> animation;  // baked per-frame transforms, may be empty
    std::optional<Vec3> real_size;      // metadata extents in meters
    std::optional<Vec3> estimated_size; // cached result of an external estimate
};

struct MaterialRecord {
    std::string material_id;
    std::string name;
    std::string description;
    std::vector<std::string> tags;
    std::string albedo_path;
    std::optional<std::string> roughness_path;
    std::optional<std::string> metallic_path;
    Vec3 mean_albedo = Vec3::Constant(0.5);  // linear
    std::optional<double> mean_roughness;
    std::optional<double> mean_metallic;
};

/// Immutable after load.
struct AssetCatalog {
    std::vector<AssetRecord> assets;
    std::vector<MaterialRecord> materials;

    /// Assets tagged "driving" (vehicles and street props).
    AssetCatalog driving_subset() const;
};

/// Reads `assets/<id>/{asset.json, mesh.obj, anim.txt?}` and
/// `materials/<id>/{material.json, albedo.png, roughness.png?, metallic.png?}`.
/// Either directory may be absent. Throws MissingFile, MalformedRecord.
AssetCatalog load_catalog(const std::string& root);
void save_asset(const std::string& root, const AssetRecord& asset);
void save_material(const std::string& root, const MaterialRecord& material, const Rgb8Image& albedo);

/// Lowercased alphanumeric tokens, deduplicated.
std::vector<std::string> tokenize(std::string_view text);

/// Lexical match of a query against a document. Ranking compares `coverage`
/// (|Q n D| / |Q|), then `precision` (|Q n D| / |D|), then the record id.
/// An embedding backend can replace this scorer without changing callers.
struct RetrievalScore {
    double coverage = 0;
    double precision = 0;
};
RetrievalScore lexical_score(const std::vector<std::string>& query, const std::vector<std::string>& document);

/// Throws NoMatch when the catalog is empty or nothing shares a token with the query.
const AssetRecord& retrieve_asset(const AssetCatalog& catalog, std::string_view query);
const MaterialRecord& retrieve_material(const AssetCatalog& catalog, std::string_view name);

enum class ScaleSource { offline, external };

struct ScaleEstimator {
    ScaleSource source = ScaleSource::offline;
    ChatEndpoint* endpoint = nullptr;  // required for external
    std::string model = "default";
};

/// Offline: the record's real_size metadata (MissingMetadata if absent).
/// External: asks the endpoint once with the asset name and a rendered
/// thumbnail, then caches the answer in `asset.estimated_size`.
/// Throws EndpointError or UnparseableReply (the reply is kept in the message).
Vec3 estimate_real_scale(AssetRecord& asset, const ScaleEstimator& estimator);

/// First three positive lengths in the reply, converted to meters. A unit
/// written only after the last number applies to all three.
Vec3 parse_scale_reply(std::string_view reply);

/// Shaded preview of a mesh from a fixed three-quarter view.
Rgb8Image render_thumbnail(const TriangleMesh& mesh, int size = 128);

/// Scene object for an asset with its mesh scaled per axis so the bounding
/// box extents equal `size`, centered in x and y with its base at z = 0.
SceneObject make_asset_object(const AssetRecord& asset, const Vec3& size, const std::string& object_id);

/// Clamps scalars to [0, 1] and tint components to >= 0, returning one warning per clamped field.
MaterialSpec clamp_material(MaterialSpec spec, std::vector<std::string>& warnings);

/// Replaces scalars and tint; texture fields of `spec` replace the object's only when set.
std::vector<std::string> apply_material(SceneObject& obj, const MaterialSpec& spec);
/// Attaches the record's textures (and map means where present), keeping the tint.
void apply_material(SceneObject& obj, const MaterialRecord& record);

}  // namespace vfx

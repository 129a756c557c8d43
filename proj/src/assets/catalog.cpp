#include "vfx/assets/catalog.hpp"

#include "vfx/core/error.hpp"
#include "vfx/core/image_io.hpp"
#include "vfx/core/text.hpp"
#include "vfx/geometry/bvh.hpp"
#include "vfx/scene/bundle.hpp"
#include "vfx/scene/camera.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <set>
#include <sstream>

namespace vfx {

namespace fs = std::filesystem;

namespace {

nlohmann::json read_json(const fs::path& path) {
    if (!fs::exists(path)) throw Error(ErrorKind::MissingFile, path.string() + " not found");
    try {
        return nlohmann::json::parse(read_text_file(path.string()));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::MalformedRecord, path.string() + ": " + e.what());
    }
}

Vec3 vec3_of(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 3) throw Error(ErrorKind::MalformedRecord, "expected a 3-vector");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

std::vector<Similarity> parse_animation(const std::string& text, const std::string& what) {
    std::vector<Similarity> frames;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto tok = split_ws(line);
        if (tok.empty() || tok[0][0] == '#') continue;
        if (tok.size() != 8) throw Error(ErrorKind::MalformedRecord, what + ":" + std::to_string(line_no) + ": expected tx ty tz qw qx qy qz s");
        double v[8];
        for (int i = 0; i < 8; ++i) v[i] = std::stod(tok[i]);
        Similarity s;
        s.translation = Vec3(v[0], v[1], v[2]);
        s.rotation = Quat(v[3], v[4], v[5], v[6]).normalized();
        s.scale = v[7];
        if (!(s.scale > 0)) throw Error(ErrorKind::MalformedRecord, what + ":" + std::to_string(line_no) + ": scale must be positive");
        frames.push_back(s);
    }
    return frames;
}

double mean_channel(const Rgb8Image& img) {
    double s = 0;
    for (const Rgb8& p : img.pixels()) s += p.r;
    return img.size() ? s / (255.0 * static_cast<double>(img.size())) : 0.0;
}

template <class Record>
const Record& best_match(const std::vector<Record>& records, std::string_view query, std::string Record::*id,
                         const char* what) {
    if (records.empty()) throw Error(ErrorKind::NoMatch, std::string("the ") + what + " catalog is empty");
    const auto q = tokenize(query);
    const Record* best = nullptr;
    RetrievalScore best_score;
    for (const Record& r : records) {
        std::vector<std::string> doc = tokenize(r.name + " " + r.description);
        for (const auto& t : r.tags) {
            auto more = tokenize(t);
            doc.insert(doc.end(), more.begin(), more.end());
        }
        std::sort(doc.begin(), doc.end());
        doc.erase(std::unique(doc.begin(), doc.end()), doc.end());
        const RetrievalScore s = lexical_score(q, doc);
        if (s.coverage <= 0) continue;
        const bool better = !best || s.coverage > best_score.coverage ||
                            (s.coverage == best_score.coverage &&
                             (s.precision > best_score.precision ||
                              (s.precision == best_score.precision && r.*id < best->*id)));
        if (better) best = &r, best_score = s;
    }
    if (!best) throw Error(ErrorKind::NoMatch, std::string("no ") + what + " matches \"" + std::string(query) + "\"");
    return *best;
}

}  // namespace

AssetCatalog AssetCatalog::driving_subset() const {
    AssetCatalog out;
    for (const auto& a : assets)
        if (std::find(a.tags.begin(), a.tags.end(), "driving") != a.tags.end()) out.assets.push_back(a);
    out.materials = materials;
    return out;
}

AssetCatalog load_catalog(const std::string& root) {
    if (!fs::is_directory(root)) throw Error(ErrorKind::MissingFile, "catalog directory " + root + " not found");
    AssetCatalog cat;
    const fs::path assets_dir = fs::path(root) / "assets", materials_dir = fs::path(root) / "materials";
    std::vector<fs::path> dirs;
    if (fs::is_directory(assets_dir))
        for (const auto& e : fs::directory_iterator(assets_dir))
            if (e.is_directory()) dirs.push_back(e.path());
    std::sort(dirs.begin(), dirs.end());
    for (const fs::path& d : dirs) {
        const auto j = read_json(d / "asset.json");
        AssetRecord a;
        try {
            a.asset_id = j.value("asset_id", d.filename().string());
            a.name = j.at("name").get<std::string>();
            a.description = j.value("description", "");
            a.tags = j.value("tags", std::vector<std::string>{});
            a.mesh_path = (d / j.value("mesh", "mesh.obj")).string();
            if (j.contains("real_size") && !j["real_size"].is_null()) a.real_size = vec3_of(j["real_size"]);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::MalformedRecord, (d / "asset.json").string() + ": " + e.what());
        }
        if (a.real_size && !(a.real_size->array() > 0).all())
            throw Error(ErrorKind::MalformedRecord, a.asset_id + ": real_size must be positive");
        if (!fs::exists(a.mesh_path)) throw Error(ErrorKind::MissingFile, a.mesh_path + " not found");
        a.mesh = parse_obj(read_text_file(a.mesh_path), a.mesh_path);
        if (a.mesh.empty()) throw Error(ErrorKind::MalformedRecord, a.mesh_path + ": mesh has no faces");
        if (fs::exists(d / "anim.txt")) a.animation = parse_animation(read_text_file((d / "anim.txt").string()), (d / "anim.txt").string());
        cat.assets.push_back(std::move(a));
    }
    dirs.clear();
    if (fs::is_directory(materials_dir))
        for (const auto& e : fs::directory_iterator(materials_dir))
            if (e.is_directory()) dirs.push_back(e.path());
    std::sort(dirs.begin(), dirs.end());
    for (const fs::path& d : dirs) {
        const auto j = read_json(d / "material.json");
        MaterialRecord m;
        try {
            m.material_id = j.value("material_id", d.filename().string());
            m.name = j.at("name").get<std::string>();
            m.description = j.value("description", "");
            m.tags = j.value("tags", std::vector<std::string>{});
            m.albedo_path = (d / j.value("albedo", "albedo.png")).string();
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorKind::MalformedRecord, (d / "material.json").string() + ": " + e.what());
        }
        if (!fs::exists(m.albedo_path)) throw Error(ErrorKind::MissingFile, m.albedo_path + " not found");
        const ColorImage albedo = decode_srgb(read_png_rgb8(m.albedo_path));
        Vec3 sum = Vec3::Zero();
        for (const Vec3& p : albedo.pixels()) sum += p;
        m.mean_albedo = sum / static_cast<double>(std::max<size_t>(1, albedo.size()));
        if (fs::exists(d / "roughness.png")) {
            m.roughness_path = (d / "roughness.png").string();
            m.mean_roughness = mean_channel(read_png_rgb8(*m.roughness_path));
        }
        if (fs::exists(d / "metallic.png")) {
            m.metallic_path = (d / "metallic.png").string();
            m.mean_metallic = mean_channel(read_png_rgb8(*m.metallic_path));
        }
        cat.materials.push_back(std::move(m));
    }
    return cat;
}

void save_asset(const std::string& root, const AssetRecord& a) {
    const fs::path d = fs::path(root) / "assets" / a.asset_id;
    fs::create_directories(d);
    nlohmann::json j = {{"asset_id", a.asset_id}, {"name", a.name}, {"description", a.description},
                        {"tags", a.tags}, {"mesh", "mesh.obj"}};
    if (a.real_size) j["real_size"] = {a.real_size->x(), a.real_size->y(), a.real_size->z()};
    write_text_file((d / "asset.json").string(), j.dump(2) + "\n");
    write_text_file((d / "mesh.obj").string(), format_obj(a.mesh));
    if (!a.animation.empty()) {
        std::string text;
        for (const Similarity& s : a.animation) {
            const Quat& q = s.rotation;
            for (double v : {s.translation.x(), s.translation.y(), s.translation.z(), q.w(), q.x(), q.y(), q.z(), s.scale})
                text += fmt_num(v) + " ";
            text.back() = '\n';
        }
        write_text_file((d / "anim.txt").string(), text);
    }
}

void save_material(const std::string& root, const MaterialRecord& m, const Rgb8Image& albedo) {
    const fs::path d = fs::path(root) / "materials" / m.material_id;
    fs::create_directories(d);
    const nlohmann::json j = {{"material_id", m.material_id}, {"name", m.name}, {"description", m.description},
                              {"tags", m.tags}, {"albedo", "albedo.png"}};
    write_text_file((d / "material.json").string(), j.dump(2) + "\n");
    write_png_rgb8((d / "albedo.png").string(), albedo);
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

RetrievalScore lexical_score(const std::vector<std::string>& query, const std::vector<std::string>& document) {
    if (query.empty() || document.empty()) return {};
    const std::set<std::string> doc(document.begin(), document.end());
    const std::set<std::string> q(query.begin(), query.end());
    double common = 0;
    for (const auto& t : q) common += doc.count(t);
    return {common / static_cast<double>(q.size()), common / static_cast<double>(doc.size())};
}

const AssetRecord& retrieve_asset(const AssetCatalog& catalog, std::string_view query) {
    return best_match(catalog.assets, query, &AssetRecord::asset_id, "asset");
}

const MaterialRecord& retrieve_material(const AssetCatalog& catalog, std::string_view name) {
    return best_match(catalog.materials, name, &MaterialRecord::material_id, "material");
}

Vec3 parse_scale_reply(std::string_view reply) {
    struct Length {
        double value;
        double unit;  // meters per unit, 0 when no unit was written
    };
    static const std::vector<std::pair<std::string, double>> units = {
        {"millimeters", 1e-3}, {"millimetres", 1e-3}, {"mm", 1e-3},       {"centimeters", 1e-2},
        {"centimetres", 1e-2}, {"cm", 1e-2},          {"meters", 1.0},    {"metres", 1.0},
        {"meter", 1.0},        {"metre", 1.0},        {"m", 1.0},         {"inches", 0.0254},
        {"inch", 0.0254},      {"in", 0.0254},        {"feet", 0.3048},   {"foot", 0.3048},
        {"ft", 0.3048}};
    std::vector<Length> found;
    const std::string s(reply);
    size_t i = 0;
    while (i < s.size() && found.size() < 3) {
        const bool starts = std::isdigit(static_cast<unsigned char>(s[i])) ||
                            (s[i] == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])));
        if (!starts || (i > 0 && std::isalpha(static_cast<unsigned char>(s[i - 1])))) {
            ++i;
            continue;
        }
        size_t end = i;
        while (end < s.size() && (std::isdigit(static_cast<unsigned char>(s[end])) || s[end] == '.')) ++end;
        const double value = std::strtod(s.substr(i, end - i).c_str(), nullptr);
        size_t k = end;
        while (k < s.size() && s[k] == ' ') ++k;
        size_t word_end = k;
        while (word_end < s.size() && std::isalpha(static_cast<unsigned char>(s[word_end]))) ++word_end;
        const std::string word = to_lower(s.substr(k, word_end - k));
        double unit = 0;
        bool ok = true;
        if (!word.empty()) {
            auto it = std::find_if(units.begin(), units.end(), [&](const auto& u) { return u.first == word; });
            if (it != units.end()) {
                unit = it->second;
            } else if (k == end) {
                ok = false;  // glued to letters, e.g. "3D"
            }
        }
        if (ok) found.push_back({value, unit});
        i = std::max(end, i + 1);
    }
    if (found.size() < 3) throw Error(ErrorKind::UnparseableReply, "expected three lengths in reply: \"" + s + "\"");
    const double trailing = found[2].unit > 0 ? found[2].unit : 1.0;
    Vec3 out;
    for (int a = 0; a < 3; ++a) {
        out[a] = found[a].value * (found[a].unit > 0 ? found[a].unit : trailing);
        if (!(out[a] > 0)) throw Error(ErrorKind::UnparseableReply, "non-positive length in reply: \"" + s + "\"");
    }
    return out;
}

Rgb8Image render_thumbnail(const TriangleMesh& mesh, int size) {
    Rgb8Image img(size, size, Rgb8{255, 255, 255});
    if (mesh.empty()) return img;
    const Aabb box = mesh.bounds();
    const double r = std::max(1e-6, 0.5 * box.extent().norm());
    const Vec3 dir = Vec3(1.0, -1.3, 0.9).normalized();
    const CameraView cam = look_at(box.center() + 3.0 * r * dir, box.center(),
                                   {1.1 * size, 1.1 * size, size / 2.0, size / 2.0, size, size});
    const Bvh bvh(mesh);
    const auto ids = render_face_ids(bvh, cam, Exec::serial);
    const Vec3 light = Vec3(0.3, -0.5, 1.0).normalized();
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            const int64_t f = ids(x, y);
            if (f < 0) continue;
            const Vec3 albedo = mesh.has_colors() ? mesh.vertex_colors[mesh.faces[f][0]] : Vec3::Constant(0.7);
            img(x, y) = encode_srgb(Vec3(albedo * (0.25 + 0.75 * std::abs(mesh.face_normals[f].dot(light)))));
        }
    return img;
}

Vec3 estimate_real_scale(AssetRecord& asset, const ScaleEstimator& est) {
    if (est.source == ScaleSource::offline) {
        if (!asset.real_size) throw Error(ErrorKind::MissingMetadata, "asset " + asset.asset_id + " has no real_size metadata");
        return *asset.real_size;
    }
    if (asset.estimated_size) return *asset.estimated_size;
    if (!est.endpoint) throw Error(ErrorKind::EndpointError, "no scale estimation endpoint configured");
    ChatRequest req;
    req.model = est.model;
    req.messages.push_back({"system", "You estimate the physical size of everyday objects from a picture.", ""});
    req.messages.push_back({"user",
                            "The picture shows a 3D model of \"" + asset.name +
                                "\". Give its real-world width, depth and height in meters as three numbers "
                                "in the form: W x D x H meters.",
                            encode_png_rgb8(render_thumbnail(asset.mesh))});
    const ChatResponse reply = est.endpoint->complete(req);
    asset.estimated_size = parse_scale_reply(reply.text);
    return *asset.estimated_size;
}

SceneObject make_asset_object(const AssetRecord& asset, const Vec3& size, const std::string& object_id) {
    if (!(size.array() > 0).all()) throw Error(ErrorKind::InvariantViolation, asset.asset_id + ": target size must be positive");
    SceneObject o;
    o.object_id = object_id;
    o.name = asset.name;
    o.source = ObjectSource::asset;
    o.mesh = asset.mesh;
    const Aabb box = asset.mesh.bounds();
    const Vec3 ext = box.extent();
    const Vec3 base(box.center().x(), box.center().y(), box.lo.z());
    Vec3 k;
    for (int a = 0; a < 3; ++a) k[a] = ext[a] > 0 ? size[a] / ext[a] : 1.0;
    for (Vec3& v : o.mesh.vertices) v = (v - base).cwiseProduct(k);
    o.mesh.recompute_normals();
    o.real_size = size;
    o.baked_animation = asset.animation;
    return o;
}

MaterialSpec clamp_material(MaterialSpec spec, std::vector<std::string>& warnings) {
    const auto clamp01 = [&](double& v, const char* name) {
        if (v < 0 || v > 1 || !std::isfinite(v)) {
            warnings.push_back(std::string(name) + " " + fmt_num(v) + " clamped to [0, 1]");
            v = std::isfinite(v) ? std::clamp(v, 0.0, 1.0) : 0.0;
        }
    };
    clamp01(spec.metallic, "metallic");
    clamp01(spec.specular, "specular");
    clamp01(spec.roughness, "roughness");
    for (int c = 0; c < 3; ++c)
        if (!(spec.color_tint[c] >= 0)) {
            warnings.push_back("color tint component " + fmt_num(spec.color_tint[c]) + " clamped to 0");
            spec.color_tint[c] = 0;
        }
    return spec;
}

std::vector<std::string> apply_material(SceneObject& obj, const MaterialSpec& spec) {
    std::vector<std::string> warnings;
    MaterialSpec next = clamp_material(spec, warnings);
    if (obj.material && !next.texture_set) {
        next.texture_set = obj.material->texture_set;
        next.texture_albedo = obj.material->texture_albedo;
    }
    obj.material = next;
    return warnings;
}

void apply_material(SceneObject& obj, const MaterialRecord& record) {
    MaterialSpec spec = obj.material.value_or(MaterialSpec{});
    spec.texture_set = record.material_id;
    spec.texture_albedo = record.mean_albedo;
    if (record.mean_roughness) spec.roughness = *record.mean_roughness;
    if (record.mean_metallic) spec.metallic = *record.mean_metallic;
    obj.material = spec;
}

}  // namespace vfx

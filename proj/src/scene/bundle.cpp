#include "vfx/scene/bundle.hpp"

#include "vfx/core/error.hpp"
#include "vfx/core/image_io.hpp"
#include "vfx/core/text.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <sstream>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace vfx {

std::set<uint16_t> SceneBundle::label_ids(const std::string& label) const {
    std::set<uint16_t> ids;
    for (const auto& [id, text] : labels)
        if (text == label) ids.insert(id);
    return ids;
}

void validate_bundle(const SceneBundle& b) {
    if (b.cameras.empty()) throw Error(ErrorKind::InvariantViolation, "bundle has no cameras");
    if (b.mesh.empty()) throw Error(ErrorKind::InvariantViolation, "mesh.obj has no faces");
    if (b.gaussians.empty()) throw Error(ErrorKind::InvariantViolation, "gaussians.txt is empty");
    if (b.scene_type != SceneType::indoor_full && !b.env_map)
        throw Error(ErrorKind::InvariantViolation,
                    "env.pfm required for scene_type " + std::string(to_string(b.scene_type)));
    validate_mesh(b.mesh, "mesh.obj");
    validate_gaussians(b.gaussians, "gaussians.txt");
    for (size_t i = 0; i < b.cameras.size(); ++i)
        validate_camera(b.cameras[i], "cameras.json: camera " + std::to_string(i));
    if (b.env_map) validate_envmap(*b.env_map, "env.pfm");
    const auto check_size = [&](const auto& imgs, const char* what) {
        for (size_t i = 0; i < imgs.size(); ++i) {
            const Intrinsics& k = b.cameras[i].intrinsics;
            if (imgs[i].width() != k.width || imgs[i].height() != k.height)
                throw Error(ErrorKind::InvariantViolation, std::string(what) + " " +
                                                               std::to_string(i) +
                                                               " does not match camera size");
        }
    };
    check_size(b.frames, "frame");
    check_size(b.masks, "mask");
}

namespace {

double parse_number(const std::string& tok, const std::string& file, int line) {
    try {
        size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorKind::MalformedRecord,
                    file + ":" + std::to_string(line) + ": bad number '" + tok + "'");
    }
}

uint32_t parse_obj_index(const std::string& tok, size_t vertex_count, const std::string& file,
                         int line) {
    const std::string head = tok.substr(0, tok.find('/'));
    long idx = 0;
    try {
        idx = std::stol(head);
    } catch (const std::exception&) {
        throw Error(ErrorKind::MalformedRecord,
                    file + ":" + std::to_string(line) + ": bad face index '" + tok + "'");
    }
    if (idx < 0) idx += static_cast<long>(vertex_count) + 1;
    if (idx < 1)
        throw Error(ErrorKind::MalformedRecord,
                    file + ":" + std::to_string(line) + ": face index out of range");
    return static_cast<uint32_t>(idx - 1);
}

}  // namespace

TriangleMesh parse_obj(std::string_view text, const std::string& name) {
    TriangleMesh mesh;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    bool any_color = false, any_plain = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        const auto tok = split_ws(line);
        if (tok.empty()) continue;
        if (tok[0] == "v") {
            if (tok.size() != 4 && tok.size() != 7)
                throw Error(ErrorKind::MalformedRecord,
                            name + ":" + std::to_string(line_no) + ": vertex needs 3 or 6 numbers");
            mesh.vertices.emplace_back(parse_number(tok[1], name, line_no),
                                       parse_number(tok[2], name, line_no),
                                       parse_number(tok[3], name, line_no));
            if (tok.size() == 7) {
                any_color = true;
                mesh.vertex_colors.emplace_back(parse_number(tok[4], name, line_no),
                                                parse_number(tok[5], name, line_no),
                                                parse_number(tok[6], name, line_no));
            } else {
                any_plain = true;
            }
        } else if (tok[0] == "f") {
            if (tok.size() != 4)
                throw Error(ErrorKind::MalformedRecord,
                            name + ":" + std::to_string(line_no) + ": face must be a triangle");
            Face f{};
            for (int k = 0; k < 3; ++k)
                f[k] = parse_obj_index(tok[1 + k], mesh.vertices.size(), name, line_no);
            mesh.faces.push_back(f);
        }
        // vn, vt, o, g, s, usemtl, mtllib: ignored
    }
    if (any_color && any_plain)
        throw Error(ErrorKind::MalformedRecord, name + ": vertex colors on only some vertices");
    for (size_t f = 0; f < mesh.faces.size(); ++f)
        for (uint32_t idx : mesh.faces[f])
            if (idx >= mesh.vertices.size())
                throw Error(ErrorKind::InvariantViolation,
                            name + ": face " + std::to_string(f) + " references vertex " +
                                std::to_string(idx + 1) + " of " +
                                std::to_string(mesh.vertices.size()));
    mesh.recompute_normals();
    return mesh;
}

std::string format_obj(const TriangleMesh& mesh) {
    std::ostringstream out;
    for (size_t i = 0; i < mesh.vertices.size(); ++i) {
        const Vec3& v = mesh.vertices[i];
        out << "v " << fmt_num(v.x()) << " " << fmt_num(v.y()) << " " << fmt_num(v.z());
        if (mesh.has_colors()) {
            const Vec3& c = mesh.vertex_colors[i];
            out << " " << fmt_num(c.x()) << " " << fmt_num(c.y()) << " " << fmt_num(c.z());
        }
        out << "\n";
    }
    for (const Face& f : mesh.faces)
        out << "f " << f[0] + 1 << " " << f[1] + 1 << " " << f[2] + 1 << "\n";
    return out.str();
}

GaussianCloud parse_gaussians(std::string_view text, const std::string& name) {
    GaussianCloud cloud;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto tok = split_ws(line);
        if (tok.empty() || tok[0][0] == '#') continue;
        if (tok.size() != 14)
            throw Error(ErrorKind::MalformedRecord,
                        name + ":" + std::to_string(line_no) + ": expected 14 numbers, got " +
                            std::to_string(tok.size()));
        double v[14];
        for (int k = 0; k < 14; ++k) v[k] = parse_number(tok[k], name, line_no);
        Gaussian g;
        g.center = Vec3(v[0], v[1], v[2]);
        g.rotation = Quat(v[3], v[4], v[5], v[6]);  // w x y z
        g.scale = Vec3(v[7], v[8], v[9]);
        g.opacity = v[10];
        g.color = Vec3(v[11], v[12], v[13]);
        cloud.push_back(g);
    }
    return cloud;
}

std::string format_gaussians(const GaussianCloud& cloud) {
    std::ostringstream out;
    for (const Gaussian& g : cloud) {
        const double v[14] = {g.center.x(),   g.center.y(),   g.center.z(),   g.rotation.w(),
                              g.rotation.x(), g.rotation.y(), g.rotation.z(), g.scale.x(),
                              g.scale.y(),    g.scale.z(),    g.opacity,      g.color.x(),
                              g.color.y(),    g.color.z()};
        for (int k = 0; k < 14; ++k) out << (k ? " " : "") << fmt_num(v[k]);
        out << "\n";
    }
    return out.str();
}

namespace {

double round9(double v) { return std::stod(fmt_num(v)); }

std::string rel_frame_path(size_t i, const char* dir) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s/%04zu.png", dir, i);
    return buf;
}

json read_json(const fs::path& p) {
    const std::string text = read_text_file(p.string());
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::MalformedRecord, p.filename().string() + ": " + e.what());
    }
}

CameraView parse_camera(const json& j, size_t index) {
    const std::string where = "cameras.json: camera " + std::to_string(index);
    try {
        CameraView c;
        c.intrinsics.fx = j.at("fx").get<double>();
        c.intrinsics.fy = j.at("fy").get<double>();
        c.intrinsics.cx = j.at("cx").get<double>();
        c.intrinsics.cy = j.at("cy").get<double>();
        c.intrinsics.width = j.at("width").get<int>();
        c.intrinsics.height = j.at("height").get<int>();
        const json& m = j.at("world_from_camera");
        std::vector<double> flat;
        if (m.size() == 4 && m[0].is_array())
            for (const auto& row : m)
                for (const auto& v : row) flat.push_back(v.get<double>());
        else
            flat = m.get<std::vector<double>>();
        if (flat.size() != 16)
            throw Error(ErrorKind::MalformedRecord, where + ": world_from_camera needs 16 values");
        for (int r = 0; r < 3; ++r) {
            for (int k = 0; k < 3; ++k) c.world_from_camera.rotation(r, k) = flat[4 * r + k];
            c.world_from_camera.translation[r] = flat[4 * r + 3];
        }
        c.frame_path = j.value("frame", rel_frame_path(index, "frames"));
        c.mask_path = j.value("masks", std::string());
        return c;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::MalformedRecord, where + ": " + e.what());
    }
}

}  // namespace

SceneBundle load_scene_bundle(const std::string& root_dir) {
    const fs::path root(root_dir);
    const auto need = [&](const char* name) {
        const fs::path p = root / name;
        if (!fs::exists(p)) throw Error(ErrorKind::MissingFile, p.string());
        return p;
    };
    SceneBundle b;
    const fs::path scene_json = need("scene.json");
    const fs::path mesh_obj = need("mesh.obj");
    const fs::path gaussians_txt = need("gaussians.txt");
    const fs::path cameras_json = need("cameras.json");

    try {
        b.scene_type = scene_type_from_string(read_json(scene_json).at("scene_type").get<std::string>());
    } catch (const json::exception& e) {
        throw Error(ErrorKind::MalformedRecord, std::string("scene.json: ") + e.what());
    }
    b.mesh = parse_obj(read_text_file(mesh_obj.string()), "mesh.obj");
    b.gaussians = parse_gaussians(read_text_file(gaussians_txt.string()), "gaussians.txt");

    const json cams = read_json(cameras_json);
    if (!cams.is_array()) throw Error(ErrorKind::MalformedRecord, "cameras.json: expected an array");
    for (size_t i = 0; i < cams.size(); ++i) b.cameras.push_back(parse_camera(cams[i], i));

    bool any_mask = false;
    for (const CameraView& c : b.cameras) {
        const fs::path fp = root / c.frame_path;
        if (!fs::exists(fp)) throw Error(ErrorKind::MissingFile, fp.string());
        b.frames.push_back(read_png_rgb8(fp.string()));
        if (!c.mask_path.empty()) {
            const fs::path mp = root / c.mask_path;
            if (!fs::exists(mp)) throw Error(ErrorKind::MissingFile, mp.string());
            b.masks.push_back(read_png_u16(mp.string()));
            any_mask = true;
        } else {
            b.masks.emplace_back(c.intrinsics.width, c.intrinsics.height, uint16_t{0});
        }
    }
    const fs::path labels = root / "masks" / "labels.json";
    if (fs::exists(labels)) {
        const json lj = read_json(labels);
        try {
            for (const auto& [key, value] : lj.items()) {
                const int id = std::stoi(key);
                if (id <= 0 || id > 65535)
                    throw Error(ErrorKind::MalformedRecord, "masks/labels.json: bad id " + key);
                b.labels[static_cast<uint16_t>(id)] = value.get<std::string>();
            }
        } catch (const json::exception& e) {
            throw Error(ErrorKind::MalformedRecord, std::string("masks/labels.json: ") + e.what());
        } catch (const std::invalid_argument&) {
            throw Error(ErrorKind::MalformedRecord, "masks/labels.json: non-numeric id");
        }
    } else if (any_mask) {
        throw Error(ErrorKind::MissingFile, labels.string());
    }

    const fs::path env = root / "env.pfm";
    if (fs::exists(env)) {
        EnvMap e;
        e.radiance = read_pfm_color(env.string());
        e.intensity = default_env_intensity(b.scene_type);
        b.env_map = std::move(e);
    }
    validate_bundle(b);
    return b;
}

void save_scene_bundle(const SceneBundle& b, const std::string& root_dir) {
    const fs::path root(root_dir);
    std::error_code ec;
    fs::create_directories(root / "frames", ec);
    fs::create_directories(root / "masks", ec);
    if (ec) throw Error(ErrorKind::IoError, "cannot create " + root.string());

    write_text_file((root / "scene.json").string(),
                    json{{"scene_type", std::string(to_string(b.scene_type))}}.dump(2) + "\n");
    write_text_file((root / "mesh.obj").string(), format_obj(b.mesh));
    write_text_file((root / "gaussians.txt").string(), format_gaussians(b.gaussians));

    json cams = json::array();
    for (size_t i = 0; i < b.cameras.size(); ++i) {
        const CameraView& c = b.cameras[i];
        std::vector<double> m;
        const Mat4 w = c.world_from_camera.matrix();
        for (int r = 0; r < 4; ++r)
            for (int k = 0; k < 4; ++k) m.push_back(round9(w(r, k)));
        const std::string frame = rel_frame_path(i, "frames");
        const std::string mask = rel_frame_path(i, "masks");
        cams.push_back({{"fx", round9(c.intrinsics.fx)},
                        {"fy", round9(c.intrinsics.fy)},
                        {"cx", round9(c.intrinsics.cx)},
                        {"cy", round9(c.intrinsics.cy)},
                        {"width", c.intrinsics.width},
                        {"height", c.intrinsics.height},
                        {"world_from_camera", m},
                        {"frame", frame},
                        {"masks", mask}});
        if (i < b.frames.size()) write_png_rgb8((root / frame).string(), b.frames[i]);
        const MaskImage empty(c.intrinsics.width, c.intrinsics.height, uint16_t{0});
        write_png_u16((root / mask).string(), i < b.masks.size() ? b.masks[i] : empty);
    }
    write_text_file((root / "cameras.json").string(), cams.dump(2) + "\n");

    json labels = json::object();
    for (const auto& [id, text] : b.labels) labels[std::to_string(id)] = text;
    write_text_file((root / "masks" / "labels.json").string(), labels.dump(2) + "\n");

    if (b.env_map) write_pfm_color((root / "env.pfm").string(), b.env_map->radiance);
}

}  // namespace vfx

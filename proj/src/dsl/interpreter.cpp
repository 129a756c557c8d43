#include "vfx/dsl/interpreter.hpp"

#include "vfx/core/rng.hpp"
#include "vfx/core/text.hpp"
#include "vfx/dsl/validate.hpp"
#include "vfx/lift/lift.hpp"
#include "vfx/sim/trajectory.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace vfx::dsl {

RuntimeFault::RuntimeFault(int statement, SourcePos pos, ErrorKind cause, const std::string& message)
    : Error(ErrorKind::RuntimeFault,
            (statement < 0 ? std::string("post-program simulation")
                           : "statement " + std::to_string(statement) + " at " + std::to_string(pos.line) + ":" +
                                 std::to_string(pos.column)) +
                ": " + message),
      statement_(statement),
      pos_(pos),
      cause_(cause) {}

namespace {

struct Value {
    Type type = Type::unit;
    double number = 0;
    bool boolean = false;
    std::string text;  // text, object id, or material record id
    Vec3 vec = Vec3::Zero();
    std::vector<Vec3> points;
    Quat rotation = Quat::Identity();
    MaterialSpec material;
    bool material_is_record = false;
};

Value make_number(double x) {
    Value v;
    v.type = Type::number;
    v.number = x;
    return v;
}
Value make_vec(const Vec3& x) {
    Value v;
    v.type = Type::vec3;
    v.vec = x;
    return v;
}
Value make_text(Type t, std::string s) {
    Value v;
    v.type = t;
    v.text = std::move(s);
    return v;
}
Value make_rotation(const Quat& q) {
    Value v;
    v.type = Type::rotation;
    v.rotation = q;
    return v;
}

uint64_t fnv1a(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ULL;
    return h;
}

[[noreturn]] void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

class Interpreter {
public:
    Interpreter(SceneRepresentation& rep, const ExecutionOptions& opts) : rep_(rep), opts_(opts), rng_(opts.seed) {
        vars_["scene"].type = Type::scene;
    }

    void run(const std::vector<Stmt>& stmts) {
        for (const Stmt& s : stmts) statement(s);
    }

    ExecutionReport finish();

private:
    void statement(const Stmt& s) {
        if (s.kind == StmtKind::loop) {
            for (int64_t i = s.from; i < s.to; ++i) {
                vars_[s.name] = make_number(static_cast<double>(i));
                run(s.body);
            }
            return;
        }
        try {
            Value v = eval(s.value);
            if (s.kind == StmtKind::assign) vars_[s.name] = std::move(v);
        } catch (const RuntimeFault&) {
            throw;
        } catch (const Error& e) {
            throw RuntimeFault(s.index, s.pos, e.kind(), e.what());
        }
    }

    Value eval(const Expr& e) {
        switch (e.kind) {
            case ExprKind::number: return make_number(e.number);
            case ExprKind::string: return make_text(Type::text, e.text);
            case ExprKind::boolean: {
                Value v;
                v.type = Type::boolean;
                v.boolean = e.boolean;
                return v;
            }
            case ExprKind::variable: return vars_.at(e.text);
            case ExprKind::list: {
                std::vector<Value> items;
                for (const Expr& a : e.args) items.push_back(eval(a));
                if (items.size() == 3 && std::all_of(items.begin(), items.end(),
                                                     [](const Value& v) { return v.type == Type::number; }))
                    return make_vec({items[0].number, items[1].number, items[2].number});
                Value v;
                v.type = Type::point_list;
                for (const Value& it : items) {
                    if (it.type != Type::vec3) fail(ErrorKind::PreconditionFailed, "point lists hold vectors");
                    v.points.push_back(it.vec);
                }
                return v;
            }
            case ExprKind::negate: {
                Value v = eval(e.args[0]);
                if (v.type == Type::number) return make_number(-v.number);
                if (v.type == Type::vec3) return make_vec(-v.vec);
                fail(ErrorKind::PreconditionFailed, "cannot negate a " + std::string(to_string(v.type)));
            }
            case ExprKind::binary: return binary(e.op, eval(e.args[0]), eval(e.args[1]));
            case ExprKind::field: return field(eval(e.args[0]), e.text);
            case ExprKind::call: {
                std::vector<Value> args;
                for (const Expr& a : e.args) args.push_back(eval(a));
                return call(e.text, args);
            }
        }
        return {};
    }

    static Value binary(char op, const Value& a, const Value& b) {
        const bool an = a.type == Type::number, bn = b.type == Type::number;
        const bool av = a.type == Type::vec3, bv = b.type == Type::vec3;
        switch (op) {
            case '+':
                if (an && bn) return make_number(a.number + b.number);
                if (av && bv) return make_vec(a.vec + b.vec);
                break;
            case '-':
                if (an && bn) return make_number(a.number - b.number);
                if (av && bv) return make_vec(a.vec - b.vec);
                break;
            case '*':
                if (an && bn) return make_number(a.number * b.number);
                if (av && bn) return make_vec(a.vec * b.number);
                if (an && bv) return make_vec(b.vec * a.number);
                break;
            case '/':
                if (bn && b.number == 0.0) fail(ErrorKind::PreconditionFailed, "division by zero");
                if (an && bn) return make_number(a.number / b.number);
                if (av && bn) return make_vec(a.vec / b.number);
                break;
        }
        fail(ErrorKind::PreconditionFailed, std::string("operator '") + op + "' does not apply to " +
                                                std::string(to_string(a.type)) + " and " +
                                                std::string(to_string(b.type)));
    }

    Value field(const Value& base, const std::string& name) {
        if (base.type == Type::vec3) {
            const int axis = name == "x" ? 0 : name == "y" ? 1 : 2;
            return make_number(base.vec[axis]);
        }
        const SceneObject& obj = object(base);
        if (name == "position") return make_vec(obj.transform.translation);
        if (name == "center") return make_vec(obj.world_bounds().center());
        if (name == "bottom") return make_vec(bottom(obj));
        if (name == "size") return make_vec(obj.world_bounds().extent());
        if (name == "scale") return make_number(obj.transform.scale);
        if (name == "name") return make_text(Type::text, obj.name);
        return make_text(Type::text, obj.object_id);
    }

    static Vec3 bottom(const SceneObject& obj) {
        const Aabb b = obj.world_bounds();
        return {0.5 * (b.lo.x() + b.hi.x()), 0.5 * (b.lo.y() + b.hi.y()), b.lo.z()};
    }

    SceneObject& object(const Value& v) {
        SceneObject& obj = rep_.object(v.text);
        touched_.insert(obj.object_id);
        return obj;
    }

    AssetCatalog& catalog() {
        if (!opts_.catalog) fail(ErrorKind::PreconditionFailed, "no asset catalog is loaded");
        return *opts_.catalog;
    }

    // Extracted objects that are about to move stop being part of the background.
    void detach(SceneObject& obj) {
        if (obj.source == ObjectSource::extracted && obj.in_background) detach_from_background(rep_, obj);
    }

    Value retrieve(const std::string& query, bool driving) {
        AssetCatalog& cat = catalog();
        std::string id;
        if (driving) id = vfx::retrieve_asset(cat.driving_subset(), query).asset_id;
        else id = vfx::retrieve_asset(cat, query).asset_id;
        auto it = std::find_if(cat.assets.begin(), cat.assets.end(),
                               [&](const AssetRecord& a) { return a.asset_id == id; });
        AssetRecord& asset = *it;
        const Vec3 size = estimate_real_scale(asset, opts_.scale);
        SceneObject obj = make_asset_object(asset, size, rep_.new_object_id(asset.name));
        SceneObject& added = rep_.add_object(std::move(obj));
        touched_.insert(added.object_id);
        return make_text(Type::object, added.object_id);
    }

    // Placement points: area-weighted over the object's flat, unobstructed
    // faces, kept kPointSpacing apart from earlier points on the same object.
    Vec3 support_point(const SceneObject& obj) {
        TriangleMesh world = obj.mesh;
        for (Vec3& p : world.vertices) p = obj.transform.apply(p);
        world.recompute_normals();
        std::vector<uint32_t> faces;
        std::vector<double> cumulative;
        double total = 0;
        for (uint32_t f = 0; f < world.face_count(); ++f) {
            if (!is_support_face(rep_.background_bvh(), world, f, opts_.support)) continue;
            faces.push_back(f);
            total += world.face_area(f);
            cumulative.push_back(total);
        }
        if (faces.empty() || !(total > 0))
            fail(ErrorKind::NoFlatSupport, "object '" + obj.object_id + "' has no flat face with clearance above it");

        std::vector<Vec3>& used = placed_[obj.object_id];
        SeedStream rng(hash_combine(opts_.seed, hash_combine(fnv1a(obj.object_id), used.size())));
        Vec3 best = Vec3::Zero();
        double best_gap = -1;
        for (int attempt = 0; attempt < 64; ++attempt) {
            const double r = rng.uniform() * total;
            const size_t k = std::min<size_t>(
                std::upper_bound(cumulative.begin(), cumulative.end(), r) - cumulative.begin(), faces.size() - 1);
            double u = rng.uniform(), w = rng.uniform();
            if (u + w > 1) u = 1 - u, w = 1 - w;
            const uint32_t f = faces[k];
            const Vec3 c = world.face_centroid(f);
            const Vec3 p = world.corner(f, 0) + u * (world.corner(f, 1) - world.corner(f, 0)) +
                           w * (world.corner(f, 2) - world.corner(f, 0));
            const Vec3 candidate = c + 0.7 * (p - c);  // stay clear of the face border
            double gap = kInf;
            for (const Vec3& q : used) gap = std::min(gap, (candidate - q).head<2>().norm());
            if (gap > best_gap) best_gap = gap, best = candidate;
            if (gap >= kPointSpacing) break;
        }
        if (best_gap < kPointSpacing && !used.empty())
            warnings_.push_back("placement points on '" + obj.object_id + "' are closer than " +
                                fmt_num(kPointSpacing) + " m");
        used.push_back(best);
        return best;
    }

    void add_effect(const std::string& id, EffectKind kind, int start, int end) {
        if (start < 0 || end < start || end >= opts_.frames)
            fail(ErrorKind::PreconditionFailed, "event frames " + std::to_string(start) + ".." + std::to_string(end) +
                                                    " do not fit a clip of " + std::to_string(opts_.frames) +
                                                    " frames");
        EffectEvent ev;
        ev.object_id = id;
        ev.kind = kind;
        ev.start_frame = start;
        ev.end_frame = end;
        if (kind == EffectKind::fire || kind == EffectKind::smoke) ev.params = default_effect_params(kind);
        events_.push_back(std::move(ev));
    }

    void unsupported(const std::string& what) {
        unsupported_.push_back(what);
        warnings_.push_back(what + " is recorded on the timeline but not rendered");
    }

    Value call(const std::string& name, const std::vector<Value>& a);

    SceneRepresentation& rep_;
    const ExecutionOptions& opts_;
    SeedStream rng_;
    std::map<std::string, Value> vars_;
    std::map<std::string, std::string> detected_;  // label -> object id
    std::map<std::string, std::vector<Vec3>> placed_;
    std::set<std::string> touched_;
    std::vector<std::string> inserted_;
    std::vector<std::string> warnings_;
    std::vector<std::string> unsupported_;
    std::vector<EffectEvent> events_;
};

Value Interpreter::call(const std::string& name, const std::vector<Value>& a) {
    const Value unit;
    if (name == "detect_object") {
        const std::string& label = a[1].text;
        if (auto it = detected_.find(label); it != detected_.end() && rep_.objects.count(it->second))
            return make_text(Type::object, it->second);
        const LiftResult lift = lift_instance(rep_.bundle(), rep_.bundle_bvh(), label);
        SceneObject& obj = extract_object(rep_, lift, label);
        detected_[label] = obj.object_id;
        touched_.insert(obj.object_id);
        return make_text(Type::object, obj.object_id);
    }
    if (name == "sample_point_on_object") return make_vec(support_point(object(a[1])));
    if (name == "sample_point_above_object") {
        const double offset = a.size() > 2 ? a[2].number : kVerticalOffset;
        return make_vec(support_point(object(a[1])) + Vec3(0, 0, offset));
    }
    if (name == "retrieve_asset") return retrieve(a[1].text, false);
    if (name == "retrieve_chatsim_asset") return retrieve(a[1].text, true);
    if (name == "insert_object") {
        SceneObject& obj = object(a[1]);
        validate_object(obj);
        if (obj.inserted) {
            warnings_.push_back("'" + obj.object_id + "' is already in the scene");
        } else {
            obj.inserted = true;
            inserted_.push_back(obj.object_id);
        }
        return unit;
    }
    if (name == "remove_object") {
        SceneObject& obj = object(a[1]);
        const std::string id = obj.object_id;
        if (!obj.inserted) fail(ErrorKind::PreconditionFailed, "'" + id + "' was never inserted into the scene");
        if (obj.source == ObjectSource::extracted) remove_instance(rep_, id);
        else rep_.objects.erase(id);
        std::erase_if(events_, [&](const EffectEvent& ev) { return ev.object_id == id; });
        std::erase(inserted_, id);
        return unit;
    }
    if (name == "update_object") {
        validate_object(object(a[1]));
        return unit;
    }
    if (name == "allow_physics") {
        object(a[0]).physics_enabled = true;
        return unit;
    }
    if (name == "add_fire" || name == "add_smoke") {
        const SceneObject& obj = object(a[1]);
        add_effect(obj.object_id, name == "add_fire" ? EffectKind::fire : EffectKind::smoke, 0, opts_.frames - 1);
        return unit;
    }
    if (name == "set_static_animation") {
        object(a[0]).trajectory.reset();
        return unit;
    }
    if (name == "set_moving_animation") {
        if (a[1].points.size() < 2) fail(ErrorKind::TooFewPoints, "a trajectory needs at least 2 points");
        SceneObject& obj = object(a[0]);
        detach(obj);
        obj.trajectory = a[1].points;
        return unit;
    }
    if (name == "init_material") {
        Value v;
        v.type = Type::material;
        if (a.size() > 0) v.material.metallic = a[0].number;
        if (a.size() > 1) v.material.specular = a[1].number;
        if (a.size() > 2) v.material.roughness = a[2].number;
        if (a.size() > 3) v.material.color_tint = a[3].vec;
        v.material = clamp_material(v.material, warnings_);
        return v;
    }
    if (name == "retrieve_material") {
        Value v = make_text(Type::material, vfx::retrieve_material(catalog(), a[1].text).material_id);
        v.material_is_record = true;
        return v;
    }
    if (name == "apply_material") {
        SceneObject& obj = object(a[0]);
        if (a[1].material_is_record) {
            const auto& mats = catalog().materials;
            auto it = std::find_if(mats.begin(), mats.end(),
                                   [&](const MaterialRecord& m) { return m.material_id == a[1].text; });
            vfx::apply_material(obj, *it);
        } else {
            for (auto& w : vfx::apply_material(obj, a[1].material)) warnings_.push_back(w);
        }
        return unit;
    }
    if (name == "allow_fracture") {
        object(a[0]).fracture_enabled = true;
        return unit;
    }
    if (name == "make_break") {
        SceneObject& obj = object(a[0]);
        obj.fracture_enabled = obj.break_at_start = obj.physics_enabled = true;
        add_effect(obj.object_id, EffectKind::break_apart, 0, 0);
        return unit;
    }
    if (name == "make_melting") {
        add_effect(object(a[1]).object_id, EffectKind::melt, 0, opts_.frames - 1);
        unsupported("make_melting");
        return unit;
    }
    if (name == "get_object_center_position") return make_vec(object(a[0]).world_bounds().center());
    if (name == "get_object_bottom_position") return make_vec(bottom(object(a[0])));
    if (name == "translate_object") {
        SceneObject& obj = object(a[0]);
        detach(obj);
        obj.transform.translation += a[1].vec;
        return unit;
    }
    if (name == "rotate_object") {
        SceneObject& obj = object(a[0]);
        detach(obj);
        obj.transform.rotation = (a[1].rotation * obj.transform.rotation).normalized();
        return unit;
    }
    if (name == "scale_object") {
        if (!(a[1].number > 0)) fail(ErrorKind::PreconditionFailed, "scale factor must be positive");
        SceneObject& obj = object(a[0]);
        detach(obj);
        obj.transform.scale *= a[1].number;
        return unit;
    }
    if (name == "get_random_2D_rotation") return make_rotation(yaw_rotation(rng_.uniform(0.0, 2.0 * kPi)));
    if (name == "get_random_3D_rotation") {
        // Shoemake: uniform unit quaternion from three uniforms.
        const double u1 = rng_.uniform(), u2 = rng_.uniform(), u3 = rng_.uniform();
        const double s1 = std::sqrt(1 - u1), s2 = std::sqrt(u1);
        return make_rotation(Quat(s2 * std::cos(2 * kPi * u3), s1 * std::sin(2 * kPi * u2),
                                  s1 * std::cos(2 * kPi * u2), s2 * std::sin(2 * kPi * u3)));
    }
    if (name == "make_copy") {
        const SceneObject& src = object(a[0]);
        SceneObject copy = src;
        copy.object_id = rep_.new_object_id(src.name);
        copy.source = ObjectSource::asset;
        copy.inserted = false;
        copy.in_background = false;
        copy.source_faces.clear();
        copy.source_gaussians.clear();
        copy.events.clear();
        const std::string id = rep_.add_object(std::move(copy)).object_id;
        touched_.insert(id);
        return make_text(Type::object, id);
    }
    if (name == "add_event") {
        const SceneObject& obj = object(a[1]);
        std::string word = a[2].text;
        if (word == "break") word = "break_apart";
        const auto kind = effect_kind_from_string(word);
        if (!kind) fail(ErrorKind::PreconditionFailed, "unknown event kind '" + a[2].text + "'");
        add_effect(obj.object_id, *kind, static_cast<int>(a[3].number), static_cast<int>(a[4].number));
        if (*kind == EffectKind::melt || *kind == EffectKind::incinerate) unsupported(std::string(to_string(*kind)));
        if (*kind == EffectKind::break_apart) {
            SceneObject& o = rep_.object(obj.object_id);
            o.fracture_enabled = o.physics_enabled = true;
            if (a[3].number == 0) o.break_at_start = true;
            else warnings_.push_back("break events after frame 0 are triggered by impact, not by frame");
        }
        return unit;
    }
    if (name == "get_camera_position" || name == "get_vehicle_position" || name == "get_direction") {
        const auto& cams = rep_.bundle().cameras;
        const size_t index = a.size() > 1 && a[1].type == Type::number ? static_cast<size_t>(a[1].number) : 0;
        if (cams.empty() || index >= cams.size() || (a.size() > 1 && a[1].type == Type::number && a[1].number < 0))
            fail(ErrorKind::OutOfBounds, "camera index " + std::to_string(index) + " is out of range");
        const CameraView& cam = cams[index];
        if (name == "get_camera_position") return make_vec(cam.center());
        if (name == "get_vehicle_position") return make_vec({cam.center().x(), cam.center().y(), 0.0});
        const Mat3& r = cam.world_from_camera.rotation;
        const std::string& w = a[1].text;
        if (w == "front") return make_vec(r.col(2));
        if (w == "back") return make_vec(-r.col(2));
        if (w == "right") return make_vec(r.col(0));
        if (w == "left") return make_vec(-r.col(0));
        if (w == "down") return make_vec(r.col(1));
        if (w == "up") return make_vec(-r.col(1));
        fail(ErrorKind::PreconditionFailed, "unknown direction '" + w + "'");
    }
    fail(ErrorKind::UnsupportedFunction, "builtin '" + name + "' has no binding");
}

ExecutionReport Interpreter::finish() {
    std::vector<Timeline> fragments;
    const bool had_timeline = !rep_.timeline.tracks.empty() || !rep_.timeline.events.empty();
    if (had_timeline) fragments.push_back(rep_.timeline);

    std::vector<std::string> physics_ids;
    for (const auto& [id, obj] : rep_.objects) {
        if (!obj.physics_enabled && !obj.trajectory) continue;
        if (!obj.inserted) {
            warnings_.push_back("'" + id + "' is animated but was never inserted");
            continue;
        }
        if (obj.physics_enabled) physics_ids.push_back(id);
    }
    for (const auto& [id, obj] : rep_.objects)
        if (obj.inserted && obj.trajectory)
            fragments.push_back(animate_trajectory(obj, *obj.trajectory, opts_.frames, opts_.fps));
    if (!physics_ids.empty())
        fragments.push_back(simulate_rigid(rep_, physics_ids, opts_.contact, opts_.frames, opts_.fps,
                                           hash_combine(opts_.seed, 0x51u)));
    if (!events_.empty()) {
        Timeline ev;
        ev.fps = opts_.fps;
        ev.frame_count = opts_.frames;
        ev.events = events_;
        fragments.push_back(std::move(ev));
    }

    ExecutionReport report;
    if (fragments.size() > (had_timeline ? 1u : 0u)) {
        report.timeline = merge_timelines(fragments);
        validate_timeline(report.timeline);
        rep_.timeline = report.timeline;
        for (auto& [id, obj] : rep_.objects) obj.events.clear();
        for (size_t i = 0; i < rep_.timeline.events.size(); ++i)
            if (auto it = rep_.objects.find(rep_.timeline.events[i].object_id); it != rep_.objects.end())
                it->second.events.push_back(i);
        for (const auto& [id, track] : report.timeline.tracks) touched_.insert(id);
    } else {
        report.timeline = rep_.timeline;
    }
    report.touched_objects.assign(touched_.begin(), touched_.end());
    report.inserted_objects = inserted_;
    report.warnings = warnings_;
    report.unsupported = unsupported_;
    return report;
}

}  // namespace

ExecutionReport execute_program(const Program& program, SceneRepresentation& rep, const ExecutionOptions& options) {
    if (options.frames < 1 || !(options.fps > 0))
        throw Error(ErrorKind::ConfigError, "frames and fps must be positive");
    const auto diagnostics = validate_program(program, options.max_loop);
    if (!diagnostics.empty()) throw Error(ErrorKind::InvalidProgram, "\n" + format_diagnostics(diagnostics));
    Interpreter interp(rep, options);
    interp.run(program.statements);
    try {
        return interp.finish();
    } catch (const Error& e) {
        throw RuntimeFault(-1, {}, e.kind(), e.what());
    }
}

}  // namespace vfx::dsl

#include "vfx/pipeline/pipeline.hpp"

#include "vfx/assets/catalog.hpp"
#include "vfx/composite/composite.hpp"
#include "vfx/core/image.hpp"
#include "vfx/core/rng.hpp"
#include "vfx/core/text.hpp"
#include "vfx/dsl/interpreter.hpp"
#include "vfx/dsl/validate.hpp"
#include "vfx/llm/prompt.hpp"
#include "vfx/render/raytracer.hpp"
#include "vfx/scene/bundle.hpp"
#include "vfx/splat/splat.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <memory>

namespace vfx {

namespace fs = std::filesystem;

void validate_run_config(const RunConfig& cfg) {
    if (cfg.instruction.has_value() == cfg.program_path.has_value())
        throw Error(ErrorKind::ConfigError, "give exactly one of an instruction or a program file");
    if (cfg.bundle_path.empty()) throw Error(ErrorKind::ConfigError, "no scene bundle given");
    if (cfg.out_dir.empty()) throw Error(ErrorKind::ConfigError, "no output directory given");
    if (cfg.frames < 1) throw Error(ErrorKind::ConfigError, "frames must be at least 1");
    if (!(cfg.fps > 0)) throw Error(ErrorKind::ConfigError, "fps must be positive");
    if (cfg.spp && *cfg.spp < 1) throw Error(ErrorKind::ConfigError, "spp must be at least 1");
    if (cfg.supersample < 1) throw Error(ErrorKind::ConfigError, "supersample must be at least 1");
    if (cfg.instruction && !cfg.offline && !cfg.llm_config)
        throw Error(ErrorKind::ConfigError, "an instruction needs --offline or an endpoint config");
}

std::string_view to_string(FailureCategory c) {
    switch (c) {
        case FailureCategory::scene_modeling: return "scene_modeling";
        case FailureCategory::editing_modules: return "editing_modules";
        case FailureCategory::unsupported_function: return "unsupported_function";
        case FailureCategory::code_generation: return "code_generation";
        case FailureCategory::config: return "config";
    }
    return "?";
}

int exit_code(FailureCategory c) {
    switch (c) {
        case FailureCategory::scene_modeling: return 1;
        case FailureCategory::editing_modules: return 2;
        case FailureCategory::unsupported_function: return 3;
        case FailureCategory::code_generation: return 4;
        case FailureCategory::config: return 64;
    }
    return 2;
}

FailureCategory category_of(ErrorKind kind) {
    using K = ErrorKind;
    switch (kind) {
        case K::MissingFile:
        case K::MalformedRecord:
        case K::InvariantViolation:
        case K::OutOfBounds:
        case K::EmptyMesh:
        case K::Degenerate:
        case K::NotWatertight:
        case K::MultipleLoops:
        case K::OpenBoundary:
        case K::UnknownLabel:
        case K::EmptySelection:
        case K::NoEmittersFound:
        case K::ResolutionMismatch:
        case K::IoError:
            return FailureCategory::scene_modeling;
        case K::NoFlatSupport:
        case K::PreconditionFailed:
        case K::MissingHull:
        case K::NonFiniteState:
        case K::TooFewPoints:
        case K::ConflictingTrack:
        case K::NoMatch:
        case K::MissingMetadata:
        case K::UnparseableReply:
        case K::RuntimeFault:  // only reached without a cause
            return FailureCategory::editing_modules;
        case K::UnsupportedFunction:
            return FailureCategory::unsupported_function;
        case K::EndpointError:
        case K::SyntaxError:
        case K::InvalidProgram:
        case K::NoProgramFound:
        case K::ExhaustedAttempts:
        case K::UnknownInstruction:
            return FailureCategory::code_generation;
        case K::ConfigError:
            return FailureCategory::config;
    }
    return FailureCategory::editing_modules;
}

FailureReport report_failure_category(const std::exception& err) {
    FailureReport r;
    r.detail = err.what();
    if (const auto* fault = dynamic_cast<const dsl::RuntimeFault*>(&err)) {
        r.kind = fault->cause();
        if (fault->statement() >= 0) r.statement = fault->statement();
    } else if (const auto* e = dynamic_cast<const Error*>(&err)) {
        r.kind = e->kind();
    } else if (dynamic_cast<const fs::filesystem_error*>(&err)) {
        r.kind = ErrorKind::IoError;
    } else {
        r.kind = ErrorKind::PreconditionFailed;
        r.detail = "internal error: " + r.detail;
    }
    r.category = category_of(r.kind);
    return r;
}

std::vector<CameraView> orbit_cameras(const SceneBundle& bundle, int frames) {
    if (bundle.cameras.empty()) throw Error(ErrorKind::PreconditionFailed, "bundle has no cameras to orbit from");
    const Vec3 center = bundle.mesh.bounds().center();
    double height = 0, radius = 0;
    for (const auto& cam : bundle.cameras) {
        height += cam.center().z();
        radius += (cam.center() - center).head<2>().norm();
    }
    height /= static_cast<double>(bundle.cameras.size());
    radius /= static_cast<double>(bundle.cameras.size());
    if (!(radius > 0)) radius = 1.0;
    const Vec3 first = bundle.cameras[0].center() - center;
    const double phase = std::atan2(first.y(), first.x());
    std::vector<CameraView> out;
    for (int k = 0; k < frames; ++k) {
        const double a = phase + 2.0 * kPi * k / frames;
        const Vec3 eye(center.x() + radius * std::cos(a), center.y() + radius * std::sin(a), height);
        out.push_back(look_at(eye, center, bundle.cameras[0].intrinsics));
    }
    return out;
}

size_t original_camera_index(size_t camera_count, int frame, int frames) {
    return std::min(camera_count - 1, static_cast<size_t>(frame) * camera_count / static_cast<size_t>(frames));
}

namespace {

struct Program {
    dsl::Program program;
    std::string source;
    int attempts = 0;
};

Program obtain_program(const RunConfig& cfg, ChatEndpoint* endpoint, const fs::path& out) {
    Program p;
    if (cfg.program_path) {
        p.source = read_text_file(*cfg.program_path);
        p.program = dsl::parse_program(p.source);
        const auto diagnostics = dsl::validate_program(p.program);
        if (!diagnostics.empty())
            throw Error(ErrorKind::InvalidProgram, "\n" + dsl::format_diagnostics(diagnostics));
        return p;
    }
    GenerationOptions gen;
    gen.transcript_dir = (out / "run").string();
    if (auto* http = dynamic_cast<HttpChatEndpoint*>(endpoint)) {
        gen.model = http->config().model;
        gen.temperature = http->config().temperature;
        gen.max_attempts = http->config().max_attempts;
    }
    GenerationResult r = generate_with_repair(*endpoint, default_prompt_bundle(), *cfg.instruction, gen);
    p.program = std::move(r.program);
    p.source = std::move(r.source);
    p.attempts = r.attempts;
    return p;
}

// Pixels where background content was taken away (removed or moved objects).
BinaryImage vacated_mask(const SceneRepresentation& rep, const CameraView& cam) {
    GaussianCloud gone;
    for (uint32_t i : rep.removed_gaussians) gone.push_back(rep.bundle().gaussians[i]);
    BinaryImage mask(cam.intrinsics.width, cam.intrinsics.height, 0);
    if (gone.empty()) return mask;
    const SplatImage s = render_splats(gone, cam);
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x) {
            if (s.alpha(x, y) < 0.3) continue;
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    const int u = x + dx, v = y + dy;
                    if (u >= 0 && v >= 0 && u < mask.width() && v < mask.height()) mask(u, v) = 1;
                }
        }
    return mask;
}

bool any_set(const BinaryImage& m) {
    for (uint8_t v : m.pixels())
        if (v) return true;
    return false;
}

nlohmann::json report_json(const RunConfig& cfg, const RunResult& r, const std::string& source, int attempts) {
    nlohmann::json j;
    j["status"] = r.failure ? "failed" : "ok";
    j["exit_code"] = r.exit_code;
    j["bundle"] = cfg.bundle_path;
    if (cfg.instruction) j["instruction"] = *cfg.instruction;
    if (cfg.program_path) j["program_file"] = *cfg.program_path;
    j["program"] = source;
    j["generation_attempts"] = attempts;
    j["seed"] = cfg.seed;
    j["frames"] = cfg.frames;
    j["fps"] = cfg.fps;
    j["spp"] = cfg.spp.value_or(kDefaultSpp);
    j["camera"] = cfg.camera == CameraTrack::orbit ? "orbit" : "original";
    j["offline"] = cfg.offline;
    j["inserted_objects"] = r.inserted_objects;
    j["warnings"] = r.warnings;
    j["unsupported"] = r.unsupported;
    j["frames_written"] = r.frames_written;
    if (r.failure) {
        nlohmann::json f;
        f["category"] = std::string(to_string(r.failure->category));
        f["error"] = std::string(to_string(r.failure->kind));
        f["detail"] = r.failure->detail;
        if (r.failure->statement) f["statement"] = *r.failure->statement;
        j["failure"] = f;
    }
    return j;
}

}  // namespace

RunResult run_pipeline(const RunConfig& cfg) {
    RunResult result;
    std::string source;
    int attempts = 0;
    const fs::path out(cfg.out_dir);
    try {
        validate_run_config(cfg);
        fs::create_directories(out);

        auto bundle = std::make_shared<const SceneBundle>(load_scene_bundle(cfg.bundle_path));
        SceneRepresentation rep(bundle);

        std::optional<AssetCatalog> catalog;
        const fs::path catalog_root =
            cfg.catalog_path ? fs::path(*cfg.catalog_path) : fs::path(cfg.bundle_path) / "catalog";
        if (cfg.catalog_path || fs::exists(catalog_root)) catalog = load_catalog(catalog_root.string());

        std::unique_ptr<ChatEndpoint> endpoint;
        if (cfg.instruction) {
            if (cfg.offline) endpoint = std::make_unique<OfflineEndpoint>();
            else endpoint = std::make_unique<HttpChatEndpoint>(load_endpoint_config(*cfg.llm_config));
        }

        Program program = obtain_program(cfg, endpoint.get(), out);
        source = program.source;
        attempts = program.attempts;
        write_text_file((out / "program.dsl").string(), source + "\n");

        dsl::ExecutionOptions exec;
        exec.catalog = catalog ? &*catalog : nullptr;
        exec.frames = cfg.frames;
        exec.fps = cfg.fps;
        exec.seed = cfg.seed;
        if (!cfg.offline && endpoint) {
            exec.scale.source = ScaleSource::external;
            exec.scale.endpoint = endpoint.get();
        }
        const dsl::ExecutionReport report = dsl::execute_program(program.program, rep, exec);
        result.inserted_objects = report.inserted_objects;
        result.warnings = report.warnings;
        result.unsupported = report.unsupported;
        for (const auto& u : report.unsupported) result.warnings.push_back("unsupported_function: " + u);
        if (cfg.strict_unsupported && !report.unsupported.empty())
            throw Error(ErrorKind::UnsupportedFunction, report.unsupported.front() + " cannot be rendered");

        Timeline timeline = rep.timeline;
        timeline.fps = cfg.fps;
        timeline.frame_count = cfg.frames;
        write_text_file((out / "timeline.txt").string(), serialize_timeline(timeline));

        const Lights lights = scene_lights(*bundle, rep.bundle_bvh());
        RenderSettings settings;
        settings.spp = cfg.spp.value_or(kDefaultSpp);
        settings.effect_spp = settings.spp * (kEffectSpp / kDefaultSpp);
        settings.supersample = cfg.supersample;
        settings.seed = cfg.seed;

        const std::vector<CameraView> orbit =
            cfg.camera == CameraTrack::orbit ? orbit_cameras(*bundle, cfg.frames) : std::vector<CameraView>{};
        const GaussianCloud background =
            cfg.camera == CameraTrack::orbit ? rep.background_gaussians() : GaussianCloud{};
        std::vector<BinaryImage> vacated(bundle->cameras.size());

        std::vector<CompositeFrame> frames;
        for (int k = 0; k < cfg.frames; ++k) {
            CameraView cam;
            Rgb8Image base;
            BinaryImage hole;
            if (cfg.camera == CameraTrack::orbit) {
                // Novel views have no recorded frame: the edited Gaussians are the base.
                cam = orbit[k];
                base = encode_srgb(render_splats(background, cam).color);
            } else {
                const size_t c = original_camera_index(bundle->cameras.size(), k, cfg.frames);
                cam = bundle->cameras[c];
                base = bundle->frames[c];
                if (vacated[c].empty()) vacated[c] = vacated_mask(rep, cam);
                hole = vacated[c];
            }
            const bool fill = !hole.empty() && any_set(hole);
            const BlendMode mode = blend_mode_for_frame(timeline, k);
            if (objects_at_frame(rep, timeline, k).empty() && !fill) {
                // Nothing inserted or vacated in view: the frame passes through unchanged.
                CompositeFrame f;
                f.color = base;
                f.shadow_ratio = FloatImage(base.width(), base.height(), 1.0);
                f.fg_mask = f.occlusion = BinaryImage(base.width(), base.height(), 0);
                f.mode = mode;
                frames.push_back(std::move(f));
                continue;
            }
            RenderSettings s = settings;
            s.seed = hash_combine(settings.seed, static_cast<uint64_t>(k));
            const RenderPassSet passes = render_passes(rep, timeline, k, cam, lights, s);
            if (passes.nonfinite)
                result.warnings.push_back("frame " + std::to_string(k) + ": " + std::to_string(passes.nonfinite) +
                                          " non-finite samples clamped");
            if (fill) base = fill_removed(base, hole, passes);
            frames.push_back(composite_frame(base, passes, mode));
        }
        assemble_sequence(frames, (out / "frames").string(), cfg.fps);
        result.frames_written = static_cast<int>(frames.size());
    } catch (const std::exception& e) {
        result.failure = report_failure_category(e);
        result.exit_code = exit_code(result.failure->category);
    }
    try {
        if (!cfg.out_dir.empty()) {
            fs::create_directories(out);
            write_text_file((out / "report.json").string(), report_json(cfg, result, source, attempts).dump(2) + "\n");
        }
    } catch (const std::exception& e) {
        if (!result.failure) {
            result.failure = report_failure_category(e);
            result.exit_code = exit_code(result.failure->category);
        }
    }
    return result;
}

}  // namespace vfx

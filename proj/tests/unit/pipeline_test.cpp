#include <doctest.h>

#include "vfx/core/error.hpp"
#include "vfx/core/image_io.hpp"
#include "vfx/core/text.hpp"
#include "vfx/demo/catalog.hpp"
#include "vfx/demo/synthetic.hpp"
#include "vfx/dsl/interpreter.hpp"
#include "vfx/llm/prompt.hpp"
#include "vfx/pipeline/pipeline.hpp"
#include "vfx/scene/bundle.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>

using namespace vfx;
namespace fs = std::filesystem;

namespace {

// Written independently of category_of: the four categories by module family.
const std::map<ErrorKind, FailureCategory>& expected_categories() {
    using K = ErrorKind;
    using C = FailureCategory;
    static const std::map<ErrorKind, FailureCategory> table = {
        {K::MissingFile, C::scene_modeling},        {K::MalformedRecord, C::scene_modeling},
        {K::InvariantViolation, C::scene_modeling}, {K::OutOfBounds, C::scene_modeling},
        {K::EmptyMesh, C::scene_modeling},          {K::Degenerate, C::scene_modeling},
        {K::NotWatertight, C::scene_modeling},      {K::MultipleLoops, C::scene_modeling},
        {K::OpenBoundary, C::scene_modeling},       {K::UnknownLabel, C::scene_modeling},
        {K::EmptySelection, C::scene_modeling},     {K::NoEmittersFound, C::scene_modeling},
        {K::ResolutionMismatch, C::scene_modeling}, {K::IoError, C::scene_modeling},
        {K::NoFlatSupport, C::editing_modules},     {K::PreconditionFailed, C::editing_modules},
        {K::MissingHull, C::editing_modules},       {K::NonFiniteState, C::editing_modules},
        {K::TooFewPoints, C::editing_modules},      {K::ConflictingTrack, C::editing_modules},
        {K::NoMatch, C::editing_modules},           {K::MissingMetadata, C::editing_modules},
        {K::UnparseableReply, C::editing_modules},  {K::RuntimeFault, C::editing_modules},
        {K::UnsupportedFunction, C::unsupported_function},
        {K::EndpointError, C::code_generation},     {K::SyntaxError, C::code_generation},
        {K::InvalidProgram, C::code_generation},    {K::NoProgramFound, C::code_generation},
        {K::ExhaustedAttempts, C::code_generation}, {K::UnknownInstruction, C::code_generation},
        {K::ConfigError, C::config},
    };
    return table;
}

// A small table-scene bundle with the demo catalog, written once per test binary.
const std::string& bundle_dir() {
    static const std::string dir = [] {
        const fs::path d = fs::temp_directory_path() / "vfx_pipeline_bundle";
        fs::remove_all(d);
        save_scene_bundle(demo::make_table_scene(3, 48, 36).bundle, d.string());
        demo::save_demo_catalog(demo::make_demo_catalog(), (d / "catalog").string());
        return d.string();
    }();
    return dir;
}

RunConfig base_config(const std::string& name) {
    RunConfig cfg;
    cfg.bundle_path = bundle_dir();
    cfg.out_dir = (fs::temp_directory_path() / "vfx_pipeline_runs" / name).string();
    fs::remove_all(cfg.out_dir);
    cfg.frames = 6;
    cfg.spp = 2;
    cfg.supersample = 1;
    cfg.offline = true;
    return cfg;
}

std::string program_file(const std::string& name, const std::string& text) {
    const fs::path p = fs::temp_directory_path() / "vfx_pipeline_runs" / (name + ".dsl");
    fs::create_directories(p.parent_path());
    write_text_file(p.string(), text);
    return p.string();
}

nlohmann::json report(const RunConfig& cfg) {
    return nlohmann::json::parse(read_text_file((fs::path(cfg.out_dir) / "report.json").string()));
}

std::vector<std::string> frame_bytes(const RunConfig& cfg) {
    std::vector<std::string> out;
    for (int k = 0; k < cfg.frames; ++k) {
        char name[16];
        std::snprintf(name, sizeof name, "%04d.png", k);
        out.push_back(read_text_file((fs::path(cfg.out_dir) / "frames" / name).string()));
    }
    return out;
}

}  // namespace

TEST_CASE("failure mapping is total and matches the taxonomy") {
    REQUIRE(expected_categories().size() == kAllErrorKinds.size());
    for (ErrorKind k : kAllErrorKinds) {
        CAPTURE(to_string(k));
        const FailureReport r = report_failure_category(Error(k, "injected"));
        CHECK(r.category == expected_categories().at(k));
        CHECK(r.kind == k);
        CHECK(r.detail.find("injected") != std::string::npos);
    }
    CHECK(exit_code(FailureCategory::scene_modeling) == 1);
    CHECK(exit_code(FailureCategory::editing_modules) == 2);
    CHECK(exit_code(FailureCategory::unsupported_function) == 3);
    CHECK(exit_code(FailureCategory::code_generation) == 4);
    CHECK(exit_code(FailureCategory::config) == 64);

    // Runtime faults are classified by the module error underneath.
    const auto fault = report_failure_category(dsl::RuntimeFault(3, {4, 1}, ErrorKind::EmptySelection, "x"));
    CHECK(fault.category == FailureCategory::scene_modeling);
    CHECK(fault.statement == 3);
    CHECK(report_failure_category(dsl::RuntimeFault(0, {}, ErrorKind::NoMatch, "x")).category ==
          FailureCategory::editing_modules);
    CHECK(report_failure_category(ExhaustedAttempts({"a", "b", "c"}, "SyntaxError: 1:1")).category ==
          FailureCategory::code_generation);
    CHECK(report_failure_category(fs::filesystem_error("x", std::error_code())).category ==
          FailureCategory::scene_modeling);
    CHECK(report_failure_category(std::runtime_error("boom")).category == FailureCategory::editing_modules);
}

TEST_CASE("run config validation") {
    RunConfig cfg;
    cfg.bundle_path = "b";
    CHECK_THROWS_AS(validate_run_config(cfg), Error);  // neither instruction nor program
    cfg.program_path = "p.dsl";
    CHECK_NOTHROW(validate_run_config(cfg));
    cfg.instruction = "x";
    CHECK_THROWS_AS(validate_run_config(cfg), Error);  // both
    cfg.program_path.reset();
    CHECK_THROWS_AS(validate_run_config(cfg), Error);  // instruction without endpoint or --offline
    cfg.offline = true;
    CHECK_NOTHROW(validate_run_config(cfg));
    for (auto bad : {+[](RunConfig& c) { c.frames = 0; }, +[](RunConfig& c) { c.fps = 0; },
                     +[](RunConfig& c) { c.spp = 0; }, +[](RunConfig& c) { c.supersample = 0; }}) {
        RunConfig c = cfg;
        bad(c);
        try {
            validate_run_config(c);
            FAIL("expected ConfigError");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::ConfigError);
        }
    }
}

TEST_CASE("camera tracks") {
    CHECK(original_camera_index(3, 0, 3) == 0);
    CHECK(original_camera_index(3, 2, 3) == 2);
    CHECK(original_camera_index(3, 47, 48) == 2);
    CHECK(original_camera_index(3, 16, 48) == 1);
    CHECK(original_camera_index(1, 5, 48) == 0);

    const SceneBundle b = demo::make_table_scene(3, 48, 36).bundle;
    const auto orbit = orbit_cameras(b, 8);
    REQUIRE(orbit.size() == 8);
    const Vec3 center = b.mesh.bounds().center();
    double height = 0;
    for (const auto& c : b.cameras) height += c.center().z() / 3.0;
    const double radius = (b.cameras[0].center() - center).head<2>().norm();
    for (const auto& cam : orbit) {
        CHECK(cam.center().z() == doctest::Approx(height));
        CHECK((cam.center() - center).head<2>().norm() == doctest::Approx(radius));
        CHECK(cam.forward().dot((center - cam.center()).normalized()) == doctest::Approx(1.0));
        CHECK(cam.intrinsics.width == 48);
    }
    CHECK((orbit[0].center().head<2>() - b.cameras[0].center().head<2>()).norm() < 1e-9);
    CHECK((orbit[4].center() - center).head<2>().dot((orbit[0].center() - center).head<2>()) ==
          doctest::Approx(-radius * radius));
}

TEST_CASE("pipeline: offline drop run is reproducible") {
    RunConfig cfg = base_config("drop");
    cfg.instruction = "Drop 5 basketballs on the table.";
    const RunResult r = run_pipeline(cfg);
    REQUIRE(r.exit_code == 0);
    CHECK(r.inserted_objects.size() == 5);
    CHECK(r.frames_written == 6);
    const auto j = report(cfg);
    CHECK(j["status"] == "ok");
    CHECK(j["inserted_objects"].size() == 5);
    CHECK(fs::exists(fs::path(cfg.out_dir) / "run" / "attempt_1.txt"));
    CHECK(fs::exists(fs::path(cfg.out_dir) / "frames" / "manifest.json"));
    const Timeline tl = parse_timeline(read_text_file((fs::path(cfg.out_dir) / "timeline.txt").string()));
    CHECK(tl.tracks.size() == 5);
    CHECK(tl.frame_count == 6);

    const auto first = frame_bytes(cfg);
    const std::string first_report = read_text_file((fs::path(cfg.out_dir) / "report.json").string());
    RunConfig again = cfg;
    again.out_dir = base_config("drop_again").out_dir;
    REQUIRE(run_pipeline(again).exit_code == 0);
    CHECK(frame_bytes(again) == first);
    CHECK(read_text_file((fs::path(again.out_dir) / "timeline.txt").string()) ==
          read_text_file((fs::path(cfg.out_dir) / "timeline.txt").string()));
    CHECK(read_text_file((fs::path(again.out_dir) / "report.json").string()) == first_report);
}

TEST_CASE("pipeline: zero-edit run reproduces the input frames") {
    RunConfig cfg = base_config("identity");
    cfg.program_path = program_file("identity", "# no edits\n");
    cfg.frames = 3;
    REQUIRE(run_pipeline(cfg).exit_code == 0);
    const SceneBundle b = load_scene_bundle(bundle_dir());
    for (int k = 0; k < 3; ++k) {
        char name[16];
        std::snprintf(name, sizeof name, "%04d.png", k);
        CHECK(read_png_rgb8((fs::path(cfg.out_dir) / "frames" / name).string()) == b.frames[k]);
    }
}

TEST_CASE("pipeline: exit codes per failure category") {
    SUBCASE("missing bundle is a scene modeling failure") {
        RunConfig cfg = base_config("missing");
        cfg.bundle_path = "/nonexistent/bundle";
        cfg.instruction = "Drop 5 basketballs on the table.";
        const RunResult r = run_pipeline(cfg);
        CHECK(r.exit_code == 1);
        CHECK(report(cfg)["failure"]["category"] == "scene_modeling");
    }
    SUBCASE("unknown label is a scene modeling failure") {
        RunConfig cfg = base_config("label");
        cfg.program_path = program_file("label", "t = detect_object(scene, \"piano\")\n");
        CHECK(run_pipeline(cfg).exit_code == 1);
        CHECK(report(cfg)["failure"]["statement"] == 0);
    }
    SUBCASE("no matching asset is an editing module failure") {
        RunConfig cfg = base_config("nomatch");
        cfg.program_path = program_file("nomatch", "a = 1\nz = retrieve_asset(scene, \"zebra\")\n");
        const RunResult r = run_pipeline(cfg);
        CHECK(r.exit_code == 2);
        CHECK(r.failure->kind == ErrorKind::NoMatch);
        CHECK(report(cfg)["failure"]["statement"] == 1);
    }
    SUBCASE("unknown builtin in a program file is a code generation failure") {
        RunConfig cfg = base_config("unknown");
        cfg.program_path = program_file("unknown", "teleport_object(scene)\n");
        const RunResult r = run_pipeline(cfg);
        CHECK(r.exit_code == 4);
        CHECK(report(cfg)["failure"]["category"] == "code_generation");
    }
    SUBCASE("syntax error is a code generation failure") {
        RunConfig cfg = base_config("syntax");
        cfg.program_path = program_file("syntax", "obj = = 3\n");
        CHECK(run_pipeline(cfg).exit_code == 4);
    }
    SUBCASE("instruction outside the offline corpus") {
        RunConfig cfg = base_config("moon");
        cfg.instruction = "Paint the moon.";
        CHECK(run_pipeline(cfg).exit_code == 4);
    }
    SUBCASE("melting is recorded but not rendered") {
        RunConfig cfg = base_config("melt");
        cfg.instruction = "Melt the vase.";
        const RunResult r = run_pipeline(cfg);
        CHECK(r.exit_code == 0);
        CHECK(r.unsupported == std::vector<std::string>{"make_melting"});
        const auto j = report(cfg);
        CHECK(j["warnings"].dump().find("unsupported_function") != std::string::npos);
        CHECK(parse_timeline(read_text_file((fs::path(cfg.out_dir) / "timeline.txt").string())).events.size() == 1);

        RunConfig strict = base_config("melt_strict");
        strict.instruction = "Melt the vase.";
        strict.strict_unsupported = true;
        CHECK(run_pipeline(strict).exit_code == 3);
        CHECK(report(strict)["failure"]["category"] == "unsupported_function");
    }
    SUBCASE("invalid configuration") {
        RunConfig cfg = base_config("config");
        cfg.frames = 0;
        cfg.instruction = "Drop 5 basketballs on the table.";
        CHECK(run_pipeline(cfg).exit_code == 64);
    }
}

TEST_CASE("pipeline: removal and orbit runs") {
    RunConfig cfg = base_config("remove");
    cfg.instruction = "Remove the vase.";
    cfg.frames = 3;
    REQUIRE(run_pipeline(cfg).exit_code == 0);
    const SceneBundle b = load_scene_bundle(bundle_dir());
    const Rgb8Image out = read_png_rgb8((fs::path(cfg.out_dir) / "frames" / "0000.png").string());
    // Vase pixels (mask label 2) change, pixels far from it keep their codes.
    size_t vase_changed = 0, vase = 0, other_changed = 0;
    for (int y = 0; y < out.height(); ++y)
        for (int x = 0; x < out.width(); ++x) {
            const bool changed = !(out(x, y) == b.frames[0](x, y));
            if (b.masks[0](x, y) == 2) {
                ++vase;
                vase_changed += changed;
            } else if (b.masks[0](x, y) == 1) {
                other_changed += changed;
            }
        }
    REQUIRE(vase > 0);
    CHECK(vase_changed > vase / 2);
    CHECK(other_changed == 0);

    RunConfig orbit = base_config("orbit");
    orbit.instruction = "Put a basketball on the table.";
    orbit.camera = CameraTrack::orbit;
    orbit.frames = 2;
    CHECK(run_pipeline(orbit).exit_code == 0);
    CHECK(report(orbit)["camera"] == "orbit");
}

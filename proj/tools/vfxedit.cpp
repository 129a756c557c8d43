#include "vfx/pipeline/pipeline.hpp"
#include "vfx/render/raytracer.hpp"

#include <CLI11.hpp>

#include <cstdio>

int main(int argc, char** argv) {
    vfx::RunConfig cfg;
    std::string instruction, program, catalog, llm_config, camera = "original";
    int spp = vfx::kDefaultSpp;

    CLI::App app{"Edit a reconstructed scene from a text instruction and render the edited video."};
    app.add_option("--bundle", cfg.bundle_path, "Scene bundle directory")->required();
    auto* instr = app.add_option("--instruction", instruction, "Editing instruction in plain language");
    auto* prog = app.add_option("--program", program, "Editing program file (skips generation)");
    instr->excludes(prog);
    app.add_option("--out", cfg.out_dir, "Output directory")->capture_default_str();
    app.add_option("--seed", cfg.seed, "Seed for every random choice")->capture_default_str();
    app.add_option("--frames", cfg.frames, "Frames to render")->capture_default_str();
    app.add_option("--fps", cfg.fps, "Frame rate")->capture_default_str();
    app.add_option("--spp", spp, "Samples per pixel (default 64; effect frames use 8x)");
    app.add_option("--supersample", cfg.supersample, "Render scale before downsampling")->capture_default_str();
    app.add_flag("--offline", cfg.offline, "Answer instructions from the built-in canned programs");
    app.add_option("--camera", camera, "Camera track")->check(CLI::IsMember({"original", "orbit"}))->capture_default_str();
    app.add_option("--catalog", catalog, "Asset catalog directory (default <bundle>/catalog)");
    app.add_option("--llm-config", llm_config, "Endpoint config JSON for program generation");
    app.add_flag("--strict", cfg.strict_unsupported, "Fail when the program asks for effects that are not rendered");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 64;
    }
    if (!instruction.empty()) cfg.instruction = instruction;
    if (!program.empty()) cfg.program_path = program;
    if (app.count("--spp")) cfg.spp = spp;
    if (!catalog.empty()) cfg.catalog_path = catalog;
    if (!llm_config.empty()) cfg.llm_config = llm_config;
    cfg.camera = camera == "orbit" ? vfx::CameraTrack::orbit : vfx::CameraTrack::original;

    const vfx::RunResult r = vfx::run_pipeline(cfg);
    for (const auto& w : r.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    if (r.failure) {
        std::fprintf(stderr, "%s failure (%s): %s\n", std::string(vfx::to_string(r.failure->category)).c_str(),
                     std::string(vfx::to_string(r.failure->kind)).c_str(), r.failure->detail.c_str());
        return r.exit_code;
    }
    std::printf("wrote %d frames to %s/frames; %zu objects inserted\n", r.frames_written, cfg.out_dir.c_str(),
                r.inserted_objects.size());
    return 0;
}

#include "vfx/llm/prompt.hpp"

#include "vfx/core/text.hpp"
#include "vfx/dsl/builtins.hpp"
#include "vfx/dsl/validate.hpp"

#include <filesystem>

namespace vfx {

namespace {

constexpr std::string_view kPreamble = R"(You write short programs in a small editing language that changes a reconstructed 3D scene.
Rules:
- One statement per line: `name = expression`, a call, or `for i in A..B { ... }` (B exclusive, at most 64 iterations).
- Values: numbers, "strings", true/false, vectors [x, y, z] in meters with z up, lists of vectors, objects and materials.
- Arithmetic: + - * / on numbers and vectors, vector * number. Object fields: .position .center .bottom .size .scale .name; vector fields: .x .y .z.
- `scene` is predefined. Objects from retrieve_asset or make_copy appear only after insert_object.
- translate_object moves by an offset; retrieved assets start with their base at the origin, so translating by a point puts them on that point.
- Use only the functions listed below. Reply with a single fenced code block and nothing else.)";

constexpr std::string_view kUserTemplate = "Write the program for this instruction:\n{PROMPT}";

const std::vector<ExamplePair>& shipped_examples() {
    static const std::vector<ExamplePair> examples = {
        {"Put a basketball on the table.",
         R"(table = detect_object(scene, "table")
ball = retrieve_asset(scene, "basketball")
translate_object(ball, sample_point_on_object(scene, table))
insert_object(scene, ball))"},
        {"Place three cardboard boxes on the table, each turned a different way.",
         R"(table = detect_object(scene, "table")
for i in 0..3 {
    box = retrieve_asset(scene, "cardboard box")
    rotate_object(box, get_random_2D_rotation())
    translate_object(box, sample_point_on_object(scene, table))
    insert_object(scene, box)
})"},
        {"Put a basketball on the floor half a meter to the left of the vase.",
         R"(vase = detect_object(scene, "vase")
ball = retrieve_asset(scene, "basketball")
left = get_direction(scene, "left")
translate_object(ball, get_object_bottom_position(vase) + [left.x, left.y, 0] * 0.5)
insert_object(scene, ball))"},
        {"Drop a basketball onto the table from one meter up.",
         R"(table = detect_object(scene, "table")
ball = retrieve_asset(scene, "basketball")
translate_object(ball, sample_point_above_object(scene, table, 1.0))
allow_physics(ball)
insert_object(scene, ball))"},
        {"Shatter the vase.",
         R"(vase = detect_object(scene, "vase")
make_break(vase))"},
        {"Drop a cardboard box on the table and let it break if it lands hard.",
         R"(table = detect_object(scene, "table")
box = retrieve_asset(scene, "cardboard box")
translate_object(box, sample_point_above_object(scene, table, 1.5))
allow_physics(box)
allow_fracture(box)
insert_object(scene, box))"},
        {"Make the table look like marble.",
         R"(table = detect_object(scene, "table")
apply_material(table, retrieve_material(scene, "marble")))"},
        {"Add a shiny red metal basketball next to the table.",
         R"(table = detect_object(scene, "table")
ball = retrieve_asset(scene, "basketball")
apply_material(ball, init_material(1.0, 0.8, 0.2, [1.0, 0.1, 0.1]))
translate_object(ball, get_object_bottom_position(table) + [0, -0.8, 0])
insert_object(scene, ball))"},
        {"Drive a toy car in a loop around the vase.",
         R"(vase = detect_object(scene, "vase")
v = get_object_bottom_position(vase)
car = retrieve_asset(scene, "toy car")
insert_object(scene, car)
set_moving_animation(car, [v + [0.5, 0, 0], v + [0, 0.5, 0], v + [-0.5, 0, 0], v + [0, -0.5, 0], v + [0.5, 0, 0]]))"},
        {"Remove the vase.",
         R"(vase = detect_object(scene, "vase")
remove_object(scene, vase))"},
    };
    return examples;
}

std::string fenced(std::string_view program) { return "```\n" + std::string(program) + "\n```"; }

std::string render_messages(const std::vector<ChatMessage>& messages) {
    std::string out;
    for (const auto& m : messages) {
        out += "[" + m.role + "]\n" + m.content + "\n";
        if (!m.image_png.empty()) out += "(image, " + std::to_string(m.image_png.size()) + " bytes)\n";
    }
    return out;
}

}  // namespace

PromptBundle default_prompt_bundle() {
    PromptBundle b;
    b.preamble = std::string(kPreamble);
    b.builtin_docs = dsl::builtin_reference();
    b.examples = shipped_examples();
    b.user_template = std::string(kUserTemplate);
    return b;
}

BuiltPrompt build_prompt(const PromptBundle& bundle, std::string_view instruction) {
    BuiltPrompt out;
    std::string system = bundle.preamble + "\n\nFunctions:\n" + bundle.builtin_docs + "\nExamples:\n";
    for (const auto& ex : bundle.examples) system += "\nInstruction: " + ex.instruction + "\n" + fenced(ex.program) + "\n";

    std::string user = bundle.user_template;
    const auto slot = user.find("{PROMPT}");
    if (slot == std::string::npos) {
        out.warnings.push_back("template has no {PROMPT} slot; instruction appended");
        user += "\n" + std::string(instruction);
    } else {
        user.replace(slot, 8, instruction);
    }
    if (trim(instruction).empty()) out.warnings.push_back("instruction is empty");

    out.messages = {{"system", std::move(system), {}}, {"user", std::move(user), {}}};
    for (const auto& m : out.messages) out.rendered_length += m.content.size();
    return out;
}

std::string extract_code_block(std::string_view response) {
    if (const auto open = response.find("```"); open != std::string_view::npos) {
        auto start = response.find('\n', open);
        start = start == std::string_view::npos ? response.size() : start + 1;
        auto close = response.find("```", start);
        if (close == std::string_view::npos) close = response.size();
        std::string body(response.substr(start, close - start));
        if (!body.empty() && body.back() == '\n') body.pop_back();
        return body;
    }
    for (size_t pos = 0; pos < response.size();) {
        const std::string_view tail = response.substr(pos);
        try {
            if (!dsl::parse_program(tail).statements.empty()) return trim(tail);
        } catch (const Error&) {
        }
        const auto nl = response.find('\n', pos);
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }
    throw Error(ErrorKind::NoProgramFound, "the reply contains no fenced block and no parseable program");
}

ExhaustedAttempts::ExhaustedAttempts(std::vector<std::string> transcripts, const std::string& last_problem)
    : Error(ErrorKind::ExhaustedAttempts,
            "no valid program after " + std::to_string(transcripts.size()) + " attempts; last: " + last_problem),
      transcripts_(std::move(transcripts)) {}

GenerationResult generate_with_repair(ChatEndpoint& endpoint, const PromptBundle& bundle,
                                      std::string_view instruction, const GenerationOptions& options) {
    if (options.max_attempts < 1) throw Error(ErrorKind::ConfigError, "max_attempts must be at least 1");
    if (options.transcript_dir) std::filesystem::create_directories(*options.transcript_dir);

    ChatRequest request;
    request.model = options.model;
    request.temperature = options.temperature;
    request.messages = build_prompt(bundle, instruction).messages;

    GenerationResult result;
    std::string problem;
    for (int attempt = 1; attempt <= options.max_attempts; ++attempt) {
        const ChatResponse reply = endpoint.complete(request);
        std::string source;
        problem.clear();
        try {
            source = extract_code_block(reply.text);
            dsl::Program program = dsl::parse_program(source);
            const auto diagnostics = dsl::validate_program(program, options.max_loop);
            if (diagnostics.empty()) {
                result.program = std::move(program);
                result.source = source;
            } else {
                problem = dsl::format_diagnostics(diagnostics);
            }
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NoProgramFound && e.kind() != ErrorKind::SyntaxError) throw;
            problem = std::string(e.what()) + "\n";
        }

        std::string transcript = "attempt " + std::to_string(attempt) + "\n== request ==\n" +
                                 render_messages(request.messages) + "== response (" + reply.finish_reason +
                                 ") ==\n" + reply.text + "\n== result ==\n" + (problem.empty() ? "ok\n" : problem);
        if (options.transcript_dir)
            write_text_file((std::filesystem::path(*options.transcript_dir) /
                             ("attempt_" + std::to_string(attempt) + ".txt"))
                                .string(),
                            transcript);
        result.transcripts.push_back(std::move(transcript));
        result.attempts = attempt;
        if (problem.empty()) return result;

        request.messages.push_back({"assistant", reply.text, {}});
        request.messages.push_back({"user",
                                    "That program cannot run:\n" + problem +
                                        "Reply with the corrected program in a single fenced code block.",
                                    {}});
    }
    throw ExhaustedAttempts(std::move(result.transcripts), trim(problem));
}

}  // namespace vfx

namespace vfx {

const std::map<std::string, std::string>& offline_corpus() {
    static const std::map<std::string, std::string> corpus = [] {
        std::map<std::string, std::string> c;
        const auto add = [&](const std::string& instruction, std::string_view program) {
            c[instruction] = "Here is the program.\n" + fenced(program) + "\n";
        };
        for (const auto& ex : shipped_examples()) add(ex.instruction, ex.program);
        add("Drop 5 basketballs on the table.", R"(table = detect_object(scene, "table")
for i in 0..5 {
    ball = retrieve_asset(scene, "basketball")
    translate_object(ball, sample_point_above_object(scene, table))
    allow_physics(ball)
    insert_object(scene, ball)
})");
        add("Set the table on fire.", R"(table = detect_object(scene, "table")
add_fire(scene, table))");
        add("Make smoke rise from the vase.", R"(vase = detect_object(scene, "vase")
add_smoke(scene, vase))");
        add("Melt the vase.", R"(vase = detect_object(scene, "vase")
make_melting(scene, vase))");
        add("Park a car in front of the camera.", R"(car = retrieve_chatsim_asset(scene, "car")
front = get_direction(scene, "front")
translate_object(car, get_vehicle_position(scene) + [front.x, front.y, 0] * 6)
insert_object(scene, car))");
        return c;
    }();
    return corpus;
}

std::string offline_stub(std::string_view instruction) {
    const auto& corpus = offline_corpus();
    const auto it = corpus.find(std::string(instruction));
    if (it == corpus.end())
        throw Error(ErrorKind::UnknownInstruction, "no offline program for \"" + std::string(instruction) + "\"");
    return it->second;
}

ChatResponse OfflineEndpoint::complete(const ChatRequest& request) {
    ++requests_;
    for (const auto& m : request.messages) {
        if (m.role != "user") continue;
        for (const auto& [instruction, reply] : offline_corpus())
            if (m.content.size() >= instruction.size() &&
                m.content.compare(m.content.size() - instruction.size(), instruction.size(), instruction) == 0)
                return {reply, "stop"};
        // Only the first user message carries the instruction.
        const auto nl = m.content.rfind('\n');
        return {offline_stub(nl == std::string::npos ? m.content : m.content.substr(nl + 1)), "stop"};
    }
    throw Error(ErrorKind::UnknownInstruction, "request has no user message");
}

}  // namespace vfx

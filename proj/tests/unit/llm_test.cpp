#include <doctest.h>

#include "vfx/core/error.hpp"
#include "vfx/core/text.hpp"
#include "vfx/demo/catalog.hpp"
#include "vfx/demo/synthetic.hpp"
#include "vfx/dsl/interpreter.hpp"
#include "vfx/dsl/validate.hpp"
#include "vfx/llm/prompt.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <memory>
#include <thread>

using namespace vfx;
namespace fs = std::filesystem;

namespace {

size_t count(std::string_view text, std::string_view needle) {
    size_t n = 0;
    for (auto p = text.find(needle); p != std::string_view::npos; p = text.find(needle, p + needle.size())) ++n;
    return n;
}

const std::string kValid = "```\nb = retrieve_asset(scene, \"basketball\")\ninsert_object(scene, b)\n```";
const std::string kInvalid = "```\nteleport_object(scene)\n```";

std::shared_ptr<const SceneBundle> table_bundle() {
    static const auto bundle = std::make_shared<const SceneBundle>(demo::make_table_scene().bundle);
    return bundle;
}

void execute_on_test_bundle(const std::string& source) {
    SceneRepresentation rep(table_bundle());
    AssetCatalog catalog = demo::make_demo_catalog();
    dsl::ExecutionOptions opts;
    opts.catalog = &catalog;
    opts.frames = 24;
    opts.seed = 2;
    dsl::execute_program(dsl::parse_program(source), rep, opts);
}

}  // namespace

TEST_CASE("build_prompt fills the instruction slot") {
    const PromptBundle bundle = default_prompt_bundle();
    CHECK(bundle.examples.size() >= 8);
    const BuiltPrompt p = build_prompt(bundle, "Drop 5 basketballs on the table.");
    REQUIRE(p.messages.size() == 2);
    CHECK(p.messages[0].role == "system");
    CHECK(p.messages.back().role == "user");
    CHECK(p.messages.back().content.ends_with("Drop 5 basketballs on the table."));
    CHECK(p.warnings.empty());
    CHECK(p.rendered_length == p.messages[0].content.size() + p.messages[1].content.size());
    CHECK(p.messages[0].content.find("get_vehicle_position(scene: scene) -> vec3") != std::string::npos);

    const BuiltPrompt empty = build_prompt(bundle, "");
    CHECK(empty.messages.back().content == "Write the program for this instruction:\n");
    CHECK(empty.warnings.size() == 1);

    PromptBundle three = bundle;
    three.examples.resize(3);
    const BuiltPrompt p3 = build_prompt(three, "x");
    CHECK(count(p3.messages[0].content, "```\n") == 6);  // an opening and a closing fence per example
    CHECK(count(p3.messages[0].content, "Instruction: ") == 3);

    PromptBundle no_slot = bundle;
    no_slot.user_template = "Instruction follows.";
    const BuiltPrompt ns = build_prompt(no_slot, "Remove the vase.");
    CHECK(ns.messages.back().content.ends_with("Remove the vase."));
    CHECK(ns.warnings.size() == 1);
}

TEST_CASE("extract_code_block") {
    CHECK(extract_code_block("Sure:\n```dsl\nx = 1\ny = [1, 2, 3]\n```\nDone.") == "x = 1\ny = [1, 2, 3]");
    CHECK(extract_code_block("```\na = 1\n```\ntext\n```\nb = 2\n```") == "a = 1");
    CHECK(extract_code_block("```\nopen = 1\n") == "open = 1");
    CHECK(extract_code_block("Here is what I would do.\nb = retrieve_asset(scene, \"ball\")\ninsert_object(scene, b)\n") ==
          "b = retrieve_asset(scene, \"ball\")\ninsert_object(scene, b)");
    try {
        extract_code_block("I cannot help with that, sorry.");
        FAIL("expected NoProgramFound");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NoProgramFound);
    }
    CHECK_THROWS_AS(extract_code_block(""), Error);
}

TEST_CASE("generate_with_repair") {
    const PromptBundle bundle = default_prompt_bundle();
    SUBCASE("valid on the first try") {
        ScriptedEndpoint ep({kValid});
        const auto r = generate_with_repair(ep, bundle, "Put a basketball in the scene.");
        CHECK(r.attempts == 1);
        CHECK(ep.requests() == 1);
        CHECK(r.program.statements.size() == 2);
        CHECK(r.transcripts.size() == 1);
        CHECK(ep.seen()[0].temperature == 0.0);
    }
    SUBCASE("garbage then valid") {
        ScriptedEndpoint ep({"no idea", kValid});
        const auto r = generate_with_repair(ep, bundle, "Put a basketball in the scene.");
        CHECK(r.attempts == 2);
        REQUIRE(ep.seen().size() == 2);
        const auto& second = ep.seen()[1].messages;
        REQUIRE(second.size() == 4);
        CHECK(second[2].role == "assistant");
        CHECK(second[2].content == "no idea");
        CHECK(second[3].content.find("NoProgramFound") != std::string::npos);
    }
    SUBCASE("diagnostics are fed back") {
        ScriptedEndpoint ep({kInvalid, kValid});
        generate_with_repair(ep, bundle, "x");
        CHECK(ep.seen()[1].messages[3].content.find("unknown builtin 'teleport_object'") != std::string::npos);
    }
    SUBCASE("always invalid exhausts the attempts") {
        const fs::path dir = fs::temp_directory_path() / "vfx_llm_transcripts";
        fs::remove_all(dir);
        ScriptedEndpoint ep({kInvalid});
        GenerationOptions opts;
        opts.transcript_dir = dir.string();
        try {
            generate_with_repair(ep, bundle, "x", opts);
            FAIL("expected ExhaustedAttempts");
        } catch (const ExhaustedAttempts& e) {
            CHECK(e.kind() == ErrorKind::ExhaustedAttempts);
            CHECK(e.transcripts().size() == 3);
            CHECK(e.transcripts()[2].find("teleport_object") != std::string::npos);
        }
        CHECK(ep.requests() == 3);
        for (int i = 1; i <= 3; ++i) CHECK(fs::exists(dir / ("attempt_" + std::to_string(i) + ".txt")));
        CHECK(read_text_file((dir / "attempt_1.txt").string()).find("== response") != std::string::npos);
        fs::remove_all(dir);
    }
    SUBCASE("attempt count is configurable") {
        ScriptedEndpoint ep({kInvalid});
        GenerationOptions opts;
        opts.max_attempts = 1;
        CHECK_THROWS_AS(generate_with_repair(ep, bundle, "x", opts), ExhaustedAttempts);
        opts.max_attempts = 0;
        CHECK_THROWS_AS(generate_with_repair(ep, bundle, "x", opts), Error);
    }
}

TEST_CASE("offline stub corpus") {
    const std::string reply = offline_stub("Drop 5 basketballs on the table.");
    const auto program = dsl::parse_program(extract_code_block(reply));
    CHECK(program.statements.size() == 2);
    CHECK(program.statements[1].kind == dsl::StmtKind::loop);
    CHECK(program.statements[1].to - program.statements[1].from == 5);
    try {
        offline_stub("Paint the moon.");
        FAIL("expected UnknownInstruction");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UnknownInstruction);
    }
    for (const auto& [instruction, text] : offline_corpus()) {
        CAPTURE(instruction);
        const auto p = dsl::parse_program(extract_code_block(text));
        CHECK(dsl::validate_program(p).empty());
    }

    OfflineEndpoint ep;
    const auto r = generate_with_repair(ep, default_prompt_bundle(), "Set the table on fire.");
    CHECK(r.attempts == 1);
    CHECK(r.source == "table = detect_object(scene, \"table\")\nadd_fire(scene, table)");
    CHECK_THROWS_AS(generate_with_repair(ep, default_prompt_bundle(), "Paint the moon."), Error);
}

TEST_CASE("shipped examples and canned programs run on the test bundle") {
    for (const auto& ex : default_prompt_bundle().examples) {
        CAPTURE(ex.instruction);
        CHECK(dsl::validate_program(dsl::parse_program(ex.program)).empty());
        CHECK_NOTHROW(execute_on_test_bundle(ex.program));
    }
    for (const auto& [instruction, text] : offline_corpus()) {
        CAPTURE(instruction);
        CHECK_NOTHROW(execute_on_test_bundle(extract_code_block(text)));
    }
}

TEST_CASE("http endpoint speaks the chat-completion wire format") {
    httplib::Server server;
    nlohmann::json seen_body;
    std::string seen_auth;
    server.Post("/v1/chat", [&](const httplib::Request& req, httplib::Response& res) {
        seen_body = nlohmann::json::parse(req.body);
        seen_auth = req.get_header_value("Authorization");
        const nlohmann::json reply = {
            {"choices", {{{"message", {{"role", "assistant"}, {"content", kValid}}}, {"finish_reason", "stop"}}}}};
        res.set_content(reply.dump(), "application/json");
    });
    server.Post("/broken", [](const httplib::Request&, httplib::Response& res) { res.status = 500; });
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread thread([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    ::setenv("VFX_TEST_KEY", "secret-token", 1);
    EndpointConfig cfg;
    cfg.url = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat";
    cfg.model = "test-model";
    cfg.api_key_env = "VFX_TEST_KEY";
    HttpChatEndpoint ep(cfg);
    GenerationOptions gen;
    gen.model = "test-model";
    const auto r = generate_with_repair(ep, default_prompt_bundle(), "Put a basketball in the scene.", gen);
    CHECK(r.attempts == 1);
    CHECK(seen_auth == "Bearer secret-token");
    CHECK(seen_body["model"] == "test-model");
    CHECK(seen_body["temperature"] == 0.0);
    REQUIRE(seen_body["messages"].size() == 2);
    CHECK(seen_body["messages"][1]["role"] == "user");

    EndpointConfig broken = cfg;
    broken.url = "http://127.0.0.1:" + std::to_string(port) + "/broken";
    HttpChatEndpoint bad(broken);
    try {
        generate_with_repair(bad, default_prompt_bundle(), "x");
        FAIL("expected EndpointError");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::EndpointError);
    }
    EndpointConfig nokey = cfg;
    nokey.api_key_env = "VFX_TEST_KEY_UNSET";
    ::unsetenv("VFX_TEST_KEY_UNSET");
    HttpChatEndpoint unauth(nokey);
    try {
        unauth.complete({});
        FAIL("expected ConfigError");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ConfigError);
    }
    server.stop();
    thread.join();
}

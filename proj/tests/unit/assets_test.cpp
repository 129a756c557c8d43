#include <doctest.h>

#include "vfx/assets/catalog.hpp"
#include "vfx/core/error.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <functional>

using namespace vfx;

namespace {

AssetRecord asset(const std::string& id, const std::string& name, const std::string& description = "",
                  std::vector<std::string> tags = {}) {
    AssetRecord a;
    a.asset_id = id;
    a.name = name;
    a.description = description;
    a.tags = std::move(tags);
    a.mesh = make_box(Vec3(-1, -2, 0), Vec3(1, 2, 3));
    return a;
}

MaterialRecord material(const std::string& id, const std::string& name) {
    MaterialRecord m;
    m.material_id = id;
    m.name = name;
    return m;
}

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::RuntimeFault;
}

}  // namespace

TEST_CASE("tokenize lowercases and deduplicates") {
    CHECK(tokenize("Red  sports-car, red!") == std::vector<std::string>{"car", "red", "sports"});
    CHECK(tokenize("  ").empty());
}

TEST_CASE("asset retrieval") {
    AssetCatalog cat;
    cat.assets = {asset("b01", "basketball", "orange ball"), asset("c01", "sports car", "fast vehicle", {"driving"}),
                  asset("s01", "sofa", "living room couch")};
    CHECK(retrieve_asset(cat, "basketball").asset_id == "b01");
    CHECK(retrieve_asset(cat, "red sports car").asset_id == "c01");
    CHECK(kind_of([&] { retrieve_asset(cat, "xyzzy"); }) == ErrorKind::NoMatch);
    CHECK(kind_of([&] { retrieve_asset(AssetCatalog{}, "sofa"); }) == ErrorKind::NoMatch);
    CHECK(cat.driving_subset().assets.size() == 1);

    SUBCASE("ties break by id") {
        cat.assets.push_back(asset("a00", "basketball", "orange ball"));
        CHECK(retrieve_asset(cat, "basketball").asset_id == "a00");
    }
}

TEST_CASE("material retrieval") {
    AssetCatalog cat;
    cat.materials = {material("m2", "stone wall"), material("m1", "pebble"), material("m3", "rosewood")};
    CHECK(retrieve_material(cat, "rosewood").material_id == "m3");
    // Both cover half the query; "pebble" has no unmatched tokens.
    CHECK(lexical_score(tokenize("pebble stone"), tokenize("pebble")).coverage == 0.5);
    CHECK(lexical_score(tokenize("pebble stone"), tokenize("stone wall")).coverage == 0.5);
    CHECK(retrieve_material(cat, "pebble stone").material_id == "m1");
    CHECK(kind_of([&] { retrieve_material(AssetCatalog{}, "rosewood"); }) == ErrorKind::NoMatch);
}

TEST_CASE("scale reply parser over a hand-built corpus") {
    struct Case {
        const char* reply;
        Vec3 expect;
    };
    const Case cases[] = {
        {"0.7 x 0.4 x 1.1 meters", {0.7, 0.4, 1.1}},
        {"Approximately 0.24m x 0.24m x 0.24m.", {0.24, 0.24, 0.24}},
        {"Width: 70 cm, depth: 40 cm, height: 110 cm", {0.7, 0.4, 1.1}},
        {"70 x 40 x 110 cm", {0.7, 0.4, 1.1}},
        {"(1.8, 0.9, 0.75)", {1.8, 0.9, 0.75}},
        {"The 3D model looks like a chair: 0.5 m wide, 0.55 m deep and 0.9 m tall.", {0.5, 0.55, 0.9}},
        {"450mm x 450mm x 800mm", {0.45, 0.45, 0.8}},
        {"2 ft x 1 ft x 3 ft", {0.6096, 0.3048, 0.9144}},
        {"W x D x H: 4.5 x 1.8 x 1.5 meters", {4.5, 1.8, 1.5}},
        {".5 x .25 x 1", {0.5, 0.25, 1.0}},
    };
    for (const Case& c : cases) {
        CAPTURE(c.reply);
        const Vec3 got = parse_scale_reply(c.reply);
        CHECK((got - c.expect).norm() < 1e-12);
    }
    try {
        parse_scale_reply("I cannot tell from this picture.");
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UnparseableReply);
        CHECK(std::string(e.what()).find("I cannot tell") != std::string::npos);
    }
    CHECK(kind_of([] { parse_scale_reply("0 x 1 x 2 m"); }) == ErrorKind::UnparseableReply);
}

TEST_CASE("real scale estimation") {
    AssetRecord ball = asset("b01", "basketball");
    SUBCASE("offline uses metadata") {
        ball.real_size = Vec3(0.24, 0.24, 0.24);
        CHECK(estimate_real_scale(ball, {}) == Vec3(0.24, 0.24, 0.24));
    }
    SUBCASE("offline without metadata") {
        CHECK(kind_of([&] { estimate_real_scale(ball, {}); }) == ErrorKind::MissingMetadata);
    }
    SUBCASE("external asks once and caches") {
        ScriptedEndpoint stub({"It is about 0.7 x 0.4 x 1.1 meters."});
        ScaleEstimator est{ScaleSource::external, &stub, "vision"};
        CHECK(estimate_real_scale(ball, est) == Vec3(0.7, 0.4, 1.1));
        CHECK(estimate_real_scale(ball, est) == Vec3(0.7, 0.4, 1.1));
        CHECK(stub.requests() == 1);
        const ChatRequest& req = stub.seen().at(0);
        CHECK(req.model == "vision");
        CHECK(req.messages.back().content.find("basketball") != std::string::npos);
        REQUIRE(req.messages.back().image_png.size() > 8);
        CHECK(req.messages.back().image_png.substr(1, 3) == "PNG");
    }
    SUBCASE("external with an unparseable reply") {
        ScriptedEndpoint stub({"no idea"});
        CHECK(kind_of([&] { estimate_real_scale(ball, {ScaleSource::external, &stub, "v"}); }) == ErrorKind::UnparseableReply);
        CHECK_FALSE(ball.estimated_size);
    }
}

TEST_CASE("inserted asset extents equal the real size") {
    AssetRecord a = asset("t01", "table");
    a.mesh = make_icosphere(0.7, 1);
    const Vec3 size(1.2, 0.8, 0.75);
    const SceneObject o = make_asset_object(a, size, "table_0");
    const Aabb box = o.mesh.bounds();
    for (int k = 0; k < 3; ++k) CHECK(std::abs(box.extent()[k] - size[k]) <= 1e-6 * size[k]);
    CHECK(std::abs(box.lo.z()) < 1e-12);
    CHECK(std::abs(box.center().x()) < 1e-12);
    CHECK(o.source == ObjectSource::asset);
    CHECK_FALSE(o.inserted);
}

TEST_CASE("material application") {
    SceneObject obj;
    MaterialSpec chrome;
    chrome.metallic = 1.0;
    chrome.roughness = 0.0;
    CHECK(apply_material(obj, chrome).empty());
    CHECK(obj.material->metallic == 1.0);
    CHECK(obj.material->roughness == 0.0);

    MaterialSpec hot = chrome;
    hot.metallic = 1.7;
    const auto warnings = apply_material(obj, hot);
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("metallic") != std::string::npos);
    CHECK(obj.material->metallic == 1.0);

    MaterialRecord wood = material("rosewood", "rosewood");
    wood.mean_albedo = Vec3(0.4, 0.2, 0.1);
    apply_material(obj, wood);
    MaterialSpec tint;
    tint.color_tint = Vec3(1.0, 0.5, 0.5);
    apply_material(obj, tint);
    CHECK(obj.material->texture_set == std::optional<std::string>("rosewood"));
    CHECK(*obj.material->texture_albedo == Vec3(0.4, 0.2, 0.1));
    CHECK(obj.material->color_tint == Vec3(1.0, 0.5, 0.5));
}

TEST_CASE("catalog save and load") {
    const auto root = std::filesystem::temp_directory_path() / "vfx_catalog_test";
    std::filesystem::remove_all(root);
    AssetRecord a = asset("ball", "basketball", "orange ball", {"sports"});
    a.real_size = Vec3(0.24, 0.24, 0.24);
    Similarity spin;
    spin.rotation = yaw_rotation(0.5);
    a.animation = {Similarity{}, spin};
    save_asset(root.string(), a);
    save_material(root.string(), material("wood", "oak wood"), Rgb8Image(4, 4, Rgb8{188, 188, 188}));
    const AssetCatalog cat = load_catalog(root.string());
    REQUIRE(cat.assets.size() == 1);
    CHECK(cat.assets[0].name == "basketball");
    CHECK(cat.assets[0].tags == std::vector<std::string>{"sports"});
    CHECK(*cat.assets[0].real_size == Vec3(0.24, 0.24, 0.24));
    CHECK(cat.assets[0].mesh.face_count() == a.mesh.face_count());
    REQUIRE(cat.assets[0].animation.size() == 2);
    CHECK(std::abs(cat.assets[0].animation[1].rotation.angularDistance(spin.rotation)) < 1e-8);
    REQUIRE(cat.materials.size() == 1);
    CHECK(std::abs(cat.materials[0].mean_albedo.x() - decode_srgb(Rgb8{188, 188, 188}).x()) < 1e-12);

    std::filesystem::remove(root / "assets" / "ball" / "mesh.obj");
    CHECK(kind_of([&] { load_catalog(root.string()); }) == ErrorKind::MissingFile);
    std::filesystem::remove_all(root);
    CHECK(kind_of([&] { load_catalog(root.string()); }) == ErrorKind::MissingFile);
}

TEST_CASE("chat wire format") {
    ChatRequest req{"m", {{"user", "hello", ""}, {"user", "look", std::string("\x89PNG", 4)}}, 0.0};
    const auto j = chat_request_json(req);
    CHECK(j["model"] == "m");
    CHECK(j["temperature"] == 0.0);
    CHECK(j["messages"][0]["content"] == "hello");
    CHECK(j["messages"][1]["content"][1]["image_url"]["url"].get<std::string>().rfind("data:image/png;base64,", 0) == 0);
    const auto r = chat_response_from_json(nlohmann::json::parse(R"({"choices":[{"message":{"content":"hi"},"finish_reason":"stop"}]})"));
    CHECK(r.text == "hi");
    CHECK(r.finish_reason == "stop");
    CHECK(kind_of([] { chat_response_from_json(nlohmann::json::parse(R"({"error":"x"})")); }) == ErrorKind::EndpointError);
}

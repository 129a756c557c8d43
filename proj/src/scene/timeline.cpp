#include "vfx/scene/timeline.hpp"

#include "vfx/core/error.hpp"
#include "vfx/core/text.hpp"

#include <sstream>

namespace vfx {

std::string_view to_string(EffectKind k) {
    switch (k) {
        case EffectKind::fire: return "fire";
        case EffectKind::smoke: return "smoke";
        case EffectKind::melt: return "melt";
        case EffectKind::break_apart: return "break";
        case EffectKind::incinerate: return "incinerate";
    }
    return "fire";
}

std::optional<EffectKind> effect_kind_from_string(std::string_view s) {
    const std::string l = to_lower(s);
    if (l == "fire") return EffectKind::fire;
    if (l == "smoke") return EffectKind::smoke;
    if (l == "melt") return EffectKind::melt;
    if (l == "break") return EffectKind::break_apart;
    if (l == "incinerate") return EffectKind::incinerate;
    return std::nullopt;
}

std::map<std::string, std::vector<double>> default_effect_params(EffectKind kind) {
    // Smoke domain settings are shared by both particle effects.
    std::map<std::string, std::vector<double>> p = {
        {"domain_resolution", {128}},
        {"adaptive_margin", {4}},
        {"adaptive_threshold", {0.005}},
        {"dissolve_speed", {30}},
    };
    switch (kind) {
        case EffectKind::smoke:
            p["smoke_color"] = {0.1, 0.1, 0.1, 1.0};
            p["smoke_density"] = {70};
            break;
        case EffectKind::fire:
            p["smoke_density"] = {50};
            p["temperature"] = {1500};
            p["blackbody_tint"] = {1.0, 0.3886, 0.0094, 1.0};
            p["blackbody_intensity"] = {5};
            break;
        default:
            p.clear();
            break;
    }
    return p;
}

bool Timeline::any_active(EffectKind kind, int frame) const {
    for (const EffectEvent& e : events)
        if (e.kind == kind && e.active_at(frame)) return true;
    return false;
}

void validate_timeline(const Timeline& tl) {
    if (tl.frame_count < 1) throw Error(ErrorKind::InvariantViolation, "timeline frame_count < 1");
    for (const auto& [id, track] : tl.tracks)
        if (static_cast<int>(track.size()) != tl.frame_count)
            throw Error(ErrorKind::InvariantViolation, "track '" + id + "' has " +
                                                           std::to_string(track.size()) + " frames");
    for (const EffectEvent& e : tl.events)
        if (e.start_frame < 0 || e.start_frame > e.end_frame || e.end_frame >= tl.frame_count)
            throw Error(ErrorKind::InvariantViolation,
                        "event " + std::string(to_string(e.kind)) + " on '" + e.object_id +
                            "' has invalid frame range");
}

std::string serialize_timeline(const Timeline& tl) {
    std::ostringstream out;
    out << "timeline fps=" << fmt_num(tl.fps) << " frames=" << tl.frame_count << "\n";
    for (int f = 0; f < tl.frame_count; ++f)
        for (const auto& [id, track] : tl.tracks) {
            const TrackSample& s = track[f];
            const Mat4 m = s.transform.matrix();
            out << f << " " << id;
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c) out << " " << fmt_num(m(r, c));
            out << " " << (s.visible ? 1 : 0) << "\n";
        }
    for (const EffectEvent& e : tl.events) {
        out << "event " << to_string(e.kind) << " " << e.object_id << " " << e.start_frame << " "
            << e.end_frame;
        for (const auto& [key, values] : e.params) {
            out << " " << key << "=";
            for (size_t i = 0; i < values.size(); ++i) out << (i ? "," : "") << fmt_num(values[i]);
        }
        out << "\n";
    }
    return out.str();
}

Timeline parse_timeline(std::string_view text) {
    Timeline tl;
    tl.tracks.clear();
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    const auto bad = [&](const std::string& msg) {
        throw Error(ErrorKind::MalformedRecord, "timeline line " + std::to_string(line_no) + ": " + msg);
    };
    try {
        while (std::getline(in, line)) {
            ++line_no;
            const auto tok = split_ws(line);
            if (tok.empty()) continue;
            if (tok[0] == "timeline") {
                for (size_t i = 1; i < tok.size(); ++i) {
                    if (tok[i].rfind("fps=", 0) == 0) tl.fps = std::stod(tok[i].substr(4));
                    if (tok[i].rfind("frames=", 0) == 0) tl.frame_count = std::stoi(tok[i].substr(7));
                }
            } else if (tok[0] == "event") {
                if (tok.size() < 5) bad("event row needs kind, object, start, end");
                EffectEvent e;
                auto kind = effect_kind_from_string(tok[1]);
                if (!kind) bad("unknown event kind '" + tok[1] + "'");
                e.kind = *kind;
                e.object_id = tok[2];
                e.start_frame = std::stoi(tok[3]);
                e.end_frame = std::stoi(tok[4]);
                for (size_t i = 5; i < tok.size(); ++i) {
                    const auto eq = tok[i].find('=');
                    if (eq == std::string::npos) bad("expected key=value");
                    std::vector<double> values;
                    std::stringstream vs(tok[i].substr(eq + 1));
                    std::string item;
                    while (std::getline(vs, item, ',')) values.push_back(std::stod(item));
                    e.params[tok[i].substr(0, eq)] = values;
                }
                tl.events.push_back(std::move(e));
            } else {
                if (tok.size() != 19) bad("transform row needs 19 fields");
                const int frame = std::stoi(tok[0]);
                Mat4 m;
                for (int k = 0; k < 16; ++k) m(k / 4, k % 4) = std::stod(tok[2 + k]);
                auto& track = tl.tracks[tok[1]];
                if (static_cast<int>(track.size()) != frame) bad("frames out of order");
                track.push_back({Similarity::from_matrix(m), tok[18] == "1"});
            }
        }
    } catch (const std::invalid_argument&) {
        bad("not a number");
    } catch (const std::out_of_range&) {
        bad("number out of range");
    }
    validate_timeline(tl);
    return tl;
}

}  // namespace vfx

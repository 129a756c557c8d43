#pragma once

#include "vfx/core/math.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vfx {

enum class EffectKind { fire, smoke, melt, break_apart, incinerate };

std::string_view to_string(EffectKind k);
std::optional<EffectKind> effect_kind_from_string(std::string_view s);

/// Timeline annotation; parameters are recorded, not simulated volumetrically.
struct EffectEvent {
    std::string object_id;
    EffectKind kind = EffectKind::fire;
    int start_frame = 0;
    int end_frame = 0;
    std::map<std::string, std::vector<double>> params;

    bool active_at(int frame) const { return frame >= start_frame && frame <= end_frame; }
};

/// Parameter defaults for fire and smoke events.
std::map<std::string, std::vector<double>> default_effect_params(EffectKind kind);

struct TrackSample {
    Similarity transform;
    bool visible = true;

    friend bool operator==(const TrackSample&, const TrackSample&) = default;
};

/// Per-object per-frame world transforms plus effect events.
struct Timeline {
    double fps = 24.0;
    int frame_count = 1;
    std::map<std::string, std::vector<TrackSample>> tracks;  // each of size frame_count
    std::vector<EffectEvent> events;

    bool has_track(const std::string& id) const { return tracks.count(id) > 0; }
    bool any_active(EffectKind kind, int frame) const;
};

/// Throws InvariantViolation when tracks or events do not fit frame_count.
void validate_timeline(const Timeline& tl);

/// Text table: one row per (frame, object): `frame object_id m00 .. m33 visible`;
/// then event rows `event kind object_id start end key=v[,v...]`.
std::string serialize_timeline(const Timeline& tl);
Timeline parse_timeline(std::string_view text);

}  // namespace vfx

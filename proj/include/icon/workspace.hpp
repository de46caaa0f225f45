#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "icon/artifacts.hpp"
#include "icon/json_codec.hpp"
#include "icon/notebook.hpp"

namespace icon {

enum class Mode { Unified, Separated };
enum class Space { Notebook, Artifact };
enum class Hand { Left, Right };

/// Max distance between a dropped artifact and a cell for the drop to count as a put-in.
inline constexpr double kSnapRadius = 0.3;
/// Separated mode: where an entered cell's artifact appears, in front of the user.
inline constexpr double kSpawnDistance = 1.0;
/// Separated mode: the way back sits this far behind the spawn point.
inline constexpr double kPortalBehindSpawn = 1.5;
inline constexpr std::int64_t kDefaultDwellMs = 500;

/// What a hand holds: a whole artifact, or one column of a table artifact.
struct HeldItem {
    ArtifactId artifact;
    std::optional<std::string> column;
    friend bool operator==(const HeldItem&, const HeldItem&) = default;
};

struct Link {
    std::string cell_id;
    ArtifactId artifact_id;
    friend bool operator==(const Link&, const Link&) = default;
};

struct Answer {
    std::string key;
    ojson value;
    friend bool operator==(const Answer&, const Answer&) = default;
};

struct WorkspaceState {
    Mode mode = Mode::Unified;
    /// Set only in Separated mode.
    std::optional<Space> active_space;
    Notebook notebook;
    std::map<ArtifactId, Artifact> artifacts;
    /// Separated mode: which space each artifact lives in. Empty in Unified mode.
    std::map<ArtifactId, Space> artifact_space;
    std::vector<Link> links;
    std::array<std::optional<HeldItem>, 2> held;
    /// "window:<id>", "artifact:<id>", "portal" or "desk".
    std::optional<std::string> focus;
    Pose user_pose;
    std::optional<Pose> portal_pose;
    /// Cells whose last run succeeded and which have not been edited since.
    std::set<std::string> executed_cells;
    std::vector<Answer> answers;
    std::int64_t last_t = 0;
    std::uint64_t next_artifact = 1;
    std::int64_t dwell_threshold_ms = kDefaultDwellMs;

    [[nodiscard]] bool cells_visible() const noexcept;
    [[nodiscard]] bool artifact_visible(const ArtifactId& id) const;
    [[nodiscard]] bool is_held(const ArtifactId& id) const noexcept;
    /// Throws UnknownArtifact.
    [[nodiscard]] const Artifact& artifact(std::string_view id) const;

    friend bool operator==(const WorkspaceState&, const WorkspaceState&) = default;
};

[[nodiscard]] WorkspaceState initial_workspace(Notebook nb, Mode mode, std::int64_t dwell_ms = kDefaultDwellMs);

/// Every broken invariant, described in one line each. Empty means consistent.
[[nodiscard]] std::vector<std::string> invariant_violations(const WorkspaceState& s);

[[nodiscard]] ojson artifact_to_json(const Artifact& a);
[[nodiscard]] Artifact artifact_from_json(const nlohmann::json& j);

/// Canonical serialization; also the input of the state hash.
[[nodiscard]] ojson workspace_to_json(const WorkspaceState& s);
/// Throws SchemaError, including when the decoded state breaks an invariant.
[[nodiscard]] WorkspaceState workspace_from_json(const nlohmann::json& j, const std::string& origin = "<workspace>");

[[nodiscard]] std::string_view to_string(Mode m) noexcept;
[[nodiscard]] std::string_view to_string(Space s) noexcept;
[[nodiscard]] std::string_view to_string(Hand h) noexcept;
[[nodiscard]] std::optional<Mode> mode_from_string(std::string_view s) noexcept;
[[nodiscard]] std::optional<Space> space_from_string(std::string_view s) noexcept;
[[nodiscard]] std::optional<Hand> hand_from_string(std::string_view s) noexcept;

[[nodiscard]] ojson held_item_to_json(const HeldItem& h);

}  // namespace icon

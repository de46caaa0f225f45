#pragma once

#include <array>

namespace icon {

/// Half-width of the walkable arena (a 5 m x 5 m floor).
inline constexpr double kArenaHalfExtent = 2.5;

/// Position in meters plus heading. Yaw 0 faces -z; positive yaw turns toward +x.
struct Pose {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double yaw = 0.0;

    friend bool operator==(const Pose&, const Pose&) = default;
};

[[nodiscard]] bool is_finite(const Pose& p) noexcept;
[[nodiscard]] bool in_arena(const Pose& p) noexcept;

/// Throws OutOfBounds when the pose is non-finite or leaves the arena.
void require_valid_pose(const Pose& p, const char* what);

/// Unit forward vector (x, z) for a yaw.
[[nodiscard]] std::array<double, 2> forward(double yaw) noexcept;

/// Pose `distance` meters ahead of `from`, turned to face back toward it, clamped to the arena.
[[nodiscard]] Pose ahead_of(const Pose& from, double distance) noexcept;

[[nodiscard]] double distance(const Pose& a, const Pose& b) noexcept;

[[nodiscard]] double wrap_angle(double radians) noexcept;

}  // namespace icon

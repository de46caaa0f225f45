#include "icon/pose.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "icon/error.hpp"

namespace icon {

bool is_finite(const Pose& p) noexcept {
    return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z) && std::isfinite(p.yaw);
}

bool in_arena(const Pose& p) noexcept {
    return is_finite(p) && std::abs(p.x) <= kArenaHalfExtent && std::abs(p.z) <= kArenaHalfExtent;
}

void require_valid_pose(const Pose& p, const char* what) {
    if (!in_arena(p)) {
        fail(ErrorCode::OutOfBounds, std::string(what) + " pose outside the 5 m x 5 m arena");
    }
}

std::array<double, 2> forward(double yaw) noexcept { return {std::sin(yaw), -std::cos(yaw)}; }

double wrap_angle(double radians) noexcept {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(radians + std::numbers::pi, two_pi);
    if (r <= 0.0) {
        r += two_pi;
    }
    return r - std::numbers::pi;
}

Pose ahead_of(const Pose& from, double distance) noexcept {
    const auto f = forward(from.yaw);
    Pose p;
    p.x = std::clamp(from.x + distance * f[0], -kArenaHalfExtent, kArenaHalfExtent);
    p.y = from.y;
    p.z = std::clamp(from.z + distance * f[1], -kArenaHalfExtent, kArenaHalfExtent);
    p.yaw = wrap_angle(from.yaw + std::numbers::pi);
    return p;
}

double distance(const Pose& a, const Pose& b) noexcept {
    return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
}

}  // namespace icon

#include "swarm/view.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "swarm/error.hpp"

namespace swarm {

Mat4 Mat4::identity() {
    Mat4 r;
    for (int i = 0; i < 4; ++i) r(i, i) = 1.0;
    return r;
}

Mat4 Mat4::translation(const Vec3& t) {
    Mat4 r = identity();
    for (int i = 0; i < 3; ++i) r(i, 3) = t[static_cast<std::size_t>(i)];
    return r;
}

Mat4 Mat4::scale(const Vec3& s) {
    Mat4 r = identity();
    for (int i = 0; i < 3; ++i) r(i, i) = s[static_cast<std::size_t>(i)];
    return r;
}

Mat4 operator*(const Mat4& a, const Mat4& b) {
    Mat4 r;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            double s = 0.0;
            for (int k = 0; k < 4; ++k) s += a(i, k) * b(k, j);
            r(i, j) = s;
        }
    }
    return r;
}

Vec4 operator*(const Mat4& a, const Vec4& v) {
    Vec4 r{};
    for (int i = 0; i < 4; ++i) {
        double s = 0.0;
        for (int k = 0; k < 4; ++k) s += a(i, k) * v[static_cast<std::size_t>(k)];
        r[static_cast<std::size_t>(i)] = s;
    }
    return r;
}

Quaternion Quaternion::axis_angle(const Vec3& axis, double radians) {
    const double len = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
    if (!(len > 0.0)) throw OutOfRange("rotation axis must be nonzero");
    const double s = std::sin(radians / 2.0) / len;
    return {std::cos(radians / 2.0), axis[0] * s, axis[1] * s, axis[2] * s};
}

double Quaternion::norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }

Mat4 Quaternion::rotation() const {
    Mat4 r = Mat4::identity();
    r(0, 0) = 1 - 2 * (y * y + z * z);
    r(0, 1) = 2 * (x * y - w * z);
    r(0, 2) = 2 * (x * z + w * y);
    r(1, 0) = 2 * (x * y + w * z);
    r(1, 1) = 1 - 2 * (x * x + z * z);
    r(1, 2) = 2 * (y * z - w * x);
    r(2, 0) = 2 * (x * z - w * y);
    r(2, 1) = 2 * (y * z + w * x);
    r(2, 2) = 1 - 2 * (x * x + y * y);
    return r;
}

Quaternion operator*(const Quaternion& a, const Quaternion& b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z, a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x, a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

void check_camera(const Camera& camera) {
    if (const auto* c2 = std::get_if<Planar2DCamera>(&camera)) {
        if (!(c2->zoom > 0.0) || !std::isfinite(c2->zoom)) throw OutOfRange("camera zoom must be positive");
        return;
    }
    const auto& c3 = std::get<Perspective3DCamera>(camera);
    if (!(c3.near > 0.0 && c3.near < c3.far)) throw OutOfRange("camera needs 0 < near < far");
    if (!(c3.fov_y > 0.0 && c3.fov_y < std::numbers::pi)) throw OutOfRange("camera fov must lie in (0, pi)");
    if (!(std::abs(c3.orientation.norm() - 1.0) <= 1e-6)) throw OutOfRange("camera orientation is not unit length");
}

Mat4 model_view(const Camera& camera) {
    if (const auto* c2 = std::get_if<Planar2DCamera>(&camera)) {
        return Mat4::scale({c2->zoom, c2->zoom, 1.0}) * Mat4::translation({-c2->center[0], -c2->center[1], 0.0});
    }
    const auto& c3 = std::get<Perspective3DCamera>(camera);
    // Inverse of translate(p) * R is R^T * translate(-p).
    Mat4 rt = c3.orientation.rotation();
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) std::swap(rt(i, j), rt(j, i));
    }
    return rt * Mat4::translation({-c3.position[0], -c3.position[1], -c3.position[2]});
}

Mat4 perspective(double fov_y, double aspect, double near, double far) {
    if (!(near > 0.0 && near < far)) throw OutOfRange("perspective needs 0 < near < far");
    if (!(fov_y > 0.0 && fov_y < std::numbers::pi)) throw OutOfRange("perspective fov must lie in (0, pi)");
    if (!(aspect > 0.0)) throw OutOfRange("aspect must be positive");
    const double f = 1.0 / std::tan(fov_y / 2.0);
    Mat4 r;
    r(0, 0) = f / aspect;
    r(1, 1) = f;
    r(2, 2) = (far + near) / (near - far);
    r(2, 3) = 2.0 * far * near / (near - far);
    r(3, 2) = -1.0;
    return r;
}

Mat4 ortho_2d(const Planar2DCamera& camera, double aspect) {
    if (!(aspect > 0.0)) throw OutOfRange("aspect must be positive");
    return Mat4::scale({1.0 / aspect, 1.0, 1.0}) * model_view(Camera{camera});
}

Rgb color_for_position(std::span<const double> position, std::span<const Interval> bounds, const ColorMode& mode) {
    if (mode.kind == ColorMode::Kind::Fixed) return mode.rgb;
    Rgb out{0.5, 0.5, 0.5};
    const std::size_t n = std::min<std::size_t>({position.size(), bounds.size(), 3});
    for (std::size_t i = 0; i < n; ++i) {
        const double w = bounds[i].width();
        const double t = w > 0.0 ? (position[i] - bounds[i].lo) / w : 0.0;
        out[i] = std::clamp(std::isnan(t) ? 0.0 : t, 0.0, 1.0);
    }
    return out;
}

double sprite_intensity(double d) {
    const double t = 1.0 - std::min(std::max(d, 0.0), 1.0);
    return t * t;
}

std::array<std::array<double, 2>, 4> sprite_corners(const Vec4& clip, double radius) {
    const double x = clip[0] / clip[3];
    const double y = clip[1] / clip[3];
    return {{{x - radius, y - radius}, {x + radius, y - radius}, {x - radius, y + radius}, {x + radius, y + radius}}};
}

Rgb blend_additive(const Rgb& dst, const Rgb& color, double alpha) {
    Rgb out{};
    for (std::size_t i = 0; i < 3; ++i) out[i] = std::min(1.0, dst[i] + alpha * color[i]);
    return out;
}

}  // namespace swarm

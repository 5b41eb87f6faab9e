#pragma once

#include <array>
#include <span>
#include <variant>

#include "swarm/system.hpp"

namespace swarm {

using Vec3 = std::array<double, 3>;
using Vec4 = std::array<double, 4>;
using Rgb = std::array<double, 3>;

/// 4x4 matrix stored column-major; applied to column vectors (M * v).
struct Mat4 {
    std::array<double, 16> m{};

    static Mat4 identity();
    static Mat4 translation(const Vec3& t);
    static Mat4 scale(const Vec3& s);

    double& operator()(int row, int col) { return m[static_cast<std::size_t>(col * 4 + row)]; }
    double operator()(int row, int col) const { return m[static_cast<std::size_t>(col * 4 + row)]; }

    friend bool operator==(const Mat4&, const Mat4&) = default;
};

Mat4 operator*(const Mat4& a, const Mat4& b);
Vec4 operator*(const Mat4& a, const Vec4& v);

/// Unit quaternion (w, x, y, z).
struct Quaternion {
    double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

    static Quaternion axis_angle(const Vec3& axis, double radians);
    double norm() const;
    Mat4 rotation() const;
};

Quaternion operator*(const Quaternion& a, const Quaternion& b);

struct Planar2DCamera {
    std::array<double, 2> center{0.0, 0.0};
    double zoom = 1.0;
};

struct Perspective3DCamera {
    Vec3 position{0.0, 0.0, 0.0};
    Quaternion orientation;
    double fov_y = 1.0471975511965976;  // 60 degrees
    double near = 0.01;
    double far = 100.0;
};

using Camera = std::variant<Planar2DCamera, Perspective3DCamera>;

/// Throws OutOfRange when zoom <= 0, near/far are out of order, fov is outside
/// (0, pi) or the orientation is not unit length within 1e-6.
void check_camera(const Camera& camera);

/// World to camera: the inverse of the camera's rigid transform in 3D, or
/// scale(zoom) * translate(-center) in 2D.
Mat4 model_view(const Camera& camera);

Mat4 perspective(double fov_y, double aspect, double near, double far);

/// Full world-to-clip map for a 2D camera: the visible rectangle is
/// center +- (aspect / zoom, 1 / zoom).
Mat4 ortho_2d(const Planar2DCamera& camera, double aspect);

/// Colour for a particle given its coordinates on the rendered axes and the bounds
/// of those axes. A 2D position leaves the blue channel at 0.5.
Rgb color_for_position(std::span<const double> position, std::span<const Interval> bounds, const ColorMode& mode);

/// (1 - min(d, 1))^2 for a distance d in sprite radii.
double sprite_intensity(double d);

/// Corners of the screen-aligned quad around a clip-space point: (x/w, y/w) +- radius,
/// in the order (-,-), (+,-), (-,+), (+,+).
std::array<std::array<double, 2>, 4> sprite_corners(const Vec4& clip, double radius);

/// dst + alpha * color, saturating each channel at 1.
Rgb blend_additive(const Rgb& dst, const Rgb& color, double alpha);

}  // namespace swarm

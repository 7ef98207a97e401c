#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

namespace pdc {

enum class arrangement { single_crystal, parallel_pair, compensated_pair };

struct geometry_config {
    double alpha = 0.0;   // angle between the walk-off principal plane and the lab x axis, rad
    double gap_m = 0.0;   // free-space distance between crystal faces
    arrangement arr = arrangement::single_crystal;
};

// Orthogonal map from lab coordinates to the pump walk-off frame: rotate the
// principal plane onto x-z (angle alpha about z), tilt by rho in that plane,
// rotate back. For alpha = 0 this is x' = x cos(rho) - z sin(rho), y' = y,
// z' = x sin(rho) + z cos(rho).
struct rotated_frame {
    std::array<std::array<double, 3>, 3> m{};
    double rho_signed = 0.0;
    double alpha = 0.0;

    std::array<double, 3> apply(const std::array<double, 3>& v) const {
        return {m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
                m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
                m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2]};
    }

    // transpose = inverse (orthogonal)
    std::array<double, 3> apply_inverse(const std::array<double, 3>& v) const {
        return {m[0][0] * v[0] + m[1][0] * v[1] + m[2][0] * v[2],
                m[0][1] * v[0] + m[1][1] * v[1] + m[2][1] * v[2],
                m[0][2] * v[0] + m[1][2] * v[1] + m[2][2] * v[2]};
    }
};

inline rotated_frame build_rotated_frame(double alpha, double rho_signed) {
    const double ca = std::cos(alpha), sa = std::sin(alpha);
    const double cr = std::cos(rho_signed), sr = std::sin(rho_signed);
    rotated_frame f;
    f.alpha = alpha;
    f.rho_signed = rho_signed;
    f.m = {{{ca * ca * cr + sa * sa, sa * ca * (cr - 1.0), -ca * sr},
            {sa * ca * (cr - 1.0), ca * ca + sa * sa * cr, -sa * sr},
            {ca * sr, sa * sr, cr}}};
    return f;
}

inline std::array<double, 3> rotate_to_walkoff_frame(const std::array<double, 3>& dk_lab,
                                                     const rotated_frame& frame) {
    return frame.apply(dk_lab);
}

struct longitudinal_window {
    double z_start_m = 0.0;
    double z_end_m = 0.0;
    double length() const { return z_end_m - z_start_m; }
    double mid() const { return 0.5 * (z_start_m + z_end_m); }

    longitudinal_window shifted(double dz) const { return {z_start_m + dz, z_end_m + dz}; }
};

// Integration range along z' for one crystal of physical length L: the path
// through the tilted frame is stretched to L/cos(rho). Crystal 1 occupies
// [0, W], crystal 2 [W, 2W].
inline longitudinal_window longitudinal_windows(double length_m, double rho, arrangement arr,
                                                int which_crystal) {
    if (which_crystal != 1 && which_crystal != 2)
        throw std::out_of_range("longitudinal_windows: which_crystal must be 1 or 2");
    if (arr == arrangement::single_crystal && which_crystal == 2)
        throw std::out_of_range("longitudinal_windows: single crystal arrangement has no crystal 2");
    const double w = length_m / std::cos(rho);
    return which_crystal == 1 ? longitudinal_window{0.0, w} : longitudinal_window{w, 2.0 * w};
}

} // namespace pdc

#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "pdc/walkoff_geometry.hpp"

namespace pdc {

// n^2 = a + b / (l^2 - c) - d * l^2 with l in micrometers
struct sellmeier_set {
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
};

struct dispersion_model {
    sellmeier_set ordinary;
    sellmeier_set extraordinary; // principal value, field along the optic axis
    double lambda_min_m = 0.0;
    double lambda_max_m = 0.0;

    // BBO, Kato (1986) coefficients, valid 0.22 to 1.06 um
    static dispersion_model bbo() {
        dispersion_model m;
        m.ordinary = {2.7405, 0.0184, 0.0179, 0.0155};
        m.extraordinary = {2.3730, 0.0128, 0.0156, 0.0044};
        m.lambda_min_m = 0.22e-6;
        m.lambda_max_m = 1.06e-6;
        return m;
    }
};

namespace detail {

inline void check_wavelength(double lambda_m, const dispersion_model& model) {
    if (!(lambda_m >= model.lambda_min_m && lambda_m <= model.lambda_max_m))
        throw std::domain_error("wavelength " + std::to_string(lambda_m * 1e9) +
                                " nm outside dispersion validity range [" +
                                std::to_string(model.lambda_min_m * 1e9) + ", " +
                                std::to_string(model.lambda_max_m * 1e9) + "] nm");
}

inline double sellmeier_index(const sellmeier_set& s, double lambda_m) {
    const double l_um = lambda_m * 1e6;
    const double l2 = l_um * l_um;
    return std::sqrt(s.a + s.b / (l2 - s.c) - s.d * l2);
}

} // namespace detail

inline double n_ordinary(double lambda_m, const dispersion_model& model) {
    detail::check_wavelength(lambda_m, model);
    return detail::sellmeier_index(model.ordinary, lambda_m);
}

inline double n_extraordinary_principal(double lambda_m, const dispersion_model& model) {
    detail::check_wavelength(lambda_m, model);
    return detail::sellmeier_index(model.extraordinary, lambda_m);
}

// index ellipsoid: 1/n(theta)^2 = cos^2(theta)/n_o^2 + sin^2(theta)/n_e^2
inline double n_extraordinary_theta(double lambda_m, double theta, const dispersion_model& model) {
    const double no = n_ordinary(lambda_m, model);
    const double ne = n_extraordinary_principal(lambda_m, model);
    const double c = std::cos(theta), s = std::sin(theta);
    return 1.0 / std::sqrt(c * c / (no * no) + s * s / (ne * ne));
}

// Optic-axis angle for collinear degenerate type-I phase matching:
// n_e(theta, lambda_p) = n_o(2 lambda_p), solved by bracketed bisection.
inline double phase_matching_angle(double lambda_p_m, const dispersion_model& model) {
    const double target = n_ordinary(2.0 * lambda_p_m, model);
    const auto mismatch = [&](double th) {
        return n_extraordinary_theta(lambda_p_m, th, model) - target;
    };
    double lo = 1e-9;
    double hi = std::numbers::pi / 2.0 - 1e-9;
    double flo = mismatch(lo);
    double fhi = mismatch(hi);
    if (flo * fhi > 0.0)
        throw std::runtime_error("phase_matching_angle: no phase-matching solution in (0, pi/2)");
    while (hi - lo > 1e-14) {
        const double mid = 0.5 * (lo + hi);
        const double fm = mismatch(mid);
        if (flo * fm <= 0.0) {
            hi = mid;
            fhi = fm;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

// Poynting-vector walk-off of the extraordinary pump:
// tan(rho) = (n(theta)^2 / 2) * sin(2 theta) * |1/n_e^2 - 1/n_o^2|
inline double walk_off_angle(double lambda_p_m, double theta_oa, const dispersion_model& model) {
    const double n = n_extraordinary_theta(lambda_p_m, theta_oa, model);
    const double no = n_ordinary(lambda_p_m, model);
    const double ne = n_extraordinary_principal(lambda_p_m, model);
    const double t = 0.5 * n * n * std::sin(2.0 * theta_oa) *
                     std::abs(1.0 / (ne * ne) - 1.0 / (no * no));
    return std::atan(t);
}

struct crystal_spec {
    double length_m = 1e-3;
    double optic_axis_angle = 0.0; // rad, pump wavevector to optic axis
    int chi_sign = 1;
    int walkoff_sign = 1;
    dispersion_model dispersion = dispersion_model::bbo();
};

struct phase_mismatch {
    std::array<double, 3> lab{};     // dk_x, dk_y, dk_z
    std::array<double, 3> rotated{}; // same vector in the walk-off frame
    double k_pump = 0.0;
    double k_signal = 0.0;
    double k_idler = 0.0;
};

// Wavevector mismatch for external in-plane emission angles. The pump runs
// along z with the extraordinary index at the optic-axis angle; signal and
// idler are ordinary at the degenerate wavelength. External angles map to
// internal ones by transverse wavevector conservation sin(ext) = n_o sin(int).
inline phase_mismatch delta_k(double theta_s_ext, double theta_i_ext, double lambda_p_m,
                              const crystal_spec& spec, const rotated_frame& frame) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const dispersion_model& model = spec.dispersion;
    const double lambda_deg = 2.0 * lambda_p_m;
    const double no = n_ordinary(lambda_deg, model);

    const double sin_s = std::sin(theta_s_ext);
    const double sin_i = std::sin(theta_i_ext);
    if (std::abs(sin_s) >= no || std::abs(sin_i) >= no)
        throw std::domain_error("delta_k: emission angle beyond total internal reflection");

    const double ss = sin_s / no, si = sin_i / no;
    const double cs = std::sqrt(1.0 - ss * ss), ci = std::sqrt(1.0 - si * si);

    phase_mismatch pm;
    pm.k_pump = two_pi / lambda_p_m * n_extraordinary_theta(lambda_p_m, spec.optic_axis_angle, model);
    pm.k_signal = two_pi / lambda_deg * no;
    pm.k_idler = pm.k_signal;
    pm.lab = {-(pm.k_signal * ss + pm.k_idler * si), 0.0,
              pm.k_pump - pm.k_signal * cs - pm.k_idler * ci};
    pm.rotated = rotate_to_walkoff_frame(pm.lab, frame);
    return pm;
}

} // namespace pdc

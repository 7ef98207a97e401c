#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "pdc/crystal_optics.hpp"
#include "pdc/walkoff_geometry.hpp"

namespace pdc {

struct pump_spec {
    double lambda_m = 405e-9;
    double sigma_m = 39e-6; // Gaussian field envelope width
};

struct angular_grid {
    double theta_min = 0.0;
    double theta_max = 0.0;
    int n = 0;

    double step() const { return (theta_max - theta_min) / (n - 1); }

    double theta(int k) const {
        if (k == n - 1) return theta_max; // pin the endpoint exactly
        return theta_min + k * step();
    }

    std::vector<double> axis() const {
        std::vector<double> t(n);
        for (int k = 0; k < n; ++k) t[k] = theta(k);
        return t;
    }

    bool operator==(const angular_grid& o) const {
        return theta_min == o.theta_min && theta_max == o.theta_max && n == o.n;
    }
};

inline angular_grid symmetric_grid(double theta_max, int n) {
    return {-theta_max, theta_max, n};
}

struct tpa_grid {
    angular_grid grid;
    std::vector<std::complex<double>> v; // row-major, index = i_signal * n + i_idler
    bool l2_normalized = false;

    std::complex<double>& at(int is, int ii) { return v[static_cast<size_t>(is) * grid.n + ii]; }
    const std::complex<double>& at(int is, int ii) const {
        return v[static_cast<size_t>(is) * grid.n + ii];
    }
};

namespace detail {

inline double sinc(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

// deterministic row partition: every point is computed by the same pure
// expression whichever thread owns it, so the result is thread-count invariant
template <typename Fn>
inline void parallel_rows(int n_rows, int n_threads, Fn&& fn) {
    if (n_threads <= 1) {
        for (int r = 0; r < n_rows; ++r) fn(r);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) {
        const int lo = static_cast<int>(static_cast<long long>(n_rows) * t / n_threads);
        const int hi = static_cast<int>(static_cast<long long>(n_rows) * (t + 1) / n_threads);
        pool.emplace_back([lo, hi, &fn] {
            for (int r = lo; r < hi; ++r) fn(r);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace detail

// Closed form of the per-crystal amplitude at one angle pair: the transverse
// Gaussian integrals give 2 pi sigma^2 exp(-sigma^2 (dk'_x^2 + dk'_y^2) / 2),
// the finite z' window gives W sinc(dk'_z W / 2) exp(i dk'_z z_mid).
inline std::complex<double> single_crystal_tpa_point(double theta_s, double theta_i,
                                                     const pump_spec& pump,
                                                     const crystal_spec& spec,
                                                     const rotated_frame& frame,
                                                     const longitudinal_window& window) {
    const phase_mismatch pm = delta_k(theta_s, theta_i, pump.lambda_m, spec, frame);
    const double bx = pm.rotated[0], by = pm.rotated[1], az = pm.rotated[2];
    const double s2 = pump.sigma_m * pump.sigma_m;
    const double gauss = 2.0 * std::numbers::pi * s2 * std::exp(-0.5 * s2 * (bx * bx + by * by));
    const double w = window.length();
    const double envelope = gauss * w * detail::sinc(0.5 * az * w);
    const std::complex<double> phase = std::polar(1.0, az * window.mid());
    const std::complex<double> f = static_cast<double>(spec.chi_sign) * envelope * phase;
    if (!std::isfinite(f.real()) || !std::isfinite(f.imag()))
        throw std::runtime_error("single_crystal_tpa: non-finite amplitude at theta_s=" +
                                 std::to_string(theta_s) + ", theta_i=" + std::to_string(theta_i));
    return f;
}

// rho_sign flips the walk-off direction for the second crystal of a
// compensated pair; the crystal's own walkoff_sign composes with it
inline tpa_grid single_crystal_tpa(const angular_grid& grid, const pump_spec& pump,
                                   const crystal_spec& spec, const geometry_config& geom,
                                   const longitudinal_window& window, int rho_sign,
                                   int n_threads = 1) {
    const double rho = walk_off_angle(pump.lambda_m, spec.optic_axis_angle, spec.dispersion);
    const rotated_frame frame =
        build_rotated_frame(geom.alpha, rho * rho_sign * spec.walkoff_sign);

    tpa_grid out;
    out.grid = grid;
    out.v.resize(static_cast<size_t>(grid.n) * grid.n);
    const std::vector<double> axis = grid.axis();
    detail::parallel_rows(grid.n, n_threads, [&](int is) {
        for (int ii = 0; ii < grid.n; ++ii)
            out.at(is, ii) =
                single_crystal_tpa_point(axis[is], axis[ii], pump, spec, frame, window);
    });
    return out;
}

// Brute-force evaluation of the defining volume integral by tensor-product
// Gauss-Legendre quadrature in the walk-off frame. Retained purely as an
// independent oracle for the closed form above.
namespace detail {

inline void gauss_legendre_nodes(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p0 / pp;
            if (std::abs(z - z1) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

} // namespace detail

inline std::complex<double> oracle_tpa_bruteforce(double theta_s, double theta_i,
                                                  const pump_spec& pump, const crystal_spec& spec,
                                                  const geometry_config& geom,
                                                  const longitudinal_window& window, int rho_sign,
                                                  int n_transverse = 120, int n_longitudinal = 60,
                                                  double halfwidth_sigmas = 6.0) {
    const double rho = walk_off_angle(pump.lambda_m, spec.optic_axis_angle, spec.dispersion);
    const rotated_frame frame =
        build_rotated_frame(geom.alpha, rho * rho_sign * spec.walkoff_sign);
    const phase_mismatch pm = delta_k(theta_s, theta_i, pump.lambda_m, spec, frame);

    std::vector<double> xt, wt, xz, wz;
    detail::gauss_legendre_nodes(n_transverse, xt, wt);
    detail::gauss_legendre_nodes(n_longitudinal, xz, wz);

    const double ht = halfwidth_sigmas * pump.sigma_m;
    const double s2 = pump.sigma_m * pump.sigma_m;
    const double zc = window.mid(), zh = 0.5 * window.length();

    // phase dk_lab . r with r = R^T r'; equivalently (R dk_lab) . r'
    const double bx = pm.rotated[0], by = pm.rotated[1], az = pm.rotated[2];

    std::complex<double> acc{0.0, 0.0};
    for (int ix = 0; ix < n_transverse; ++ix) {
        const double xp = ht * xt[ix];
        for (int iy = 0; iy < n_transverse; ++iy) {
            const double yp = ht * xt[iy];
            const double env = std::exp(-(xp * xp + yp * yp) / (2.0 * s2));
            const double wxy = wt[ix] * wt[iy] * env;
            const double ph_t = bx * xp + by * yp;
            std::complex<double> zsum{0.0, 0.0};
            for (int iz = 0; iz < n_longitudinal; ++iz) {
                const double zp = zc + zh * xz[iz];
                zsum += wz[iz] * std::polar(1.0, ph_t + az * zp);
            }
            acc += wxy * zsum;
        }
    }
    acc *= ht * ht * zh * static_cast<double>(spec.chi_sign);
    return acc;
}

// Phase accumulated across the gap between the crystals, with vacuum
// wavevectors projected on z: phi = d (k_p0 - k_s0 cos th_s - k_i0 cos th_i).
inline double relative_phase(double theta_s, double theta_i, double gap_m, double lambda_p_m,
                             double phi_offset) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const double kp0 = two_pi / lambda_p_m;
    const double ks0 = two_pi / (2.0 * lambda_p_m);
    return gap_m * (kp0 - ks0 * std::cos(theta_s) - ks0 * std::cos(theta_i)) + phi_offset;
}

struct two_crystal_composition {
    double phi_offset = 0.0;
    double gap_m = 0.0;
    double lambda_p_m = 405e-9;
};

// F = F1 exp(i phi(th_s, th_i)) + F2, pointwise on a shared grid
inline tpa_grid compose_two_crystals(const tpa_grid& f1, const tpa_grid& f2,
                                     const two_crystal_composition& comp) {
    if (!(f1.grid == f2.grid))
        throw std::invalid_argument("compose_two_crystals: grids differ in range or size");
    tpa_grid out;
    out.grid = f1.grid;
    out.v.resize(f1.v.size());
    const std::vector<double> axis = f1.grid.axis();
    const int n = f1.grid.n;
    for (int is = 0; is < n; ++is) {
        for (int ii = 0; ii < n; ++ii) {
            const double phi =
                relative_phase(axis[is], axis[ii], comp.gap_m, comp.lambda_p_m, comp.phi_offset);
            out.at(is, ii) = f1.at(is, ii) * std::polar(1.0, phi) + f2.at(is, ii);
        }
    }
    return out;
}

// scale so that sum |F|^2 dtheta^2 = 1
inline void normalize_l2(tpa_grid& f) {
    double total = 0.0;
    for (const auto& z : f.v) total += std::norm(z);
    total *= f.grid.step() * f.grid.step();
    if (total <= 0.0) throw std::runtime_error("normalize_l2: zero amplitude grid");
    const double scale = 1.0 / std::sqrt(total);
    for (auto& z : f.v) z *= scale;
    f.l2_normalized = true;
}

} // namespace pdc

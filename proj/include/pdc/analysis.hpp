#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pdc/tpa_engine.hpp"

namespace pdc {

enum class profile_kind { unconditional, conditional };
enum class photon { signal, idler };

struct profile1d {
    std::vector<double> axis;   // rad
    std::vector<double> values; // intensity, unit peak unless stated otherwise
    profile_kind kind = profile_kind::unconditional;
    // conditional metadata: requested angle and the nearest grid sample used
    double theta_fixed_requested = 0.0;
    double theta_fixed_realized = 0.0;
    int fixed_index = -1;
    bool smoothing_skipped = false; // set when a pinhole narrower than the grid step was requested
};

// marginal intensity before peak normalization; fixed ascending summation order
inline std::vector<double> unconditional_density(const tpa_grid& f, photon which) {
    const int n = f.grid.n;
    const double dt = f.grid.step();
    std::vector<double> p(n, 0.0);
    for (int k = 0; k < n; ++k) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j)
            acc += which == photon::signal ? std::norm(f.at(k, j)) : std::norm(f.at(j, k));
        p[k] = acc * dt;
    }
    return p;
}

namespace detail {

inline void peak_normalize(std::vector<double>& v) {
    const double m = *std::max_element(v.begin(), v.end());
    if (m > 0.0)
        for (auto& x : v) x /= m;
}

} // namespace detail

inline profile1d unconditional(const tpa_grid& f, photon which) {
    profile1d p;
    p.kind = profile_kind::unconditional;
    p.axis = f.grid.axis();
    p.values = unconditional_density(f, which);
    detail::peak_normalize(p.values);
    return p;
}

// signal profile at the nearest idler grid sample to theta_fixed
inline profile1d conditional(const tpa_grid& f, double theta_fixed) {
    if (theta_fixed < f.grid.theta_min || theta_fixed > f.grid.theta_max)
        throw std::domain_error("conditional: theta_fixed " + std::to_string(theta_fixed) +
                                " rad outside grid range");
    const int j = std::clamp(
        static_cast<int>(std::lround((theta_fixed - f.grid.theta_min) / f.grid.step())), 0,
        f.grid.n - 1);
    profile1d p;
    p.kind = profile_kind::conditional;
    p.axis = f.grid.axis();
    p.values.resize(f.grid.n);
    for (int is = 0; is < f.grid.n; ++is) p.values[is] = std::norm(f.at(is, j));
    detail::peak_normalize(p.values);
    p.theta_fixed_requested = theta_fixed;
    p.theta_fixed_realized = p.axis[j];
    p.fixed_index = j;
    return p;
}

struct detector_spec {
    double focal_m = 200e-3;
    double pinhole_m = 100e-6; // diameter; 0 means an ideal point detector
};

inline double angle_to_position(double theta, const detector_spec& det) {
    return det.focal_m * std::tan(theta);
}

inline double position_to_angle(double x, const detector_spec& det) {
    return std::atan(x / det.focal_m);
}

// Convolve with a top-hat of angular width pinhole/f. The discrete kernel
// carries fractional end weights so its mass is exactly the requested width,
// then it is normalized, which preserves the profile sum.
inline profile1d pinhole_smooth(const profile1d& p, const detector_spec& det) {
    profile1d out = p;
    if (det.pinhole_m <= 0.0) return out;
    const double width = det.pinhole_m / det.focal_m;
    const double dt = p.axis.size() > 1 ? p.axis[1] - p.axis[0] : 0.0;
    if (width < dt || dt <= 0.0) {
        out.smoothing_skipped = true;
        return out;
    }
    const double half = 0.5 * width;
    const int m = static_cast<int>(std::floor(half / dt));
    const double frac = half / dt - m;
    std::vector<double> kernel;
    kernel.reserve(2 * m + 3);
    if (frac > 0.0) kernel.push_back(frac);
    for (int k = 0; k < 2 * m + 1; ++k) kernel.push_back(1.0);
    if (frac > 0.0) kernel.push_back(frac);
    const double norm = 2.0 * m + 1.0 + 2.0 * frac;
    for (auto& k : kernel) k /= norm;

    const int n = static_cast<int>(p.values.size());
    const int half_k = static_cast<int>(kernel.size()) / 2;
    out.values.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int k = 0; k < static_cast<int>(kernel.size()); ++k) {
            const int j = i + k - half_k;
            if (j >= 0 && j < n) acc += kernel[k] * p.values[j];
        }
        out.values[i] = acc;
    }
    return out;
}

// || p(theta) - p(-theta) ||_1 / || p(theta) + p(-theta) ||_1
inline double asymmetry_metric(const profile1d& p) {
    const size_t n = p.axis.size();
    const double range = p.axis.back() - p.axis.front();
    for (size_t k = 0; k < n; ++k)
        if (std::abs(p.axis[k] + p.axis[n - 1 - k]) > 1e-9 * range)
            throw std::domain_error("asymmetry_metric: axis is not symmetric about zero");
    double num = 0.0, den = 0.0;
    for (size_t k = 0; k < n; ++k) {
        num += std::abs(p.values[k] - p.values[n - 1 - k]);
        den += p.values[k] + p.values[n - 1 - k];
    }
    if (den <= 0.0) throw std::domain_error("asymmetry_metric: profile has no mass");
    return num / den;
}

// (max - min) / (max + min) over interior extrema with axis values inside
// [window_lo, window_hi]
inline double fringe_visibility(const profile1d& p, double window_lo, double window_hi) {
    const int n = static_cast<int>(p.values.size());
    double vmax = -1.0, vmin = -1.0;
    bool have_max = false, have_min = false;
    for (int i = 1; i + 1 < n; ++i) {
        if (p.axis[i] < window_lo || p.axis[i] > window_hi) continue;
        const double a = p.values[i - 1], b = p.values[i], c = p.values[i + 1];
        if (b > a && b >= c) {
            vmax = have_max ? std::max(vmax, b) : b;
            have_max = true;
        }
        if (b < a && b <= c) {
            vmin = have_min ? std::min(vmin, b) : b;
            have_min = true;
        }
    }
    if (!have_max || !have_min)
        throw std::domain_error("fringe_visibility: window contains no interior extrema");
    return (vmax - vmin) / (vmax + vmin);
}

inline double fringe_visibility(const profile1d& p) {
    return fringe_visibility(p, p.axis.front(), p.axis.back());
}

// [first, last] axis values where the profile is at least floor_frac of its
// peak. Far outside the envelope the samples underflow to exact zero and any
// window containing them reports visibility 1 regardless of fringe contrast,
// so visibility metrics should be evaluated inside this support.
inline std::pair<double, double> envelope_support(const profile1d& p, double floor_frac) {
    const size_t n = p.values.size();
    double peak = 0.0;
    for (const double v : p.values) peak = std::max(peak, v);
    if (peak <= 0.0) throw std::domain_error("envelope_support: profile has no mass");
    const double floor = floor_frac * peak;
    size_t lo = 0, hi = n - 1;
    while (lo < n && p.values[lo] < floor) ++lo;
    while (hi > lo && p.values[hi] < floor) --hi;
    return {p.axis[lo], p.axis[hi]};
}

} // namespace pdc

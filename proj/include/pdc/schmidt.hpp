#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "pdc/tpa_engine.hpp"

namespace pdc {

struct schmidt_result {
    std::vector<double> lambdas; // descending, sums to 1 over the full spectrum
    double schmidt_number = 0.0; // K = 1 / sum lambda_n^2
    // mode n sampled on the grid axis, unit L2 norm as functions (sum |m|^2 dtheta = 1)
    std::vector<std::vector<std::complex<double>>> signal_modes;
    std::vector<std::vector<std::complex<double>>> idler_modes;
    double parseval_total = 0.0; // sum s_n^2 = sum |F|^2 dtheta^2 before normalization
};

// SVD of the amplitude matrix scaled by dtheta. Signal modes are the left
// singular vectors, idler modes the conjugated right ones, so that
// F(ts, ti) = sum_n s_n phi_n(ts) chi_n(ti) holds without conjugation.
// Phase convention: the signal mode's largest-magnitude entry is made real
// positive and the idler mode absorbs the inverse phase, preserving the
// reconstruction exactly.
inline schmidt_result schmidt_decompose(const tpa_grid& f, int n_modes) {
    const int n = f.grid.n;
    if (static_cast<size_t>(n) * n != f.v.size())
        throw std::invalid_argument("schmidt_decompose: grid is not square");
    if (n_modes < 1) throw std::invalid_argument("schmidt_decompose: n_modes must be >= 1");
    n_modes = std::min(n_modes, n);

    const double dt = f.grid.step();
    Eigen::MatrixXcd m(n, n);
    for (int is = 0; is < n; ++is)
        for (int ii = 0; ii < n; ++ii) m(is, ii) = f.at(is, ii) * dt;

    Eigen::BDCSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd s = svd.singularValues();

    schmidt_result r;
    r.parseval_total = s.squaredNorm();
    if (r.parseval_total <= 0.0) throw std::runtime_error("schmidt_decompose: zero amplitude");

    r.lambdas.resize(n);
    double k_inv = 0.0;
    for (int k = 0; k < n; ++k) {
        r.lambdas[k] = s(k) * s(k) / r.parseval_total;
        k_inv += r.lambdas[k] * r.lambdas[k];
    }
    r.schmidt_number = 1.0 / k_inv;

    const double mode_scale = 1.0 / std::sqrt(dt);
    r.signal_modes.resize(n_modes);
    r.idler_modes.resize(n_modes);
    for (int k = 0; k < n_modes; ++k) {
        Eigen::VectorXcd u = svd.matrixU().col(k);
        Eigen::VectorXcd w = svd.matrixV().col(k).conjugate();
        int imax = 0;
        double amax = -1.0;
        for (int j = 0; j < n; ++j) {
            const double a = std::abs(u(j));
            if (a > amax) {
                amax = a;
                imax = j;
            }
        }
        const std::complex<double> rot =
            amax > 0.0 ? std::conj(u(imax)) / amax : std::complex<double>(1.0, 0.0);
        u *= rot;
        w *= std::conj(rot);
        r.signal_modes[k].resize(n);
        r.idler_modes[k].resize(n);
        for (int j = 0; j < n; ++j) {
            r.signal_modes[k][j] = u(j) * mode_scale;
            r.idler_modes[k][j] = w(j) * mode_scale;
        }
    }
    return r;
}

struct overlap_result {
    double overlap = 0.0; // |<g|mode>|^2 at the optimum
    double theta0 = 0.0;
    double width = 0.0;
};

namespace detail {

template <typename Fn>
inline double golden_section_max(Fn&& f, double a, double b, double tol) {
    constexpr double gr = 0.6180339887498949; // (sqrt(5) - 1) / 2
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc > fd) { // maximum is in [a, d]
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

} // namespace detail

// Best Gaussian approximation of a mode profile: maximize |<g|mode>|^2 over
// center and width by nested golden-section search. The Gaussian is
// normalized on the grid, so an exact sampled Gaussian input yields 1.
inline overlap_result gaussian_overlap(const std::vector<std::complex<double>>& mode,
                                       const std::vector<double>& axis) {
    if (mode.size() != axis.size() || axis.size() < 3)
        throw std::invalid_argument("gaussian_overlap: mode and axis sizes mismatch");
    const size_t n = axis.size();
    const double dt = axis[1] - axis[0];

    double mode_norm2 = 0.0;
    for (const auto& z : mode) mode_norm2 += std::norm(z);
    mode_norm2 *= dt;
    if (mode_norm2 <= 0.0) throw std::invalid_argument("gaussian_overlap: zero mode");

    const auto overlap_at = [&](double t0, double w) {
        double g_norm2 = 0.0;
        std::complex<double> inner{0.0, 0.0};
        for (size_t k = 0; k < n; ++k) {
            const double u = (axis[k] - t0) / w;
            const double g = std::exp(-0.5 * u * u);
            g_norm2 += g * g;
            inner += g * mode[k];
        }
        g_norm2 *= dt;
        if (g_norm2 <= 0.0) return 0.0;
        return std::norm(inner * dt) / (g_norm2 * mode_norm2);
    };

    const double range = axis.back() - axis.front();
    const double w_lo = 0.25 * dt;
    const double w_hi = range;
    constexpr double tol = 1e-10;

    const auto best_t0_for = [&](double w) {
        return detail::golden_section_max([&](double t0) { return overlap_at(t0, w); },
                                          axis.front(), axis.back(), tol);
    };
    const double w_best = detail::golden_section_max(
        [&](double w) { return overlap_at(best_t0_for(w), w); }, w_lo, w_hi, tol);
    const double t0_best = best_t0_for(w_best);

    overlap_result r;
    r.theta0 = t0_best;
    r.width = w_best;
    r.overlap = overlap_at(t0_best, w_best);
    if (!std::isfinite(r.overlap))
        throw std::runtime_error("gaussian_overlap: optimization produced a non-finite value");
    return r;
}

inline std::vector<std::complex<double>> mode_modulus(
    const std::vector<std::complex<double>>& mode) {
    std::vector<std::complex<double>> out(mode.size());
    for (size_t k = 0; k < mode.size(); ++k) out[k] = std::abs(mode[k]);
    return out;
}

} // namespace pdc

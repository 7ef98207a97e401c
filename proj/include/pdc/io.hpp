#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pdc/analysis.hpp"
#include "pdc/schmidt.hpp"
#include "pdc/tpa_engine.hpp"

namespace pdc::io {

// 9 significant digits, scientific; shared by every emitted number so files
// are diff-friendly and round-trip stably
inline std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.8e", x);
    return buf;
}

inline std::string tpa_csv(const tpa_grid& f) {
    std::string out;
    out.reserve(f.v.size() * 56 + 64);
    out += "theta_s_mrad,theta_i_mrad,re,im\n";
    const std::vector<double> axis = f.grid.axis();
    for (int is = 0; is < f.grid.n; ++is) {
        for (int ii = 0; ii < f.grid.n; ++ii) {
            const std::complex<double>& z = f.at(is, ii);
            out += sci(axis[is] * 1e3);
            out += ',';
            out += sci(axis[ii] * 1e3);
            out += ',';
            out += sci(z.real());
            out += ',';
            out += sci(z.imag());
            out += '\n';
        }
    }
    return out;
}

inline std::string profile_csv(const profile1d& p) {
    std::string out = "theta_mrad,intensity\n";
    for (size_t k = 0; k < p.axis.size(); ++k) {
        out += sci(p.axis[k] * 1e3);
        out += ',';
        out += sci(p.values[k]);
        out += '\n';
    }
    return out;
}

inline std::string lambdas_csv(const schmidt_result& r) {
    std::string out = "n,lambda\n";
    for (size_t k = 0; k < r.lambdas.size(); ++k) {
        out += std::to_string(k);
        out += ',';
        out += sci(r.lambdas[k]);
        out += '\n';
    }
    return out;
}

inline std::string mode_csv(const schmidt_result& r, const std::vector<double>& axis, int k) {
    std::string out = "theta_mrad,re_signal,im_signal,re_idler,im_idler\n";
    const auto& s = r.signal_modes.at(k);
    const auto& i = r.idler_modes.at(k);
    for (size_t j = 0; j < axis.size(); ++j) {
        out += sci(axis[j] * 1e3);
        out += ',';
        out += sci(s[j].real());
        out += ',';
        out += sci(s[j].imag());
        out += ',';
        out += sci(i[j].real());
        out += ',';
        out += sci(i[j].imag());
        out += '\n';
    }
    return out;
}

// write-temp-then-rename so readers never observe a partial file
inline void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        os.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!os) throw std::runtime_error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

// rebuild a grid from its CSV emission (used by round-trip and closure tests)
inline tpa_grid read_tpa_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(is, line) || line != "theta_s_mrad,theta_i_mrad,re,im")
        throw std::runtime_error("unexpected TPA CSV header in " + path.string());
    std::vector<double> ts, ti, re, im;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        double a, b, c, d;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf", &a, &b, &c, &d) != 4)
            throw std::runtime_error("bad TPA CSV row: " + line);
        ts.push_back(a * 1e-3);
        ti.push_back(b * 1e-3);
        re.push_back(c);
        im.push_back(d);
    }
    const auto n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(ts.size()))));
    if (static_cast<size_t>(n) * n != ts.size())
        throw std::runtime_error("TPA CSV is not a square grid: " + path.string());
    tpa_grid f;
    f.grid = {ts.front(), ts.back(), n};
    f.v.resize(ts.size());
    for (size_t k = 0; k < ts.size(); ++k) f.v[k] = {re[k], im[k]};
    return f;
}

inline std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (const unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t x) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(x));
    return buf;
}

} // namespace pdc::io

#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sbvsim/errors.hpp"
#include "sbvsim/rng.hpp"

namespace sbvsim {

/// Power-law cable attenuation model:
///   attenuation_dB(f, d) = (d / 100 m) * (a0 + a1 * sqrt(f/MHz) + a2 * (f/MHz))
/// with coefficients expressed per 100 m of loop.
///
/// The default coefficients approximate a 0.4 mm-class pair (about 37.6 dB at
/// 17 MHz over 400 m). They are deliberately config-loadable: anyone holding a
/// measured cable characterization can substitute exact values without
/// touching code.
struct CableModel {
    std::string name = "LQ-Gamma-approx";
    double a0_db = 0.3;  // dB per 100 m
    double a1_db = 2.0;  // dB per sqrt(MHz) per 100 m
    double a2_db = 0.05; // dB per MHz per 100 m
    double valid_f_max_hz = 300e6;

    double attenuation_db(double f_hz, double d_m) const {
        const double f_mhz = f_hz / 1e6;
        return (d_m / 100.0) * (a0_db + a1_db * std::sqrt(f_mhz) + a2_db * f_mhz);
    }
};

/// 99%-worst-case FEXT coupling referenced to the victim's direct channel:
///   |H_FEXT,99(f, d, l)|^2 = 10^(k99_db/10) * (f/f0)^freq_exponent
///                            * (l/l0)^length_exponent * |H_d(f, d)|^2
/// plus a per-pair Gaussian fluctuation X_dB that backs couplings off from the
/// worst case (high-coupling in-binder statistics: mean 11.65 dB, sigma 5 dB).
struct FextModel {
    double k99_db = -45.0;
    double f0_hz = 1e6;
    double l0_m = 100.0;
    double freq_exponent = 2.0;
    double length_exponent = 1.0;
    double fluct_mean_db = 11.65;
    double fluct_std_db = 5.0;
};

/// Linear direct-path power gain, in (0, 1].
inline double direct_gain(const CableModel& cable, double f_hz, double d_m,
                          bool allow_extrapolation = false) {
    if (f_hz < 0.0 || d_m < 0.0) {
        throw invalid_parameter_error("direct_gain: f_hz and d_m must be non-negative");
    }
    if (f_hz > cable.valid_f_max_hz && !allow_extrapolation) {
        throw model_range_error("direct_gain: frequency above cable valid_f_max_hz (pass allow_extrapolation to override)");
    }
    return std::pow(10.0, -cable.attenuation_db(f_hz, d_m) / 10.0);
}

/// Linear power gain of the 99%-worst-case FEXT path from a disturber with
/// coupling length l_m onto a victim at distance d_m.
inline double fext_gain_99(const FextModel& fext, const CableModel& cable, double f_hz,
                           double d_m, double l_m, bool allow_extrapolation = false) {
    if (f_hz < 0.0 || d_m < 0.0 || l_m < 0.0) {
        throw invalid_parameter_error("fext_gain_99: f_hz, d_m, l_m must be non-negative");
    }
    if (l_m > d_m) {
        throw invalid_parameter_error("fext_gain_99: coupling length l_m exceeds loop length d_m");
    }
    if (l_m == 0.0) return 0.0;
    return std::pow(10.0, fext.k99_db / 10.0) * std::pow(f_hz / fext.f0_hz, fext.freq_exponent) *
           std::pow(l_m / fext.l0_m, fext.length_exponent) *
           direct_gain(cable, f_hz, d_m, allow_extrapolation);
}

/// Worst-case gain backed off by one fluctuation draw (power domain; the FEXT
/// phase never enters because only squared magnitudes are summed).
inline double fext_gain_sampled(const FextModel& fext, const CableModel& cable, double f_hz,
                                double d_m, double l_m, double x_db,
                                bool allow_extrapolation = false) {
    return fext_gain_99(fext, cable, f_hz, d_m, l_m, allow_extrapolation) *
           std::pow(10.0, -x_db / 10.0);
}

/// One Monte Carlo draw of the coupling fluctuations: one value per ordered
/// (victim, disturber) pair, constant across frequency within the realization.
struct FextRealization {
    int n_victims = 0;
    int n_disturbers = 0;
    std::uint64_t seed = 0;
    std::vector<double> x_db; // row-major (victim, disturber)

    double at(int victim, int disturber) const {
        return x_db[static_cast<std::size_t>(victim) * static_cast<std::size_t>(n_disturbers) +
                    static_cast<std::size_t>(disturber)];
    }
};

inline FextRealization sample_fext(const FextModel& fext, int n_victims, int n_disturbers,
                                   std::uint64_t seed) {
    if (n_victims < 1 || n_disturbers < 1) {
        throw invalid_parameter_error("sample_fext: victim/disturber counts must be >= 1");
    }
    if (fext.fluct_std_db < 0.0) {
        throw invalid_parameter_error("sample_fext: fluct_std_db must be >= 0");
    }
    FextRealization r;
    r.n_victims = n_victims;
    r.n_disturbers = n_disturbers;
    r.seed = seed;
    r.x_db.resize(static_cast<std::size_t>(n_victims) * static_cast<std::size_t>(n_disturbers));
    NormalSampler sampler(seed);
    for (double& x : r.x_db) x = sampler.normal(fext.fluct_mean_db, fext.fluct_std_db);
    return r;
}

/// Parses the flat cable/FEXT parameter file format: `key = value` lines,
/// `#` comments, keys exactly as the model fields. Unknown keys are errors.
inline std::pair<CableModel, FextModel> parse_channel_params(const std::string& text) {
    CableModel cable;
    FextModel fext;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#' || stripped[0] == ';') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw config_error("channel params line " + std::to_string(line_no) +
                               ": expected key = value");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        auto num = [&]() {
            try {
                std::size_t used = 0;
                const double v = std::stod(value, &used);
                if (used != value.size()) throw std::invalid_argument(value);
                return v;
            } catch (const std::exception&) {
                throw config_error("channel params: bad numeric value for key '" + key + "'");
            }
        };
        if (key == "name") cable.name = value;
        else if (key == "a0") cable.a0_db = num();
        else if (key == "a1") cable.a1_db = num();
        else if (key == "a2") cable.a2_db = num();
        else if (key == "valid_f_max_hz") cable.valid_f_max_hz = num();
        else if (key == "k99_db") fext.k99_db = num();
        else if (key == "f0_hz") fext.f0_hz = num();
        else if (key == "l0_m") fext.l0_m = num();
        else if (key == "freq_exponent") fext.freq_exponent = num();
        else if (key == "length_exponent") fext.length_exponent = num();
        else if (key == "fluct_mean_db") fext.fluct_mean_db = num();
        else if (key == "fluct_std_db") fext.fluct_std_db = num();
        else throw config_error("channel params: unknown key '" + key + "'");
    }
    if (cable.a0_db < 0.0 || cable.a1_db < 0.0 || cable.a2_db < 0.0) {
        throw config_error("channel params: attenuation coefficients must be non-negative");
    }
    if (fext.f0_hz <= 0.0 || fext.l0_m <= 0.0 || fext.fluct_std_db < 0.0) {
        throw config_error("channel params: f0_hz/l0_m must be positive, fluct_std_db >= 0");
    }
    return {cable, fext};
}

} // namespace sbvsim

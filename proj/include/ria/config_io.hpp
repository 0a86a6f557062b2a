// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

// Flat "key = value" configuration files. Keys are NetworkConfig field
// names, '#' starts a comment. Powers accept a dBm or W suffix, the speed a
// km/h or m/s suffix, gamma_bar a dB suffix; bare numbers are SI units.

#include "ria/error.hpp"
#include "ria/network_config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

namespace ria {

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

struct Quantity {
    double value = 0.0;
    std::string unit;
};

inline Quantity split_quantity(const std::string& text, int line, const std::string& key) {
    std::size_t pos = 0;
    Quantity q;
    try {
        q.value = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw ParseError("expected a number for '" + key + "'", line, key);
    }
    q.unit = trim(std::string_view(text).substr(pos));
    return q;
}

inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

template <class E>
struct EnumName {
    E value;
    const char* name;
};

inline constexpr EnumName<ErrorNormalization> error_normalization_names[] = {
    {ErrorNormalization::per_entry, "per_entry"}, {ErrorNormalization::gram_identity, "gram_identity"}};
inline constexpr EnumName<PhiErrorCoeff> phi_coeff_names[] = {
    {PhiErrorCoeff::term_count, "term_count"}, {PhiErrorCoeff::printed, "printed"}};
inline constexpr EnumName<StepNorm> step_norm_names[] = {{StepNorm::x2, "x2"}, {StepNorm::x1, "x1"}};
inline constexpr EnumName<TrainingMode> training_mode_names[] = {
    {TrainingMode::interference_only, "interference_only"}, {TrainingMode::full, "full"}};
inline constexpr EnumName<ReceiverInit> receiver_init_names[] = {
    {ReceiverInit::carry, "carry"}, {ReceiverInit::reset, "reset"}};
inline constexpr EnumName<Baseline> baseline_names[] = {
    {Baseline::none, "none"}, {Baseline::nonrobust, "nonrobust"}, {Baseline::oracle, "oracle"}};

template <class E, std::size_t n>
E enum_from(const EnumName<E> (&names)[n], const std::string& text, int line,
            const std::string& key) {
    for (const auto& e : names)
        if (text == e.name) return e.value;
    throw ParseError("unknown value '" + text + "' for '" + key + "'", line, key);
}

template <class E, std::size_t n>
const char* enum_to(const EnumName<E> (&names)[n], E v) {
    for (const auto& e : names)
        if (e.value == v) return e.name;
    return "?";
}

} // namespace detail

inline Baseline parse_baseline(const std::string& text) {
    for (const auto& e : detail::baseline_names)
        if (text == e.name) return e.value;
    throw ValidationError("unknown baseline '" + text + "'");
}

/// Parses configuration text; throws ParseError or ValidationError.
inline NetworkConfig parse_config(std::istream& in) {
    using detail::split_quantity;
    NetworkConfig c;
    using Setter = std::function<void(const std::string&, int, const std::string&)>;

    auto integer = [](auto& field) {
        return Setter([&field](const std::string& text, int line, const std::string& key) {
            using T = std::remove_reference_t<decltype(field)>;
            T v{};
            const auto* end = text.data() + text.size();
            const auto [ptr, ec] = std::from_chars(text.data(), end, v);
            if (ec != std::errc() || ptr != end)
                throw ParseError("expected an integer for '" + key + "'", line, key);
            field = v;
        });
    };
    auto plain = [](double& field) {
        return Setter([&field](const std::string& text, int line, const std::string& key) {
            const auto q = split_quantity(text, line, key);
            if (!q.unit.empty()) throw ParseError("unexpected unit '" + q.unit + "'", line, key);
            field = q.value;
        });
    };
    auto power = [](double& field) {
        return Setter([&field](const std::string& text, int line, const std::string& key) {
            const auto q = split_quantity(text, line, key);
            if (q.unit.empty() || q.unit == "W") field = q.value;
            else if (q.unit == "dBm") field = dbm_to_watt(q.value);
            else throw ParseError("unknown power unit '" + q.unit + "'", line, key);
        });
    };
    auto speed = [](double& field) {
        return Setter([&field](const std::string& text, int line, const std::string& key) {
            const auto q = split_quantity(text, line, key);
            if (q.unit.empty() || q.unit == "m/s") field = q.value;
            else if (q.unit == "km/h") field = kmh_to_ms(q.value);
            else throw ParseError("unknown speed unit '" + q.unit + "'", line, key);
        });
    };
    auto ratio = [](double& field) {
        return Setter([&field](const std::string& text, int line, const std::string& key) {
            const auto q = split_quantity(text, line, key);
            if (q.unit.empty()) field = q.value;
            else if (q.unit == "dB") field = std::pow(10.0, q.value / 10.0);
            else throw ParseError("unknown ratio unit '" + q.unit + "'", line, key);
        });
    };
    auto enumeration = [](auto& field, const auto& names) {
        return Setter([&field, &names](const std::string& text, int line, const std::string& key) {
            field = detail::enum_from(names, text, line, key);
        });
    };

    const std::map<std::string, Setter> setters = {
        {"B", integer(c.B)},
        {"K", integer(c.K)},
        {"M", integer(c.M)},
        {"N", integer(c.N)},
        {"d", integer(c.d)},
        {"m_b", integer(c.m_b)},
        {"P_T", power(c.P_T)},
        {"gamma_bar", ratio(c.gamma_bar)},
        {"delta2", power(c.delta2)},
        {"delta_e", plain(c.delta_e)},
        {"rho", plain(c.rho)},
        {"P_c", power(c.P_c)},
        {"P_o", power(c.P_o)},
        {"v", speed(c.v)},
        {"f_c", plain(c.f_c)},
        {"Omega", plain(c.Omega)},
        {"T", integer(c.T)},
        {"L_max", integer(c.L_max)},
        {"zeta", plain(c.zeta)},
        {"inner_max_sweeps", integer(c.inner_max_sweeps)},
        {"inner_tol", plain(c.inner_tol)},
        {"cggm_max_iter", integer(c.cggm_max_iter)},
        {"cggm_tol", plain(c.cggm_tol)},
        {"cggm_grad_tol", plain(c.cggm_grad_tol)},
        {"armijo_kappa", plain(c.armijo_kappa)},
        {"armijo_nu", plain(c.armijo_nu)},
        {"armijo_tau0", plain(c.armijo_tau0)},
        {"eta", plain(c.eta)},
        {"T_train", integer(c.T_train)},
        {"alpha0", plain(c.alpha0)},
        {"seed", integer(c.seed)},
        {"error_normalization", enumeration(c.error_normalization, detail::error_normalization_names)},
        {"phi_error_coeff", enumeration(c.phi_error_coeff, detail::phi_coeff_names)},
        {"step_norm", enumeration(c.step_norm, detail::step_norm_names)},
        {"training_mode", enumeration(c.training_mode, detail::training_mode_names)},
        {"receiver_init", enumeration(c.receiver_init, detail::receiver_init_names)},
        {"baseline", enumeration(c.baseline, detail::baseline_names)},
    };

    std::string raw;
    int line = 0;
    std::map<std::string, int> seen;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string text = detail::trim(std::string_view(raw).substr(0, hash));
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos) throw ParseError("expected 'key = value'", line, "");
        const std::string key = detail::trim(std::string_view(text).substr(0, eq));
        const std::string value = detail::trim(std::string_view(text).substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end()) throw ParseError("unknown key '" + key + "'", line, key);
        if (seen.count(key)) throw ParseError("duplicate key '" + key + "'", line, key);
        if (value.empty()) throw ParseError("missing value for '" + key + "'", line, key);
        seen[key] = line;
        it->second(value, line, key);
    }
    validate(c);
    return c;
}

inline NetworkConfig parse_config(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

inline NetworkConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    return parse_config(in);
}

/// Writes every field in SI units with round-trip precision.
inline std::string format_config(const NetworkConfig& c) {
    using detail::format_double;
    std::ostringstream o;
    o << "B = " << c.B << "\n"
      << "K = " << c.K << "\n"
      << "M = " << c.M << "\n"
      << "N = " << c.N << "\n"
      << "d = " << c.d << "\n"
      << "m_b = " << c.m_b << "\n"
      << "P_T = " << format_double(c.P_T) << "\n"
      << "gamma_bar = " << format_double(c.gamma_bar) << "\n"
      << "delta2 = " << format_double(c.delta2) << "\n"
      << "delta_e = " << format_double(c.delta_e) << "\n"
      << "rho = " << format_double(c.rho) << "\n"
      << "P_c = " << format_double(c.P_c) << "\n"
      << "P_o = " << format_double(c.P_o) << "\n"
      << "v = " << format_double(c.v) << "\n"
      << "f_c = " << format_double(c.f_c) << "\n"
      << "Omega = " << format_double(c.Omega) << "\n"
      << "T = " << c.T << "\n"
      << "L_max = " << c.L_max << "\n"
      << "zeta = " << format_double(c.zeta) << "\n"
      << "inner_max_sweeps = " << c.inner_max_sweeps << "\n"
      << "inner_tol = " << format_double(c.inner_tol) << "\n"
      << "cggm_max_iter = " << c.cggm_max_iter << "\n"
      << "cggm_tol = " << format_double(c.cggm_tol) << "\n"
      << "cggm_grad_tol = " << format_double(c.cggm_grad_tol) << "\n"
      << "armijo_kappa = " << format_double(c.armijo_kappa) << "\n"
      << "armijo_nu = " << format_double(c.armijo_nu) << "\n"
      << "armijo_tau0 = " << format_double(c.armijo_tau0) << "\n"
      << "eta = " << format_double(c.eta) << "\n"
      << "T_train = " << c.T_train << "\n"
      << "alpha0 = " << format_double(c.alpha0) << "\n"
      << "seed = " << c.seed << "\n"
      << "error_normalization = " << detail::enum_to(detail::error_normalization_names, c.error_normalization) << "\n"
      << "phi_error_coeff = " << detail::enum_to(detail::phi_coeff_names, c.phi_error_coeff) << "\n"
      << "step_norm = " << detail::enum_to(detail::step_norm_names, c.step_norm) << "\n"
      << "training_mode = " << detail::enum_to(detail::training_mode_names, c.training_mode) << "\n"
      << "receiver_init = " << detail::enum_to(detail::receiver_init_names, c.receiver_init) << "\n"
      << "baseline = " << detail::enum_to(detail::baseline_names, c.baseline) << "\n";
    return o.str();
}

inline void save_config(const NetworkConfig& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write config '" + path + "'");
    out << format_config(c);
    if (!out) throw IoError("write failed for '" + path + "'");
}

} // namespace ria

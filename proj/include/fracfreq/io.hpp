#pragma once

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "fracfreq/identify.hpp"
#include "fracfreq/model.hpp"
#include "fracfreq/response.hpp"
#include "fracfreq/stability.hpp"

// JSON and CSV contracts shared with the CLI.

namespace fracfreq {

using json = nlohmann::json;

inline json to_json(const FractionalTF& g) {
    json num = json::array(), den = json::array();
    for (const auto& t : g.numerator.terms())
        num.push_back({{"c", t.coefficient}, {"e", t.exponent}});
    for (const auto& t : g.denominator.terms())
        den.push_back({{"c", t.coefficient}, {"e", t.exponent}});
    return {{"num", num}, {"den", den}};
}

inline FractionalTF tf_from_json(const json& j) {
    auto poly = [](const json& arr) {
        std::vector<FractionalTerm> terms;
        for (const auto& t : arr)
            terms.push_back({t.at("c").get<double>(), t.at("e").get<double>()});
        return FractionalPolynomial(std::move(terms));
    };
    return FractionalTF(poly(j.at("num")), poly(j.at("den")));
}

inline json to_json(const PilDController& c) {
    return {{"K", c.K}, {"Ti", c.Ti}, {"Td", c.Td}, {"lambda", c.lambda},
            {"delta", c.delta}};
}

/// Accepts both controller parameterizations: the summed form keyed by K,
/// and the factored form keyed by C/xi/omega_n. Orders default to 1.
inline PilDController controller_from_json(const json& j) {
    if (j.contains("C") || j.contains("omega_n")) {
        FactoredController f(j.at("C").get<double>(), j.at("xi").get<double>(),
                             j.at("omega_n").get<double>(),
                             j.value("lambda", 1.0), j.value("delta", 1.0));
        return factored_to_pild(f);
    }
    return PilDController(j.value("K", 0.0), j.value("Ti", 0.0), j.value("Td", 0.0),
                          j.value("lambda", 1.0), j.value("delta", 1.0));
}

inline json to_json(const Margins& m) {
    auto opt = [](const std::optional<double>& v) {
        return v ? json(*v) : json(nullptr);
    };
    return {{"gain_margin_db", opt(m.gain_margin_db)},
            {"phase_crossover_omega", opt(m.phase_crossover_omega)},
            {"phase_margin_deg", opt(m.phase_margin_deg)},
            {"gain_crossover_omega", opt(m.gain_crossover_omega)},
            {"multiple_phase_crossings", m.multiple_phase_crossings},
            {"multiple_gain_crossings", m.multiple_gain_crossings}};
}

inline json to_json(const StabilityVerdict& v) {
    return {{"verdict", to_string(v.verdict)},
            {"winding_number", v.winding_number},
            {"min_distance", v.min_distance_to_critical},
            {"critical_omega", v.critical_omega},
            {"assumptions",
             json::array({"open loop has no right-half-plane singularities"})},
            {"warnings", v.warnings}};
}

namespace detail {

inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

/// Response CSV contract: "omega,re,im,mag_db,phase_deg", 17 significant
/// digits, ascending omega.
inline void write_response_csv(const FrequencyResponseSet& r, std::ostream& os) {
    os << "omega,re,im,mag_db,phase_deg\n";
    for (size_t i = 0; i < r.omegas.size(); ++i) {
        os << detail::format_g17(r.omegas[i]) << ','
           << detail::format_g17(r.values[i].real()) << ','
           << detail::format_g17(r.values[i].imag()) << ','
           << detail::format_g17(r.mag_db[i]) << ','
           << detail::format_g17(r.phase_rad[i] * 180.0 / pi) << '\n';
    }
}

/// Nyquist CSV: "omega,re,im"; mirrored points carry negated omega.
inline void write_nyquist_csv(const NyquistCurve& c, std::ostream& os) {
    os << "omega,re,im\n";
    const size_t n = c.omegas.size();
    for (size_t i = 0; i < c.points.size(); ++i) {
        const double w = i < n ? c.omegas[i] : -c.omegas[2 * n - 1 - i];
        os << detail::format_g17(w) << ',' << detail::format_g17(c.points[i].real())
           << ',' << detail::format_g17(c.points[i].imag()) << '\n';
    }
}

/// Measured-data CSV: header "omega,re,im[,weight]"; extra columns (such as
/// a response CSV's mag_db/phase_deg) are ignored, weight defaults to 1.
inline MeasuredResponse read_measured_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line))
        throw std::runtime_error("measured CSV: empty file");
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::stringstream ss(s);
        std::string field;
        while (std::getline(ss, field, ',')) out.push_back(field);
        return out;
    };
    const auto header = split(line);
    long col_omega = -1, col_re = -1, col_im = -1, col_weight = -1;
    for (size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "omega") col_omega = static_cast<long>(i);
        else if (header[i] == "re") col_re = static_cast<long>(i);
        else if (header[i] == "im") col_im = static_cast<long>(i);
        else if (header[i] == "weight") col_weight = static_cast<long>(i);
    }
    if (col_omega < 0 || col_re < 0 || col_im < 0)
        throw std::runtime_error("measured CSV: header must name omega, re, im");

    std::vector<double> omegas, weights;
    std::vector<Complex> values;
    size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto fields = split(line);
        auto field = [&](long col) {
            if (col >= static_cast<long>(fields.size()))
                throw std::runtime_error("measured CSV: short row at line " +
                                         std::to_string(lineno));
            return std::stod(fields[static_cast<size_t>(col)]);
        };
        omegas.push_back(field(col_omega));
        values.emplace_back(field(col_re), field(col_im));
        weights.push_back(col_weight >= 0 ? field(col_weight) : 1.0);
    }
    return MeasuredResponse(std::move(omegas), std::move(values), std::move(weights));
}

inline json to_json(const FitResult& r) {
    return {{"model", to_json(r.model)},
            {"q_value", r.q_value},
            {"iterations", r.iterations},
            {"converged", r.converged}};
}

}  // namespace fracfreq

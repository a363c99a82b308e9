// CSV and JSON serialization for records and reports.
//
// All output is deterministic: CSV doubles are printed with 17 significant
// digits, JSON uses nlohmann's shortest-round-trip formatting with sorted
// keys. Non-finite values are serialized as the strings "inf", "-inf", "nan"
// so reports stay valid JSON.

#pragma once

#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "cbw/estimator.hpp"
#include "cbw/fringes.hpp"
#include "cbw/monte_carlo.hpp"
#include "cbw/netlist.hpp"

namespace cbw {

using Json = nlohmann::json;

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline Json json_num(double v) {
    if (std::isnan(v)) return Json("nan");
    if (std::isinf(v)) return Json(v > 0 ? "inf" : "-inf");
    return Json(v);
}

// --- interferogram records ---------------------------------------------------

inline std::string interferogram_csv(const Interferogram& rec) {
    std::string out = "x,y\n";
    for (std::size_t k = 0; k < rec.x.size(); ++k)
        out += fmt17(rec.x[k]) + "," + fmt17(rec.y[k]) + "\n";
    return out;
}

inline Json params_json(const InterferogramParams& p) {
    return Json{{"mu", p.mu},         {"a", p.a},
                {"b", p.b},           {"f", p.f},
                {"M", p.m_order},     {"phase_offset", p.phase_offset},
                {"sigma", p.sigma},   {"m", p.samples},
                {"L", p.wedge_length}};
}

inline InterferogramParams params_from_json(const Json& j) {
    InterferogramParams p;
    p.mu = j.at("mu").get<double>();
    p.a = j.at("a").get<double>();
    p.b = j.at("b").get<double>();
    p.f = j.at("f").get<double>();
    p.m_order = j.at("M").get<int>();
    p.phase_offset = j.at("phase_offset").get<double>();
    p.sigma = j.at("sigma").get<double>();
    p.samples = j.at("m").get<int>();
    p.wedge_length = j.at("L").get<double>();
    return p;
}

inline Json sidecar_json(const Interferogram& rec) {
    Json j = params_json(rec.params);
    j["seed"] = rec.seed;
    return j;
}

struct CsvRecord {
    std::vector<double> x, y;
};

inline CsvRecord parse_interferogram_csv(const std::string& text) {
    CsvRecord rec;
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("csv: empty file");
    if (line.rfind("x,y", 0) != 0) throw std::runtime_error("csv: missing 'x,y' header");
    int lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("csv: line " + std::to_string(lineno) + ": expected 'x,y'");
        char* end = nullptr;
        const double x = std::strtod(line.c_str(), &end);
        if (end != line.c_str() + comma)
            throw std::runtime_error("csv: line " + std::to_string(lineno) + ": bad x value");
        const char* ybegin = line.c_str() + comma + 1;
        const double y = std::strtod(ybegin, &end);
        if (end != line.c_str() + line.size())
            throw std::runtime_error("csv: line " + std::to_string(lineno) + ": bad y value");
        rec.x.push_back(x);
        rec.y.push_back(y);
    }
    return rec;
}

// --- fringe curves -----------------------------------------------------------

inline std::string fringe_csv(const FringeCurve& c) {
    std::string out = "phi,i_a,i_b\n";
    for (std::size_t k = 0; k < c.phi_values.size(); ++k)
        out += fmt17(c.phi_values[k]) + "," + fmt17(c.i_a[k]) + "," + fmt17(c.i_b[k]) + "\n";
    return out;
}

// --- matrices ----------------------------------------------------------------

inline Json matrix_json(const Mat2& m) {
    Json rows = Json::array();
    for (int r = 0; r < 2; ++r) {
        Json row = Json::array();
        for (int c = 0; c < 2; ++c)
            row.push_back(Json::array({m.at(r, c).real(), m.at(r, c).imag()}));
        rows.push_back(row);
    }
    return rows;
}

// --- reports -----------------------------------------------------------------

inline Json fisher_json(const FisherReport& r) {
    return Json{{"info_exact", json_num(r.info_exact)},
                {"info_closed", json_num(r.info_closed)},
                {"crlb_var_f", json_num(r.crlb_var_f)},
                {"std_k", json_num(r.std_k)},
                {"frac_std_wavelength", json_num(r.frac_std_wavelength)},
                {"k_m", json_num(r.k_m)},
                {"sum_x_sq", json_num(r.sum_x_sq)}};
}

inline Json fit_json(const FitResult& f) {
    return Json{{"f_hat", json_num(f.f_hat)},
                {"amplitude_hat", json_num(f.amplitude_hat)},
                {"offset_hat", json_num(f.offset_hat)},
                {"phase_hat", json_num(f.phase_hat)},
                {"residual_rss", json_num(f.residual_rss)},
                {"converged", f.converged},
                {"iterations", f.iterations},
                {"frequency_identifiable", f.frequency_identifiable}};
}

inline Json wavelength_json(const WavelengthEstimate& w) {
    return Json{{"k_m_hat", json_num(w.k_m_hat)},
                {"lambda_hat", json_num(w.lambda_hat)},
                {"frac_uncertainty", json_num(w.frac_uncertainty)}};
}

inline Json per_m_json(const McPerM& r) {
    return Json{{"M", r.m_order},
                {"trials", r.trials},
                {"nonconverged", r.nonconverged},
                {"k_m", json_num(r.k_m)},
                {"snr_product", json_num(r.snr_product)},
                {"snr_amp", json_num(r.snr_amp)},
                {"empirical_var_f", json_num(r.empirical_var_f)},
                {"empirical_std_f", json_num(r.empirical_std_f)},
                {"crlb_var_f", json_num(r.crlb_var_f)},
                {"efficiency", json_num(r.efficiency)},
                {"mean_bias", json_num(r.mean_bias)},
                {"frac_std_lambda", json_num(r.frac_std_lambda)},
                {"frac_std_lambda_base", json_num(r.frac_std_lambda_base)},
                {"frac_std_lambda_bound", json_num(r.frac_std_lambda_bound)}};
}

inline Json mc_json(const McReport& r) {
    Json per;
    for (const auto& [m_order, row] : r.per_m_results) per[std::to_string(m_order)] = per_m_json(row);
    return Json{{"trials", r.trials},
                {"empirical_var_f", json_num(r.empirical_var_f)},
                {"crlb_var_f", json_num(r.crlb_var_f)},
                {"efficiency", json_num(r.efficiency)},
                {"mean_bias", json_num(r.mean_bias)},
                {"snr_amp", json_num(r.snr_amp)},
                {"nonconverged", r.nonconverged},
                {"excessive_nonconvergence", r.excessive_nonconvergence},
                {"nuisance_mode", to_string(r.nuisance)},
                {"per_M_results", per}};
}

inline Json scaling_json(const ScalingReport& r) {
    Json rows = Json::array();
    for (const McPerM& row : r.rows) rows.push_back(per_m_json(row));
    auto slope = [](const std::optional<double>& s) { return s ? json_num(*s) : Json(nullptr); };
    return Json{{"fixed_k_m", r.fixed_k_m},
                {"rows", rows},
                {"slope_frac_std_lambda", slope(r.slope_frac_std_lambda)},
                {"slope_frac_std_lambda_base", slope(r.slope_frac_std_lambda_base)},
                {"slope_frac_std_lambda_bound", slope(r.slope_bound)}};
}

inline Json mth_power_json(const MthPowerReport& r) {
    return Json{{"pass", r.pass},
                {"residual", json_num(r.residual)},
                {"phase", json_num(r.phase)},
                {"port_swapped", r.port_swapped},
                {"phi_prime_sign", r.phi_prime_sign},
                {"strict_residual", json_num(r.strict_residual)},
                {"dummy_preserves_basis", r.dummy_preserves_basis},
                {"coupler_basis_compatible", r.coupler_basis_compatible},
                {"naive_residual", json_num(r.naive_residual)},
                {"naive_pass", r.naive_pass}};
}

inline Json psi_search_json(const PsiSearchResult& r) {
    Json table = Json::array();
    for (const PsiSearchRow& row : r.table)
        table.push_back(Json{{"psi", json_num(row.psi)}, {"worst_residual", json_num(row.worst_residual)}});
    return Json{{"kind", r.kind == DummyKind::Mzi ? "mzi" : "diag"},
                {"M", r.m_units},
                {"best_psi", json_num(r.best_psi)},
                {"best_residual", json_num(r.best_residual)},
                {"found_below_tol", r.found_below_tol},
                {"table", table}};
}

inline std::string psi_search_csv(const PsiSearchResult& r) {
    std::string out = "psi,worst_residual\n";
    for (const PsiSearchRow& row : r.table)
        out += fmt17(row.psi) + "," + fmt17(row.worst_residual) + "\n";
    return out;
}

// Flat key,value view of a JSON report, for --format csv.
inline std::string json_to_kv_csv(const Json& j) {
    std::string out = "key,value\n";
    std::function<void(const Json&, const std::string&)> walk = [&](const Json& node,
                                                                    const std::string& prefix) {
        if (node.is_object()) {
            for (auto it = node.begin(); it != node.end(); ++it)
                walk(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key());
        } else if (node.is_array()) {
            int i = 0;
            for (const Json& v : node) walk(v, prefix + "[" + std::to_string(i++) + "]");
        } else if (node.is_number_float()) {
            out += prefix + "," + fmt17(node.get<double>()) + "\n";
        } else {
            out += prefix + "," + node.dump() + "\n";
        }
    };
    walk(j, "");
    return out;
}

// --- files -------------------------------------------------------------------

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    os << content;
    if (!os) throw std::runtime_error("write to '" + path + "' failed");
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace cbw

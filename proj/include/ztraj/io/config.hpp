#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ztraj/core/text.hpp"
#include "ztraj/dynamics/trajectory.hpp"
#include "ztraj/rationality/pade.hpp"
#include "ztraj/systems/linear.hpp"
#include "ztraj/systems/schwarzian.hpp"

namespace ztraj::io {

using json = nlohmann::json;

/// Settings shared by every subcommand; flags override the config file.
struct RunSettings {
    std::uint64_t seed = 1;
    mpfr_prec_t precision = 128;
    unsigned threads = 1;
};

inline std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline json read_json(const std::filesystem::path& path)
{
    try {
        return json::parse(read_text(path));
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

/// Exact values are serialized as strings such as "-3/4 + 1/2*I".
inline std::string exact(const GaussianRational& z) { return to_string(z); }
inline std::string exact(const Rational& q) { return q.get_str(); }
inline std::string exact(const Integer& q) { return q.get_str(); }

inline std::vector<std::string> exact(const std::vector<GaussianRational>& v)
{
    std::vector<std::string> out;
    for (const auto& z : v)
        out.push_back(exact(z));
    return out;
}

inline GaussianRational gaussian_value(const json& j)
{
    if (j.is_number_integer())
        return GaussianRational(j.get<long>());
    if (j.is_string())
        return parse_gaussian(j.get<std::string>());
    throw ParseError("exact value must be a string or an integer, got " + j.dump());
}

inline std::vector<GaussianRational> point_value(const json& j)
{
    if (!j.is_array())
        throw ParseError("point must be an array");
    std::vector<GaussianRational> p;
    for (const auto& c : j)
        p.push_back(gaussian_value(c));
    return p;
}

/// Univariate polynomial with ascending terms, e.g. "1 - t".
inline std::string ascending(const UPoly& p, const std::string& var = "t")
{
    if (p.is_zero())
        return "0";
    std::string out;
    for (int k = 0; k <= p.degree(); ++k) {
        GaussianRational c = p[static_cast<std::size_t>(k)];
        if (c.is_zero())
            continue;
        bool negative = c.is_real() && sgn(c.re()) < 0;
        GaussianRational a = negative ? -c : c;
        std::string coef = to_string(a);
        if (!a.is_real() && sgn(a.re()) != 0)
            coef = "(" + coef + ")";
        std::string mono = k == 0 ? "" : (k == 1 ? var : var + "^" + std::to_string(k));
        std::string term = mono.empty() ? coef : (a.is_one() ? mono : coef + "*" + mono);
        if (out.empty())
            out = negative ? "-" + term : term;
        else
            out += negative ? " - " + term : " + " + term;
    }
    return out;
}

inline json system_file(const VectorField& xi, const json& provenance = json())
{
    json j;
    j["variables"] = xi.names();
    j["field"] = xi.component_strings();
    if (!provenance.is_null())
        j["constructor"] = provenance;
    return j;
}

inline std::vector<std::string> string_list(const json& j, const char* what)
{
    if (!j.is_array())
        throw ParseError(std::string(what) + " must be an array of strings");
    std::vector<std::string> out;
    for (const auto& s : j) {
        if (!s.is_string())
            throw ParseError(std::string(what) + " must be an array of strings");
        out.push_back(s.get<std::string>());
    }
    return out;
}

/// Builds a field from a constructor description:
///   {"constructor": "field", "variables": [...], "field": [...]}
///   {"constructor": "planar", "field": [P, Q]}          (variables x, y)
///   {"constructor": "linear", "matrix": [["1/t"]]}
///   {"constructor": "jfunction"}
///   {"constructor": "translates", "functions": ["t + 1", ...]}
inline VectorField construct_system(const json& spec)
{
    std::string kind = spec.value("constructor", std::string("field"));
    if (kind == "field")
        return VectorField::parse(string_list(spec.at("variables"), "variables"), string_list(spec.at("field"), "field"));
    if (kind == "planar")
        return VectorField::parse({"x", "y"}, string_list(spec.at("field"), "field"));
    if (kind == "linear") {
        std::vector<std::vector<std::string>> rows;
        for (const auto& r : spec.at("matrix"))
            rows.push_back(string_list(r, "matrix row"));
        return linear_system_field(RationalMatrixODE::parse(rows)).xi;
    }
    if (kind == "jfunction")
        return jfunction_field();
    if (kind == "translates") {
        std::vector<RationalFunction> r;
        for (const auto& s : string_list(spec.at("functions"), "functions"))
            r.push_back(parse_rational_function(s));
        return translates_field(r);
    }
    throw ParseError("unknown system constructor '" + kind + "'");
}

/// "system" entry of a run config: an inline constructor description or
/// {"file": path} naming a system file written by systems-make.
inline VectorField load_system(const json& spec, const std::filesystem::path& base_dir)
{
    if (spec.contains("file")) {
        std::filesystem::path p = spec.at("file").get<std::string>();
        if (p.is_relative())
            p = base_dir / p;
        json file = read_json(p);
        return VectorField::parse(string_list(file.at("variables"), "variables"), string_list(file.at("field"), "field"));
    }
    return construct_system(spec);
}

/// Taylor coefficients from a JSON array or a text file with one value per line.
inline TaylorPrefix load_coefficients(const json& cfg, const std::filesystem::path& base_dir)
{
    TaylorPrefix f;
    if (cfg.contains("coefficients")) {
        for (const auto& c : cfg.at("coefficients"))
            f.push_back(gaussian_value(c));
        return f;
    }
    if (!cfg.contains("coefficients_file"))
        throw ParseError("pade needs 'coefficients' or 'coefficients_file'");
    std::filesystem::path p = cfg.at("coefficients_file").get<std::string>();
    if (p.is_relative())
        p = base_dir / p;
    std::string text = read_text(p);
    auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '[') {
        for (const auto& c : json::parse(text))
            f.push_back(gaussian_value(c));
        return f;
    }
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        auto a = line.find_first_not_of(" \t\r");
        if (a == std::string::npos || line[a] == '#')
            continue;
        auto b = line.find_last_not_of(" \t\r");
        f.push_back(parse_gaussian(line.substr(a, b - a + 1)));
    }
    return f;
}

} // namespace ztraj::io

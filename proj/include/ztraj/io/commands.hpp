#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>

#include "ztraj/elimination/elimination.hpp"
#include "ztraj/elimination/lojasiewicz.hpp"
#include "ztraj/io/config.hpp"
#include "ztraj/orbit/orbit_ideal.hpp"
#include "ztraj/points/rational_points.hpp"
#include "ztraj/systems/darboux.hpp"
#include "ztraj/zerocount/zerocount.hpp"

namespace ztraj::io {

struct CommandContext {
    std::filesystem::path base_dir = ".";
    RunSettings settings;
};

struct CommandOutput {
    json result;
    std::optional<std::string> csv; // sweep tables only
    bool certified = true;          // false maps to exit code 2
};

using Command = std::function<CommandOutput(const json&, const CommandContext&)>;

namespace detail {

inline const json& required(const json& cfg, const char* key)
{
    if (!cfg.contains(key))
        throw ParseError(std::string("config is missing '") + key + "'");
    return cfg.at(key);
}

inline VectorField system_of(const json& cfg, const CommandContext& ctx)
{
    return load_system(required(cfg, "system"), ctx.base_dir);
}

inline std::vector<GaussianRational> point_of(const json& cfg, const VectorField& xi)
{
    auto p = point_value(required(cfg, "point"));
    if (p.size() != xi.dim())
        throw DimensionError("point has " + std::to_string(p.size()) + " coordinates, field has " +
                             std::to_string(xi.dim()));
    return p;
}

inline Polynomial polynomial_of(const json& cfg, const char* key, const VariableNames& names)
{
    const json& j = required(cfg, key);
    if (!j.is_string())
        throw ParseError(std::string("'") + key + "' must be a string");
    return parse_polynomial(j.get<std::string>(), names);
}

inline int degree_of(const json& cfg)
{
    int d = required(cfg, "degree").get<int>();
    if (d < 1)
        throw DomainError("degree must be at least 1");
    return d;
}

inline ParametrizedTrajectory trajectory_of(const json& cfg, const VectorField& xi,
                                            const std::vector<GaussianRational>& p, const CommandContext& ctx)
{
    json t = cfg.value("trajectory", json::object());
    std::size_t order = t.value("order", std::size_t{90});
    double radius = t.value("radius", 2.0);
    auto traj = certify_radius(trajectory_series(xi, p, order), radius, ctx.settings.precision);
    if (traj.radius() <= 1)
        throw CertificationError("trajectory certified only on |z| <= " + std::to_string(traj.radius()) +
                                 "; the unit disc needs a larger radius");
    return traj;
}

inline PlanarMap planar_map_of(const json& cfg, const CommandContext& ctx)
{
    VectorField xi = system_of(cfg, ctx);
    auto p = point_of(cfg, xi);
    auto coords = string_list(required(cfg, "coordinates"), "coordinates");
    if (coords.size() != 2)
        throw DimensionError("'coordinates' must name exactly two polynomials");
    auto traj = trajectory_of(cfg, xi, p, ctx);
    return PlanarMap(traj, parse_polynomial(coords[0], xi.names()), parse_polynomial(coords[1], xi.names()));
}

inline CensusOptions census_options(const json& cfg, const CommandContext& ctx)
{
    CensusOptions opt;
    opt.precision = ctx.settings.precision;
    opt.max_precision = std::max<mpfr_prec_t>(opt.max_precision, 4 * ctx.settings.precision);
    opt.threads = ctx.settings.threads;
    opt.grid = cfg.value("grid", opt.grid);
    return opt;
}

inline std::vector<long> sweep_of(const json& cfg)
{
    auto s = required(cfg, "sweep").get<std::vector<long>>();
    if (s.empty())
        throw ParseError("'sweep' must not be empty");
    return s;
}

inline std::vector<std::string> poly_strings(const std::vector<Polynomial>& ps, const VariableNames& names)
{
    std::vector<std::string> out;
    for (const auto& p : ps)
        out.push_back(to_string(p, names));
    return out;
}

inline std::vector<std::vector<unsigned>> exponent_lists(const std::vector<Monomial>& ms)
{
    std::vector<std::vector<unsigned>> out;
    for (const auto& m : ms)
        out.emplace_back(m.exponents().begin(), m.exponents().end());
    return out;
}

inline json diagram_json(const MonomialDiagram& D, int d)
{
    return {{"generators", exponent_lists(D.generators())}, {"kappa", D.kappa()}, {"rho", D.rho(d)}};
}

inline MinorStrategy strategy_of(const json& cfg)
{
    std::string s = cfg.value("strategy", std::string("auto"));
    if (s == "auto")
        return MinorStrategy::Automatic;
    if (s == "exhaustive")
        return MinorStrategy::Exhaustive;
    if (s == "greedy")
        return MinorStrategy::Greedy;
    throw ParseError("unknown minor strategy '" + s + "'");
}

inline json certificate_json(const MinorCertificate& c)
{
    json j{{"columns", c.columns},
           {"log_abs_value", c.log_abs_value},
           {"strategy", c.strategy},
           {"minors_examined", c.minors_examined}};
    if (c.exact)
        j["value"] = exact(*c.exact);
    if (c.best_index)
        j["best_index"] = *c.best_index;
    return j;
}

inline json point_json(const Rational& x, const Rational& y) { return json::array({exact(x), exact(y)}); }

inline std::string csv_number(double v)
{
    std::ostringstream out;
    out.precision(17);
    out << v;
    return out.str();
}

} // namespace detail

inline CommandOutput cmd_zeros(const json& cfg, const CommandContext& ctx)
{
    VectorField xi = detail::system_of(cfg, ctx);
    auto p = detail::point_of(cfg, xi);
    Polynomial P = detail::polynomial_of(cfg, "polynomial", xi.names());
    DiscFunction f(detail::trajectory_of(cfg, xi, p, ctx), P);
    CountOptions opt;
    opt.winding.threads = ctx.settings.threads;
    ZeroCount zc = count_zeros(f, ctx.settings.precision, opt);
    CommandOutput out;
    out.certified = zc.certified;
    out.result = {{"count", zc.count},
                  {"certified", zc.certified},
                  {"radius", zc.radius},
                  {"precision", zc.precision},
                  {"attempts", zc.attempts},
                  {"trajectory_radius", f.radius()}};
    if (cfg.contains("jensen_radius")) {
        JensenReport rep = jensen_bound(f, cfg.at("jensen_radius").get<double>());
        out.result["jensen"] = {{"r", rep.r},           {"constant", rep.constant}, {"M_upper", rep.M_upper},
                                {"m_lower", rep.m_lower}, {"bound", rep.bound}};
    }
    return out;
}

inline CommandOutput cmd_growth(const json& cfg, const CommandContext& ctx)
{
    VectorField xi = detail::system_of(cfg, ctx);
    auto p = detail::point_of(cfg, xi);
    auto traj = detail::trajectory_of(cfg, xi, p, ctx);
    auto degrees = cfg.value("degrees", std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8});
    std::size_t samples = cfg.value("samples", std::size_t{20});
    GrowthTable t = main_theorem_harness(xi, traj, degrees, samples, ctx.settings.seed, ctx.settings.precision,
                                         ctx.settings.threads);
    CommandOutput out;
    json rows = json::array();
    std::string csv = "d,samples,max_count,envelope,fitted_c,morse_envelope,kappa\n";
    for (const auto& r : t.rows) {
        rows.push_back({{"d", r.d},
                        {"samples", r.samples},
                        {"max_count", r.max_count},
                        {"envelope", r.envelope},
                        {"fitted_c", r.fitted_c},
                        {"morse_envelope", r.morse_envelope},
                        {"kappa", r.kappa},
                        {"counts", r.counts}});
        csv += std::to_string(r.d) + "," + std::to_string(r.samples) + "," + std::to_string(r.max_count) + "," +
               detail::csv_number(r.envelope) + "," + detail::csv_number(r.fitted_c) + "," +
               std::to_string(r.morse_envelope) + "," + std::to_string(r.kappa) + "\n";
    }
    out.result = {{"rows", rows}, {"fitted_c", t.fitted_c}, {"seed", ctx.settings.seed}};
    out.csv = csv;
    return out;
}

inline CommandOutput cmd_orbit_ideal(const json& cfg, const CommandContext& ctx)
{
    VectorField xi = detail::system_of(cfg, ctx);
    auto p = detail::point_of(cfg, xi);
    int d = detail::degree_of(cfg);
    std::optional<unsigned long> nu;
    if (cfg.contains("nu"))
        nu = cfg.at("nu").get<unsigned long>();
    IdealSlice s = ideal_slice(xi, p, d, nu);
    MonomialDiagram D = leading_diagram(s);
    CommandOutput out;
    out.result = {{"degree", d},
                  {"nu", s.nu},
                  {"basis", detail::poly_strings(s.basis, xi.names())},
                  {"diagram", detail::diagram_json(D, d)},
                  {"staircase", detail::exponent_lists(D.staircase(d))}};
    if (cfg.contains("polynomial")) {
        DivisionResult r = staircase_division(detail::polynomial_of(cfg, "polynomial", xi.names()), s);
        out.result["remainder"] = to_string(r.remainder, xi.names());
        out.result["member"] = r.remainder.is_zero();
    }
    return out;
}

inline CommandOutput cmd_minors(const json& cfg, const CommandContext& ctx)
{
    VectorField xi = detail::system_of(cfg, ctx);
    auto p = detail::point_of(cfg, xi);
    int d = detail::degree_of(cfg);
    MonomialDiagram D = leading_diagram(ideal_slice(xi, p, d));
    unsigned long mu = cfg.value("mu", orbit_nu(xi, d));
    EliminationMatrix m = build_elimination_matrix(xi, D, d, mu);
    EvaluatedElimination ev = evaluate_elimination(m, p);
    MinorResult r = max_minor_at_point(m, ev, detail::strategy_of(cfg), ctx.settings.seed, cfg.value("restarts", 8u),
                                       ctx.settings.threads);
    CommandOutput out;
    out.result = {{"degree", d},
                  {"mu", mu},
                  {"rho", m.rho()},
                  {"diagram", detail::diagram_json(D, d)},
                  {"rows", detail::exponent_lists(m.rows)}};
    json values = json::array();
    for (std::size_t i = 0; i < ev.values.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < ev.values.cols(); ++j)
            row.push_back(exact(ev.values(i, j)));
        values.push_back(row);
    }
    out.result["values"] = values;
    if (auto* c = std::get_if<MinorCertificate>(&r)) {
        out.result["status"] = "ok";
        out.result["certificate"] = detail::certificate_json(*c);
    } else if (auto* z = std::get_if<AllMinorsZero>(&r)) {
        out.result["status"] = "all-minors-zero";
        out.result["witness"] = to_string(z->witness, xi.names());
    } else {
        out.result["status"] = "indeterminate";
        out.result["reason"] = std::get<Indeterminate>(r).reason;
        out.certified = false;
    }
    return out;
}

inline CommandOutput cmd_lower_bound(const json& cfg, const CommandContext& ctx)
{
    VectorField xi = detail::system_of(cfg, ctx);
    auto p = detail::point_of(cfg, xi);
    int d = detail::degree_of(cfg);
    Polynomial P = detail::polynomial_of(cfg, "polynomial", xi.names());
    LowerBoundOptions opt;
    if (cfg.contains("mu"))
        opt.mu = cfg.at("mu").get<unsigned long>();
    if (cfg.contains("c"))
        opt.c = cfg.at("c").get<double>();
    opt.strategy = detail::strategy_of(cfg);
    opt.seed = ctx.settings.seed;
    opt.threads = ctx.settings.threads;
    LowerBoundReport rep = universal_lower_bound(xi, p, P, d, opt);
    static const std::map<PipelineStatus, std::string> names{{PipelineStatus::Ok, "ok"},
                                                              {PipelineStatus::Degenerate, "degenerate"},
                                                              {PipelineStatus::AllMinorsZero, "all-minors-zero"},
                                                              {PipelineStatus::Indeterminate, "indeterminate"}};
    CommandOutput out;
    out.certified = rep.status != PipelineStatus::Indeterminate;
    out.result = {{"status", names.at(rep.status)},
                  {"diagnostics", rep.diagnostics},
                  {"degree", d},
                  {"mu", rep.mu},
                  {"rho", rep.rho},
                  {"diagram", detail::diagram_json(rep.diagram, d)},
                  {"remainder", to_string(rep.remainder, xi.names())},
                  {"log_gap", rep.log_gap},
                  {"envelope", rep.envelope},
                  {"k_over_dkappa", rep.k_over_dkappa}};
    if (rep.certificate)
        out.result["certificate"] = detail::certificate_json(*rep.certificate);
    if (rep.bound) {
        const auto& b = *rep.bound;
        json jb{{"k", b.k},           {"value", exact(b.value)}, {"log_value", b.log_value},
                {"log_norm", b.log_norm}, {"log_epsilon", b.log_epsilon}, {"scale", b.scale},
                {"needed_c", b.needed_c}, {"holds", b.holds}};
        if (b.c)
            jb["c"] = *b.c;
        out.result["bound"] = jb;
    }
    if (rep.kernel_witness)
        out.result["kernel_witness"] = to_string(*rep.kernel_witness, xi.names());
    return out;
}

inline CommandOutput cmd_lojas(const json& cfg, const CommandContext& ctx)
{
    VariableNames names = cfg.contains("system") ? detail::system_of(cfg, ctx).names()
                                                 : VariableNames(string_list(detail::required(cfg, "variables"), "variables"));
    std::vector<Polynomial> polys;
    for (const auto& s : string_list(detail::required(cfg, "polynomials"), "polynomials"))
        polys.push_back(parse_polynomial(s, names));
    auto p = point_value(detail::required(cfg, "point"));
    std::optional<double> c;
    if (cfg.contains("c"))
        c = cfg.at("c").get<double>();
    ZeroSearchOptions opt;
    opt.seed = ctx.settings.seed;
    opt.starts = cfg.value("starts", opt.starts);
    LojasiewiczReport r = lojasiewicz_check(polys, p, c, opt);
    CommandOutput out;
    out.result = {{"log_epsilon", r.log_epsilon},
                  {"log_distance", r.log_distance},
                  {"distance_to_zeros", r.distance_to_zeros},
                  {"distance_to_infinity", r.distance_to_infinity},
                  {"zeros_found", r.zeros_found},
                  {"n", r.n},
                  {"d", r.d},
                  {"h", r.h},
                  {"needed_c", r.needed_c},
                  {"holds", r.holds},
                  {"on_variety", r.on_variety}};
    if (r.c)
        out.result["c"] = *r.c;
    return out;
}

inline CommandOutput cmd_points(const json& cfg, const CommandContext& ctx)
{
    PlanarMap phi = detail::planar_map_of(cfg, ctx);
    long H = detail::required(cfg, "H").get<long>();
    PointCensus c = census(phi, H, detail::census_options(cfg, ctx));
    CommandOutput out;
    json members = json::array(), undecided = json::array();
    std::string csv = "x,y,height\n";
    for (const auto& m : c.members) {
        members.push_back({{"point", detail::point_json(m.x, m.y)}, {"height", exact(m.height)}});
        csv += exact(m.x) + "," + exact(m.y) + "," + exact(m.height) + "\n";
    }
    for (const auto& u : c.undecided) {
        json ju{{"coordinate", u.coordinate}, {"reason", u.reason}};
        if (u.coordinate >= 0)
            ju["value"] = exact(u.value);
        std::vector<std::string> cands;
        for (const auto& q : u.candidates)
            cands.push_back(exact(q));
        ju["candidates"] = cands;
        undecided.push_back(ju);
    }
    out.certified = c.undecided.empty();
    out.result = {{"H", c.H},
                  {"members", members},
                  {"undecided", undecided},
                  {"cells", c.cells},
                  {"candidates", c.candidates},
                  {"excluded", c.excluded},
                  {"precision", c.precision}};
    out.csv = csv;
    return out;
}

inline CommandOutput cmd_masser(const json& cfg, const CommandContext& ctx)
{
    PlanarMap phi = detail::planar_map_of(cfg, ctx);
    MasserTable t = masser_check(phi, detail::sweep_of(cfg), detail::census_options(cfg, ctx));
    CommandOutput out;
    json rows = json::array();
    std::string csv = "H,members,undecided,w,ratio\n";
    for (const auto& r : t.rows) {
        rows.push_back({{"H", r.H}, {"members", r.members}, {"undecided", r.undecided}, {"w", r.w}, {"ratio", r.ratio}});
        csv += std::to_string(r.H) + "," + std::to_string(r.members) + "," + std::to_string(r.undecided) + "," +
               std::to_string(r.w) + "," + detail::csv_number(r.ratio) + "\n";
        if (r.undecided)
            out.certified = false;
    }
    out.result = {{"rows", rows}, {"fitted_c", t.fitted_c}};
    out.csv = csv;
    return out;
}

inline CommandOutput cmd_density(const json& cfg, const CommandContext& ctx)
{
    PlanarMap phi = detail::planar_map_of(cfg, ctx);
    DensityTable t = density_check(phi, detail::sweep_of(cfg), cfg.value("kappa", std::size_t{2}),
                                   cfg.value("m", std::size_t{2}), cfg.value("c", 1.0), cfg.value("cutoff", 8u),
                                   detail::census_options(cfg, ctx));
    CommandOutput out;
    json rows = json::array();
    std::string csv = "H,count,undecided,envelope,ratio,holds\n";
    for (const auto& r : t.rows) {
        rows.push_back({{"H", r.H},
                        {"count", r.count},
                        {"undecided", r.undecided},
                        {"envelope", r.envelope},
                        {"ratio", r.ratio},
                        {"holds", r.holds}});
        csv += std::to_string(r.H) + "," + std::to_string(r.count) + "," + std::to_string(r.undecided) + "," +
               detail::csv_number(r.envelope) + "," + detail::csv_number(r.ratio) + "," + (r.holds ? "1" : "0") + "\n";
        if (r.undecided)
            out.certified = false;
    }
    json pre{{"contained", t.precondition.contained},
             {"cutoff", t.precondition.cutoff},
             {"taylor_order", t.precondition.taylor_order}};
    if (t.precondition.degree) {
        pre["degree"] = *t.precondition.degree;
        pre["relation"] = to_string(t.precondition.relation, {"x", "y"});
    }
    out.result = {{"precondition", pre},   {"precondition_ok", t.precondition_ok}, {"kappa", t.kappa},
                  {"m", t.m},              {"c", t.c},                             {"fitted_c", t.fitted_c},
                  {"cover_discs", t.cover_discs}, {"rows", rows}};
    out.csv = csv;
    return out;
}

inline CommandOutput cmd_darboux(const json& cfg, const CommandContext& ctx)
{
    VectorField xi = detail::system_of(cfg, ctx);
    if (xi.dim() != 2)
        throw DimensionError("darboux needs a planar field");
    unsigned N = detail::required(cfg, "N").get<unsigned>();
    DarbouxOptions opt;
    opt.threads = ctx.settings.threads;
    opt.max_curve_degree = cfg.value("max_curve_degree", opt.max_curve_degree);
    opt.max_field_degree = cfg.value("max_field_degree", opt.max_field_degree);
    DarbouxResult r = darboux_curves(xi, N, opt);
    CommandOutput out;
    json curves = json::array();
    for (const auto& c : r.curves)
        curves.push_back({{"f", to_string(c.f, xi.names())}, {"K", to_string(c.K, xi.names())}});
    auto m = static_cast<unsigned>(xi.delta());
    out.result = {{"curves", curves},
                  {"partial", r.partial},
                  {"notes", r.notes},
                  {"field_degree", m},
                  {"jouanolou_threshold", jouanolou_threshold(m)}};
    if (auto fi = first_integral_from_curves(xi, r.curves))
        out.result["first_integral"] = {{"num", to_string(fi->num, xi.names())},
                                        {"den", to_string(fi->den, xi.names())},
                                        {"exponents", fi->exponents}};
    else
        out.result["first_integral"] = nullptr;
    return out;
}

inline CommandOutput cmd_pade(const json& cfg, const CommandContext& ctx)
{
    TaylorPrefix f = load_coefficients(cfg, ctx.base_dir);
    unsigned d = detail::required(cfg, "d").get<unsigned>();
    std::size_t N = cfg.value("N", std::min(f.size(), std::size_t{3} * d + 1));
    CommandOutput out;
    out.result = {{"d", d}, {"N", N}, {"terms", f.size()}, {"rational_at_N", rationality_conditions(f, d, N)}};
    if (auto pq = pade_solve(f, d, N)) {
        out.result["P"] = ascending(pq->P);
        out.result["Q"] = ascending(pq->Q);
    } else {
        out.result["P"] = nullptr;
        out.result["Q"] = nullptr;
    }
    if (f.size() >= 3 * static_cast<std::size_t>(d) + 2) {
        auto R = reconstruct(f, d);
        if (R) {
            GaussianRational s = R->den()[0].inverse(); // reconstruct guarantees den(0) != 0
            out.result["reconstructed"] = {{"num", ascending(s * R->num())},
                                           {"den", ascending(s * R->den())},
                                           {"degree", rational_degree(*R)}};
        } else {
            out.result["reconstructed"] = nullptr;
        }
    }
    return out;
}

inline CommandOutput cmd_systems_make(const json& cfg, const CommandContext&)
{
    json spec = cfg.contains("system") ? cfg.at("system") : cfg;
    VectorField xi = construct_system(spec);
    CommandOutput out;
    out.result = system_file(xi, spec);
    return out;
}

inline const std::map<std::string, Command>& commands()
{
    static const std::map<std::string, Command> table{
        {"zeros", cmd_zeros},     {"growth", cmd_growth},   {"orbit-ideal", cmd_orbit_ideal},
        {"minors", cmd_minors},   {"lower-bound", cmd_lower_bound}, {"lojas", cmd_lojas},
        {"points", cmd_points},   {"masser", cmd_masser},   {"density", cmd_density},
        {"darboux", cmd_darboux}, {"pade", cmd_pade},       {"systems-make", cmd_systems_make}};
    return table;
}

/// Commands whose result is a sweep table and may be written as CSV.
inline bool has_csv(const std::string& name)
{
    return name == "growth" || name == "points" || name == "masser" || name == "density";
}

} // namespace ztraj::io

#include "sbr/scenario_io.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sbr/error.hpp"

namespace sbr {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

std::string child(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string child(const std::string& path, std::size_t i) { return path + "/" + std::to_string(i); }

const json& object_at(const json& doc, const std::string& path) {
    if (!doc.is_object()) throw ConfigError(path.empty() ? "/" : path, "expected an object");
    return doc;
}

// Rejects unknown keys. A bare quantity name whose unit-suffixed form is
// allowed gets a unit hint.
void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        const std::string& key = it.key();
        if (allowed.count(key)) continue;
        for (const auto& a : allowed)
            if (a.rfind(key + "_", 0) == 0)
                throw ConfigError(child(path, key), "missing unit in key name (expected e.g. '" + a + "')");
        throw ConfigError(child(path, key), "unknown key");
    }
}

double number(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path, "expected a number");
    return v.get<double>();
}

double required_number(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key)) throw ConfigError(child(path, key), "missing required field");
    return number(obj.at(key), child(path, key));
}

double optional_number(const json& obj, const std::string& key, const std::string& path, double fallback) {
    return obj.contains(key) ? number(obj.at(key), child(path, key)) : fallback;
}

std::string string_at(const json& v, const std::string& path) {
    if (!v.is_string()) throw ConfigError(path, "expected a string");
    return v.get<std::string>();
}

std::vector<std::string> names_at(const json& v, const std::string& path) {
    if (!v.is_array()) throw ConfigError(path, "expected an array of names");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(string_at(v[i], child(path, i)));
    return out;
}

// Quantity given in one of two units, e.g. Q_f_m3_per_h or Q_f_m3_per_s.
struct UnitChoice {
    std::string key;
    double to_si;
};

std::optional<double> quantity(const json& obj, const std::string& path, const std::vector<UnitChoice>& units) {
    std::optional<double> value;
    std::string found;
    for (const auto& u : units) {
        if (!obj.contains(u.key)) continue;
        if (value) throw ConfigError(child(path, u.key), "conflicts with '" + found + "'");
        value = number(obj.at(u.key), child(path, u.key)) * u.to_si;
        found = u.key;
    }
    return value;
}

std::vector<double> named_values(const json& v, const std::string& path, const std::vector<std::string>& names) {
    if (!v.is_object()) throw ConfigError(path, "expected an object of component values");
    std::vector<double> out(names.size(), 0.0);
    for (auto it = v.begin(); it != v.end(); ++it) {
        const auto pos = std::find(names.begin(), names.end(), it.key());
        if (pos == names.end()) throw ConfigError(child(path, it.key()), "unknown component");
        const double x = number(it.value(), child(path, it.key()));
        if (!(x >= 0.0)) throw ConfigError(child(path, it.key()), "concentration must be nonnegative");
        out[static_cast<std::size_t>(pos - names.begin())] = x;
    }
    return out;
}

std::vector<double> matrix(const json& v, const std::string& path, std::size_t rows, std::size_t cols) {
    if (!v.is_array() || v.size() != rows)
        throw ConfigError(path, "expected " + std::to_string(rows) + " rows");
    std::vector<double> out;
    for (std::size_t i = 0; i < rows; ++i) {
        const auto& row = v[i];
        if (!row.is_array() || row.size() != cols)
            throw ConfigError(child(path, i), "expected " + std::to_string(cols) + " columns");
        for (std::size_t j = 0; j < cols; ++j) out.push_back(number(row[j], child(child(path, i), j)));
    }
    return out;
}

GeometrySpec parse_geometry(const json& g, const std::string& path) {
    object_at(g, path);
    GeometrySpec spec;
    if (!g.contains("shape")) throw ConfigError(child(path, "shape"), "missing required field");
    const std::string shape = string_at(g.at("shape"), child(path, "shape"));
    spec.depth_m = required_number(g, "depth_m", path);
    if (shape == "cylinder") {
        check_keys(g, path, {"shape", "depth_m", "area_m2"});
        spec.kind = GeometrySpec::Kind::Cylinder;
        spec.area_m2 = required_number(g, "area_m2", path);
    } else if (shape == "cone") {
        check_keys(g, path, {"shape", "depth_m", "r_top_m", "r_bottom_m", "total_volume_m3", "reference_depth_m",
                             "reference_volume_m3"});
        if (g.contains("r_top_m") || g.contains("r_bottom_m")) {
            spec.kind = GeometrySpec::Kind::Cone;
            spec.r_top_m = required_number(g, "r_top_m", path);
            spec.r_bottom_m = required_number(g, "r_bottom_m", path);
        } else {
            spec.kind = GeometrySpec::Kind::ConeMatching;
            spec.total_volume_m3 = required_number(g, "total_volume_m3", path);
            spec.reference_depth_m = required_number(g, "reference_depth_m", path);
            spec.reference_volume_m3 = required_number(g, "reference_volume_m3", path);
        }
    } else {
        throw ConfigError(child(path, "shape"), "expected 'cylinder' or 'cone'");
    }
    try {
        (void)spec.build();
    } catch (const DomainError& e) {
        throw ConfigError(path, e.what());
    }
    return spec;
}

MaterialParams parse_material(const json& m, const std::string& path) {
    object_at(m, path);
    check_keys(m, path, {"rho_X_kg_per_m3", "rho_L_kg_per_m3", "g_m_per_s2", "X_max_kg_per_m3", "v0_m_per_s",
                         "X_scale_kg_per_m3", "eta", "alpha_m2_per_s2", "X_crit_kg_per_m3"});
    MaterialParams p;
    p.rho_X = optional_number(m, "rho_X_kg_per_m3", path, p.rho_X);
    p.rho_L = optional_number(m, "rho_L_kg_per_m3", path, p.rho_L);
    p.g = optional_number(m, "g_m_per_s2", path, p.g);
    p.X_max = optional_number(m, "X_max_kg_per_m3", path, p.X_max);
    p.v0 = optional_number(m, "v0_m_per_s", path, p.v0);
    p.X_scale = optional_number(m, "X_scale_kg_per_m3", path, p.X_scale);
    p.eta = optional_number(m, "eta", path, p.eta);
    p.alpha = optional_number(m, "alpha_m2_per_s2", path, p.alpha);
    p.X_crit = optional_number(m, "X_crit_kg_per_m3", path, p.X_crit);
    try {
        p.validate();
    } catch (const DomainError& e) {
        throw ConfigError(path, e.what());
    }
    return p;
}

ReactionSpec parse_reactions(const json& r, const std::string& path) {
    object_at(r, path);
    check_keys(r, path, {"model", "parameters", "solids", "solubles", "sigma_C", "sigma_S"});
    ReactionSpec spec;
    if (!r.contains("model")) throw ConfigError(child(path, "model"), "missing required field");
    spec.model = string_at(r.at("model"), child(path, "model"));
    if (spec.model == "none") {
        if (r.contains("parameters") || r.contains("sigma_C") || r.contains("sigma_S"))
            throw ConfigError(path, "model 'none' takes only component names");
        if (!r.contains("solids")) throw ConfigError(child(path, "solids"), "missing required field");
        if (!r.contains("solubles")) throw ConfigError(child(path, "solubles"), "missing required field");
        spec.solids = names_at(r.at("solids"), child(path, "solids"));
        spec.solubles = names_at(r.at("solubles"), child(path, "solubles"));
        if (spec.solids.empty()) throw ConfigError(child(path, "solids"), "need at least one solid component");
    } else if (spec.model == "denitrification") {
        spec.solids = kDenitrificationSolids;
        spec.solubles = kDenitrificationSolubles;
        if (r.contains("solids") && names_at(r.at("solids"), child(path, "solids")) != spec.solids)
            throw ConfigError(child(path, "solids"), "denitrification components are fixed: X_OHO, X_U");
        if (r.contains("solubles") && names_at(r.at("solubles"), child(path, "solubles")) != spec.solubles)
            throw ConfigError(child(path, "solubles"), "denitrification components are fixed: S_NO3, S_S, S_N2");
        if (r.contains("parameters")) {
            const std::string pp = child(path, "parameters");
            const json& p = object_at(r.at("parameters"), pp);
            check_keys(p, pp, {"Y", "b_per_s", "f_P", "mu_max_per_s", "K_NO3_kg_per_m3", "K_S_kg_per_m3"});
            auto& d = spec.denitrification;
            d.Y = optional_number(p, "Y", pp, d.Y);
            d.b = optional_number(p, "b_per_s", pp, d.b);
            d.f_P = optional_number(p, "f_P", pp, d.f_P);
            d.mu_max = optional_number(p, "mu_max_per_s", pp, d.mu_max);
            d.K_NO3 = optional_number(p, "K_NO3_kg_per_m3", pp, d.K_NO3);
            d.K_S = optional_number(p, "K_S_kg_per_m3", pp, d.K_S);
            try {
                d.validate();
            } catch (const DomainError& e) {
                throw ConfigError(pp, e.what());
            }
        }
        if (r.contains("sigma_C")) spec.sigma_C = matrix(r.at("sigma_C"), child(path, "sigma_C"), 2, 2);
        if (r.contains("sigma_S")) spec.sigma_S = matrix(r.at("sigma_S"), child(path, "sigma_S"), 3, 2);
    } else {
        throw ConfigError(child(path, "model"), "expected 'denitrification' or 'none'");
    }
    try {
        (void)spec.build();
    } catch (const DomainError& e) {
        throw ConfigError(path, e.what());
    }
    return spec;
}

std::optional<std::vector<double>> parse_fractions(const json& doc, const std::vector<std::string>& solids) {
    if (!doc.contains("solids_fractions")) return std::nullopt;
    const std::string path = "/solids_fractions";
    auto w = named_values(doc.at("solids_fractions"), path, solids);
    double sum = 0.0;
    for (double x : w) sum += x;
    if (!(sum > 0.0)) throw ConfigError(path, "fractions must have a positive sum");
    for (auto& x : w) x /= sum;
    return w;
}

// Solids given either per component or as a total split by the fractions.
std::vector<double> solids_values(const json& obj, const std::string& path, const std::string& component_key,
                                  const std::string& total_key, const ReactionSpec& rs,
                                  const std::optional<std::vector<double>>& fractions) {
    if (obj.contains(component_key) && obj.contains(total_key))
        throw ConfigError(child(path, total_key), "conflicts with '" + component_key + "'");
    if (obj.contains(component_key)) return named_values(obj.at(component_key), child(path, component_key), rs.solids);
    std::vector<double> out(rs.solids.size(), 0.0);
    if (obj.contains(total_key)) {
        const double X = number(obj.at(total_key), child(path, total_key));
        if (!(X >= 0.0)) throw ConfigError(child(path, total_key), "concentration must be nonnegative");
        if (!fractions) throw ConfigError(child(path, total_key), "needs top-level 'solids_fractions'");
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = X * (*fractions)[k];
    }
    return out;
}

std::vector<Stage> parse_schedule(const json& s, const std::string& path, const ReactionSpec& rs,
                                  const std::optional<std::vector<double>>& fractions) {
    if (!s.is_array()) throw ConfigError(path, "expected an array of stages");
    std::vector<Stage> stages;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const std::string sp = child(path, i);
        const json& row = object_at(s[i], sp);
        check_keys(row, sp, {"stage", "period_h", "period_s", "Q_f_m3_per_h", "Q_f_m3_per_s", "Q_u_m3_per_h",
                             "Q_u_m3_per_s", "Q_e_m3_per_h", "Q_e_m3_per_s", "model", "C_f_kg_per_m3",
                             "X_f_kg_per_m3", "S_f_kg_per_m3"});
        Stage st;
        st.label = row.contains("stage") ? string_at(row.at("stage"), child(sp, "stage")) : "stage " + std::to_string(i);
        const std::string who = " (stage '" + st.label + "')";

        const char* period_keys[] = {"period_h", "period_s"};
        const double period_scale[] = {3600.0, 1.0};
        bool have_period = false;
        for (int u = 0; u < 2; ++u) {
            if (!row.contains(period_keys[u])) continue;
            const std::string pp = child(sp, period_keys[u]);
            if (have_period) throw ConfigError(pp, "conflicts with the other period key" + who);
            const json& p = row.at(period_keys[u]);
            if (!p.is_array() || p.size() != 2) throw ConfigError(pp, "expected [start, end]" + who);
            st.t_start = number(p[0], child(pp, 0)) * period_scale[u];
            st.t_end = number(p[1], child(pp, 1)) * period_scale[u];
            have_period = true;
        }
        if (!have_period) throw ConfigError(child(sp, "period_h"), "missing required field" + who);

        for (const char* q : {"Q_f", "Q_u", "Q_e"}) {
            const std::string base(q);
            const auto v = quantity(row, sp, {{base + "_m3_per_h", 1.0 / 3600.0}, {base + "_m3_per_s", 1.0}});
            if (!v) throw ConfigError(child(sp, base + "_m3_per_h"), "missing required field" + who);
            (base == "Q_f" ? st.Q_f : base == "Q_u" ? st.Q_u : st.Q_e) = *v;
        }

        if (!row.contains("model")) throw ConfigError(child(sp, "model"), "missing required field" + who);
        const std::string model = string_at(row.at("model"), child(sp, "model"));
        if (model == "PDE")
            st.model = ModelKind::PDE;
        else if (model == "ODE")
            st.model = ModelKind::ODE;
        else
            throw ConfigError(child(sp, "model"), "expected 'PDE' or 'ODE'" + who);

        st.C_f = solids_values(row, sp, "C_f_kg_per_m3", "X_f_kg_per_m3", rs, fractions);
        st.S_f = row.contains("S_f_kg_per_m3")
                     ? named_values(row.at("S_f_kg_per_m3"), child(sp, "S_f_kg_per_m3"), rs.solubles)
                     : std::vector<double>(rs.solubles.size(), 0.0);
        stages.push_back(std::move(st));
    }
    return stages;
}

void parse_initial(const json& ini, const std::string& path, Scenario& sc,
                   const std::optional<std::vector<double>>& fractions) {
    object_at(ini, path);
    check_keys(ini, path, {"zbar_m", "layers"});
    sc.zbar0 = required_number(ini, "zbar_m", path);
    const double B = sc.geometry.depth_m;
    if (!(sc.zbar0 >= 0.0 && sc.zbar0 < B)) throw ConfigError(child(path, "zbar_m"), "surface must lie in [0, depth)");
    if (!ini.contains("layers")) throw ConfigError(child(path, "layers"), "missing required field");
    const json& layers = ini.at("layers");
    const std::string lp = child(path, "layers");
    if (!layers.is_array()) throw ConfigError(lp, "expected an array of layers");
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const std::string p = child(lp, i);
        const json& l = object_at(layers[i], p);
        check_keys(l, p, {"from_m", "to_m", "X_kg_per_m3", "C_kg_per_m3", "S_kg_per_m3"});
        ProfileLayer layer;
        layer.from = required_number(l, "from_m", p);
        layer.to = required_number(l, "to_m", p);
        if (!(0.0 <= layer.from && layer.from < layer.to && layer.to <= B))
            throw ConfigError(p, "need 0 <= from_m < to_m <= depth");
        layer.C = solids_values(l, p, "C_kg_per_m3", "X_kg_per_m3", sc.reactions, fractions);
        layer.S = l.contains("S_kg_per_m3") ? named_values(l.at("S_kg_per_m3"), child(p, "S_kg_per_m3"), sc.reactions.solubles)
                                            : std::vector<double>(sc.reactions.solubles.size(), 0.0);
        double X = 0.0, S = 0.0;
        for (double c : layer.C) X += c;
        for (double s : layer.S) S += s;
        if (X > sc.material.X_max) throw ConfigError(p, "initial X exceeds X_max");
        if (water_concentration(X, layer.S, sc.material) < 0.0) throw ConfigError(p, "negative water concentration");
        if (layer.from < sc.zbar0 && (X > 0.0 || S > 0.0))
            throw ConfigError(p, "nonzero concentrations above the initial surface");
        for (const auto& other : sc.initial)
            if (layer.from < other.to && other.from < layer.to) throw ConfigError(p, "overlaps an earlier layer");
        sc.initial.push_back(std::move(layer));
    }
}

void parse_numerics(const json& n, const std::string& path, Scenario& sc) {
    object_at(n, path);
    check_keys(n, path, {"cells", "output_interval_s", "field_interval_s", "ode_dt_max_s", "cfl_safety",
                         "ledger_tolerance"});
    if (n.contains("cells")) {
        const json& c = n.at("cells");
        if (!c.is_number_integer() || c.get<long long>() < 10)
            throw ConfigError(child(path, "cells"), "expected an integer >= 10");
        sc.cells = c.get<std::size_t>();
    }
    sc.output_interval = optional_number(n, "output_interval_s", path, sc.output_interval);
    sc.field_interval = optional_number(n, "field_interval_s", path, sc.field_interval);
    sc.ode_dt_max = optional_number(n, "ode_dt_max_s", path, sc.ode_dt_max);
    sc.cfl_safety = optional_number(n, "cfl_safety", path, sc.cfl_safety);
    sc.ledger_tolerance = optional_number(n, "ledger_tolerance", path, sc.ledger_tolerance);
    if (!(sc.output_interval > 0.0)) throw ConfigError(child(path, "output_interval_s"), "must be positive");
    const double ratio = sc.field_interval / sc.output_interval;
    if (!(ratio >= 1.0) || std::fabs(ratio - std::round(ratio)) > 1e-9)
        throw ConfigError(child(path, "field_interval_s"), "must be a positive multiple of output_interval_s");
    if (!(sc.ode_dt_max > 0.0)) throw ConfigError(child(path, "ode_dt_max_s"), "must be positive");
    if (!(sc.cfl_safety > 0.0 && sc.cfl_safety <= 1.0)) throw ConfigError(child(path, "cfl_safety"), "must lie in (0, 1]");
    if (!(sc.ledger_tolerance > 0.0)) throw ConfigError(child(path, "ledger_tolerance"), "must be positive");
}

void parse_outputs(const json& o, const std::string& path, Scenario& sc) {
    object_at(o, path);
    check_keys(o, path, {"outlets", "fields", "ledger"});
    if (o.contains("outlets")) sc.outputs.outlets = string_at(o.at("outlets"), child(path, "outlets"));
    if (o.contains("fields")) sc.outputs.fields = string_at(o.at("fields"), child(path, "fields"));
    if (o.contains("ledger")) sc.outputs.ledger = string_at(o.at("ledger"), child(path, "ledger"));
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& source) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", source + ": " + e.what());
    }
    object_at(doc, "");
    check_keys(doc, "", {"name", "geometry", "material", "reactions", "solids_fractions", "schedule", "initial",
                         "numerics", "outputs"});
    Scenario sc;
    sc.name = doc.contains("name") ? string_at(doc.at("name"), "/name") : source;
    for (const char* key : {"geometry", "reactions", "schedule", "initial"})
        if (!doc.contains(key)) throw ConfigError(std::string("/") + key, "missing required section");
    sc.geometry = parse_geometry(doc.at("geometry"), "/geometry");
    if (doc.contains("material")) sc.material = parse_material(doc.at("material"), "/material");
    sc.reactions = parse_reactions(doc.at("reactions"), "/reactions");
    const auto fractions = parse_fractions(doc, sc.reactions.solids);
    sc.stages = parse_schedule(doc.at("schedule"), "/schedule", sc.reactions, fractions);
    parse_initial(doc.at("initial"), "/initial", sc, fractions);
    if (doc.contains("numerics")) parse_numerics(doc.at("numerics"), "/numerics", sc);
    if (doc.contains("outputs")) parse_outputs(doc.at("outputs"), "/outputs", sc);

    // Feasibility of the schedule.
    try {
        const StageSchedule schedule(sc.stages, sc.reactions.solids.size(), sc.reactions.solubles.size());
        (void)SurfaceTrajectory(sc.geometry.build(), schedule, sc.zbar0);
    } catch (const ScheduleError& e) {
        std::ostringstream msg;
        msg << e.what() << " (t = " << e.time_s() << " s)";
        throw ConfigError("/schedule", msg.str());
    }
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot read scenario file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path.string());
}

namespace {

ojson named_object(const std::vector<std::string>& names, const std::vector<double>& values) {
    ojson o = ojson::object();
    for (std::size_t k = 0; k < names.size(); ++k) o[names[k]] = values[k];
    return o;
}

ojson matrix_json(const std::vector<double>& v, std::size_t cols) {
    ojson m = ojson::array();
    for (std::size_t i = 0; i < v.size(); i += cols) m.push_back(std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(i), v.begin() + static_cast<std::ptrdiff_t>(i + cols)));
    return m;
}

}  // namespace

std::string scenario_to_text(const Scenario& sc) {
    ojson doc;
    doc["name"] = sc.name;
    ojson g;
    const auto& gs = sc.geometry;
    switch (gs.kind) {
        case GeometrySpec::Kind::Cylinder:
            g = {{"shape", "cylinder"}, {"area_m2", gs.area_m2}, {"depth_m", gs.depth_m}};
            break;
        case GeometrySpec::Kind::Cone:
            g = {{"shape", "cone"}, {"r_top_m", gs.r_top_m}, {"r_bottom_m", gs.r_bottom_m}, {"depth_m", gs.depth_m}};
            break;
        case GeometrySpec::Kind::ConeMatching:
            g = {{"shape", "cone"},
                 {"total_volume_m3", gs.total_volume_m3},
                 {"reference_depth_m", gs.reference_depth_m},
                 {"reference_volume_m3", gs.reference_volume_m3},
                 {"depth_m", gs.depth_m}};
            break;
    }
    doc["geometry"] = g;
    const auto& m = sc.material;
    doc["material"] = {{"rho_X_kg_per_m3", m.rho_X}, {"rho_L_kg_per_m3", m.rho_L}, {"g_m_per_s2", m.g},
                       {"X_max_kg_per_m3", m.X_max}, {"v0_m_per_s", m.v0},       {"X_scale_kg_per_m3", m.X_scale},
                       {"eta", m.eta},               {"alpha_m2_per_s2", m.alpha}, {"X_crit_kg_per_m3", m.X_crit}};
    const auto& rs = sc.reactions;
    ojson r;
    r["model"] = rs.model;
    if (rs.model == "none") {
        r["solids"] = rs.solids;
        r["solubles"] = rs.solubles;
    } else {
        const auto& d = rs.denitrification;
        r["parameters"] = {{"Y", d.Y},           {"b_per_s", d.b},           {"f_P", d.f_P},
                           {"mu_max_per_s", d.mu_max}, {"K_NO3_kg_per_m3", d.K_NO3}, {"K_S_kg_per_m3", d.K_S}};
        if (rs.sigma_C) r["sigma_C"] = matrix_json(*rs.sigma_C, 2);
        if (rs.sigma_S) r["sigma_S"] = matrix_json(*rs.sigma_S, 2);
    }
    doc["reactions"] = r;
    ojson stages = ojson::array();
    for (const auto& st : sc.stages) {
        ojson s;
        s["stage"] = st.label;
        s["period_s"] = {st.t_start, st.t_end};
        s["Q_f_m3_per_s"] = st.Q_f;
        s["Q_u_m3_per_s"] = st.Q_u;
        s["Q_e_m3_per_s"] = st.Q_e;
        s["model"] = to_string(st.model);
        s["C_f_kg_per_m3"] = named_object(rs.solids, st.C_f);
        s["S_f_kg_per_m3"] = named_object(rs.solubles, st.S_f);
        stages.push_back(s);
    }
    doc["schedule"] = stages;
    ojson layers = ojson::array();
    for (const auto& l : sc.initial)
        layers.push_back({{"from_m", l.from},
                          {"to_m", l.to},
                          {"C_kg_per_m3", named_object(rs.solids, l.C)},
                          {"S_kg_per_m3", named_object(rs.solubles, l.S)}});
    doc["initial"] = {{"zbar_m", sc.zbar0}, {"layers", layers}};
    doc["numerics"] = {{"cells", sc.cells},
                       {"output_interval_s", sc.output_interval},
                       {"field_interval_s", sc.field_interval},
                       {"ode_dt_max_s", sc.ode_dt_max},
                       {"cfl_safety", sc.cfl_safety},
                       {"ledger_tolerance", sc.ledger_tolerance}};
    doc["outputs"] = {{"outlets", sc.outputs.outlets}, {"fields", sc.outputs.fields}, {"ledger", sc.outputs.ledger}};
    return doc.dump(2) + "\n";
}

namespace {

// Shortest text that reads back to the same double; '.' decimal point
// regardless of locale.
void put(std::string& out, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    out.append(buf, res.ptr);
}

void put_row(std::string& out, const std::vector<double>& v) {
    for (double x : v) {
        out += ',';
        put(out, x);
    }
}

}  // namespace

std::string outlets_csv(const RunResult& r) {
    std::string out = "t_s,zbar_m";
    for (const char* prefix : {"C_u_", "S_u_", "C_e_", "S_e_"}) {
        const bool solids = prefix[0] == 'C';
        for (const auto& n : solids ? r.solid_names : r.soluble_names) out += "," + std::string(prefix) + n;
    }
    out += '\n';
    for (const auto& o : r.outlets) {
        put(out, o.t);
        out += ',';
        put(out, o.zbar);
        put_row(out, o.C_u);
        put_row(out, o.S_u);
        put_row(out, o.C_e);
        put_row(out, o.S_e);
        out += '\n';
    }
    return out;
}

std::string fields_csv(const RunResult& r) {
    std::string out = "t_s,z_m,component,value\n";
    const std::size_t kc = r.solid_names.size(), ks = r.soluble_names.size();
    for (const auto& f : r.fields) {
        for (std::size_t j = 0; j < r.cell_centers.size(); ++j) {
            auto row = [&](const std::string& name, double v) {
                put(out, f.t);
                out += ',';
                put(out, r.cell_centers[j]);
                out += ',';
                out += name;
                out += ',';
                put(out, v);
                out += '\n';
            };
            for (std::size_t k = 0; k < kc; ++k) row(r.solid_names[k], f.C[j * kc + k]);
            for (std::size_t k = 0; k < ks; ++k) row(r.soluble_names[k], f.S[j * ks + k]);
            row("X", f.X[j]);
            row("W", f.W[j]);
        }
    }
    return out;
}

std::string ledger_json(const RunResult& r, const Scenario& sc) {
    ojson doc;
    doc["scenario"] = sc.name;
    doc["cells"] = sc.cells;
    doc["tolerance"] = r.tolerance;
    doc["closed"] = r.closed();
    doc["worst_relative_residual"] = r.worst_closure();
    doc["worst_handshake_mismatch"] = r.worst_handshake();
    ojson comps = ojson::array();
    for (const auto& c : r.closure)
        comps.push_back({{"name", c.name},
                         {"initial_kg", c.initial},
                         {"final_kg", c.final},
                         {"inflow_kg", c.inflow},
                         {"underflow_kg", c.underflow},
                         {"effluent_kg", c.effluent},
                         {"reacted_kg", c.reacted},
                         {"residual_kg", c.residual},
                         {"relative_residual", c.relative}});
    doc["components"] = comps;
    ojson hs = ojson::array();
    for (const auto& h : r.handshake)
        hs.push_back({{"name", h.name}, {"tank_side_kg", h.tank}, {"pipe_side_kg", h.pipe}, {"relative", h.relative}});
    doc["effluent_handshake"] = hs;
    const auto& st = r.ledger.invariants;
    ojson inv = {{"steps", st.steps}};
    // Extremes stay null until a step has been taken.
    if (st.steps > 0) {
        inv["min_C_kg_per_m3"] = st.min_C;
        inv["min_S_kg_per_m3"] = st.min_S;
        inv["max_X_kg_per_m3"] = st.max_X;
        inv["min_W_kg_per_m3"] = st.min_W;
    }
    doc["invariants"] = inv;
    doc["final_volume_m3"] = r.final_volume;
    doc["wall_seconds"] = r.wall_seconds;
    return doc.dump(2) + "\n";
}

void write_outputs(const RunResult& r, const Scenario& sc, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto write = [&](const std::string& name, const std::string& text) {
        const auto p = dir / name;
        std::ofstream out(p, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + p.string());
        out << text;
        if (!out) throw std::runtime_error("write failed for " + p.string());
    };
    write(sc.outputs.outlets, outlets_csv(r));
    write(sc.outputs.fields, fields_csv(r));
    write(sc.outputs.ledger, ledger_json(r, sc));
}

}  // namespace sbr

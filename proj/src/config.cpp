#include "incel/config.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "incel/error.hpp"

namespace incel {

namespace {

int line_of(const YAML::Node& n) { return n.Mark().is_null() ? 0 : n.Mark().line + 1; }

std::string resolve(const std::string& path, const std::string& base)
{
    if (path.empty() || base.empty()) return path;
    const std::filesystem::path p(path);
    return p.is_absolute() ? path : (std::filesystem::path(base) / p).string();
}

/// Strict view of a YAML mapping: every key must be consumed before finish().
class MapReader {
public:
    MapReader(const YAML::Node& node, std::string path) : node_(node), path_(std::move(path))
    {
        if (node_ && !node_.IsNull() && !node_.IsMap()) {
            throw ConfigError("'" + (path_.empty() ? std::string("document") : path_) + "' must be a mapping",
                              line_of(node_));
        }
    }

    bool has(const char* key) const { return node_ && node_.IsMap() && node_[key]; }

    YAML::Node child(const char* key)
    {
        used_.insert(key);
        // const lookup: a missing key gives an undefined node instead of inserting one
        static const YAML::Node empty = YAML::Load("{}");
        const YAML::Node& src = node_ && node_.IsMap() ? node_ : empty;
        return src[key];
    }

    std::string key_path(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

    template <class T>
    bool get(const char* key, T& out, const std::function<bool(const T&)>& ok = {}, const char* constraint = "")
    {
        const YAML::Node n = child(key);
        if (!n) return false;
        T v = convert<T>(n, key_path(key));
        if (ok && !ok(v)) {
            throw ConfigError("key '" + key_path(key) + "' must be " + constraint, line_of(n));
        }
        out = v;
        return true;
    }

    void finish() const
    {
        if (!node_ || !node_.IsMap()) return;
        for (const auto& kv : node_) {
            const std::string k = kv.first.as<std::string>();
            if (!used_.count(k)) throw ConfigError("unknown key '" + key_path(k.c_str()) + "'", line_of(kv.first));
        }
    }

    template <class T>
    static T convert(const YAML::Node& n, const std::string& path);

private:
    const YAML::Node node_;
    std::string path_;
    std::set<std::string> used_;
};

template <class T>
T scalar_as(const YAML::Node& n, const std::string& path, const char* what)
{
    if (!n.IsScalar()) throw ConfigError("key '" + path + "': expected " + what, line_of(n));
    try {
        return n.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError("key '" + path + "': expected " + what + ", got '" + n.Scalar() + "'", line_of(n));
    }
}

template <>
double MapReader::convert<double>(const YAML::Node& n, const std::string& path)
{
    const double v = scalar_as<double>(n, path, "a number");
    if (!std::isfinite(v)) throw ConfigError("key '" + path + "': value must be finite", line_of(n));
    return v;
}

template <>
int MapReader::convert<int>(const YAML::Node& n, const std::string& path)
{
    return scalar_as<int>(n, path, "an integer");
}

template <>
bool MapReader::convert<bool>(const YAML::Node& n, const std::string& path)
{
    return scalar_as<bool>(n, path, "true or false");
}

template <>
std::string MapReader::convert<std::string>(const YAML::Node& n, const std::string& path)
{
    if (n.IsNull()) return "";
    return scalar_as<std::string>(n, path, "a string");
}

template <>
Vec3 MapReader::convert<Vec3>(const YAML::Node& n, const std::string& path)
{
    if (!n.IsSequence() || n.size() != 3) throw ConfigError("key '" + path + "': expected [x, y, z]", line_of(n));
    Vec3 v;
    for (int d = 0; d < 3; ++d) v[d] = convert<double>(n[d], path + "[" + std::to_string(d) + "]");
    return v;
}

template <>
std::array<int, 3> MapReader::convert<std::array<int, 3>>(const YAML::Node& n, const std::string& path)
{
    if (!n.IsSequence() || n.size() != 3) throw ConfigError("key '" + path + "': expected [n1, n2, n3]", line_of(n));
    std::array<int, 3> v{};
    for (int d = 0; d < 3; ++d) v[d] = convert<int>(n[d], path + "[" + std::to_string(d) + "]");
    return v;
}

template <class T, class Parse>
bool get_enum(MapReader& r, const char* key, T& out, Parse parse)
{
    std::string s;
    const YAML::Node n = r.child(key);
    if (!n) return false;
    s = MapReader::convert<std::string>(n, r.key_path(key));
    try {
        out = parse(s);
    } catch (const ConfigError& e) {
        throw ConfigError("key '" + r.key_path(key) + "': " + e.what(), line_of(n));
    }
    return true;
}

template <class T>
std::function<bool(const T&)> positive()
{
    return [](const T& v) { return v > T(0); };
}

template <class T>
std::function<bool(const T&)> non_negative()
{
    return [](const T& v) { return v >= T(0); };
}

FaceId face_from(const YAML::Node& n, const std::string& path)
{
    const std::string s = MapReader::convert<std::string>(n, path);
    try {
        return parse_face(s);
    } catch (const ConfigError& e) {
        throw ConfigError("key '" + path + "': " + e.what(), line_of(n));
    }
}

void read_harmonic(MapReader& r, Harmonic& h)
{
    r.get("c", h.c);
    r.get("a", h.a);
    r.get("b", h.b);
    r.get("omega", h.omega);
}

// Scenario keys; `run_fields` covers dt, t_final, gamma and formula.
void read_scenario(MapReader& r, ScenarioSpec& s, const std::string& base_dir, bool run_fields)
{
    r.get("name", s.name);
    if (r.get("patch_file", s.patch_file)) s.patch_file = resolve(s.patch_file, base_dir);
    r.get("box_lo", s.box_lo);
    r.get("box_hi", s.box_hi);
    r.get<std::array<int, 3>>(
        "elements", s.elements, [](const std::array<int, 3>& e) { return e[0] > 0 && e[1] > 0 && e[2] > 0; },
        "positive in every direction");
    r.get<int>("p", s.p, positive<int>(), "positive");
    r.get<int>("a", s.a, positive<int>(), "positive");
    r.get<int>("b", s.b, non_negative<int>(), "non-negative");
    r.get<int>("quad_points", s.quad_points, non_negative<int>(), "non-negative");

    if (YAML::Node m = r.child("material")) {
        MapReader mr(m, r.key_path("material"));
        mr.get<double>("rho0", s.model.rho0, positive<double>(), "positive");
        if (YAML::Node terms = mr.child("ogden")) {
            const std::string path = mr.key_path("ogden");
            if (!terms.IsSequence() || terms.size() == 0) {
                throw ConfigError("key '" + path + "': expected a non-empty list of {mu, alpha}", line_of(terms));
            }
            s.model.terms.clear();
            for (std::size_t k = 0; k < terms.size(); ++k) {
                MapReader tr(terms[k], path + "[" + std::to_string(k) + "]");
                OgdenTerm t;
                if (!tr.has("mu") || !tr.has("alpha")) {
                    throw ConfigError("'" + path + "' entries need both mu and alpha", line_of(terms[k]));
                }
                tr.get("mu", t.mu);
                tr.get<double>("alpha", t.alpha, [](const double& x) { return x != 0.0; }, "nonzero");
                tr.finish();
                s.model.terms.push_back(t);
            }
        }
        mr.finish();
    }

    if (YAML::Node iv = r.child("initial")) {
        MapReader ir(iv, r.key_path("initial"));
        get_enum(ir, "kind", s.initial.kind, parse_initial_velocity);
        ir.get("v0", s.initial.v0);
        ir.get("omega1", s.initial.omega1);
        ir.get("omega2", s.initial.omega2);
        ir.get<double>("length", s.initial.length, positive<double>(), "positive");
        ir.finish();
    }

    if (YAML::Node bf = r.child("body_force")) {
        MapReader br(bf, r.key_path("body_force"));
        get_enum(br, "kind", s.loads.body.kind, parse_body_force);
        read_harmonic(br, s.loads.body.h);
        br.finish();
    }

    if (YAML::Node tl = r.child("tractions")) {
        const std::string path = r.key_path("tractions");
        if (!tl.IsNull() && !tl.IsSequence()) throw ConfigError("key '" + path + "': expected a list", line_of(tl));
        s.loads.tractions.clear();
        for (std::size_t k = 0; tl.IsSequence() && k < tl.size(); ++k) {
            const std::string ep = path + "[" + std::to_string(k) + "]";
            MapReader tr(tl[k], ep);
            Traction t;
            if (!tr.has("face")) throw ConfigError("'" + ep + "' needs a face", line_of(tl[k]));
            t.face = face_from(tr.child("face"), tr.key_path("face"));
            read_harmonic(tr, t.h);
            tr.finish();
            s.loads.tractions.push_back(t);
        }
    }

    if (YAML::Node cl = r.child("clamped")) {
        const std::string path = r.key_path("clamped");
        if (!cl.IsNull() && !cl.IsSequence()) throw ConfigError("key '" + path + "': expected a list", line_of(cl));
        s.clamped.clear();
        for (std::size_t k = 0; cl.IsSequence() && k < cl.size(); ++k) {
            s.clamped.push_back(face_from(cl[k], path + "[" + std::to_string(k) + "]"));
        }
    }

    if (YAML::Node mon = r.child("monitor")) {
        if (mon.IsNull()) {
            s.has_monitor = false;
        } else {
            s.monitor = MapReader::convert<Vec3>(mon, r.key_path("monitor"));
            s.has_monitor = true;
        }
    }

    if (run_fields) {
        r.get<double>("dt", s.dt, positive<double>(), "positive");
        r.get<double>("t_final", s.t_final, non_negative<double>(), "non-negative");
        r.get<double>("gamma", s.gamma, non_negative<double>(), "non-negative");
        get_enum(r, "formula", s.formula, [](const std::string& x) { return parse_formula(x); });
    }
}

void read_solver(MapReader& r, RunConfig& c)
{
    r.get<double>("dt", c.spec.dt, positive<double>(), "positive");
    r.get<double>("t_final", c.spec.t_final, non_negative<double>(), "non-negative");
    r.get<double>("gamma", c.spec.gamma, non_negative<double>(), "non-negative");
    get_enum(r, "formula", c.spec.formula, [](const std::string& x) { return parse_formula(x); });
    r.get<int>("steps", c.steps, [](const int& v) { return v >= -1; }, "-1 or non-negative");
    r.get<double>("tol_r", c.solver.tol_r, positive<double>(), "positive");
    r.get<double>("tol_a", c.solver.tol_a, positive<double>(), "positive");
    r.get<int>("l_max", c.solver.l_max, positive<int>(), "positive");
    r.get<double>("tol_b", c.solver.tol_b, non_negative<double>(), "non-negative");
    get_enum(r, "elasticity", c.solver.elasticity, parse_elasticity);
    get_enum(r, "tangent", c.solver.tangent, parse_tangent_mode);
    get_enum(r, "failure", c.solver.failure, parse_failure_policy);
    r.get("parallel", c.solver.parallel);
}

YAML::Node load_yaml(const std::string& text)
{
    try {
        return YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError("malformed YAML: " + e.msg, e.mark.line + 1);
    }
}

// --- emission -------------------------------------------------------------

std::string num(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void emit_vec(YAML::Emitter& out, const Vec3& v)
{
    out << YAML::Flow << YAML::BeginSeq << num(v[0]) << num(v[1]) << num(v[2]) << YAML::EndSeq;
}

void emit_harmonic(YAML::Emitter& out, const Harmonic& h)
{
    out << YAML::Key << "c" << YAML::Value;
    emit_vec(out, h.c);
    out << YAML::Key << "a" << YAML::Value;
    emit_vec(out, h.a);
    out << YAML::Key << "b" << YAML::Value;
    emit_vec(out, h.b);
    out << YAML::Key << "omega" << YAML::Value << num(h.omega);
}

void emit_scenario(YAML::Emitter& out, const ScenarioSpec& s, bool run_fields)
{
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << s.name;
    out << YAML::Key << "patch_file" << YAML::Value << YAML::DoubleQuoted << s.patch_file;
    out << YAML::Key << "box_lo" << YAML::Value;
    emit_vec(out, s.box_lo);
    out << YAML::Key << "box_hi" << YAML::Value;
    emit_vec(out, s.box_hi);
    out << YAML::Key << "elements" << YAML::Value << YAML::Flow << YAML::BeginSeq << s.elements[0] << s.elements[1]
        << s.elements[2] << YAML::EndSeq;
    out << YAML::Key << "p" << YAML::Value << s.p;
    out << YAML::Key << "a" << YAML::Value << s.a;
    out << YAML::Key << "b" << YAML::Value << s.b;
    out << YAML::Key << "quad_points" << YAML::Value << s.quad_points;

    out << YAML::Key << "material" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "rho0" << YAML::Value << num(s.model.rho0);
    out << YAML::Key << "ogden" << YAML::Value << YAML::BeginSeq;
    for (const auto& t : s.model.terms) {
        out << YAML::Flow << YAML::BeginMap << YAML::Key << "mu" << YAML::Value << num(t.mu) << YAML::Key << "alpha"
            << YAML::Value << num(t.alpha) << YAML::EndMap;
    }
    out << YAML::EndSeq << YAML::EndMap;

    out << YAML::Key << "initial" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "kind" << YAML::Value << to_string(s.initial.kind);
    out << YAML::Key << "v0" << YAML::Value;
    emit_vec(out, s.initial.v0);
    out << YAML::Key << "omega1" << YAML::Value << num(s.initial.omega1);
    out << YAML::Key << "omega2" << YAML::Value << num(s.initial.omega2);
    out << YAML::Key << "length" << YAML::Value << num(s.initial.length);
    out << YAML::EndMap;

    out << YAML::Key << "body_force" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "kind" << YAML::Value << to_string(s.loads.body.kind);
    emit_harmonic(out, s.loads.body.h);
    out << YAML::EndMap;

    out << YAML::Key << "tractions" << YAML::Value << YAML::BeginSeq;
    for (const auto& t : s.loads.tractions) {
        out << YAML::BeginMap << YAML::Key << "face" << YAML::Value << to_string(t.face);
        emit_harmonic(out, t.h);
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;

    out << YAML::Key << "clamped" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (const auto& f : s.clamped) out << to_string(f);
    out << YAML::EndSeq;

    out << YAML::Key << "monitor" << YAML::Value;
    if (s.has_monitor) emit_vec(out, s.monitor);
    else out << YAML::Null;

    if (run_fields) {
        out << YAML::Key << "dt" << YAML::Value << num(s.dt);
        out << YAML::Key << "t_final" << YAML::Value << num(s.t_final);
        out << YAML::Key << "gamma" << YAML::Value << num(s.gamma);
        out << YAML::Key << "formula" << YAML::Value << to_string(s.formula);
    }
    out << YAML::EndMap;
}

}  // namespace

ElasticityVariant parse_elasticity(const std::string& name)
{
    if (name == "corrected") return ElasticityVariant::corrected;
    if (name == "conventional") return ElasticityVariant::conventional;
    throw ConfigError("unknown elasticity variant '" + name + "' (corrected|conventional)");
}

TangentMode parse_tangent_mode(const std::string& name)
{
    if (name == "analytic") return TangentMode::analytic;
    if (name == "finite_difference") return TangentMode::finite_difference;
    throw ConfigError("unknown tangent mode '" + name + "' (analytic|finite_difference)");
}

const char* to_string(TangentMode m) { return m == TangentMode::analytic ? "analytic" : "finite_difference"; }

SolverConfig RunConfig::solver_config() const
{
    SolverConfig c = solver;
    c.dt = spec.dt;
    c.t_final = spec.t_final;
    c.gamma = spec.gamma;
    c.formula = spec.formula;
    return c;
}

int RunConfig::total_steps() const { return steps >= 0 ? steps : solver_config().steps(); }

std::string RunConfig::validate() const
{
    const std::string warn = spec.validate();
    solver_config().validate();
    if (output.dir.empty()) throw ConfigError("output.dir is empty");
    if (output.snapshot_every < 0) throw ConfigError("output.snapshot_every must be non-negative");
    if (output.snapshot_samples < 1) throw ConfigError("output.snapshot_samples must be positive");
    return warn;
}

RunConfig default_config(const std::string& scenario)
{
    RunConfig c;
    c.scenario = scenario;
    c.spec = scenario_by_name(scenario);
    return c;
}

RunConfig parse_config(const std::string& text, const std::string& base_dir)
{
    const YAML::Node root = load_yaml(text);
    MapReader r(root, "");
    RunConfig c;
    get_enum(r, "scenario", c.scenario, [](const std::string& s) {
        scenario_by_name(s);
        return s;
    });
    if (r.get("scenario_file", c.scenario_file)) {
        if (r.has("scenario")) throw ConfigError("give either scenario or scenario_file", line_of(root["scenario_file"]));
        c.scenario_file = resolve(c.scenario_file, base_dir);
        std::ifstream in(c.scenario_file);
        if (!in) throw ConfigError("cannot open scenario file '" + c.scenario_file + "'", line_of(root["scenario_file"]));
        std::stringstream ss;
        ss << in.rdbuf();
        const std::string dir = std::filesystem::path(c.scenario_file).parent_path().string();
        c.spec = scenario_from_yaml(ss.str(), dir);
    } else {
        c.spec = scenario_by_name(c.scenario);
    }
    if (YAML::Node custom = r.child("custom")) {
        MapReader cr(custom, "custom");
        read_scenario(cr, c.spec, base_dir, false);
        cr.finish();
    }
    if (YAML::Node sv = r.child("solver")) {
        MapReader sr(sv, "solver");
        read_solver(sr, c);
        sr.finish();
    }
    if (YAML::Node out = r.child("output")) {
        MapReader orr(out, "output");
        orr.get("dir", c.output.dir);
        orr.get<int>("snapshot_every", c.output.snapshot_every, non_negative<int>(), "non-negative");
        orr.get<int>("snapshot_samples", c.output.snapshot_samples, positive<int>(), "positive");
        orr.finish();
    }
    r.finish();
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::filesystem::path(path).parent_path().string());
}

std::string config_to_yaml(const RunConfig& c)
{
    YAML::Emitter out;
    out << YAML::BeginMap;
    if (c.scenario_file.empty()) {
        out << YAML::Key << "scenario" << YAML::Value << c.scenario;
    } else {
        out << YAML::Key << "scenario_file" << YAML::Value << YAML::DoubleQuoted << c.scenario_file;
    }
    out << YAML::Key << "custom" << YAML::Value;
    emit_scenario(out, c.spec, false);

    const SolverConfig s = c.solver_config();
    out << YAML::Key << "solver" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "dt" << YAML::Value << num(s.dt);
    out << YAML::Key << "t_final" << YAML::Value << num(s.t_final);
    out << YAML::Key << "steps" << YAML::Value << c.steps;
    out << YAML::Key << "gamma" << YAML::Value << num(s.gamma);
    out << YAML::Key << "formula" << YAML::Value << to_string(s.formula);
    out << YAML::Key << "tol_r" << YAML::Value << num(s.tol_r);
    out << YAML::Key << "tol_a" << YAML::Value << num(s.tol_a);
    out << YAML::Key << "l_max" << YAML::Value << s.l_max;
    out << YAML::Key << "tol_b" << YAML::Value << num(s.tol_b);
    out << YAML::Key << "elasticity" << YAML::Value << to_string(s.elasticity);
    out << YAML::Key << "tangent" << YAML::Value << to_string(s.tangent);
    out << YAML::Key << "failure" << YAML::Value << to_string(s.failure);
    out << YAML::Key << "parallel" << YAML::Value << s.parallel;
    out << YAML::EndMap;

    out << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "dir" << YAML::Value << YAML::DoubleQuoted << c.output.dir;
    out << YAML::Key << "snapshot_every" << YAML::Value << c.output.snapshot_every;
    out << YAML::Key << "snapshot_samples" << YAML::Value << c.output.snapshot_samples;
    out << YAML::EndMap;
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

std::string scenario_to_yaml(const ScenarioSpec& spec)
{
    YAML::Emitter out;
    emit_scenario(out, spec, true);
    return std::string(out.c_str()) + "\n";
}

ScenarioSpec scenario_from_yaml(const std::string& text, const std::string& base_dir)
{
    const YAML::Node root = load_yaml(text);
    MapReader r(root, "");
    if (!r.has("name")) throw ConfigError("scenario description needs a name", line_of(root));
    ScenarioSpec s;
    s.model.terms.clear();
    read_scenario(r, s, base_dir, true);
    r.finish();
    s.validate();
    return s;
}

}  // namespace incel

#include "cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <json.hpp>
#include <numbers>
#include <optional>
#include <sstream>

#include "zeno/cavity1d.hpp"
#include "zeno/errors.hpp"
#include "zeno/formfactor.hpp"
#include "zeno/freedecay.hpp"
#include "zeno/io.hpp"
#include "zeno/projective.hpp"
#include "zeno/renorm.hpp"
#include "zeno/sweeps.hpp"
#include "zeno/timedomain.hpp"

namespace zeno::cli {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

struct Flags {
    std::string config;
    std::string output;
    bool json_summary = false;
    int threads = 1;
    bool flat = false;
    std::optional<double> gamma, delta, mu0, omega, detuning, t, tau_i, tau_r, mu, t_max, dt;
    std::optional<double> l, eta, x, g, mismatch;
    std::optional<int> n_modes;
    std::optional<std::string> method, mode;
};

struct Report {
    ojson params = ojson::object();
    ojson scalars = ojson::object();
    std::vector<std::string> files;
};

// ---- config access -----------------------------------------------------------

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

void allow_keys(const json& j, const std::string& path, const std::vector<std::string>& keys) {
    if (!j.is_object()) throw ConfigError(path.empty() ? "config" : path, "must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(keys.begin(), keys.end(), it.key()) == keys.end())
            throw ConfigError(join(path, it.key()), "unknown key");
}

std::optional<double> opt_num(const json& j, const std::string& path, const std::string& key) {
    if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return std::nullopt;
    const json& v = j.at(key);
    if (!v.is_number()) throw ConfigError(join(path, key), "must be a number");
    double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(join(path, key), "must be finite");
    return d;
}

double num(const json& j, const std::string& path, const std::string& key,
           std::optional<double> def = std::nullopt) {
    auto v = opt_num(j, path, key);
    if (v) return *v;
    if (def) return *def;
    throw ConfigError(join(path, key), "required");
}

int integer(const json& j, const std::string& path, const std::string& key, int def) {
    if (!j.is_object() || !j.contains(key)) return def;
    const json& v = j.at(key);
    if (!v.is_number_integer()) throw ConfigError(join(path, key), "must be an integer");
    return v.get<int>();
}

std::string str(const json& j, const std::string& path, const std::string& key,
                std::optional<std::string> def = std::nullopt) {
    if (!j.is_object() || !j.contains(key)) {
        if (def) return *def;
        throw ConfigError(join(path, key), "required");
    }
    const json& v = j.at(key);
    if (!v.is_string()) throw ConfigError(join(path, key), "must be a string");
    return v.get<std::string>();
}

std::vector<double> num_array(const json& v, const std::string& path) {
    if (!v.is_array()) throw ConfigError(path, "must be an array of numbers");
    std::vector<double> out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) throw ConfigError(path + "[" + std::to_string(i) + "]", "must be a number");
        out.push_back(v[i].get<double>());
    }
    return out;
}

// A grid is a number, an array, or {"min", "max", "n", "spacing": "linear" | "log"}.
std::vector<double> parse_grid(const json& v, const std::string& path, bool log_default) {
    if (v.is_number()) return {v.get<double>()};
    if (v.is_array()) {
        auto a = num_array(v, path);
        if (a.empty()) throw ConfigError(path, "must not be empty");
        return a;
    }
    allow_keys(v, path, {"min", "max", "n", "spacing"});
    double a = num(v, path, "min"), b = num(v, path, "max");
    int n = integer(v, path, "n", 0);
    if (n < 1) throw ConfigError(join(path, "n"), "must be a positive integer");
    std::string sp = str(v, path, "spacing", log_default ? "log" : "linear");
    if (sp == "log") {
        if (!(a > 0 && b > 0)) throw ConfigError(join(path, "min"), "log grid bounds must be positive");
        return logspace(a, b, n);
    }
    if (sp != "linear") throw ConfigError(join(path, "spacing"), "must be 'linear' or 'log'");
    return linspace(a, b, n);
}

std::string resolve_path(const std::string& base, const std::string& p) {
    std::filesystem::path fp(p);
    if (fp.is_absolute() || base.empty()) return p;
    return (std::filesystem::path(base) / fp).string();
}

FormFactor parse_ff(const json& j, const std::string& path, const std::string& base) {
    std::string type = str(j, path, "type");
    if (type == "lorentzian") {
        allow_keys(j, path, {"type", "gamma", "delta", "mu0"});
        return Lorentzian{num(j, path, "gamma", 1.0), num(j, path, "delta"), num(j, path, "mu0", 0.0)};
    }
    if (type == "flat") {
        allow_keys(j, path, {"type", "gamma", "cutoff", "center"});
        return Flat{num(j, path, "gamma", 1.0), opt_num(j, path, "cutoff"), num(j, path, "center", 0.0)};
    }
    if (type == "tabulated") {
        allow_keys(j, path, {"type", "file", "mu", "g2"});
        if (j.contains("file")) {
            try {
                return load_tabulated_csv(resolve_path(base, str(j, path, "file")));
            } catch (const ConfigError& e) {
                throw ConfigError(join(path, "file"), e.what());
            }
        }
        if (!j.contains("mu")) throw ConfigError(join(path, "file"), "required (or mu/g2 arrays)");
        if (!j.contains("g2")) throw ConfigError(join(path, "g2"), "required");
        return Tabulated{num_array(j.at("mu"), join(path, "mu")), num_array(j.at("g2"), join(path, "g2"))};
    }
    if (type == "leaky_cavity") {
        allow_keys(j, path, {"type", "g", "kappa", "omega0"});
        double g = num(j, path, "g"), kappa = num(j, path, "kappa");
        if (!(g > 0)) throw ConfigError(join(path, "g"), "must be positive");
        if (!(kappa > 0)) throw ConfigError(join(path, "kappa"), "must be positive");
        return leaky_cavity_form_factor(g, kappa, num(j, path, "omega0", 0.0));
    }
    if (type == "geometric_split") {
        allow_keys(j, path, {"type", "eps_inf", "base"});
        if (!j.contains("base")) throw ConfigError(join(path, "base"), "required");
        return make_geometric_split(parse_ff(j.at("base"), join(path, "base"), base),
                                    num(j, path, "eps_inf"));
    }
    throw ConfigError(join(path, "type"), "unknown form factor type '" + type + "'");
}

DetectorResponse parse_resp(const json& j, const std::string& path, const std::string& base) {
    std::string type = str(j, path, "type");
    if (type == "none") {
        allow_keys(j, path, {"type"});
        return NoMeasurement{};
    }
    if (type == "flat") {
        allow_keys(j, path, {"type", "tau_r"});
        return FlatResponse{num(j, path, "tau_r")};
    }
    if (type == "active_band") {
        allow_keys(j, path, {"type", "delta_d", "tau_r", "center"});
        return ActiveBand{num(j, path, "delta_d"), num(j, path, "tau_r"), opt_num(j, path, "center")};
    }
    if (type == "inactive_band") {
        allow_keys(j, path, {"type", "delta_d_bar", "tau_r", "center"});
        return InactiveBand{num(j, path, "delta_d_bar"), num(j, path, "tau_r"), opt_num(j, path, "center")};
    }
    if (type == "geometric") {
        allow_keys(j, path, {"type", "eps_inf", "tau_r"});
        return Geometric{num(j, path, "eps_inf"), num(j, path, "tau_r")};
    }
    if (type == "custom") {
        allow_keys(j, path, {"type", "file", "eps", "eta"});
        if (j.contains("file")) {
            try {
                return load_custom_response_csv(resolve_path(base, str(j, path, "file")));
            } catch (const ConfigError& e) {
                throw ConfigError(join(path, "file"), e.what());
            }
        }
        if (!j.contains("eps")) throw ConfigError(join(path, "file"), "required (or eps/eta arrays)");
        if (!j.contains("eta")) throw ConfigError(join(path, "eta"), "required");
        return CustomResponse{num_array(j.at("eps"), join(path, "eps")), num_array(j.at("eta"), join(path, "eta"))};
    }
    throw ConfigError(join(path, "type"), "unknown response type '" + type + "'");
}

// ---- parameter echo ----------------------------------------------------------

double r12(double v) { return std::stod(fmt(v)); }

ojson ff_json(const FormFactor& ff) {
    ojson o;
    if (auto* l = std::get_if<Lorentzian>(&ff)) {
        o["type"] = "lorentzian";
        o["gamma"] = r12(l->gamma);
        o["delta"] = r12(l->delta);
        o["mu0"] = r12(l->mu0);
    } else if (auto* f = std::get_if<Flat>(&ff)) {
        o["type"] = "flat";
        o["gamma"] = r12(f->gamma);
        if (f->cutoff) o["cutoff"] = r12(*f->cutoff);
        o["center"] = r12(f->center);
    } else if (auto* t = std::get_if<Tabulated>(&ff)) {
        o["type"] = "tabulated";
        o["samples"] = t->mu.size();
        o["mu_min"] = r12(t->mu.front());
        o["mu_max"] = r12(t->mu.back());
    } else if (auto* g = std::get_if<GeometricSplit>(&ff)) {
        o["type"] = "geometric_split";
        o["eps_inf"] = r12(g->eps_inf);
        o["base"] = ff_json(*g->base);
    }
    return o;
}

ojson resp_json(const DetectorResponse& r) {
    ojson o;
    if (std::holds_alternative<NoMeasurement>(r)) {
        o["type"] = "none";
    } else if (auto* f = std::get_if<FlatResponse>(&r)) {
        o["type"] = "flat";
        o["tau_r"] = r12(f->tau_r);
    } else if (auto* a = std::get_if<ActiveBand>(&r)) {
        o["type"] = "active_band";
        o["delta_d"] = r12(a->delta_d);
        o["tau_r"] = r12(a->tau_r);
        if (a->center) o["center"] = r12(*a->center);
    } else if (auto* b = std::get_if<InactiveBand>(&r)) {
        o["type"] = "inactive_band";
        o["delta_d_bar"] = r12(b->delta_d_bar);
        o["tau_r"] = r12(b->tau_r);
        if (b->center) o["center"] = r12(*b->center);
    } else if (auto* g = std::get_if<Geometric>(&r)) {
        o["type"] = "geometric";
        o["eps_inf"] = r12(g->eps_inf);
        o["tau_r"] = r12(g->tau_r);
    } else if (auto* c = std::get_if<CustomResponse>(&r)) {
        o["type"] = "custom";
        o["points"] = c->eps.size();
    }
    return o;
}

ojson grid_json(const std::vector<double>& g) {
    ojson o;
    o["n"] = g.size();
    o["min"] = r12(g.front());
    o["max"] = r12(g.back());
    return o;
}

std::string suffix(const std::vector<double>& dets, double d) {
    return dets.size() > 1 ? "@" + fmt(d) : "";
}

// ---- shared resolution -------------------------------------------------------

struct Input {
    json cfg = json::object();
    std::string base;
};

const json& section(const Input& in, const std::string& key) {
    static const json empty = json::object();
    return in.cfg.contains(key) ? in.cfg.at(key) : empty;
}

FormFactor resolve_ff(const Input& in, const Flags& f, FormFactor def) {
    FormFactor ff = in.cfg.contains("form_factor") ? parse_ff(in.cfg.at("form_factor"), "form_factor", in.base)
                                                   : std::move(def);
    if (f.flat) {
        double g = 1.0;
        if (auto* l = std::get_if<Lorentzian>(&ff)) g = l->gamma;
        if (auto* fl = std::get_if<Flat>(&ff)) g = fl->gamma;
        ff = Flat{g, std::nullopt, 0.0};
    }
    if (auto* l = std::get_if<Lorentzian>(&ff)) {
        if (f.gamma) l->gamma = *f.gamma;
        if (f.delta) l->delta = *f.delta;
        if (f.mu0) l->mu0 = *f.mu0;
    } else if (auto* fl = std::get_if<Flat>(&ff)) {
        if (f.gamma) fl->gamma = *f.gamma;
        if (f.delta) throw ConfigError("delta", "not used by a flat form factor");
        if (f.mu0) fl->center = *f.mu0;
    } else if (f.gamma || f.delta || f.mu0) {
        throw ConfigError("form_factor", "--gamma/--delta/--mu0 apply only to lorentzian or flat form factors");
    }
    validate(ff);
    return ff;
}

double ff_center(const FormFactor& ff) {
    if (auto* l = std::get_if<Lorentzian>(&ff)) return l->mu0;
    if (auto* f = std::get_if<Flat>(&ff)) return f->center;
    if (auto* g = std::get_if<GeometricSplit>(&ff)) return ff_center(*g->base);
    return 0.0;
}

double resolve_omega(const Input& in, const Flags& f, const FormFactor& ff) {
    const json& a = section(in, "atom");
    if (in.cfg.contains("atom")) allow_keys(a, "atom", {"omega"});
    double omega = num(a, "atom", "omega", ff_center(ff));
    if (f.omega) omega = *f.omega;
    if (f.detuning) omega = ff_center(ff) + *f.detuning;
    if (!std::isfinite(omega)) throw ConfigError("atom.omega", "must be finite");
    return omega;
}

// Detunings from the config list, the --detuning flag, or the atom's omega.
std::vector<double> resolve_detunings(const Input& in, const Flags& f, const FormFactor& ff) {
    if (f.detuning) return {*f.detuning};
    if (f.omega) return {*f.omega - ff_center(ff)};
    if (in.cfg.contains("detunings")) return parse_grid(in.cfg.at("detunings"), "detunings", false);
    return {resolve_omega(in, f, ff) - ff_center(ff)};
}

Lorentzian require_lorentzian(const FormFactor& ff) {
    if (auto* l = std::get_if<Lorentzian>(&ff)) return *l;
    throw ConfigError("form_factor.type", "this command requires a lorentzian form factor");
}

void write_output(Report& rep, const std::string& path, const std::string& text) {
    write_text_file(path, text);
    rep.files.push_back(path);
}

std::string output_path(const Input& in, const Flags& f) {
    if (!f.output.empty()) return f.output;
    if (in.cfg.contains("output")) return resolve_path(in.base, str(in.cfg, "", "output"));
    return "";
}

// ---- commands ----------------------------------------------------------------

Report cmd_free_decay(const Input& in, const Flags& f) {
    allow_keys(in.cfg, "", {"schema_version", "units", "command", "output", "form_factor", "atom",
                            "detunings", "times"});
    FormFactor ff = resolve_ff(in, f, Lorentzian{1.0, 20.0, 0.0});
    if (!std::holds_alternative<Lorentzian>(ff) && !std::holds_alternative<Flat>(ff))
        throw ConfigError("form_factor.type", "free-decay supports lorentzian or flat form factors");
    std::vector<double> dets = resolve_detunings(in, f, ff);
    std::vector<double> times;
    if (f.t) times = {*f.t};
    else if (in.cfg.contains("times")) times = parse_grid(in.cfg.at("times"), "times", false);
    for (double t : times)
        if (!(t >= 0)) throw ConfigError(f.t ? "t" : "times", "times must be non-negative");

    Report rep;
    rep.params["form_factor"] = ff_json(ff);
    ojson d = ojson::array();
    for (double x : dets) d.push_back(r12(x));
    rep.params["detunings"] = d;
    if (!times.empty()) rep.params["times"] = grid_json(times);

    const double c = ff_center(ff);
    const auto* lor = std::get_if<Lorentzian>(&ff);
    std::vector<std::string> header = {"detuning", "t", "s", "gamma_zeno", "gamma_con"};
    if (lor) header.push_back("s_pert");
    CsvBuilder csv(header);
    for (double det : dets) {
        double omega = c + det;
        std::string sfx = suffix(dets, det);
        SurvivalModel model = lor ? SurvivalModel::lorentzian(lor->gamma, lor->delta, omega, lor->mu0)
                                  : SurvivalModel::flat(std::get<Flat>(ff).gamma);
        rep.scalars["fgr_rate" + sfx] = r12(fgr_rate(ff, AtomParams{omega}));
        if (lor) {
            LorentzianPoles p = poles(lor->gamma, lor->delta, omega, lor->mu0);
            rep.scalars["lambda1_re" + sfx] = r12(p.lambda1.real());
            rep.scalars["lambda1_im" + sfx] = r12(p.lambda1.imag());
            rep.scalars["lambda2_re" + sfx] = r12(p.lambda2.real());
            rep.scalars["lambda2_im" + sfx] = r12(p.lambda2.imag());
            rep.scalars["degenerate" + sfx] = p.degenerate;
            if (!p.degenerate) {
                ExponentialStage st = exponential_stage(lor->gamma, lor->delta, omega, lor->mu0);
                rep.scalars["free_rate" + sfx] = r12(st.rate);
                rep.scalars["z_factor" + sfx] = r12(st.z_factor);
                rep.scalars["z_approx" + sfx] = r12(st.z_approx);
                rep.scalars["class" + sfx] = to_string(classify_by_z(st));
            }
        } else {
            rep.scalars["free_rate" + sfx] = r12(std::get<Flat>(ff).gamma);
        }
        for (double t : times) {
            double s = model.probability(t);
            double gz, gc;
            if (t > 0) {
                gz = gamma_zeno(model, t);
                gc = gamma_conventional(model, t);
            } else {
                gz = gc = lor ? 0.0 : std::get<Flat>(ff).gamma;
            }
            std::vector<double> row = {det, t, s, gz, gc};
            if (lor) row.push_back(lorentzian_perturbative_survival(*lor, omega, t));
            csv.row(row);
        }
        if (times.size() == 1) {
            double t = times[0];
            rep.scalars["t" + sfx] = r12(t);
            rep.scalars["s" + sfx] = r12(model.probability(t));
            if (t > 0) {
                rep.scalars["gamma_zeno" + sfx] = r12(gamma_zeno(model, t));
                rep.scalars["gamma_con" + sfx] = r12(gamma_conventional(model, t));
            }
        }
    }
    std::string out = output_path(in, f);
    if (!out.empty() && !times.empty()) write_output(rep, out, csv.str());
    return rep;
}

Report cmd_repeated(const Input& in, const Flags& f) {
    allow_keys(in.cfg, "", {"schema_version", "units", "command", "output", "form_factor", "atom",
                            "detunings", "tau_i", "scan"});
    FormFactor ff = resolve_ff(in, f, Lorentzian{1.0, 20.0, 0.0});
    if (!std::holds_alternative<Lorentzian>(ff) && !std::holds_alternative<Flat>(ff))
        throw ConfigError("form_factor.type", "repeated supports lorentzian or flat form factors");
    std::vector<double> dets = resolve_detunings(in, f, ff);
    std::vector<double> taus;
    if (f.tau_i) taus = {*f.tau_i};
    else if (in.cfg.contains("tau_i")) taus = parse_grid(in.cfg.at("tau_i"), "tau_i", true);
    else taus = logspace(1e-4, 1e2, 400);
    for (double t : taus)
        if (!(t > 0)) throw ConfigError(f.tau_i ? "tau-i" : "tau_i", "intervals must be positive");
    IntervalScan scan;
    if (in.cfg.contains("scan")) {
        const json& s = in.cfg.at("scan");
        allow_keys(s, "scan", {"tau_min", "tau_max", "points"});
        scan.tau_min = num(s, "scan", "tau_min", scan.tau_min);
        scan.tau_max = num(s, "scan", "tau_max", scan.tau_max);
        scan.points = integer(s, "scan", "points", scan.points);
        if (!(scan.tau_min > 0) || !(scan.tau_max > scan.tau_min))
            throw ConfigError("scan.tau_max", "need 0 < tau_min < tau_max");
        if (scan.points < 2) throw ConfigError("scan.points", "need at least two points");
    }

    Report rep;
    rep.params["form_factor"] = ff_json(ff);
    ojson d = ojson::array();
    for (double x : dets) d.push_back(r12(x));
    rep.params["detunings"] = d;
    rep.params["tau_i"] = grid_json(taus);

    const double c = ff_center(ff);
    const auto* lor = std::get_if<Lorentzian>(&ff);
    CsvBuilder csv({"detuning", "tau_i", "rate", "normalized"});
    for (double det : dets) {
        double omega = c + det;
        std::string sfx = suffix(dets, det);
        SurvivalModel model = lor ? SurvivalModel::lorentzian(lor->gamma, lor->delta, omega, lor->mu0)
                                  : SurvivalModel::flat(std::get<Flat>(ff).gamma);
        double free = std::get_if<Flat>(&ff) ? std::get<Flat>(ff).gamma
                                             : exponential_stage(lor->gamma, lor->delta, omega, lor->mu0).rate;
        for (double t : taus) {
            auto r = repeated_measurement(model, free, t);
            csv.row({det, t, r.rate, r.normalized});
        }
        rep.scalars["free_rate" + sfx] = r12(free);
        if (lor) {
            ExponentialStage st = exponential_stage(lor->gamma, lor->delta, omega, lor->mu0);
            rep.scalars["z_factor" + sfx] = r12(st.z_factor);
            rep.scalars["class" + sfx] = to_string(classify_by_z(st));
        }
        auto ts = find_transition_interval(model, free, scan);
        rep.scalars["tau_star" + sfx] = ts ? ojson(r12(*ts)) : ojson(nullptr);
        auto opt = optimum_interval(model, scan);
        if (opt) {
            rep.scalars["peak_tau" + sfx] = r12(opt->tau);
            rep.scalars["peak_normalized" + sfx] = r12(opt->rate / free);
        }
        if (taus.size() == 1) {
            auto r = repeated_measurement(model, free, taus[0]);
            rep.scalars["rate" + sfx] = r12(r.rate);
            rep.scalars["normalized" + sfx] = r12(r.normalized);
        }
    }
    std::string out = output_path(in, f);
    if (!out.empty()) write_output(rep, out, csv.str());
    return rep;
}

Report cmd_continuous(const Input& in, const Flags& f) {
    allow_keys(in.cfg, "", {"schema_version", "units", "command", "output", "form_factor", "atom",
                            "detunings", "tau_r"});
    Lorentzian lor = require_lorentzian(resolve_ff(in, f, Lorentzian{1.0, 20.0, 0.0}));
    FormFactor ff = lor;
    std::vector<double> dets = resolve_detunings(in, f, ff);
    std::vector<double> taus;
    if (f.tau_r) taus = {*f.tau_r};
    else if (in.cfg.contains("tau_r")) taus = parse_grid(in.cfg.at("tau_r"), "tau_r", true);
    else taus = logspace(1e-4, 1e1, 400);
    for (double t : taus)
        if (!(t > 0)) throw ConfigError(f.tau_r ? "tau-r" : "tau_r", "response times must be positive");

    Report rep;
    rep.params["form_factor"] = ff_json(ff);
    ojson d = ojson::array();
    for (double x : dets) d.push_back(r12(x));
    rep.params["detunings"] = d;
    rep.params["tau_r"] = grid_json(taus);

    CsvBuilder csv({"detuning", "tau_r", "rate", "normalized"});
    for (double det : dets) {
        std::string sfx = suffix(dets, det);
        for (double t : taus)
            csv.row({det, t, flat_response_rate(lor.gamma, lor.delta, det, t),
                     flat_response_normalized_rate(lor.gamma, lor.delta, det, t)});
        rep.scalars["free_rate" + sfx] = r12(fgr_rate(ff, AtomParams{lor.mu0 + det}));
        auto pb = phase_boundary_flat(det, lor.delta);
        rep.scalars["boundary_tau_r" + sfx] = pb ? ojson(r12(*pb)) : ojson(nullptr);
        auto opt = optimum_tau_flat(det, lor.delta);
        if (opt) {
            rep.scalars["optimum_tau_r" + sfx] = r12(opt->tau_r);
            rep.scalars["max_ratio" + sfx] = r12(opt->max_ratio);
            rep.scalars["max_enhancement" + sfx] = r12(opt->max_enhancement);
        }
        if (taus.size() == 1) {
            rep.scalars["rate" + sfx] = r12(flat_response_rate(lor.gamma, lor.delta, det, taus[0]));
            rep.scalars["normalized" + sfx] =
                r12(flat_response_normalized_rate(lor.gamma, lor.delta, det, taus[0]));
        }
    }
    std::string out = output_path(in, f);
    if (!out.empty()) write_output(rep, out, csv.str());
    return rep;
}

std::optional<double> closed_form_rate(const FormFactor& ff, const DetectorResponse& resp, double omega) {
    if (std::holds_alternative<NoMeasurement>(resp)) return fgr_rate(ff, AtomParams{omega});
    if (auto* l = std::get_if<Lorentzian>(&ff)) {
        if (auto* fr = std::get_if<FlatResponse>(&resp))
            return flat_response_rate(l->gamma, l->delta, omega - l->mu0, fr->tau_r);
        if (auto* g = std::get_if<Geometric>(&resp))
            return geometric_rate(l->gamma, l->delta, omega - l->mu0, g->tau_r, g->eps_inf);
    }
    if (auto* fl = std::get_if<Flat>(&ff); fl && !fl->cutoff) {
        if (auto* a = std::get_if<ActiveBand>(&resp); a && a->center.value_or(omega) == omega)
            return banded_rate(fl->gamma, a->delta_d, a->tau_r);
        if (auto* b = std::get_if<InactiveBand>(&resp); b && b->center.value_or(omega) == omega)
            return false_measurement_rate(fl->gamma, b->delta_d_bar, b->tau_r);
        if (std::holds_alternative<FlatResponse>(resp) || std::holds_alternative<Geometric>(resp))
            return fl->gamma;
    }
    return std::nullopt;
}

DetectorResponse resolve_resp(const Input& in, const Flags& f) {
    DetectorResponse resp = in.cfg.contains("response") ? parse_resp(in.cfg.at("response"), "response", in.base)
                                                        : DetectorResponse{NoMeasurement{}};
    if (f.tau_r) {
        std::visit([&](auto& r) {
            if constexpr (requires { r.tau_r; }) r.tau_r = *f.tau_r;
            else if (std::holds_alternative<NoMeasurement>(resp)) resp = FlatResponse{*f.tau_r};
            else throw ConfigError("tau-r", "not applicable to a custom response");
        }, resp);
    }
    validate(resp);
    return resp;
}

Report cmd_renorm_ff(const Input& in, const Flags& f) {
    allow_keys(in.cfg, "", {"schema_version", "units", "command", "output", "form_factor", "response",
                            "atom", "mu"});
    FormFactor ff = resolve_ff(in, f, Flat{1.0, std::nullopt, 0.0});
    DetectorResponse resp = resolve_resp(in, f);
    double omega = resolve_omega(in, f, ff);
    AtomParams atom{omega};
    build_channels(ff, resp, atom);
    std::vector<double> mus;
    if (f.mu) mus = {*f.mu};
    else if (in.cfg.contains("mu")) mus = parse_grid(in.cfg.at("mu"), "mu", false);
    else mus = linspace(omega - 50, omega + 50, 201);

    Report rep;
    rep.params["form_factor"] = ff_json(ff);
    rep.params["response"] = resp_json(resp);
    rep.params["omega"] = r12(omega);
    rep.params["mu"] = grid_json(mus);

    CsvBuilder csv({"mu", "g2", "g2_bar"});
    for (double mu : mus) csv.row({mu, evaluate_or_zero(ff, mu), renormalized_density(ff, resp, atom, mu)});
    rep.scalars["fgr_rate"] = r12(fgr_rate(ff, atom));
    rep.scalars["measured_rate"] = r12(measured_rate(ff, resp, atom));
    if (auto cf = closed_form_rate(ff, resp, omega)) rep.scalars["closed_form_rate"] = r12(*cf);
    if (mus.size() == 1) rep.scalars["g2_bar"] = r12(renormalized_density(ff, resp, atom, mus[0]));
    std::string out = output_path(in, f);
    if (!out.empty()) write_output(rep, out, csv.str());
    return rep;
}

Integrator parse_method(const std::string& m, const std::string& field) {
    if (m == "auto") return Integrator::Auto;
    if (m == "rk4") return Integrator::Rk4;
    if (m == "expm") return Integrator::Expm;
    throw ConfigError(field, "must be 'auto', 'rk4' or 'expm'");
}

Report cmd_evolve(const Input& in, const Flags& f) {
    allow_keys(in.cfg, "", {"schema_version", "units", "command", "output", "form_factor", "response",
                            "atom", "lattice", "rate_window"});
    FormFactor ff = resolve_ff(in, f, Lorentzian{1.0, 20.0, 0.0});
    DetectorResponse resp = resolve_resp(in, f);
    double omega = resolve_omega(in, f, ff);
    AtomParams atom{omega};
    build_channels(ff, resp, atom);

    const json& lat = section(in, "lattice");
    if (in.cfg.contains("lattice"))
        allow_keys(lat, "lattice", {"eps_min", "eps_max", "n_modes", "dt", "t_max", "samples", "method"});
    double t_max = f.t_max ? *f.t_max : num(lat, "lattice", "t_max", 5.0);
    if (!(t_max > 0)) throw ConfigError("lattice.t_max", "must be positive");
    LatticeConfig cfg = default_lattice(ff, resp, atom, t_max);
    cfg.eps_min = num(lat, "lattice", "eps_min", cfg.eps_min);
    cfg.eps_max = num(lat, "lattice", "eps_max", cfg.eps_max);
    cfg.n_modes = integer(lat, "lattice", "n_modes", cfg.n_modes);
    cfg.dt = num(lat, "lattice", "dt", 0.0);
    cfg.samples = integer(lat, "lattice", "samples", cfg.samples);
    cfg.method = parse_method(str(lat, "lattice", "method", "auto"), "lattice.method");
    if (f.n_modes) cfg.n_modes = *f.n_modes;
    if (f.dt) cfg.dt = *f.dt;
    if (f.method) cfg.method = parse_method(*f.method, "method");
    validate_lattice(cfg, ff, resp, atom);

    std::optional<std::pair<double, double>> window;
    if (in.cfg.contains("rate_window")) {
        const json& w = in.cfg.at("rate_window");
        allow_keys(w, "rate_window", {"t0", "t1"});
        window = {num(w, "rate_window", "t0"), num(w, "rate_window", "t1")};
        if (!(window->second > window->first) || window->first < 0 || window->second > cfg.t_max)
            throw ConfigError("rate_window.t1", "window must satisfy 0 <= t0 < t1 <= t_max");
    }

    Report rep;
    rep.params["form_factor"] = ff_json(ff);
    rep.params["response"] = resp_json(resp);
    rep.params["omega"] = r12(omega);
    ojson l;
    l["eps_min"] = r12(cfg.eps_min);
    l["eps_max"] = r12(cfg.eps_max);
    l["n_modes"] = cfg.n_modes;
    l["t_max"] = r12(cfg.t_max);
    l["samples"] = cfg.samples;
    rep.params["lattice"] = l;

    Trajectory tr = evolve(ff, resp, atom, cfg);
    rep.scalars["method"] = to_string(tr.method);
    rep.scalars["dt"] = r12(tr.dt);
    rep.scalars["s_final"] = r12(tr.s.back());
    rep.scalars["eps_final"] = r12(tr.eps.back());
    rep.scalars["r_final"] = r12(tr.r.back());
    rep.scalars["max_conservation_error"] = r12(tr.max_conservation_error);
    if (window) rep.scalars["late_rate"] = r12(late_rate(tr, window->first, window->second));
    if (auto cf = closed_form_rate(ff, resp, omega)) rep.scalars["closed_form_rate"] = r12(*cf);
    std::string out = output_path(in, f);
    if (!out.empty()) write_output(rep, out, trajectory_csv(tr));
    return rep;
}

Report cmd_phase_diagram(const Input& in, const Flags& f) {
    allow_keys(in.cfg, "", {"schema_version", "units", "command", "output", "form_factor", "mode",
                            "detunings", "taus", "threads"});
    Lorentzian lor = require_lorentzian(resolve_ff(in, f, Lorentzian{1.0, 20.0, 0.0}));
    std::string mode = f.mode ? *f.mode : str(in.cfg, "", "mode", "continuous");
    if (mode != "repeated" && mode != "continuous")
        throw ConfigError(f.mode ? "mode" : "mode", "must be 'repeated' or 'continuous'");
    std::vector<double> dets = in.cfg.contains("detunings")
                                   ? parse_grid(in.cfg.at("detunings"), "detunings", false)
                                   : linspace(0, 4 * lor.delta, 81);
    std::vector<double> taus = in.cfg.contains("taus") ? parse_grid(in.cfg.at("taus"), "taus", true)
                                                       : logspace(1e-4, 1e0, 200);
    SweepOptions opts;
    opts.threads = in.cfg.contains("threads") ? integer(in.cfg, "", "threads", 1) : 1;
    if (f.threads != 1) opts.threads = f.threads;
    if (opts.threads < 1) throw ConfigError("threads", "must be >= 1");

    Report rep;
    rep.params["form_factor"] = ff_json(lor);
    rep.params["mode"] = mode;
    rep.params["detunings"] = grid_json(dets);
    rep.params["taus"] = grid_json(taus);

    SweepResult r;
    try {
        r = mode == "repeated" ? sweep_repeated(lor.gamma, lor.delta, dets, taus, opts)
                               : sweep_continuous(lor.gamma, lor.delta, dets, taus, opts);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("taus", e.what());
    }
    rep.scalars["rows"] = r.axis1.size();
    rep.scalars["columns"] = r.axis2.size();
    rep.scalars["boundary_points"] = r.boundary.size();
    rep.scalars["optimum_points"] = r.optimum.size();
    std::string out = output_path(in, f);
    if (!out.empty()) {
        std::filesystem::path dir(out);
        write_output(rep, (dir / "values.csv").string(), sweep_values_csv(r));
        write_output(rep, (dir / "boundary.csv").string(), sweep_boundary_csv(r));
        write_output(rep, (dir / "optimum.csv").string(), sweep_optimum_csv(r));
    }
    return rep;
}

Report cmd_cavity1d(const Input& in, const Flags& f) {
    allow_keys(in.cfg, "", {"schema_version", "units", "command", "output", "cavity", "x"});
    const json& c = section(in, "cavity");
    if (in.cfg.contains("cavity")) allow_keys(c, "cavity", {"l", "eta", "lambda_a", "kappa"});
    if (opt_num(c, "cavity", "kappa").value_or(0.0) != 0.0)
        throw ConfigError("cavity.kappa", "only the non-absorptive case kappa = 0 is supported");
    SlabConfig cfg{num(c, "cavity", "l", 1.125), num(c, "cavity", "eta", 1.5), num(c, "cavity", "lambda_a", 1.0)};
    if (f.l) cfg.l = *f.l;
    if (f.eta) cfg.eta_idx = *f.eta;
    validate(cfg);
    std::vector<double> xs;
    if (f.x) xs = {*f.x};
    else if (in.cfg.contains("x")) xs = parse_grid(in.cfg.at("x"), "x", false);
    else xs = linspace(0, 3 * cfg.lambda_a, 601);

    Report rep;
    ojson p;
    p["l"] = r12(cfg.l);
    p["eta"] = r12(cfg.eta_idx);
    p["lambda_a"] = r12(cfg.lambda_a);
    rep.params["cavity"] = p;
    rep.params["x"] = grid_json(xs);
    std::vector<double> prof = decay_rate_profile(cfg, xs);
    rep.scalars["min_ratio"] = r12(*std::min_element(prof.begin(), prof.end()));
    rep.scalars["max_ratio"] = r12(*std::max_element(prof.begin(), prof.end()));
    if (xs.size() == 1) rep.scalars["rate_ratio"] = r12(prof[0]);
    std::string out = output_path(in, f);
    if (!out.empty()) write_output(rep, out, profile_csv(cfg, xs));
    return rep;
}

Report cmd_pdc(const Input& in, const Flags& f) {
    allow_keys(in.cfg, "", {"schema_version", "units", "command", "output", "pdc", "times"});
    const json& p = section(in, "pdc");
    if (in.cfg.contains("pdc")) allow_keys(p, "pdc", {"g", "mismatch"});
    PdcParams pdc{num(p, "pdc", "g", 1.0), num(p, "pdc", "mismatch", 0.0)};
    if (f.g) pdc.g = *f.g;
    if (f.mismatch) pdc.mismatch = *f.mismatch;
    if (!(pdc.g > 0)) throw ConfigError("pdc.g", "must be positive");
    std::vector<double> ts;
    if (f.t) ts = {*f.t};
    else if (in.cfg.contains("times")) ts = parse_grid(in.cfg.at("times"), "times", false);
    else ts = linspace(0, 5, 501);
    for (double t : ts)
        if (!(t >= 0)) throw ConfigError(f.t ? "t" : "times", "times must be non-negative");

    Report rep;
    rep.params["g"] = r12(pdc.g);
    rep.params["mismatch"] = r12(pdc.mismatch);
    rep.params["times"] = grid_json(ts);
    CsvBuilder csv({"t", "s"});
    for (double t : ts) csv.row({t, pdc_survival(pdc, t)});
    rep.scalars["degenerate"] = pdc_degenerate(pdc);
    rep.scalars["s_final"] = r12(pdc_survival(pdc, ts.back()));
    if (ts.size() == 1) rep.scalars["s"] = r12(pdc_survival(pdc, ts[0]));
    std::string out = output_path(in, f);
    if (!out.empty()) write_output(rep, out, csv.str());
    return rep;
}

// ---- driver ------------------------------------------------------------------

Input load_config(const std::string& path, const std::string& command) {
    Input in;
    if (path.empty()) return in;
    std::string text = read_text_file(path);
    try {
        in.cfg = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("config", std::string("invalid JSON: ") + e.what());
    }
    if (!in.cfg.is_object()) throw ConfigError("config", "top level must be an object");
    in.base = std::filesystem::path(path).parent_path().string();
    if (!in.cfg.contains("schema_version")) throw ConfigError("schema_version", "required");
    if (!in.cfg.at("schema_version").is_number_integer() || in.cfg.at("schema_version").get<int>() != kSchemaVersion)
        throw ConfigError("schema_version", "must be " + std::to_string(kSchemaVersion));
    if (in.cfg.contains("units")) {
        const json& u = in.cfg.at("units");
        allow_keys(u, "units", {"energy", "time"});
        if (str(u, "units", "energy", "gamma") != "gamma")
            throw ConfigError("units.energy", "only 'gamma' is supported");
        if (auto tu = str(u, "units", "time", "1/gamma"); tu != "1/gamma" && tu != "inverse_gamma")
            throw ConfigError("units.time", "only '1/gamma' is supported");
    }
    if (in.cfg.contains("command") && str(in.cfg, "", "command") != command)
        throw ConfigError("command", "config is for '" + str(in.cfg, "", "command") + "', not '" + command + "'");
    return in;
}

std::string one_line(const std::string& command, const Report& rep) {
    std::ostringstream ss;
    ss << command;
    for (auto it = rep.scalars.begin(); it != rep.scalars.end(); ++it) {
        ss << ' ' << it.key() << '=';
        const ojson& v = it.value();
        if (v.is_number_float()) ss << fmt(v.get<double>());
        else if (v.is_string()) ss << v.get<std::string>();
        else if (v.is_null()) ss << "none";
        else ss << v.dump();
    }
    return ss.str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Decay of an unstable state under measurement", "zeno"};
    app.require_subcommand(1);
    Flags f;

    auto common = [&](CLI::App* s) {
        s->add_option("--config", f.config, "JSON scenario file");
        s->add_option("--output", f.output, "Output file (directory for phase-diagram)");
        s->add_flag("--json-summary", f.json_summary, "Print a JSON summary instead of one line");
    };
    auto lorentz = [&](CLI::App* s) {
        s->add_option("--gamma", f.gamma, "Coupling rate gamma");
        s->add_option("--delta", f.delta, "Lorentzian half-width");
        s->add_option("--mu0", f.mu0, "Form factor center");
    };

    auto* fd = app.add_subcommand("free-decay", "Exact unobserved decay");
    common(fd);
    lorentz(fd);
    fd->add_flag("--flat", f.flat, "Use a flat form factor");
    fd->add_option("--omega", f.omega, "Atomic transition energy");
    fd->add_option("--detuning", f.detuning, "Omega - mu0");
    fd->add_option("--t", f.t, "Single evaluation time");

    auto* rp = app.add_subcommand("repeated", "Repeated instantaneous measurements");
    common(rp);
    lorentz(rp);
    rp->add_flag("--flat", f.flat, "Use a flat form factor");
    rp->add_option("--omega", f.omega, "Atomic transition energy");
    rp->add_option("--detuning", f.detuning, "Omega - mu0");
    rp->add_option("--tau-i", f.tau_i, "Single measurement interval");

    auto* co = app.add_subcommand("continuous", "Continuous measurement with flat response");
    common(co);
    lorentz(co);
    co->add_option("--detuning", f.detuning, "Omega - mu0");
    co->add_option("--tau-r", f.tau_r, "Single response time");

    auto* rf = app.add_subcommand("renorm-ff", "Renormalized form factor and measured rate");
    common(rf);
    lorentz(rf);
    rf->add_flag("--flat", f.flat, "Use a flat form factor");
    rf->add_option("--omega", f.omega, "Atomic transition energy");
    rf->add_option("--detuning", f.detuning, "Omega - mu0");
    rf->add_option("--tau-r", f.tau_r, "Detector response time");
    rf->add_option("--mu", f.mu, "Single evaluation energy");

    auto* ev = app.add_subcommand("evolve", "Time-domain lattice integration");
    common(ev);
    lorentz(ev);
    ev->add_flag("--flat", f.flat, "Use a flat form factor");
    ev->add_option("--omega", f.omega, "Atomic transition energy");
    ev->add_option("--detuning", f.detuning, "Omega - mu0");
    ev->add_option("--tau-r", f.tau_r, "Detector response time");
    ev->add_option("--t-max", f.t_max, "Integration horizon");
    ev->add_option("--n-modes", f.n_modes, "Lattice modes");
    ev->add_option("--dt", f.dt, "Integrator step");
    ev->add_option("--method", f.method, "auto, rk4 or expm");

    auto* pd = app.add_subcommand("phase-diagram", "Normalized-rate sweeps and phase boundary");
    common(pd);
    lorentz(pd);
    pd->add_option("--mode", f.mode, "repeated or continuous");
    pd->add_option("--threads", f.threads, "Worker threads");

    auto* cv = app.add_subcommand("cavity1d", "Position-dependent rate between dielectric slabs");
    common(cv);
    cv->add_option("--l", f.l, "Gap length in units of lambda_a");
    cv->add_option("--eta", f.eta, "Refractive index");
    cv->add_option("--x", f.x, "Single position");

    auto* pc = app.add_subcommand("pdc", "Parametric down-conversion survival");
    common(pc);
    pc->add_option("--g", f.g, "Pump-induced coupling");
    pc->add_option("--mismatch", f.mismatch, "Phase mismatch energy");
    pc->add_option("--t", f.t, "Single evaluation time");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();  // program name
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }

    std::string command = app.get_subcommands().front()->get_name();
    try {
        Input in = load_config(f.config, command);
        Report rep;
        if (command == "free-decay") rep = cmd_free_decay(in, f);
        else if (command == "repeated") rep = cmd_repeated(in, f);
        else if (command == "continuous") rep = cmd_continuous(in, f);
        else if (command == "renorm-ff") rep = cmd_renorm_ff(in, f);
        else if (command == "evolve") rep = cmd_evolve(in, f);
        else if (command == "phase-diagram") rep = cmd_phase_diagram(in, f);
        else if (command == "cavity1d") rep = cmd_cavity1d(in, f);
        else rep = cmd_pdc(in, f);
        if (f.json_summary) {
            ojson s;
            s["command"] = command;
            s["params"] = rep.params;
            s["scalars"] = rep.scalars;
            ojson files = ojson::array();
            for (auto& p : rep.files) files.push_back(p);
            s["files"] = files;
            out << s.dump(2) << '\n';
        } else {
            out << one_line(command, rep) << '\n';
        }
        return 0;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "numeric error: " << e.what() << '\n';
        return 3;
    }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::vector<std::string> args(argv, argv + argc);
    return run(args, out, err);
}

}  // namespace zeno::cli

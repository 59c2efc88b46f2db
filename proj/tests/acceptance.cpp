// Acceptance report: one PASS/FAIL line per criterion.
// Usage: zeno_acceptance [--expect-fail N]... ; exits non-zero only on an unexpected outcome.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "zeno/cavity1d.hpp"
#include "zeno/formfactor.hpp"
#include "zeno/freedecay.hpp"
#include "zeno/io.hpp"
#include "zeno/projective.hpp"
#include "zeno/quadrature.hpp"
#include "zeno/renorm.hpp"
#include "zeno/sweeps.hpp"
#include "zeno/timedomain.hpp"

using namespace zeno;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::string fmt3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Least-squares slope of -ln s over [t0, t1].
double slope(const Trajectory& tr, double t0, double t1) { return late_rate(tr, t0, t1); }

Outcome c1() {
    Outcome o{true, ""};
    const double want[3] = {1.0, 0.5, 0.2};
    for (int k = 0; k < 3; ++k) {
        double d = 20.0 * k;
        double r = fgr_rate(Lorentzian{1.0, 20.0, 0.0}, AtomParams{d});
        o.pass = o.pass && rel(r, want[k]) <= 1e-12;
        o.detail += "rate(" + fmt3(d) + ")=" + fmt(r) + " ";
    }
    return o;
}

Outcome c2() {
    Outcome o{true, ""};
    for (int k = 0; k < 3; ++k) {
        double d = 20.0 * k;
        auto p = poles(1.0, 20.0, d, 0.0);
        double exact = -2 * p.lambda1.imag();
        double fgr = fgr_rate(Lorentzian{1.0, 20.0, 0.0}, AtomParams{d});
        double e = rel(exact, fgr);
        o.pass = o.pass && e <= 0.05;
        o.detail += "dev(" + fmt3(d) + ")=" + fmt3(e) + " ";
    }
    return o;
}

Outcome c3() {
    auto st = exponential_stage(1.0, 20.0, 40.0, 0.0);
    auto model = SurvivalModel::lorentzian(1.0, 20.0, 40.0, 0.0);
    IntervalScan scan;
    scan.tau_min = 1e-3;
    scan.tau_max = 10;
    auto opt = optimum_interval(model, scan);
    if (!opt) return {false, "no interior maximum"};
    bool ok = std::abs(opt->tau - 0.066) <= 0.1 * 0.066 && opt->rate > st.rate;
    return {ok, "argmax tau_i=" + fmt3(opt->tau) + " peak=" + fmt3(opt->rate) +
                    " free=" + fmt3(st.rate)};
}

Outcome c4() {
    auto model = SurvivalModel::flat(1.0);
    double worst = 0;
    for (double t : {1e-3, 1.0, 1e3}) worst = std::max(worst, std::abs(decay_rate_repeated(model, t) - 1.0));
    return {worst <= 1e-10, "max |Gamma-gamma|=" + fmt3(worst)};
}

Outcome c5() {
    auto opt = optimum_tau_flat(40.0, 20.0);
    if (!opt) return {false, "closed form reports no optimum"};
    auto taus = logspace(1e-3, 1.0, 301);
    SweepResult r = sweep_continuous(1.0, 20.0, {40.0}, taus);
    if (r.optimum.empty()) return {false, "sweep found no optimum"};
    double sw = r.optimum[0].tau;
    bool ok = rel(opt->tau_r, 0.025) <= 1e-12 && rel(sw, 0.025) <= 0.02;
    return {ok, "closed form=" + fmt(opt->tau_r) + " sweep=" + fmt3(sw)};
}

Outcome c6() {
    std::vector<double> dets;
    for (int i = 1; i <= 60; ++i) dets.push_back(20.0 + i);
    auto taus = logspace(1e-4, 1.0, 200);
    SweepResult r = sweep_continuous(1.0, 20.0, dets, taus);
    double worst = 0;
    size_t matched = 0;
    for (const auto& b : r.boundary) {
        auto pb = phase_boundary_flat(b.detuning, 20.0);
        if (!pb) return {false, "closed form missing at detuning " + fmt(b.detuning)};
        worst = std::max(worst, std::abs(b.tau - *pb));
        ++matched;
    }
    bool ok = matched == dets.size() && worst <= 1e-6;
    return {ok, "points=" + std::to_string(matched) + "/" + std::to_string(dets.size()) +
                    " max |tau-tau_pb|=" + fmt3(worst)};
}

Trajectory run_band(const DetectorResponse& resp, double t_max, int samples, double half = 0) {
    FormFactor ff = Flat{1.0, std::nullopt, 0.0};
    AtomParams atom{0.0};
    LatticeConfig cfg = default_lattice(ff, resp, atom, t_max);
    cfg.samples = samples;
    if (half > 0) {
        // band-edge ringing has period 2pi/half; a wider band suppresses it in the early window
        cfg.eps_min = -half;
        cfg.eps_max = half;
        cfg.n_modes = static_cast<int>(20 * half) + 1;
    }
    return evolve(ff, resp, atom, cfg);
}

Outcome c7() {
    Trajectory tr = run_band(ActiveBand{10.0, 0.05, std::nullopt}, 3.0, 1501, 400.0);
    double late = slope(tr, 0.5, 3.0);
    double early = slope(tr, 0.01, 0.03);
    double cross = -1;
    for (size_t i = 1; i < tr.times.size(); ++i) {
        if (tr.times[i - 1] < 0.03) continue;
        double k = (std::log(tr.s[i - 1]) - std::log(tr.s[i])) / (tr.times[i] - tr.times[i - 1]);
        if (k < 0.75) {
            cross = 0.5 * (tr.times[i - 1] + tr.times[i]);
            break;
        }
    }
    bool ok = rel(late, 0.5) <= 0.07 && rel(early, 1.0) <= 0.03 && cross >= 0.05 && cross <= 0.2;
    return {ok, "late=" + fmt3(late) + " early=" + fmt3(early) + " crossover=" + fmt3(cross)};
}

Outcome c8() {
    Trajectory tr = run_band(ActiveBand{2.0, 0.5, std::nullopt}, 25.0, 501);
    double r = tr.r.back();
    return {std::abs(r - 0.84) <= 0.01, "r(25)=" + fmt3(r) + " s(25)=" + fmt3(tr.s.back())};
}

Outcome c9() {
    Trajectory tr = run_band(InactiveBand{10.0, 1.0 / 30.0, std::nullopt}, 4.0, 801);
    double late = slope(tr, 0.5, 2.0);
    double r = tr.r.back();
    double cf = false_measurement_rate(1.0, 10.0, 1.0 / 30.0);
    double oracle = 2.0 - (2.0 / kPi) * std::atan(2.0 / 3.0);
    bool ok = rel(late, 1.6) <= 0.07 && std::abs(r - 0.40) <= 0.05 && std::abs(cf - oracle) <= 1e-4;
    return {ok, "late=" + fmt3(late) + " r(4)=" + fmt3(r) + " closed form=" + fmt(cf) +
                    " oracle=" + fmt(oracle)};
}

Outcome c10() {
    FormFactor ff = Lorentzian{1.0, 20.0, 0.0};
    AtomParams atom{0.0};
    LatticeConfig cfg = default_lattice(ff, NoMeasurement{}, atom, 5.0);
    Trajectory tr = evolve(ff, NoMeasurement{}, atom, cfg);
    auto p = poles(1.0, 20.0, 0.0, 0.0);
    double worst = 0;
    for (size_t i = 0; i < tr.times.size(); ++i)
        worst = std::max(worst, std::abs(tr.s[i] - survival_probability(p, 1.0, 20.0, 0.0, tr.times[i])));
    return {worst <= 1e-3, "max |s_lattice-s_exact|=" + fmt3(worst) + " modes=" +
                               std::to_string(tr.lattice_modes)};
}

Outcome c11(const std::string& config_dir, const std::string& out_dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(config_dir))
        if (e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    double worst = 0;
    int n = 0;
    for (const auto& p : files) {
        auto cfg = nlohmann::json::parse(std::ifstream(p));
        if (cfg.value("command", "") != "evolve") continue;
        std::ostringstream out, err;
        std::string dst = (std::filesystem::path(out_dir) / (p.stem().string() + ".csv")).string();
        int rc = cli::run({"zeno", "evolve", "--config", p.string(), "--output", dst, "--json-summary"}, out, err);
        if (rc != 0) return {false, p.filename().string() + " failed: " + err.str()};
        double e = nlohmann::json::parse(out.str())["scalars"]["max_conservation_error"].get<double>();
        worst = std::max(worst, e);
        ++n;
    }
    return {n > 0 && worst <= 1e-6, std::to_string(n) + " evolve configs, max |s+eps+r-1|=" + fmt3(worst)};
}

// Integral of tau sinc^2(tau x / 2) over the real line: core with breakpoints plus the averaged tail.
double integral_fc(double tau) {
    const double period = 2 * kPi / tau;
    const int periods = 4000;
    std::vector<double> pts;
    for (int k = -periods; k <= periods; ++k) pts.push_back(k * period);
    QuadOptions q;
    q.abs_tol = 1e-12;
    q.rel_tol = 1e-10;
    double core = integrate_pieces([&](double x) { return weight_repeated(x, 0.0, tau); }, pts, q).value;
    double L = periods * period;
    return core + 4.0 / (tau * L);
}

Outcome c12() {
    double worst_norm = 0;
    for (double tau : {0.05, 1.0, 20.0}) {
        worst_norm = std::max(worst_norm, rel(integral_fc(tau), 2 * kPi));
        double ff = integrate([&](double x) { return weight_flat(x, 0.0, tau); },
                              -std::numeric_limits<double>::infinity(),
                              std::numeric_limits<double>::infinity()).value;
        worst_norm = std::max(worst_norm, rel(ff, 2 * kPi));
    }
    // Interval-weighted average over P(tau_i) = (2 tau_r)^-1 exp(-tau_i / 2 tau_r).
    const double tau_r = 0.3;
    double worst_avg = 0, literal = 0;
    QuadOptions q;
    q.abs_tol = 1e-13;
    q.rel_tol = 1e-11;
    for (int i = 0; i < 20; ++i) {
        double mu = -30.0 + 60.0 * i / 19.0 + 0.1;
        auto P = [&](double t) { return std::exp(-t / (2 * tau_r)) / (2 * tau_r); };
        std::vector<double> pts = {0.0, 2 * tau_r, 10 * tau_r, 40 * tau_r, 100 * tau_r,
                                   std::numeric_limits<double>::infinity()};
        double num = integrate_pieces([&](double t) { return t > 0 ? P(t) * t * weight_repeated(mu, 0.0, t) : 0.0; }, pts, q).value;
        double den = integrate_pieces([&](double t) { return P(t) * t; }, pts, q).value;
        double plain = integrate_pieces([&](double t) { return t > 0 ? P(t) * weight_repeated(mu, 0.0, t) : 0.0; }, pts, q).value;
        double target = weight_flat(mu, 0.0, tau_r);
        worst_avg = std::max(worst_avg, rel(num / den, target));
        literal = std::max(literal, rel(plain, target));
    }
    bool ok = worst_norm <= 1e-4 && worst_avg <= 1e-4;
    return {ok, "norm dev=" + fmt3(worst_norm) + " avg dev=" + fmt3(worst_avg) +
                    " (unweighted average dev=" + fmt3(literal) + ")"};
}

Outcome c13() {
    auto dets = linspace(0.0, 80.0, 20);
    int used = 0, agree = 0;
    std::string bad;
    for (double d : dets) {
        if (std::abs(d - 20.0) <= 0.05 * 20.0) continue;
        auto st = exponential_stage(1.0, 20.0, d, 0.0);
        auto model = SurvivalModel::lorentzian(1.0, 20.0, d, 0.0);
        bool has = find_transition_interval(model, st.rate).has_value();
        bool type_b = classify_by_z(st) == ZClass::TypeB;
        ++used;
        if (has == type_b) ++agree;
        else bad += " " + fmt3(d);
    }
    return {agree == used, std::to_string(agree) + "/" + std::to_string(used) + " detunings agree" +
                               (bad.empty() ? "" : "; mismatch at" + bad)};
}

Outcome c14() {
    SlabConfig vac{1.125, 1.0, 1.0};
    double flat = 0;
    for (double x : linspace(-3, 3, 601)) flat = std::max(flat, std::abs(decay_rate_ratio(vac, x) - 1.0));
    SlabConfig cfg{1.125, 1.5, 1.0};
    double parity = 0;
    for (double x : linspace(0, 3, 301))
        parity = std::max(parity, std::abs(decay_rate_ratio(cfg, x) - decay_rate_ratio(cfg, -x)));
    double cont = 0;
    double k = 2 * kPi / cfg.lambda_a;
    for (double edge : {cfg.l / 2, -cfg.l / 2}) {
        double in = std::nextafter(edge, 0.0);
        double out = std::nextafter(edge, edge > 0 ? 10.0 : -10.0);
        cont = std::max(cont, std::abs(even_mode(cfg, k, in) - even_mode(cfg, k, out)));
        cont = std::max(cont, std::abs(odd_mode(cfg, k, in) - odd_mode(cfg, k, out)));
        cont = std::max(cont, std::abs(decay_rate_ratio(cfg, in) - decay_rate_ratio(cfg, out)));
    }
    bool ok = flat <= 1e-12 && parity <= 1e-12 && cont <= 1e-12;
    return {ok, "vacuum dev=" + fmt3(flat) + " parity dev=" + fmt3(parity) + " interface jump=" + fmt3(cont)};
}

Outcome c15() {
    double worst = std::abs(pdc_survival({1.3, 0.0}, 0.0) - 1.0);
    worst = std::max(worst, std::abs(pdc_survival({1.3, 0.7}, 0.0) - 1.0));
    for (double t : linspace(0.1, 4.0, 10)) {
        double c = std::cosh(1.3 * t);
        worst = std::max(worst, std::abs(pdc_survival({1.3, 0.0}, t) - 1.0 / (c * c)));
    }
    return {worst <= 1e-12, "max dev=" + fmt3(worst)};
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> expect_fail;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--expect-fail") expect_fail.insert(std::stoi(argv[++i]));

    const std::string out_dir = ZENO_TEST_OUT_DIR;
    std::filesystem::create_directories(out_dir);

    struct Item {
        int id;
        const char* name;
        double budget_s;
        std::function<Outcome()> run;
    };
    std::vector<Item> items = {
        {1, "FGR rates", 1e-3, c1},
        {2, "pole rate vs FGR", 1e-3, c2},
        {3, "repeated-measurement AZE peak", 1.0, c3},
        {4, "flat form factor immunity", 1e-3, c4},
        {5, "continuous flat-response optimum", 1.0, c5},
        {6, "phase boundary coincidence", 5.0, c6},
        {7, "banded QZE on exponential decayer", 30.0, c7},
        {8, "detection probability", 30.0, c8},
        {9, "false-measurement AZE", 30.0, c9},
        {10, "lattice vs exact two-pole survival", 30.0, c10},
        {11, "conservation in shipped evolve configs", 0.0, [&] { return c11(ZENO_CONFIG_DIR, out_dir); }},
        {12, "weight-function identities", 0.0, c12},
        {13, "Z-criterion consistency", 10.0, c13},
        {14, "cavity 1-D structure", 0.0, c14},
        {15, "PDC survival", 0.0, c15},
    };

    int unexpected = 0, failed = 0;
    for (const auto& it : items) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = it.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool in_time = it.budget_s <= 0 || secs <= it.budget_s;
        if (!in_time) o.detail += " [over time budget " + fmt3(it.budget_s) + " s]";
        bool pass = o.pass && in_time;
        if (!pass) ++failed;
        bool expected = pass != (expect_fail.count(it.id) > 0);
        if (!expected) ++unexpected;
        std::printf("%s criterion %2d: %s: %s (%.3g s)%s\n", pass ? "PASS" : "FAIL", it.id, it.name,
                    o.detail.c_str(), secs, expected ? "" : " [UNEXPECTED]");
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria pass\n", static_cast<int>(items.size()) - failed, items.size());
    return unexpected == 0 ? 0 : 1;
}

#include "zeno/timedomain.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "zeno/errors.hpp"
#include "zeno/expm.hpp"
#include "zeno/io.hpp"

namespace zeno {

namespace {

constexpr double kPi = std::numbers::pi;

struct Scales {
    double rate = 0.0;   // coupling strength gamma
    double width = 0.0;  // largest spectral or band width
    std::vector<double> edges;
};

Scales scales_of(const FormFactor& ff, const DetectorResponse& resp, const AtomParams& atom) {
    Scales sc;
    const FormFactor& base = std::holds_alternative<GeometricSplit>(ff)
                                 ? *std::get<GeometricSplit>(ff).base
                                 : ff;
    if (auto* l = std::get_if<Lorentzian>(&base)) {
        sc.rate = l->gamma;
        sc.width = l->delta;
    } else if (auto* f = std::get_if<Flat>(&base)) {
        sc.rate = f->gamma;
    } else if (auto* t = std::get_if<Tabulated>(&base)) {
        sc.rate = 2 * kPi * *std::max_element(t->g2.begin(), t->g2.end());
    }
    if (auto* b = std::get_if<ActiveBand>(&resp)) {
        double c = b->center.value_or(atom.omega);
        sc.width = std::max(sc.width, b->delta_d);
        sc.edges = {c - b->delta_d, c + b->delta_d};
    } else if (auto* b2 = std::get_if<InactiveBand>(&resp)) {
        double c = b2->center.value_or(atom.omega);
        sc.width = std::max(sc.width, b2->delta_d_bar);
        sc.edges = {c - b2->delta_d_bar, c + b2->delta_d_bar};
    } else if (auto* cu = std::get_if<CustomResponse>(&resp)) {
        sc.edges = {cu->eps.front(), cu->eps.back()};
    }
    return sc;
}

double spectral_scale(const LatticeConfig& cfg, const std::vector<Channel>& chans,
                      const AtomParams& atom) {
    double eta = 0.0;
    for (const auto& c : chans) eta = std::max(eta, c.eta.max());
    double e = std::max(std::abs(cfg.eps_min - atom.omega), std::abs(cfg.eps_max - atom.omega));
    return std::max(e, eta);
}

struct Lattice {
    std::vector<double> e;    // mode energy relative to omega
    std::vector<double> g;    // coupling
    std::vector<double> eta;  // detector damping
};

Lattice build_lattice(const LatticeConfig& cfg, const std::vector<Channel>& chans,
                      const AtomParams& atom) {
    Lattice L;
    double de = (cfg.eps_max - cfg.eps_min) / (cfg.n_modes - 1);
    for (const auto& ch : chans) {
        for (int j = 0; j < cfg.n_modes; ++j) {
            double eps = (j + 1 == cfg.n_modes) ? cfg.eps_max : cfg.eps_min + j * de;
            double g2 = evaluate_or_zero(ch.ff, eps) * de;
            if (g2 <= 0) continue;
            L.e.push_back(eps - atom.omega);
            L.g.push_back(std::sqrt(g2));
            L.eta.push_back(ch.eta(eps));
        }
    }
    return L;
}

void record(Trajectory& tr, double t, double s, double eps, double r) {
    double err = std::abs(s + eps + r - 1.0);
    tr.max_conservation_error = std::max(tr.max_conservation_error, err);
    if (err > 1e-5)
        throw NumericError("probability not conserved at t=" + fmt(t) + ": s=" + fmt(s) +
                           " eps=" + fmt(eps) + " r=" + fmt(r) + " (|s+eps+r-1|=" + fmt(err) +
                           "); reduce dt or refine the lattice");
    tr.times.push_back(t);
    tr.s.push_back(s);
    tr.eps.push_back(eps);
    tr.r.push_back(r);
}

// Classical RK4 on (f, f_j, r) with dr/dt = sum eta_j |f_j|^2.
void run_rk4(const Lattice& L, int steps_per_sample, double dt, const std::vector<double>& times,
             Trajectory& tr) {
    const size_t n = L.e.size();
    std::vector<double> xr(n, 0.0), xi(n, 0.0);  // mode amplitudes
    double fr = 1.0, fi = 0.0, r = 0.0;
    std::vector<double> kr[4], ki[4];
    for (auto& v : kr) v.assign(n, 0.0);
    for (auto& v : ki) v.assign(n, 0.0);
    std::vector<double> yr(n), yi(n);
    double kfr[4], kfi[4], kr_r[4];
    const double c[4] = {0.0, 0.5, 0.5, 1.0};
    const double* e = L.e.data();
    const double* g = L.g.data();
    const double* eta = L.eta.data();

    auto stage = [&](int k, double afr, double afi, const double* ar, const double* ai) {
        double sr = 0.0, si = 0.0, dr = 0.0;
        double* outr = kr[k].data();
        double* outi = ki[k].data();
        for (size_t j = 0; j < n; ++j) {
            double a = ar[j], b = ai[j];
            sr += g[j] * a;
            si += g[j] * b;
            dr += eta[j] * (a * a + b * b);
            // -i (e a + g f) - eta/2 a
            double re = e[j] * a + g[j] * afr;
            double im = e[j] * b + g[j] * afi;
            outr[j] = im - 0.5 * eta[j] * a;
            outi[j] = -re - 0.5 * eta[j] * b;
        }
        kfr[k] = si;
        kfi[k] = -sr;
        kr_r[k] = dr;
    };

    record(tr, 0.0, 1.0, 0.0, 0.0);
    for (size_t sidx = 1; sidx < times.size(); ++sidx) {
        for (int st = 0; st < steps_per_sample; ++st) {
            stage(0, fr, fi, xr.data(), xi.data());
            for (int k = 1; k < 4; ++k) {
                double h = c[k] * dt;
                const double* pr = kr[k - 1].data();
                const double* pi = ki[k - 1].data();
                for (size_t j = 0; j < n; ++j) {
                    yr[j] = xr[j] + h * pr[j];
                    yi[j] = xi[j] + h * pi[j];
                }
                stage(k, fr + h * kfr[k - 1], fi + h * kfi[k - 1], yr.data(), yi.data());
            }
            const double w = dt / 6.0;
            for (size_t j = 0; j < n; ++j) {
                xr[j] += w * (kr[0][j] + 2 * kr[1][j] + 2 * kr[2][j] + kr[3][j]);
                xi[j] += w * (ki[0][j] + 2 * ki[1][j] + 2 * ki[2][j] + ki[3][j]);
            }
            fr += w * (kfr[0] + 2 * kfr[1] + 2 * kfr[2] + kfr[3]);
            fi += w * (kfi[0] + 2 * kfi[1] + 2 * kfi[2] + kfi[3]);
            r += w * (kr_r[0] + 2 * kr_r[1] + 2 * kr_r[2] + kr_r[3]);
        }
        double eps = 0.0;
        for (size_t j = 0; j < n; ++j) eps += xr[j] * xr[j] + xi[j] * xi[j];
        record(tr, times[sidx], fr * fr + fi * fi, eps, r);
    }
}

// Exact propagation between samples; the detector flux integral comes from the
// block exponential exp([[-A^H, D], [0, A]] T).
void run_expm(const Lattice& L, double interval, const std::vector<double>& times, Trajectory& tr) {
    using Eigen::MatrixXcd;
    using Eigen::VectorXcd;
    const Eigen::Index n = static_cast<Eigen::Index>(L.e.size()) + 1;
    const std::complex<double> I(0.0, 1.0);
    MatrixXcd H = MatrixXcd::Zero(n, n);
    MatrixXcd D = MatrixXcd::Zero(n, n);
    for (Eigen::Index j = 1; j < n; ++j) {
        size_t k = static_cast<size_t>(j - 1);
        H(0, j) = L.g[k];
        H(j, 0) = L.g[k];
        H(j, j) = std::complex<double>(L.e[k], -0.5 * L.eta[k]);
        D(j, j) = L.eta[k];
    }
    MatrixXcd A = -I * H;
    MatrixXcd B = MatrixXcd::Zero(2 * n, 2 * n);
    B.topLeftCorner(n, n) = -A.adjoint();
    B.topRightCorner(n, n) = D;
    B.bottomRightCorner(n, n) = A;
    MatrixXcd E = expm(B * interval);
    MatrixXcd F22 = E.bottomRightCorner(n, n);
    MatrixXcd M = F22.adjoint() * E.topRightCorner(n, n);
    M = 0.5 * (M + M.adjoint()).eval();

    VectorXcd y = VectorXcd::Zero(n);
    y(0) = 1.0;
    double r = 0.0;
    record(tr, 0.0, 1.0, 0.0, 0.0);
    for (size_t sidx = 1; sidx < times.size(); ++sidx) {
        r += std::max(0.0, y.dot(M * y).real());
        y = F22 * y;
        double eps = y.tail(n - 1).squaredNorm();
        record(tr, times[sidx], std::norm(y(0)), eps, r);
    }
}

}  // namespace

void validate_lattice(const LatticeConfig& cfg, const FormFactor& ff, const DetectorResponse& resp,
                      const AtomParams& atom) {
    if (!std::isfinite(cfg.eps_min) || !std::isfinite(cfg.eps_max) || !(cfg.eps_max > cfg.eps_min))
        throw ConfigError("lattice.eps_max", "window must be finite with eps_max > eps_min");
    if (cfg.n_modes < 2) throw ConfigError("lattice.n_modes", "need at least two modes");
    if (!(cfg.t_max > 0) || !std::isfinite(cfg.t_max))
        throw ConfigError("lattice.t_max", "must be positive and finite");
    if (cfg.samples < 2) throw ConfigError("lattice.samples", "need at least two samples");
    if (cfg.dt < 0) throw ConfigError("lattice.dt", "must be non-negative");

    Scales sc = scales_of(ff, resp, atom);
    double margin = 20.0 * std::max(sc.rate, sc.width);
    if (cfg.eps_min > atom.omega - margin * (1 - 1e-12) || cfg.eps_max < atom.omega + margin * (1 - 1e-12))
        throw ConfigError("lattice.eps_min",
                          "window must extend at least " + fmt(margin) + " on both sides of omega");
    for (double edge : sc.edges)
        if (!(edge > cfg.eps_min && edge < cfg.eps_max))
            throw ConfigError("lattice.eps_min", "band edge " + fmt(edge) + " lies outside the window");

    double de = (cfg.eps_max - cfg.eps_min) / (cfg.n_modes - 1);
    if (2 * kPi / de < 3 * cfg.t_max * (1 - 1e-12))
        throw ConfigError("lattice.n_modes", "recurrence time 2pi/d_eps=" + fmt(2 * kPi / de) +
                                                 " is shorter than 3*t_max");
    auto chans = build_channels(ff, resp, atom);
    double scale = spectral_scale(cfg, chans, atom);
    if (cfg.dt > 0 && cfg.dt > 0.1 / scale * (1 + 1e-12))
        throw ConfigError("lattice.dt", "must not exceed 0.1/" + fmt(scale) + "=" + fmt(0.1 / scale));
}

LatticeConfig default_lattice(const FormFactor& ff, const DetectorResponse& resp,
                              const AtomParams& atom, double t_max) {
    Scales sc = scales_of(ff, resp, atom);
    double half = 20.0 * std::max(sc.rate, sc.width);
    const FormFactor& base = std::holds_alternative<GeometricSplit>(ff)
                                 ? *std::get<GeometricSplit>(ff).base
                                 : ff;
    double de = std::min(2 * kPi / (3 * t_max), 0.4);
    if (std::holds_alternative<Flat>(base)) {
        half = std::max(half, 200.0);
        de = std::min(de, 0.1);
    }
    if (sc.width > 0) de = std::min(de, 0.1 * sc.width);
    LatticeConfig cfg;
    cfg.eps_min = atom.omega - half;
    cfg.eps_max = atom.omega + half;
    int n = static_cast<int>(std::ceil(2 * half / de)) + 1;
    if (n % 2 == 0) ++n;
    cfg.n_modes = n;
    cfg.t_max = t_max;
    return cfg;
}

Trajectory evolve(const FormFactor& ff, const DetectorResponse& resp, const AtomParams& atom,
                  const LatticeConfig& cfg) {
    validate_lattice(cfg, ff, resp, atom);
    auto chans = build_channels(ff, resp, atom);
    Lattice L = build_lattice(cfg, chans, atom);

    std::vector<double> times(static_cast<size_t>(cfg.samples));
    for (int i = 0; i < cfg.samples; ++i)
        times[static_cast<size_t>(i)] = cfg.t_max * i / (cfg.samples - 1);
    double interval = cfg.t_max / (cfg.samples - 1);

    Integrator method = cfg.method;
    int amplitudes = static_cast<int>(L.e.size()) + 1;
    if (method == Integrator::Auto)
        method = amplitudes <= kExpmMaxAmplitudes ? Integrator::Expm : Integrator::Rk4;

    Trajectory tr;
    tr.method = method;
    tr.lattice_modes = static_cast<int>(L.e.size());
    tr.times.reserve(times.size());
    if (method == Integrator::Expm) {
        tr.dt = interval;
        run_expm(L, interval, times, tr);
    } else {
        double scale = spectral_scale(cfg, chans, atom);
        double dt_max = cfg.dt > 0 ? cfg.dt : 0.05 / scale;
        int steps = std::max(1, static_cast<int>(std::ceil(interval / dt_max * (1 - 1e-12))));
        tr.dt = interval / steps;
        run_rk4(L, steps, tr.dt, times, tr);
    }
    return tr;
}

RateCurve effective_rate_curve(const Trajectory& traj) {
    RateCurve c;
    for (size_t i = 0; i < traj.times.size(); ++i) {
        if (!(traj.times[i] > 0)) continue;
        if (!(traj.s[i] > 0)) {
            c.truncated = true;
            break;
        }
        c.times.push_back(traj.times[i]);
        c.rates.push_back(-std::log(traj.s[i]) / traj.times[i]);
    }
    return c;
}

double late_rate(const Trajectory& traj, double t0, double t1) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (size_t i = 0; i < traj.times.size(); ++i) {
        double t = traj.times[i];
        if (t < t0 || t > t1) continue;
        if (!(traj.s[i] > 0)) throw std::domain_error("survival probability is not positive in the window");
        double y = -std::log(traj.s[i]);
        sx += t;
        sy += y;
        sxx += t * t;
        sxy += t * y;
        ++n;
    }
    if (n < 4)
        throw std::invalid_argument("rate window [" + fmt(t0) + ", " + fmt(t1) +
                                    "] holds fewer than 4 samples");
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string trajectory_csv(const Trajectory& traj) {
    CsvBuilder csv({"t", "s", "eps", "r"});
    for (size_t i = 0; i < traj.times.size(); ++i)
        csv.row({traj.times[i], traj.s[i], traj.eps[i], traj.r[i]});
    return csv.str();
}

const char* to_string(Integrator m) {
    switch (m) {
        case Integrator::Auto: return "auto";
        case Integrator::Rk4: return "rk4";
        case Integrator::Expm: return "expm";
    }
    return "unknown";
}

}  // namespace zeno

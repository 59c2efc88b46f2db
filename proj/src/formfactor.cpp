#include "zeno/formfactor.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "zeno/errors.hpp"
#include "zeno/io.hpp"

namespace zeno {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double tabulated_at(const Tabulated& t, double mu) {
    if (!(mu >= t.mu.front() && mu <= t.mu.back()))
        throw std::out_of_range("tabulated form factor queried outside [" + fmt(t.mu.front()) +
                                ", " + fmt(t.mu.back()) + "] at mu=" + fmt(mu));
    auto it = std::upper_bound(t.mu.begin(), t.mu.end(), mu);
    if (it == t.mu.end()) return t.g2.back();
    size_t i = static_cast<size_t>(it - t.mu.begin());
    double x0 = t.mu[i - 1], x1 = t.mu[i];
    double w = (mu - x0) / (x1 - x0);
    return (1.0 - w) * t.g2[i - 1] + w * t.g2[i];
}

FormFactor scaled(const FormFactor& ff, double c) {
    return std::visit(
        overloaded{
            [c](const Lorentzian& l) -> FormFactor { return Lorentzian{l.gamma * c, l.delta, l.mu0}; },
            [c](const Flat& f) -> FormFactor { return Flat{f.gamma * c, f.cutoff, f.center}; },
            [c](const Tabulated& t) -> FormFactor {
                Tabulated r = t;
                for (double& v : r.g2) v *= c;
                return r;
            },
            [c](const GeometricSplit& g) -> FormFactor { return scaled(*g.base, c); },
        },
        ff);
}

// sinc^2 with a short series near the origin.
double sinc2(double y) {
    if (std::abs(y) < 1e-4) {
        double y2 = y * y;
        return 1.0 - y2 / 3.0 + 2.0 * y2 * y2 / 45.0;
    }
    double s = std::sin(y) / y;
    return s * s;
}

}  // namespace

FormFactor make_geometric_split(FormFactor base, double eps_inf) {
    return GeometricSplit{std::make_shared<const FormFactor>(std::move(base)), eps_inf};
}

void validate(const FormFactor& ff) {
    std::visit(overloaded{
                   [](const Lorentzian& l) {
                       if (!(l.gamma > 0) || !std::isfinite(l.gamma))
                           throw ConfigError("form_factor.gamma", "must be positive and finite");
                       if (!(l.delta > 0) || !std::isfinite(l.delta))
                           throw ConfigError("form_factor.delta", "must be positive and finite");
                       if (!std::isfinite(l.mu0))
                           throw ConfigError("form_factor.mu0", "must be finite");
                   },
                   [](const Flat& f) {
                       if (!(f.gamma > 0) || !std::isfinite(f.gamma))
                           throw ConfigError("form_factor.gamma", "must be positive and finite");
                       if (f.cutoff && !(*f.cutoff > 0))
                           throw ConfigError("form_factor.cutoff", "must be positive");
                       if (!std::isfinite(f.center))
                           throw ConfigError("form_factor.center", "must be finite");
                   },
                   [](const Tabulated& t) {
                       if (t.mu.size() != t.g2.size())
                           throw ConfigError("form_factor.samples", "column lengths differ");
                       if (t.mu.size() < 2)
                           throw ConfigError("form_factor.samples", "need at least two samples");
                       for (size_t i = 0; i < t.mu.size(); ++i) {
                           if (!std::isfinite(t.mu[i]) || !std::isfinite(t.g2[i]))
                               throw ConfigError("form_factor.samples", "non-finite value");
                           if (t.g2[i] < 0)
                               throw ConfigError("form_factor.samples", "negative density");
                           if (i && !(t.mu[i] > t.mu[i - 1]))
                               throw ConfigError("form_factor.samples",
                                                 "mu must be strictly increasing");
                       }
                   },
                   [](const GeometricSplit& g) {
                       if (!g.base) throw ConfigError("form_factor.base", "missing");
                       if (std::holds_alternative<GeometricSplit>(*g.base))
                           throw ConfigError("form_factor.base", "nested geometric split");
                       if (!(g.eps_inf >= 0 && g.eps_inf <= 1))
                           throw ConfigError("form_factor.eps_inf", "must lie in [0, 1]");
                       validate(*g.base);
                   },
               },
               ff);
}

double evaluate(const FormFactor& ff, double mu) {
    return std::visit(
        overloaded{
            [mu](const Lorentzian& l) {
                double x = mu - l.mu0;
                return l.gamma / (2 * kPi) * l.delta * l.delta / (x * x + l.delta * l.delta);
            },
            [mu](const Flat& f) {
                if (f.cutoff && std::abs(mu - f.center) > *f.cutoff) return 0.0;
                return f.gamma / (2 * kPi);
            },
            [mu](const Tabulated& t) { return tabulated_at(t, mu); },
            [mu](const GeometricSplit& g) { return evaluate(*g.base, mu); },
        },
        ff);
}

double evaluate_or_zero(const FormFactor& ff, double mu) {
    if (auto* t = std::get_if<Tabulated>(&ff))
        if (mu < t->mu.front() || mu > t->mu.back()) return 0.0;
    if (auto* g = std::get_if<GeometricSplit>(&ff)) return evaluate_or_zero(*g->base, mu);
    return evaluate(ff, mu);
}

FormFactor detected_part(const FormFactor& ff) {
    if (auto* g = std::get_if<GeometricSplit>(&ff)) return scaled(*g->base, 1.0 - g->eps_inf);
    return ff;
}

FormFactor undetected_part(const FormFactor& ff) {
    if (auto* g = std::get_if<GeometricSplit>(&ff)) return scaled(*g->base, g->eps_inf);
    return scaled(ff, 0.0);
}

std::optional<double> variance(const FormFactor& ff) {
    return std::visit(
        overloaded{
            [](const Lorentzian& l) -> std::optional<double> { return l.gamma * l.delta / 2; },
            [](const Flat& f) -> std::optional<double> {
                if (!f.cutoff) return std::nullopt;
                return f.gamma / (2 * kPi) * 2 * *f.cutoff;
            },
            [](const Tabulated& t) -> std::optional<double> {
                double s = 0;
                for (size_t i = 1; i < t.mu.size(); ++i)
                    s += 0.5 * (t.g2[i] + t.g2[i - 1]) * (t.mu[i] - t.mu[i - 1]);
                return s;
            },
            [](const GeometricSplit& g) { return variance(*g.base); },
        },
        ff);
}

double fgr_rate(const FormFactor& ff, const AtomParams& atom) {
    return 2 * kPi * evaluate(ff, atom.omega);
}

std::vector<double> feature_points(const FormFactor& ff) {
    return std::visit(overloaded{
                          [](const Lorentzian& l) {
                              std::vector<double> p;
                              add_ladder(p, l.mu0, l.delta, 9);
                              return p;
                          },
                          [](const Flat& f) {
                              std::vector<double> p;
                              if (f.cutoff) {
                                  p.push_back(f.center - *f.cutoff);
                                  p.push_back(f.center + *f.cutoff);
                              }
                              return p;
                          },
                          [](const Tabulated& t) { return t.mu; },
                          [](const GeometricSplit& g) { return feature_points(*g.base); },
                      },
                      ff);
}

double feature_scale(const FormFactor& ff) {
    return std::visit(overloaded{
                          [](const Lorentzian& l) { return l.delta; },
                          [](const Flat& f) { return f.cutoff ? *f.cutoff : 1.0; },
                          [](const Tabulated& t) {
                              return (t.mu.back() - t.mu.front()) /
                                     static_cast<double>(t.mu.size() - 1);
                          },
                          [](const GeometricSplit& g) { return feature_scale(*g.base); },
                      },
                      ff);
}

std::pair<double, double> support(const FormFactor& ff) {
    return std::visit(overloaded{
                          [](const Lorentzian&) { return std::pair{-kInf, kInf}; },
                          [](const Flat& f) {
                              if (!f.cutoff) return std::pair{-kInf, kInf};
                              return std::pair{f.center - *f.cutoff, f.center + *f.cutoff};
                          },
                          [](const Tabulated& t) { return std::pair{t.mu.front(), t.mu.back()}; },
                          [](const GeometricSplit& g) { return support(*g.base); },
                      },
                      ff);
}

double sinc2_weighted_integral(const FormFactor& ff, double omega, double tau,
                               const QuadOptions& opts) {
    if (!(tau > 0)) throw std::domain_error("interval must be positive");
    if (auto* f = std::get_if<Flat>(&ff); f && !f->cutoff) return f->gamma;
    if (auto* g = std::get_if<GeometricSplit>(&ff)) return sinc2_weighted_integral(*g->base, omega, tau, opts);

    auto [lo, hi] = support(ff);
    std::vector<double> features = feature_points(ff);
    // Inside the core the oscillation is resolved on a half-period grid; beyond it
    // sin^2 is replaced by its mean 1/2, with a relative error of order (tau*X)^-2.
    const double period = 2 * kPi / tau;
    const double X = 128 * period;
    double core_lo = std::max(omega - X, lo), core_hi = std::min(omega + X, hi);
    double total = 0.0;

    if (core_lo < core_hi) {
        std::vector<double> pts{core_lo, core_hi};
        double first = omega + std::ceil((core_lo - omega) / (0.5 * period)) * 0.5 * period;
        for (double x = first; x < core_hi; x += 0.5 * period)
            if (x > core_lo) pts.push_back(x);
        for (double p : features)
            if (p > core_lo && p < core_hi) pts.push_back(p);
        auto core = [&](double mu) {
            return evaluate_or_zero(ff, mu) * tau * sinc2(0.5 * tau * (mu - omega));
        };
        total += integrate_or_throw(core, pts, opts, "sinc^2 weighted integral (core)");
    }
    auto tail = [&](double mu) {
        double x = mu - omega;
        return evaluate_or_zero(ff, mu) * 2.0 / (tau * x * x);
    };
    if (lo < omega - X) {
        double b = std::min(omega - X, hi);
        std::vector<double> pts{lo, b};
        for (double p : features)
            if (p > lo && p < b) pts.push_back(p);
        total += integrate_or_throw(tail, pts, opts, "sinc^2 weighted integral (lower tail)");
    }
    if (hi > omega + X) {
        double a = std::max(omega + X, lo);
        std::vector<double> pts{a, hi};
        for (double p : features)
            if (p > a && p < hi) pts.push_back(p);
        total += integrate_or_throw(tail, pts, opts, "sinc^2 weighted integral (upper tail)");
    }
    return total;
}

double lorentzian_perturbative_survival(const Lorentzian& l, double omega, double t) {
    using C = std::complex<double>;
    C z(l.mu0 - omega, l.delta);
    C osc = (1.0 - std::exp(C(0, 1) * z * t)) / (z * z);
    return 1.0 - l.gamma * l.delta * l.delta / std::norm(z) * t - l.gamma * l.delta * osc.real();
}

double perturbative_survival(const FormFactor& ff, const AtomParams& atom, double t,
                             const QuadOptions& opts) {
    if (!(t >= 0)) throw std::domain_error("time must be non-negative");
    if (t == 0) return 1.0;
    if (auto* f = std::get_if<Flat>(&ff); f && !f->cutoff)
        throw ConfigError("form_factor.cutoff",
                          "flat form factor needs a cutoff for the perturbative survival");
    if (auto* g = std::get_if<GeometricSplit>(&ff)) return perturbative_survival(*g->base, atom, t, opts);
    if (auto* l = std::get_if<Lorentzian>(&ff)) return lorentzian_perturbative_survival(*l, atom.omega, t);
    return 1.0 - t * sinc2_weighted_integral(ff, atom.omega, t, opts);
}

FormFactor leaky_cavity_form_factor(double g, double kappa, double omega0) {
    if (!(g > 0)) throw std::domain_error("coupling g must be positive");
    if (!(kappa > 0)) throw std::domain_error("cavity decay rate kappa must be positive");
    return Lorentzian{4 * g * g / kappa, kappa / 2, omega0};
}

Tabulated parse_tabulated_csv(const std::string& text) {
    auto [mu, g2] = parse_two_column_csv(text, "mu", "g2");
    Tabulated t{std::move(mu), std::move(g2)};
    validate(FormFactor{t});
    return t;
}

Tabulated load_tabulated_csv(const std::string& path) {
    return parse_tabulated_csv(read_text_file(path));
}

}  // namespace zeno

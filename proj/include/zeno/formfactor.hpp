#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "zeno/quadrature.hpp"

namespace zeno {

// |g_mu|^2 = (gamma/2pi) delta^2 / ((mu - mu0)^2 + delta^2)
struct Lorentzian {
    double gamma = 1.0;
    double delta = 1.0;
    double mu0 = 0.0;
};

// |g_mu|^2 = gamma/2pi, optionally restricted to |mu - center| <= cutoff.
struct Flat {
    double gamma = 1.0;
    std::optional<double> cutoff;
    double center = 0.0;
};

// Linear interpolation between samples; no extrapolation.
struct Tabulated {
    std::vector<double> mu;
    std::vector<double> g2;
};

struct GeometricSplit;

using FormFactor = std::variant<Lorentzian, Flat, Tabulated, GeometricSplit>;

// base split into a detected fraction (1 - eps_inf) and an undetected fraction eps_inf.
struct GeometricSplit {
    std::shared_ptr<const FormFactor> base;
    double eps_inf = 0.0;
};

struct AtomParams {
    double omega = 0.0;
};

FormFactor make_geometric_split(FormFactor base, double eps_inf);

// Throws ConfigError when the parameters violate the variant's invariants.
void validate(const FormFactor& ff);

double evaluate(const FormFactor& ff, double mu);
// Like evaluate, but zero outside a tabulated range.
double evaluate_or_zero(const FormFactor& ff, double mu);

FormFactor detected_part(const FormFactor& ff);
FormFactor undetected_part(const FormFactor& ff);

// Integral of |g_mu|^2 over the real line; nullopt when divergent (flat, no cutoff).
std::optional<double> variance(const FormFactor& ff);

double fgr_rate(const FormFactor& ff, const AtomParams& atom);

// Integral of |g_mu|^2 tau sinc^2(tau (mu - omega)/2) over the real line.
double sinc2_weighted_integral(const FormFactor& ff, double omega, double tau,
                               const QuadOptions& opts = {});

// 1 - t^2 * integral |g_mu|^2 sinc^2((mu - omega) t / 2).
double perturbative_survival(const FormFactor& ff, const AtomParams& atom, double t,
                             const QuadOptions& opts = {});

// Closed form of the lowest-order survival for a Lorentzian.
double lorentzian_perturbative_survival(const Lorentzian& ff, double omega, double t);

FormFactor leaky_cavity_form_factor(double g, double kappa, double omega0);

// Points where the density has structure (peaks, edges, knots).
std::vector<double> feature_points(const FormFactor& ff);
// Typical width of the structure; used to place quadrature breakpoints.
double feature_scale(const FormFactor& ff);
// Closed support interval; infinite ends for unbounded support.
std::pair<double, double> support(const FormFactor& ff);

Tabulated parse_tabulated_csv(const std::string& text);
Tabulated load_tabulated_csv(const std::string& path);

}  // namespace zeno

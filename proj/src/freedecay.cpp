#include "zeno/freedecay.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace zeno {

namespace {

constexpr cplx kI(0.0, 1.0);

// (e^z - 1)/z without cancellation.
cplx expm1_over_z(cplx z) {
    double a = std::abs(z);
    if (a == 0.0) return 1.0;
    if (a < 1e-3) return 1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0;
    double x = z.real(), y = z.imag();
    double s = std::sin(0.5 * y);
    cplx em1(std::expm1(x) * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y));
    return em1 / z;
}

// f(t) = e^{-i lambda1 t} * bracket, bracket bounded for all t >= 0.
cplx bracket(const LorentzianPoles& p, double delta, double mu0, double t) {
    cplx w(mu0, -delta);
    cplx m = 0.5 * (p.lambda1 + p.lambda2);
    cplx z = kI * (p.lambda1 - p.lambda2) * t;
    cplx ez = std::exp(z);
    return 0.5 * (1.0 + ez) - kI * (m - w) * t * expm1_over_z(z);
}

void check_time(double t) {
    if (!(t >= 0)) throw std::domain_error("time must be non-negative");
}

}  // namespace

LorentzianPoles poles(double gamma, double delta, double omega, double mu0) {
    if (!(gamma > 0)) throw std::domain_error("gamma must be positive");
    if (!(delta > 0)) throw std::domain_error("delta must be positive");
    // x = lambda - omega solves x^2 + b x + c = 0.
    cplx b(omega - mu0, delta);
    cplx c(-0.5 * gamma * delta, 0.0);
    cplx sq = std::sqrt(b * b - 4.0 * c);
    if ((std::conj(b) * sq).real() < 0) sq = -sq;
    cplx q = -0.5 * (b + sq);
    cplx x1 = q, x2 = c / q;
    LorentzianPoles p{omega + x1, omega + x2, false};
    double i1 = std::abs(p.lambda1.imag()), i2 = std::abs(p.lambda2.imag());
    if (i1 > i2 || (i1 == i2 && p.lambda1.real() > p.lambda2.real()))
        std::swap(p.lambda1, p.lambda2);
    p.degenerate = std::abs(x1 - x2) <= 1e-12 * std::max(gamma, delta);
    return p;
}

cplx survival_amplitude(const LorentzianPoles& p, double, double delta, double mu0, double t) {
    check_time(t);
    return std::exp(-kI * p.lambda1 * t) * bracket(p, delta, mu0, t);
}

double survival_probability(const LorentzianPoles& p, double gamma, double delta, double mu0,
                            double t) {
    return std::norm(survival_amplitude(p, gamma, delta, mu0, t));
}

double log_survival_probability(const LorentzianPoles& p, double, double delta, double mu0,
                                double t) {
    check_time(t);
    return 2.0 * p.lambda1.imag() * t + std::log(std::norm(bracket(p, delta, mu0, t)));
}

double flat_survival(double gamma, double t) {
    check_time(t);
    return std::exp(-gamma * t);
}

ExponentialStage exponential_stage(double gamma, double delta, double omega, double mu0) {
    LorentzianPoles p = poles(gamma, delta, omega, mu0);
    if (p.degenerate)
        throw std::domain_error("degenerate poles: no single exponential stage");
    cplx w(mu0, -delta);
    ExponentialStage st;
    st.z_factor = std::norm((p.lambda1 - w) / (p.lambda1 - p.lambda2));
    st.rate = -2.0 * p.lambda1.imag();
    double d = omega - mu0;
    double m2 = d * d + delta * delta;
    st.z_approx = 1.0 - gamma * delta * (d * d - delta * delta) / (m2 * m2);
    return st;
}

bool pdc_degenerate(const PdcParams& pdc) {
    return std::abs(pdc.mismatch) == 2.0 * pdc.g;
}

double pdc_survival(const PdcParams& pdc, double t) {
    check_time(t);
    if (!(pdc.g > 0)) throw std::domain_error("pdc coupling g must be positive");
    double g = pdc.g, d = pdc.mismatch;
    if (pdc_degenerate(pdc)) return 1.0 / (1.0 + g * g * t * t);
    double q2 = g * g - 0.25 * d * d;
    double denom = 4.0 * g * g - d * d;
    if (q2 > 0) {
        double q = std::sqrt(q2);
        double ch = std::cosh(q * t), sh = std::sinh(q * t);
        return 1.0 / (ch * ch + d * d / denom * sh * sh);
    }
    double p = std::sqrt(-q2);
    double co = std::cos(p * t), si = std::sin(p * t);
    return 1.0 / (co * co - d * d / denom * si * si);
}

SurvivalModel SurvivalModel::lorentzian(double gamma, double delta, double omega, double mu0) {
    LorentzianPoles p = poles(gamma, delta, omega, mu0);
    SurvivalModel m;
    m.prob_ = [=](double t) { return survival_probability(p, gamma, delta, mu0, t); };
    m.log_ = [=](double t) { return log_survival_probability(p, gamma, delta, mu0, t); };
    return m;
}

SurvivalModel SurvivalModel::flat(double gamma) {
    SurvivalModel m;
    m.prob_ = [gamma](double t) { return flat_survival(gamma, t); };
    m.log_ = [gamma](double t) {
        check_time(t);
        return -gamma * t;
    };
    return m;
}

SurvivalModel SurvivalModel::from_function(std::function<double(double)> s) {
    SurvivalModel m;
    m.prob_ = s;
    m.log_ = [s](double t) {
        double v = s(t);
        if (!(v > 0)) throw std::domain_error("survival probability is not positive");
        return std::log(v);
    };
    return m;
}

double gamma_zeno(const SurvivalModel& s, double t) {
    if (!(t > 0)) throw std::domain_error("time must be positive");
    double l = s.log_probability(t);
    if (!std::isfinite(l)) throw std::domain_error("survival probability is not positive");
    return -l / t;
}

double gamma_conventional(const SurvivalModel& s, double t) {
    if (!(t > 0)) throw std::domain_error("time must be positive");
    double h = std::min(1e-4 * t, 1e-4);
    double lp = s.log_probability(t + h), lm = s.log_probability(t - h);
    if (!std::isfinite(lp) || !std::isfinite(lm))
        throw std::domain_error("survival probability is not positive");
    return -(lp - lm) / (2.0 * h);
}

}  // namespace zeno

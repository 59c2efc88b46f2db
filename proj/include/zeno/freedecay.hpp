#pragma once

#include <complex>
#include <functional>
#include <memory>

namespace zeno {

using cplx = std::complex<double>;

struct LorentzianPoles {
    cplx lambda1;
    cplx lambda2;
    bool degenerate = false;
};

struct ExponentialStage {
    double z_factor = 1.0;
    double rate = 0.0;
    double z_approx = 1.0;  // small-gamma expansion of z_factor
};

struct PdcParams {
    double g = 1.0;
    double mismatch = 0.0;
};

// Roots of (lambda - omega)(lambda - mu0 + i delta) - gamma delta / 2 = 0,
// ordered so that |Im lambda1| <= |Im lambda2| (smaller Re first on a tie).
LorentzianPoles poles(double gamma, double delta, double omega, double mu0);

cplx survival_amplitude(const LorentzianPoles& p, double gamma, double delta, double mu0, double t);
double survival_probability(const LorentzianPoles& p, double gamma, double delta, double mu0,
                            double t);
// ln s(t), finite even where s(t) underflows.
double log_survival_probability(const LorentzianPoles& p, double gamma, double delta, double mu0,
                                double t);

double flat_survival(double gamma, double t);

ExponentialStage exponential_stage(double gamma, double delta, double omega, double mu0);

double pdc_survival(const PdcParams& pdc, double t);
bool pdc_degenerate(const PdcParams& pdc);

// Survival probability s(t) with an accurate logarithm.
class SurvivalModel {
public:
    static SurvivalModel lorentzian(double gamma, double delta, double omega, double mu0);
    static SurvivalModel flat(double gamma);
    static SurvivalModel from_function(std::function<double(double)> s);

    double probability(double t) const { return prob_(t); }
    double log_probability(double t) const { return log_(t); }

private:
    std::function<double(double)> prob_;
    std::function<double(double)> log_;
};

// Gamma_con(t) = -(ds/dt)/s by central difference.
double gamma_conventional(const SurvivalModel& s, double t);
// Gamma(t) = -ln s(t) / t.
double gamma_zeno(const SurvivalModel& s, double t);

}  // namespace zeno

#pragma once

#include <string>
#include <vector>

namespace zeno {

struct BoundaryPoint {
    double detuning = 0.0;
    double tau = 0.0;
};

struct OptimumPoint {
    double detuning = 0.0;
    double tau = 0.0;
    double value = 0.0;
};

struct SweepResult {
    std::string axis1_label = "detuning";
    std::string axis2_label = "tau";
    std::vector<double> axis1;
    std::vector<double> axis2;
    std::vector<double> values;  // row-major, axis1 x axis2
    std::vector<BoundaryPoint> boundary;
    std::vector<OptimumPoint> optimum;

    double value(size_t i, size_t j) const { return values[i * axis2.size() + j]; }
};

struct SweepOptions {
    int threads = 1;
    double boundary_rel_tol = 1e-8;
};

// Gamma(tau_i)/Gamma(inf) from the exact Lorentzian survival; mu0 = 0, omega = detuning.
SweepResult sweep_repeated(double gamma, double delta, const std::vector<double>& detunings,
                           const std::vector<double>& tau_i, const SweepOptions& opts = {});

// Gamma(tau_r)/Gamma(inf) for continuous measurement with flat response.
SweepResult sweep_continuous(double gamma, double delta, const std::vector<double>& detunings,
                             const std::vector<double>& tau_r, const SweepOptions& opts = {});

std::string sweep_values_csv(const SweepResult& r);
std::string sweep_boundary_csv(const SweepResult& r);
std::string sweep_optimum_csv(const SweepResult& r);

std::vector<double> linspace(double a, double b, int n);
std::vector<double> logspace(double a, double b, int n);

}  // namespace zeno

#pragma once

#include <optional>

#include "zeno/formfactor.hpp"
#include "zeno/freedecay.hpp"

namespace zeno {

struct RepeatedMeasurementResult {
    double tau_i = 0.0;
    double rate = 0.0;
    double normalized = 0.0;
};

struct IntervalScan {
    double tau_min = 1e-4;
    double tau_max = 1e2;
    int points = 400;
    double tol = 1e-8;
};

enum class ZClass { TypeA, TypeB, Boundary };

// -ln s(tau_i) / tau_i
double decay_rate_repeated(const SurvivalModel& s, double tau_i);

RepeatedMeasurementResult repeated_measurement(const SurvivalModel& s, double free_rate,
                                               double tau_i);

// tau_i sinc^2(tau_i (mu - omega) / 2)
double weight_repeated(double mu, double omega, double tau_i);

double decay_rate_perturbative(const FormFactor& ff, const AtomParams& atom, double tau_i,
                               const QuadOptions& opts = {});

// Smallest tau with Gamma(tau) = free_rate, or nullopt when Gamma - free_rate never
// changes sign on the scan grid.
std::optional<double> find_transition_interval(const SurvivalModel& s, double free_rate,
                                               const IntervalScan& scan = {});

struct IntervalOptimum {
    double tau = 0.0;
    double rate = 0.0;
};

// Interior maximum of Gamma(tau) on the scan range, refined by golden-section search.
std::optional<IntervalOptimum> optimum_interval(const SurvivalModel& s,
                                                const IntervalScan& scan = {});

ZClass classify_by_z(const ExponentialStage& stage, double tol = 1e-12);

const char* to_string(ZClass c);

}  // namespace zeno

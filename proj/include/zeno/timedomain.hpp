#pragma once

#include <string>
#include <vector>

#include "zeno/formfactor.hpp"
#include "zeno/renorm.hpp"

namespace zeno {

enum class Integrator { Auto, Rk4, Expm };

struct LatticeConfig {
    double eps_min = -200.0;
    double eps_max = 200.0;
    int n_modes = 4001;
    double dt = 0.0;  // 0 selects a step from the spectral scale
    double t_max = 5.0;
    int samples = 500;
    Integrator method = Integrator::Auto;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<double> s;
    std::vector<double> eps;
    std::vector<double> r;
    double max_conservation_error = 0.0;
    Integrator method = Integrator::Rk4;
    double dt = 0.0;
    int lattice_modes = 0;
};

struct RateCurve {
    std::vector<double> times;
    std::vector<double> rates;
    bool truncated = false;
};

// Lattice sizes up to this many amplitudes use the exact propagator under Integrator::Auto.
inline constexpr int kExpmMaxAmplitudes = 256;

// Throws ConfigError naming the violated field.
void validate_lattice(const LatticeConfig& cfg, const FormFactor& ff, const DetectorResponse& resp,
                      const AtomParams& atom);

// Smallest window and mode count satisfying the lattice rules for a horizon t_max.
LatticeConfig default_lattice(const FormFactor& ff, const DetectorResponse& resp,
                              const AtomParams& atom, double t_max);

Trajectory evolve(const FormFactor& ff, const DetectorResponse& resp, const AtomParams& atom,
                  const LatticeConfig& cfg);

RateCurve effective_rate_curve(const Trajectory& traj);

// Least-squares slope of -ln s(t) over samples with t0 <= t <= t1.
double late_rate(const Trajectory& traj, double t0, double t1);

std::string trajectory_csv(const Trajectory& traj);

const char* to_string(Integrator m);

}  // namespace zeno

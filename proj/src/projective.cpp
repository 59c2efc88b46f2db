#include "zeno/projective.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "zeno/optimize.hpp"

namespace zeno {

namespace {

std::vector<double> log_grid(const IntervalScan& scan) {
    if (!(scan.tau_min > 0) || !(scan.tau_max > scan.tau_min) || scan.points < 2)
        throw std::invalid_argument("invalid interval scan range");
    std::vector<double> g(static_cast<size_t>(scan.points));
    double l0 = std::log(scan.tau_min), l1 = std::log(scan.tau_max);
    for (int i = 0; i < scan.points; ++i)
        g[static_cast<size_t>(i)] = std::exp(l0 + (l1 - l0) * i / (scan.points - 1));
    g.front() = scan.tau_min;
    g.back() = scan.tau_max;
    return g;
}

}  // namespace

double decay_rate_repeated(const SurvivalModel& s, double tau_i) {
    if (!(tau_i > 0)) throw std::domain_error("measurement interval must be positive");
    return gamma_zeno(s, tau_i);
}

RepeatedMeasurementResult repeated_measurement(const SurvivalModel& s, double free_rate,
                                               double tau_i) {
    double rate = decay_rate_repeated(s, tau_i);
    return {tau_i, rate, rate / free_rate};
}

double weight_repeated(double mu, double omega, double tau_i) {
    if (!(tau_i > 0)) throw std::domain_error("measurement interval must be positive");
    double y = 0.5 * tau_i * (mu - omega);
    if (std::abs(y) < 1e-4) return tau_i * (1.0 - y * y / 3.0);
    double s = std::sin(y) / y;
    return tau_i * s * s;
}

double decay_rate_perturbative(const FormFactor& ff, const AtomParams& atom, double tau_i,
                               const QuadOptions& opts) {
    if (!(tau_i > 0)) throw std::domain_error("measurement interval must be positive");
    return sinc2_weighted_integral(ff, atom.omega, tau_i, opts);
}

std::optional<double> find_transition_interval(const SurvivalModel& s, double free_rate,
                                               const IntervalScan& scan) {
    std::vector<double> grid = log_grid(scan);
    // Differences at roundoff level count as zero, so an identically flat curve has no root.
    const double zero = 1e-12 * std::abs(free_rate);
    auto h = [&](double tau) { return decay_rate_repeated(s, tau) - free_rate; };
    auto sign = [&](double v) { return v > zero ? 1 : (v < -zero ? -1 : 0); };
    int prev = sign(h(grid[0]));
    for (size_t i = 1; i < grid.size(); ++i) {
        int cur = sign(h(grid[i]));
        if (prev != 0 && cur != 0 && cur != prev)
            return bisect(h, grid[i - 1], grid[i], scan.tol);
        if (cur != 0) prev = cur;
    }
    return std::nullopt;
}

std::optional<IntervalOptimum> optimum_interval(const SurvivalModel& s, const IntervalScan& scan) {
    std::vector<double> grid = log_grid(scan);
    size_t best = 0;
    double best_v = -1.0;
    for (size_t i = 0; i < grid.size(); ++i) {
        double v = decay_rate_repeated(s, grid[i]);
        if (v > best_v) {
            best_v = v;
            best = i;
        }
    }
    if (best == 0 || best + 1 == grid.size()) return std::nullopt;
    auto f = [&](double lt) { return decay_rate_repeated(s, std::exp(lt)); };
    double lt = golden_section_max(f, std::log(grid[best - 1]), std::log(grid[best + 1]), 1e-10);
    double tau = std::exp(lt);
    return IntervalOptimum{tau, decay_rate_repeated(s, tau)};
}

ZClass classify_by_z(const ExponentialStage& stage, double tol) {
    if (std::abs(stage.z_factor - 1.0) <= tol) return ZClass::Boundary;
    return stage.z_factor > 1.0 ? ZClass::TypeA : ZClass::TypeB;
}

const char* to_string(ZClass c) {
    switch (c) {
        case ZClass::TypeA: return "type_a";
        case ZClass::TypeB: return "type_b";
        case ZClass::Boundary: return "boundary";
    }
    return "unknown";
}

}  // namespace zeno

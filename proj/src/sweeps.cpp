#include "zeno/sweeps.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>

#include "zeno/freedecay.hpp"
#include "zeno/io.hpp"
#include "zeno/optimize.hpp"
#include "zeno/projective.hpp"
#include "zeno/renorm.hpp"

namespace zeno {

namespace {

struct Row {
    std::vector<double> values;
    std::vector<BoundaryPoint> boundary;
    std::vector<OptimumPoint> optimum;
};

using RowCurve = std::function<double(double)>;

Row analyze_row(double detuning, const RowCurve& curve, const std::vector<double>& taus,
                const SweepOptions& opts) {
    Row row;
    row.values.reserve(taus.size());
    for (double t : taus) row.values.push_back(curve(t));
    auto h = [&](double lt) { return curve(std::exp(lt)) - 1.0; };
    for (size_t j = 1; j < taus.size(); ++j) {
        double a = row.values[j - 1] - 1.0, b = row.values[j] - 1.0;
        if ((a < 0 && b > 0) || (a > 0 && b < 0)) {
            double lt = bisect(h, std::log(taus[j - 1]), std::log(taus[j]), opts.boundary_rel_tol);
            row.boundary.push_back({detuning, std::exp(lt)});
        }
    }
    size_t best = 0;
    for (size_t j = 1; j < taus.size(); ++j)
        if (row.values[j] > row.values[best]) best = j;
    if (best > 0 && best + 1 < taus.size()) {
        auto f = [&](double lt) { return curve(std::exp(lt)); };
        double lt = golden_section_max(f, std::log(taus[best - 1]), std::log(taus[best + 1]), 1e-10);
        double v = curve(std::exp(lt));
        if (v > 1.0) row.optimum.push_back({detuning, std::exp(lt), v});
    }
    return row;
}

SweepResult run_sweep(const std::vector<double>& detunings, const std::vector<double>& taus,
                      const std::function<RowCurve(double)>& make_curve, const SweepOptions& opts,
                      const char* tau_label) {
    if (detunings.empty() || taus.empty()) throw std::invalid_argument("sweep grids must be non-empty");
    for (size_t j = 0; j < taus.size(); ++j) {
        if (!(taus[j] > 0)) throw std::invalid_argument("sweep timescales must be positive");
        if (j && !(taus[j] > taus[j - 1]))
            throw std::invalid_argument("sweep timescales must be strictly increasing");
    }
    std::vector<Row> rows(detunings.size());
    auto work = [&](size_t begin, size_t stride) {
        for (size_t i = begin; i < detunings.size(); i += stride)
            rows[i] = analyze_row(detunings[i], make_curve(detunings[i]), taus, opts);
    };
    size_t nthreads = static_cast<size_t>(std::max(1, opts.threads));
    if (nthreads == 1) {
        work(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (size_t t = 0; t < nthreads; ++t) pool.emplace_back(work, t, nthreads);
    }
    SweepResult r;
    r.axis2_label = tau_label;
    r.axis1 = detunings;
    r.axis2 = taus;
    r.values.reserve(detunings.size() * taus.size());
    for (auto& row : rows) {
        r.values.insert(r.values.end(), row.values.begin(), row.values.end());
        r.boundary.insert(r.boundary.end(), row.boundary.begin(), row.boundary.end());
        r.optimum.insert(r.optimum.end(), row.optimum.begin(), row.optimum.end());
    }
    return r;
}

}  // namespace

SweepResult sweep_repeated(double gamma, double delta, const std::vector<double>& detunings,
                           const std::vector<double>& tau_i, const SweepOptions& opts) {
    auto make = [gamma, delta](double det) -> RowCurve {
        SurvivalModel s = SurvivalModel::lorentzian(gamma, delta, det, 0.0);
        double free = exponential_stage(gamma, delta, det, 0.0).rate;
        return [s, free](double tau) { return decay_rate_repeated(s, tau) / free; };
    };
    return run_sweep(detunings, tau_i, make, opts, "tau_i");
}

SweepResult sweep_continuous(double gamma, double delta, const std::vector<double>& detunings,
                             const std::vector<double>& tau_r, const SweepOptions& opts) {
    auto make = [gamma, delta](double det) -> RowCurve {
        return [gamma, delta, det](double tau) {
            return flat_response_normalized_rate(gamma, delta, det, tau);
        };
    };
    return run_sweep(detunings, tau_r, make, opts, "tau_r");
}

std::string sweep_values_csv(const SweepResult& r) {
    CsvBuilder csv({"detuning", "tau", "value"});
    for (size_t i = 0; i < r.axis1.size(); ++i)
        for (size_t j = 0; j < r.axis2.size(); ++j) csv.row({r.axis1[i], r.axis2[j], r.value(i, j)});
    return csv.str();
}

std::string sweep_boundary_csv(const SweepResult& r) {
    CsvBuilder csv({"detuning", "tau"});
    for (const auto& b : r.boundary) csv.row({b.detuning, b.tau});
    return csv.str();
}

std::string sweep_optimum_csv(const SweepResult& r) {
    CsvBuilder csv({"detuning", "tau", "value"});
    for (const auto& o : r.optimum) csv.row({o.detuning, o.tau, o.value});
    return csv.str();
}

std::vector<double> linspace(double a, double b, int n) {
    if (n < 1) throw std::invalid_argument("grid needs at least one point");
    if (n == 1) return {a};
    std::vector<double> v(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] = a + (b - a) * i / (n - 1);
    v.back() = b;
    return v;
}

std::vector<double> logspace(double a, double b, int n) {
    if (!(a > 0 && b > 0)) throw std::invalid_argument("log grid bounds must be positive");
    std::vector<double> v = linspace(std::log(a), std::log(b), n);
    for (double& x : v) x = std::exp(x);
    v.front() = a;
    if (n > 1) v.back() = b;
    return v;
}

}  // namespace zeno

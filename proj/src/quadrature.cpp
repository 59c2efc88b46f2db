#include "zeno/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "zeno/errors.hpp"

namespace zeno {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Simpson {
    const Integrand& f;
    const QuadOptions& opts;
    long evals = 0;
    bool ok = true;

    double eval(double x) {
        ++evals;
        double v = f(x);
        if (!std::isfinite(v)) {
            ok = false;
            return 0.0;
        }
        return v;
    }

    double recurse(double a, double fa, double m, double fm, double b, double fb, double whole,
                   double tol, int depth, double& err) {
        double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
        double flm = eval(lm), frm = eval(rm);
        double h = b - a;
        double left = h / 12.0 * (fa + 4.0 * flm + fm);
        double right = h / 12.0 * (fm + 4.0 * frm + fb);
        double delta = left + right - whole;
        if (depth <= 0 || evals > opts.max_evals) {
            ok = false;
            err += std::abs(delta);
            return left + right + delta / 15.0;
        }
        if (std::abs(delta) <= 15.0 * tol || h <= 1e-15 * std::max(1.0, std::abs(m))) {
            err += std::abs(delta) / 15.0;
            return left + right + delta / 15.0;
        }
        return recurse(a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1, err) +
               recurse(m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1, err);
    }
};

// Map [a, inf) onto u in [0, 1): x = a + s*u/(1-u).
Integrand map_upper(const Integrand& f, double a, double s) {
    return [&f, a, s](double u) {
        double w = 1.0 - u;
        return f(a + s * u / w) * s / (w * w);
    };
}

Integrand map_lower(const Integrand& f, double b, double s) {
    return [&f, b, s](double u) {
        double w = 1.0 - u;
        return f(b - s * u / w) * s / (w * w);
    };
}

constexpr double kUpperU = 1.0 - 1e-12;
constexpr int kPanels = 8;

QuadResult finite(const Integrand& f, double a, double b, double tol, const QuadOptions& opts) {
    Simpson s{f, opts};
    QuadResult r;
    double h = (b - a) / kPanels;
    double total = 0.0, err = 0.0;
    for (int i = 0; i < kPanels; ++i) {
        double x0 = a + i * h, x1 = (i + 1 == kPanels) ? b : a + (i + 1) * h;
        double xm = 0.5 * (x0 + x1);
        double f0 = s.eval(x0), fm = s.eval(xm), f1 = s.eval(x1);
        double whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
        total += s.recurse(x0, f0, xm, fm, x1, f1, whole, tol / kPanels, opts.max_depth, err);
    }
    r.value = total;
    r.error = err;
    r.evals = s.evals;
    r.converged = s.ok;
    return r;
}

double coarse_estimate(const Integrand& f, double a, double b) {
    const int n = 64;
    double h = (b - a) / n, sum = 0.0;
    for (int i = 0; i <= n; ++i) {
        double x = a + i * h;
        if (i == n) x = b;
        double v = f(x);
        if (!std::isfinite(v)) continue;
        sum += (i == 0 || i == n) ? 0.5 * v : v;
    }
    return sum * h;
}

}  // namespace

QuadResult integrate(const Integrand& f, double a, double b, const QuadOptions& opts) {
    if (a == b) return {};
    if (a > b) {
        QuadResult r = integrate(f, b, a, opts);
        r.value = -r.value;
        return r;
    }
    if (std::isinf(a) && std::isinf(b)) return integrate_pieces(f, {a, 0.0, b}, opts);
    if (std::isinf(b)) {
        double s = std::max(1.0, std::abs(a));
        Integrand g = map_upper(f, a, s);
        double est = coarse_estimate(g, 0.0, kUpperU);
        double tol = std::max(opts.abs_tol, opts.rel_tol * std::abs(est));
        return finite(g, 0.0, kUpperU, tol, opts);
    }
    if (std::isinf(a)) {
        double s = std::max(1.0, std::abs(b));
        Integrand g = map_lower(f, b, s);
        double est = coarse_estimate(g, 0.0, kUpperU);
        double tol = std::max(opts.abs_tol, opts.rel_tol * std::abs(est));
        return finite(g, 0.0, kUpperU, tol, opts);
    }
    double est = coarse_estimate(f, a, b);
    double tol = std::max(opts.abs_tol, opts.rel_tol * std::abs(est));
    return finite(f, a, b, tol, opts);
}

QuadResult integrate_pieces(const Integrand& f, std::vector<double> points,
                            const QuadOptions& opts) {
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    QuadResult total;
    if (points.size() < 2) return total;
    // Split the tolerance budget between pieces by a coarse magnitude estimate.
    std::vector<double> est(points.size() - 1, 0.0);
    double est_total = 0.0;
    for (size_t i = 0; i + 1 < points.size(); ++i) {
        double a = points[i], b = points[i + 1];
        if (std::isinf(a) || std::isinf(b)) {
            double e = std::isinf(b) ? coarse_estimate(map_upper(f, a, std::max(1.0, std::abs(a))),
                                                       0.0, kUpperU)
                                     : coarse_estimate(map_lower(f, b, std::max(1.0, std::abs(b))),
                                                       0.0, kUpperU);
            est[i] = std::abs(e);
        } else {
            est[i] = std::abs(coarse_estimate(f, a, b));
        }
        est_total += est[i];
    }
    double budget = std::max(opts.abs_tol, opts.rel_tol * est_total);
    double n = static_cast<double>(est.size());
    for (size_t i = 0; i + 1 < points.size(); ++i) {
        QuadOptions local = opts;
        local.rel_tol = 0.0;
        local.abs_tol = budget / n;
        double a = points[i], b = points[i + 1];
        QuadResult r;
        if (std::isinf(b) && !std::isinf(a)) {
            double s = std::max(1.0, std::abs(a));
            r = finite(map_upper(f, a, s), 0.0, kUpperU, local.abs_tol, local);
        } else if (std::isinf(a) && !std::isinf(b)) {
            double s = std::max(1.0, std::abs(b));
            r = finite(map_lower(f, b, s), 0.0, kUpperU, local.abs_tol, local);
        } else {
            r = finite(f, a, b, local.abs_tol, local);
        }
        total.value += r.value;
        total.error += r.error;
        total.evals += r.evals;
        total.converged = total.converged && r.converged;
    }
    return total;
}

double integrate_or_throw(const Integrand& f, std::vector<double> points, const QuadOptions& opts,
                          const char* what) {
    QuadResult r = integrate_pieces(f, std::move(points), opts);
    if (!r.converged)
        throw NumericError(std::string("quadrature did not converge in ") + what +
                           " (estimate " + std::to_string(r.value) + ", error " +
                           std::to_string(r.error) + ", evaluations " + std::to_string(r.evals) +
                           ")");
    return r.value;
}

void add_ladder(std::vector<double>& pts, double c, double scale, int levels) {
    pts.push_back(c);
    double step = scale;
    for (int k = 0; k < levels; ++k) {
        pts.push_back(c + step);
        pts.push_back(c - step);
        step *= 4.0;
    }
}

}  // namespace zeno

#pragma once

#include <functional>
#include <vector>

namespace zeno {

struct QuadOptions {
    double abs_tol = 1e-9;
    double rel_tol = 1e-7;
    int max_depth = 48;
    long max_evals = 20'000'000;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    long evals = 0;
    bool converged = true;
};

using Integrand = std::function<double(double)>;

// Adaptive composite Simpson on [a, b]. Either endpoint may be infinite;
// semi-infinite pieces are mapped onto a finite interval.
QuadResult integrate(const Integrand& f, double a, double b, const QuadOptions& opts = {});

// Integrates over consecutive pieces [p0,p1], [p1,p2], ... of a sorted breakpoint list.
// The first and last entries may be -inf / +inf.
QuadResult integrate_pieces(const Integrand& f, std::vector<double> points,
                            const QuadOptions& opts = {});

// Same as integrate_pieces but throws NumericError on non-convergence.
double integrate_or_throw(const Integrand& f, std::vector<double> points,
                          const QuadOptions& opts, const char* what);

// Geometric ladder of points c + s*scale*4^k, k = 0..levels-1, s = +-1, plus c itself.
void add_ladder(std::vector<double>& pts, double c, double scale, int levels);

}  // namespace zeno

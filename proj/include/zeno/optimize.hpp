#pragma once

#include <functional>

namespace zeno {

// Root of f in [a, b] given f(a), f(b) of opposite sign; stops when b - a <= tol.
double bisect(const std::function<double(double)>& f, double a, double b, double tol);

// Maximizer of a unimodal f on [a, b], to an interval width of tol.
double golden_section_max(const std::function<double(double)>& f, double a, double b, double tol);

}  // namespace zeno

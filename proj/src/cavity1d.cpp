#include "zeno/cavity1d.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "zeno/errors.hpp"
#include "zeno/io.hpp"

namespace zeno {

void validate(const SlabConfig& cfg) {
    if (!(cfg.l > 0) || !std::isfinite(cfg.l)) throw ConfigError("cavity.l", "must be positive");
    if (!(cfg.eta_idx >= 1) || !std::isfinite(cfg.eta_idx))
        throw ConfigError("cavity.eta", "refractive index must be >= 1");
    if (!(cfg.lambda_a > 0) || !std::isfinite(cfg.lambda_a))
        throw ConfigError("cavity.lambda_a", "must be positive");
}

ModeCoefficients eigenmode_coefficients(const SlabConfig& cfg, double k) {
    if (!(k > 0)) throw std::domain_error("wavenumber must be positive");
    const double h = 0.5 * k * cfg.l;
    const double th = cfg.eta_idx * h;
    const double cr = std::cos(th), sr = std::sin(th);
    const double ci = std::cos(h), si = std::sin(h);
    const double inv = 1.0 / cfg.eta_idx;
    ModeCoefficients m;
    // Rotation by eta k l / 2 applied to the interior boundary vectors.
    double u1 = ci, u2 = -inv * si;
    m.c1 = cr * u1 - sr * u2;
    m.c2 = sr * u1 + cr * u2;
    double v1 = si, v2 = inv * ci;
    m.d1 = cr * v1 - sr * v2;
    m.d2 = sr * v1 + cr * v2;
    return m;
}

double even_mode(const SlabConfig& cfg, double k, double x) {
    ModeCoefficients m = eigenmode_coefficients(cfg, k);
    double n = std::hypot(m.c1, m.c2);
    double ax = std::abs(x);
    if (ax <= 0.5 * cfg.l) return std::cos(k * x) / n;
    double p = cfg.eta_idx * k * ax;
    return (m.c1 * std::cos(p) + m.c2 * std::sin(p)) / n;
}

double odd_mode(const SlabConfig& cfg, double k, double x) {
    ModeCoefficients m = eigenmode_coefficients(cfg, k);
    double n = std::hypot(m.d1, m.d2);
    if (std::abs(x) <= 0.5 * cfg.l) return std::sin(k * x) / n;
    double p = cfg.eta_idx * k * x;
    double sgn = x > 0 ? 1.0 : -1.0;
    return (sgn * m.d1 * std::cos(p) + m.d2 * std::sin(p)) / n;
}

double decay_rate_ratio(const SlabConfig& cfg, double x) {
    validate(cfg);
    double k = 2 * std::numbers::pi / cfg.lambda_a;
    double e = even_mode(cfg, k, x), o = odd_mode(cfg, k, x);
    return (e * e + o * o) / cfg.eta_idx;
}

std::vector<double> decay_rate_profile(const SlabConfig& cfg, const std::vector<double>& x) {
    std::vector<double> out;
    out.reserve(x.size());
    for (double xi : x) out.push_back(decay_rate_ratio(cfg, xi));
    return out;
}

std::string profile_csv(const SlabConfig& cfg, const std::vector<double>& x) {
    CsvBuilder csv({"x_over_lambda", "rate_ratio"});
    std::vector<double> r = decay_rate_profile(cfg, x);
    for (size_t i = 0; i < x.size(); ++i) csv.row({x[i] / cfg.lambda_a, r[i]});
    return csv.str();
}

}  // namespace zeno

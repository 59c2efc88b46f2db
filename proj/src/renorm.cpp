#include "zeno/renorm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "zeno/errors.hpp"
#include "zeno/io.hpp"

namespace zeno {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_tau(double tau_r, const char* field) {
    if (!(tau_r > 0) || !std::isfinite(tau_r)) throw ConfigError(field, "must be positive and finite");
}

double step(double x) { return x > 0 ? 1.0 : (x < 0 ? 0.0 : 0.5); }

EtaProfile band(double center, double half, double inside, double outside) {
    return EtaProfile({{-kInf, center - half, outside, outside},
                       {center - half, center + half, inside, inside},
                       {center + half, kInf, outside, outside}});
}

}  // namespace

double EtaSegment::at(double e) const {
    if (std::isinf(a) || std::isinf(b) || b == a) return ya;
    double w = (e - a) / (b - a);
    return (1.0 - w) * ya + w * yb;
}

EtaProfile::EtaProfile(std::vector<EtaSegment> segs) : segs_(std::move(segs)) {}

EtaProfile EtaProfile::constant(double eta) { return EtaProfile({{-kInf, kInf, eta, eta}}); }

EtaProfile EtaProfile::piecewise(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<EtaSegment> s;
    s.push_back({-kInf, x.front(), y.front(), y.front()});
    for (size_t i = 0; i + 1 < x.size(); ++i)
        if (x[i + 1] > x[i]) s.push_back({x[i], x[i + 1], y[i], y[i + 1]});
    s.push_back({x.back(), kInf, y.back(), y.back()});
    return EtaProfile(std::move(s));
}

double EtaProfile::operator()(double e) const {
    double left = 0, right = 0;
    bool has_left = false, has_right = false;
    for (const auto& s : segs_) {
        if (e > s.a && e < s.b) return s.at(e);
        if (e == s.b) {
            left = s.yb;
            has_left = true;
        }
        if (e == s.a && !has_right) {
            right = s.ya;
            has_right = true;
        }
    }
    if (has_left && has_right) return 0.5 * (left + right);
    return has_left ? left : right;
}

double EtaProfile::max() const {
    double m = 0;
    for (const auto& s : segs_) m = std::max({m, s.ya, s.yb});
    return m;
}

double EtaProfile::zero_weight(double mu) const {
    double left = 0, right = 0;
    bool has_left = false, has_right = false;
    for (const auto& s : segs_) {
        if (mu > s.a && mu < s.b) return s.zero() ? 1.0 : 0.0;
        if (mu == s.b) {
            left = s.zero() ? 1.0 : 0.0;
            has_left = true;
        }
        if (mu == s.a && !has_right) {
            right = s.zero() ? 1.0 : 0.0;
            has_right = true;
        }
    }
    if (has_left && has_right) return 0.5 * (left + right);
    return has_left ? left : right;
}

std::vector<double> EtaProfile::edges() const {
    std::vector<double> e;
    for (const auto& s : segs_) {
        if (std::isfinite(s.a)) e.push_back(s.a);
        if (std::isfinite(s.b)) e.push_back(s.b);
    }
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
    return e;
}

void validate(const DetectorResponse& resp) {
    std::visit(overloaded{
                   [](const NoMeasurement&) {},
                   [](const FlatResponse& r) { check_tau(r.tau_r, "response.tau_r"); },
                   [](const ActiveBand& r) {
                       check_tau(r.tau_r, "response.tau_r");
                       if (!(r.delta_d > 0) || !std::isfinite(r.delta_d))
                           throw ConfigError("response.delta_d", "must be positive and finite");
                       if (r.center && !std::isfinite(*r.center))
                           throw ConfigError("response.center", "must be finite");
                   },
                   [](const InactiveBand& r) {
                       check_tau(r.tau_r, "response.tau_r");
                       if (!(r.delta_d_bar > 0) || !std::isfinite(r.delta_d_bar))
                           throw ConfigError("response.delta_d_bar", "must be positive and finite");
                       if (r.center && !std::isfinite(*r.center))
                           throw ConfigError("response.center", "must be finite");
                   },
                   [](const Geometric& r) {
                       check_tau(r.tau_r, "response.tau_r");
                       if (!(r.eps_inf >= 0 && r.eps_inf <= 1))
                           throw ConfigError("response.eps_inf", "must lie in [0, 1]");
                   },
                   [](const CustomResponse& r) {
                       if (r.eps.empty() || r.eps.size() != r.eta.size())
                           throw ConfigError("response.eta", "need matching non-empty columns");
                       for (size_t i = 0; i < r.eps.size(); ++i) {
                           if (!std::isfinite(r.eps[i]) || !std::isfinite(r.eta[i]))
                               throw ConfigError("response.eta", "non-finite value");
                           if (r.eta[i] < 0) throw ConfigError("response.eta", "negative rate");
                           if (i && r.eps[i] < r.eps[i - 1])
                               throw ConfigError("response.eps", "must be non-decreasing");
                       }
                   },
               },
               resp);
}

std::vector<Channel> build_channels(const FormFactor& ff, const DetectorResponse& resp,
                                    const AtomParams& atom) {
    validate(ff);
    validate(resp);
    const bool split = std::holds_alternative<GeometricSplit>(ff);
    if (split && std::holds_alternative<Geometric>(resp))
        throw ConfigError("response", "geometric response combined with a geometric-split form factor");

    EtaProfile eta = std::visit(
        overloaded{
            [](const NoMeasurement&) { return EtaProfile::constant(0.0); },
            [](const FlatResponse& r) { return EtaProfile::constant(1.0 / r.tau_r); },
            [&](const ActiveBand& r) {
                return band(r.center.value_or(atom.omega), r.delta_d, 1.0 / r.tau_r, 0.0);
            },
            [&](const InactiveBand& r) {
                return band(r.center.value_or(atom.omega), r.delta_d_bar, 0.0, 1.0 / r.tau_r);
            },
            [](const Geometric& r) { return EtaProfile::constant(1.0 / r.tau_r); },
            [](const CustomResponse& r) { return EtaProfile::piecewise(r.eps, r.eta); },
        },
        resp);

    if (auto* g = std::get_if<Geometric>(&resp)) {
        FormFactor s = make_geometric_split(ff, g->eps_inf);
        return {{detected_part(s), eta}, {undetected_part(s), EtaProfile::constant(0.0)}};
    }
    if (split) return {{detected_part(ff), eta}, {undetected_part(ff), EtaProfile::constant(0.0)}};
    return {{ff, eta}};
}

double channel_density(const Channel& ch, double mu, const QuadOptions& opts) {
    const FormFactor& ff = ch.ff;
    double total = evaluate_or_zero(ff, mu) * ch.eta.zero_weight(mu);
    auto [lo, hi] = support(ff);
    std::vector<double> features = feature_points(ff);
    for (const auto& seg : ch.eta.segments()) {
        if (seg.zero()) continue;
        double a = std::max(seg.a, lo), b = std::min(seg.b, hi);
        if (!(a < b)) continue;
        auto f = [&](double w) {
            double eta = seg.at(w);
            double d = mu - w;
            return evaluate_or_zero(ff, w) * eta / (2 * kPi) / (d * d + 0.25 * eta * eta);
        };
        double near = std::clamp(mu, std::isinf(a) ? mu : a, std::isinf(b) ? mu : b);
        double width = 0.5 * std::max(seg.at(near), 1e-3 * std::max(seg.ya, seg.yb));
        std::vector<double> pts{a, b};
        std::vector<double> ladder;
        add_ladder(ladder, mu, width, 12);
        add_ladder(ladder, near, width, 12);
        for (double p : ladder)
            if (p > a && p < b) pts.push_back(p);
        for (double p : features)
            if (p > a && p < b) pts.push_back(p);
        total += integrate_or_throw(f, pts, opts, "renormalized form factor");
    }
    return total;
}

double renormalized_density(const FormFactor& ff, const DetectorResponse& resp,
                            const AtomParams& atom, double mu, const QuadOptions& opts) {
    double total = 0;
    for (const auto& ch : build_channels(ff, resp, atom)) total += channel_density(ch, mu, opts);
    return total;
}

double measured_rate(const FormFactor& ff, const DetectorResponse& resp, const AtomParams& atom,
                     const QuadOptions& opts) {
    return 2 * kPi * renormalized_density(ff, resp, atom, atom.omega, opts);
}

double lorentzian_flat_renormalized_density(double gamma, double delta, double mu0, double tau_r,
                                            double mu) {
    double w = delta + 0.5 / tau_r;
    double x = mu - mu0;
    return gamma / (2 * kPi) * delta * w / (x * x + w * w);
}

double flat_response_rate(double gamma, double delta, double detuning, double tau_r) {
    double w = delta + 0.5 / tau_r;
    return gamma * delta * w / (detuning * detuning + w * w);
}

double flat_response_normalized_rate(double gamma, double delta, double detuning, double tau_r) {
    if (!(tau_r > 0)) throw std::domain_error("response time must be positive");
    double w = delta + 0.5 / tau_r;
    double d2 = detuning * detuning;
    (void)gamma;
    return (w / delta) * (d2 + delta * delta) / (d2 + w * w);
}

std::optional<double> phase_boundary_flat(double detuning, double delta) {
    if (!(delta > 0)) throw std::domain_error("delta must be positive");
    double d = std::abs(detuning);
    if (d <= delta) return std::nullopt;
    return delta / (2 * (d * d - delta * delta));
}

std::optional<FlatOptimum> optimum_tau_flat(double detuning, double delta) {
    if (!(delta > 0)) throw std::domain_error("delta must be positive");
    double d = std::abs(detuning);
    if (d <= delta) return std::nullopt;
    FlatOptimum o;
    o.tau_r = 1.0 / (2 * (d - delta));
    o.max_ratio = (d * d + delta * delta) / (2 * delta * d);
    o.max_enhancement = o.max_ratio - 1.0;
    return o;
}

double weight_flat(double mu, double omega, double tau_r) {
    if (!(tau_r > 0)) throw std::domain_error("response time must be positive");
    double x = mu - omega;
    return (1.0 / tau_r) / (x * x + 0.25 / (tau_r * tau_r));
}

double geometric_rate(double gamma, double delta, double detuning, double tau_r, double eps_inf) {
    if (!(eps_inf >= 0 && eps_inf <= 1)) throw std::domain_error("eps_inf must lie in [0, 1]");
    double free = gamma * delta * delta / (detuning * detuning + delta * delta);
    return eps_inf * free + (1 - eps_inf) * flat_response_rate(gamma, delta, detuning, tau_r);
}

double banded_renormalized_density(double gamma, double delta_d, double tau_r, double mu,
                                   double omega) {
    double x = mu - omega;
    return gamma / (2 * kPi * kPi) *
           (kPi * step(std::abs(x) - delta_d) + std::atan(2 * tau_r * (x + delta_d)) -
            std::atan(2 * tau_r * (x - delta_d)));
}

double false_renormalized_density(double gamma, double delta_d_bar, double tau_r, double mu,
                                  double omega) {
    double x = mu - omega;
    return gamma / (2 * kPi * kPi) *
           (kPi + kPi * step(delta_d_bar - std::abs(x)) + std::atan(2 * tau_r * (x - delta_d_bar)) -
            std::atan(2 * tau_r * (x + delta_d_bar)));
}

double banded_rate(double gamma, double delta_d, double tau_r) {
    return 2 * gamma / kPi * std::atan(2 * tau_r * delta_d);
}

double false_measurement_rate(double gamma, double delta_d_bar, double tau_r) {
    return gamma * (2 - 2 / kPi * std::atan(2 * tau_r * delta_d_bar));
}

CustomResponse parse_custom_response_csv(const std::string& text) {
    auto [e, y] = parse_two_column_csv(text, "eps", "eta");
    CustomResponse r{std::move(e), std::move(y)};
    validate(DetectorResponse{r});
    return r;
}

CustomResponse load_custom_response_csv(const std::string& path) {
    return parse_custom_response_csv(read_text_file(path));
}

}  // namespace zeno

#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "zeno/formfactor.hpp"

namespace zeno {

struct NoMeasurement {};

// eta = 1/tau_r for every mode.
struct FlatResponse {
    double tau_r = 1.0;
};

// eta = 1/tau_r for |eps - center| < delta_d, zero outside. center defaults to omega.
struct ActiveBand {
    double delta_d = 1.0;
    double tau_r = 1.0;
    std::optional<double> center;
};

// eta = 1/tau_r for |eps - center| > delta_d_bar, zero inside.
struct InactiveBand {
    double delta_d_bar = 1.0;
    double tau_r = 1.0;
    std::optional<double> center;
};

// Flat response over a fraction 1 - eps_inf of the emission; the rest escapes undetected.
struct Geometric {
    double eps_inf = 0.0;
    double tau_r = 1.0;
};

// Piecewise-linear eta(eps); repeated abscissae encode jumps; constant beyond the ends.
struct CustomResponse {
    std::vector<double> eps;
    std::vector<double> eta;
};

using DetectorResponse =
    std::variant<NoMeasurement, FlatResponse, ActiveBand, InactiveBand, Geometric, CustomResponse>;

struct EtaSegment {
    double a = 0.0, b = 0.0;    // a may be -inf, b may be +inf
    double ya = 0.0, yb = 0.0;  // linear between the ends
    bool zero() const { return ya == 0.0 && yb == 0.0; }
    double at(double e) const;
};

class EtaProfile {
public:
    EtaProfile() = default;
    explicit EtaProfile(std::vector<EtaSegment> segs);
    static EtaProfile constant(double eta);
    static EtaProfile piecewise(const std::vector<double>& x, const std::vector<double>& y);

    // Mean of the one-sided limits at a jump.
    double operator()(double e) const;
    double max() const;
    // Weight of the undamped (delta-like) contribution at mu: 1 inside a zero region,
    // 1/2 on its edge, 0 elsewhere.
    double zero_weight(double mu) const;
    std::vector<double> edges() const;
    const std::vector<EtaSegment>& segments() const { return segs_; }

private:
    std::vector<EtaSegment> segs_;
};

struct Channel {
    FormFactor ff;
    EtaProfile eta;
};

void validate(const DetectorResponse& resp);

// Energy-resolved channels: a geometric split yields a detected and an undetected channel.
std::vector<Channel> build_channels(const FormFactor& ff, const DetectorResponse& resp,
                                    const AtomParams& atom);

double channel_density(const Channel& ch, double mu, const QuadOptions& opts = {});
double renormalized_density(const FormFactor& ff, const DetectorResponse& resp,
                            const AtomParams& atom, double mu, const QuadOptions& opts = {});
double measured_rate(const FormFactor& ff, const DetectorResponse& resp, const AtomParams& atom,
                     const QuadOptions& opts = {});

// Closed forms for a Lorentzian with flat response.
double lorentzian_flat_renormalized_density(double gamma, double delta, double mu0, double tau_r,
                                            double mu);
double flat_response_rate(double gamma, double delta, double detuning, double tau_r);
double flat_response_normalized_rate(double gamma, double delta, double detuning, double tau_r);
std::optional<double> phase_boundary_flat(double detuning, double delta);

struct FlatOptimum {
    double tau_r = 0.0;
    double max_ratio = 0.0;        // peak of Gamma(tau_r)/Gamma(inf)
    double max_enhancement = 0.0;  // max_ratio - 1
};
std::optional<FlatOptimum> optimum_tau_flat(double detuning, double delta);

// tau_r^-1 / |mu - omega - i/(2 tau_r)|^2
double weight_flat(double mu, double omega, double tau_r);

double geometric_rate(double gamma, double delta, double detuning, double tau_r, double eps_inf);

// Closed forms for a flat form factor with banded responses.
double banded_renormalized_density(double gamma, double delta_d, double tau_r, double mu,
                                   double omega);
double false_renormalized_density(double gamma, double delta_d_bar, double tau_r, double mu,
                                  double omega);
double banded_rate(double gamma, double delta_d, double tau_r);
double false_measurement_rate(double gamma, double delta_d_bar, double tau_r);

CustomResponse parse_custom_response_csv(const std::string& text);
CustomResponse load_custom_response_csv(const std::string& path);

}  // namespace zeno

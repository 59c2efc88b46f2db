#pragma once

#include <string>
#include <vector>

namespace zeno {

// Vacuum gap |x| < l/2 between two dielectric half-spaces of index eta_idx.
// Lengths are in the same unit as lambda_a.
struct SlabConfig {
    double l = 1.0;
    double eta_idx = 1.0;
    double lambda_a = 1.0;
};

struct ModeCoefficients {
    double c1 = 1.0, c2 = 0.0;  // even mode, outside the gap
    double d1 = 0.0, d2 = 1.0;  // odd mode, outside the gap
};

void validate(const SlabConfig& cfg);

ModeCoefficients eigenmode_coefficients(const SlabConfig& cfg, double k);

// Parity eigenmodes at wavenumber k, normalized by sqrt(C1^2 + C2^2) and sqrt(D1^2 + D2^2).
double even_mode(const SlabConfig& cfg, double k, double x);
double odd_mode(const SlabConfig& cfg, double k, double x);

// Gamma(X)/Gamma_0 = eta^-1 (f_+(X)^2 + f_-(X)^2) at k = 2 pi / lambda_a.
double decay_rate_ratio(const SlabConfig& cfg, double x);
std::vector<double> decay_rate_profile(const SlabConfig& cfg, const std::vector<double>& x);

std::string profile_csv(const SlabConfig& cfg, const std::vector<double>& x);

}  // namespace zeno

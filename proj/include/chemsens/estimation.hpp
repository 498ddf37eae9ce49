#pragma once

#include <string>
#include <utility>

#include <Eigen/Dense>

#include "chemsens/params.hpp"

namespace chemsens::estimation {

enum class Regime { PSNL, CL, IR, Unclassified };

const char* to_string(Regime r);

struct Diagnostics {
    double sigma_plus_ratio = 0.0;   // Sigma+^2 / sigma_PSN^2
    double sigma_minus_ratio = 0.0;  // Sigma-^2 / sigma_PSN^2
};

// Relative sensitivities Delta rho_M / rho_M.
struct SensitivityReport {
    double rel_full = 0.0;
    double rel_intensity = 0.0;
    double rel_phase = 0.0;
    double rel_psn = 0.0;
    Regime regime = Regime::Unclassified;
    Diagnostics diagnostics;
};

// Balanced homodyne detector means for total photon number n_plus.
std::pair<double, double> homodyne_means(double n_plus, double phase, double phase_lo);

// d n_p / d rho (signed) and n_p d phi / d rho at fixed depth z.
struct SignalDerivatives {
    double dn_p = 0.0;
    double n_p_dphi = 0.0;
    double n_p = 0.0;
};
SignalDerivatives signal_derivatives(const params::ModelParams& p, double S_plus, double S_minus, double z);

// d n_bar / d rho = dn_p (1, 1) - n_p dphi (1, -1), at the measurement depth
// (z_opt unless a fixed thickness is configured). Throws DegenerateSignal.
Eigen::Vector2d signal_vector(const params::ModelParams& p, double S_plus, double S_minus);
Eigen::Vector2d signal_vector(const SignalDerivatives& d);

// Absolute Delta rho_M bounds.
double cramer_rao_full(const Eigen::Vector2d& signal, const Eigen::Matrix2d& Sigma2);
double cramer_rao_intensity(const SignalDerivatives& d, double Sigma_plus2);
double cramer_rao_phase(const SignalDerivatives& d, double Sigma_minus2);

// Joint bound with the measured covariance replaced by uncorrelated shot
// noise, Sigma^2 = (sigma_PSN^2 / 2) 1 with sigma_PSN^2 = 2 n_p.
double psn_estimate(const params::ModelParams& p, double S_plus, double S_minus);

struct RegimeThresholds {
    double delta = 0.1;
    double theta = 2.0;
};
Regime classify_regime(const Diagnostics& d, const RegimeThresholds& t = {});

// Everything at the measurement depth for given cross sections and covariance.
// A vanishing phase signal reports rel_phase = +inf.
SensitivityReport assess(const params::ModelParams& p, double S_plus, double S_minus, const Eigen::Matrix2d& Sigma2);

} // namespace chemsens::estimation

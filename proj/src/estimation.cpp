#include "chemsens/estimation.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "chemsens/errors.hpp"
#include "chemsens/propagation.hpp"

namespace chemsens::estimation {

namespace {

constexpr double kTiny = 1e-300;
constexpr double kMaxCondition = 1e12;

} // namespace

const char* to_string(Regime r)
{
    switch (r) {
    case Regime::PSNL: return "PSNL";
    case Regime::CL: return "CL";
    case Regime::IR: return "IR";
    case Regime::Unclassified: return "Unclassified";
    }
    return "Unclassified";
}

std::pair<double, double> homodyne_means(double n_plus, double phase, double phase_lo)
{
    const double c = std::cos(std::numbers::pi / 4.0 + 0.5 * (phase - phase_lo));
    const double n1 = n_plus * c * c;
    return {n1, n_plus - n1};
}

SignalDerivatives signal_derivatives(const params::ModelParams& p, double S_plus, double S_minus, double z)
{
    const auto [n_p, phase] = propagation::propagate_mean(p, S_plus, S_minus, z);
    (void)phase;
    SignalDerivatives d;
    d.n_p = n_p;
    d.dn_p = -S_plus * z * n_p;
    d.n_p_dphi = n_p * S_minus * z;
    return d;
}

Eigen::Vector2d signal_vector(const SignalDerivatives& d)
{
    const Eigen::Vector2d s = d.dn_p * propagation::v_plus - d.n_p_dphi * propagation::v_minus;
    if (std::abs(s(0)) < kTiny && std::abs(s(1)) < kTiny) {
        throw Error(ErrorKind::DegenerateSignal, "signal vector vanishes");
    }
    return s;
}

Eigen::Vector2d signal_vector(const params::ModelParams& p, double S_plus, double S_minus)
{
    const double z = propagation::measurement_depth(p, S_plus);
    return signal_vector(signal_derivatives(p, S_plus, S_minus, z));
}

double cramer_rao_full(const Eigen::Vector2d& signal, const Eigen::Matrix2d& Sigma2)
{
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(Sigma2);
    const double lo = es.eigenvalues()(0);
    const double hi = es.eigenvalues()(1);
    if (!(lo > 0.0) || hi / lo > kMaxCondition) {
        throw Error(ErrorKind::SingularCovariance, "covariance is singular or ill-conditioned");
    }
    const double fisher = signal.dot(Sigma2.ldlt().solve(signal));
    if (!(fisher > 0.0)) {
        throw Error(ErrorKind::DegenerateSignal, "zero Fisher information");
    }
    return 1.0 / std::sqrt(fisher);
}

double cramer_rao_intensity(const SignalDerivatives& d, double Sigma_plus2)
{
    if (std::abs(d.dn_p) < kTiny) {
        throw Error(ErrorKind::DegenerateSignal, "intensity signal vanishes");
    }
    return std::sqrt(Sigma_plus2) / std::abs(d.dn_p);
}

double cramer_rao_phase(const SignalDerivatives& d, double Sigma_minus2)
{
    if (std::abs(d.n_p_dphi) < kTiny) {
        throw Error(ErrorKind::DegenerateSignal, "phase signal vanishes");
    }
    return std::sqrt(Sigma_minus2) / std::abs(d.n_p_dphi);
}

double psn_estimate(const params::ModelParams& p, double S_plus, double S_minus)
{
    const double z = propagation::measurement_depth(p, S_plus);
    const auto d = signal_derivatives(p, S_plus, S_minus, z);
    const double sigma_psn2 = 2.0 * d.n_p;
    return cramer_rao_full(signal_vector(d), 0.5 * sigma_psn2 * Eigen::Matrix2d::Identity());
}

Regime classify_regime(const Diagnostics& d, const RegimeThresholds& t)
{
    const bool plus_psn = d.sigma_plus_ratio < 1.0 + t.delta;
    const bool minus_psn = d.sigma_minus_ratio < 1.0 + t.delta;
    if (plus_psn && minus_psn) {
        return Regime::PSNL;
    }
    if (d.sigma_plus_ratio > t.theta && d.sigma_minus_ratio > t.theta) {
        return Regime::CL;
    }
    if (plus_psn && d.sigma_minus_ratio > t.theta) {
        return Regime::IR;
    }
    return Regime::Unclassified;
}

SensitivityReport assess(const params::ModelParams& p, double S_plus, double S_minus, const Eigen::Matrix2d& Sigma2)
{
    const double rho = p.sample.density;
    const double z = propagation::measurement_depth(p, S_plus);
    const auto d = signal_derivatives(p, S_plus, S_minus, z);
    const double sigma_psn2 = 2.0 * d.n_p;
    const double sp2 = propagation::v_plus.dot(Sigma2 * propagation::v_plus);
    const double sm2 = propagation::v_minus.dot(Sigma2 * propagation::v_minus);

    SensitivityReport r;
    r.diagnostics.sigma_plus_ratio = sp2 / sigma_psn2;
    r.diagnostics.sigma_minus_ratio = sm2 / sigma_psn2;
    r.rel_full = cramer_rao_full(signal_vector(d), Sigma2) / rho;
    r.rel_intensity = cramer_rao_intensity(d, sp2) / rho;
    r.rel_phase = std::abs(d.n_p_dphi) < kTiny ? std::numeric_limits<double>::infinity()
                                                : cramer_rao_phase(d, sm2) / rho;
    r.rel_psn = cramer_rao_full(signal_vector(d), 0.5 * sigma_psn2 * Eigen::Matrix2d::Identity()) / rho;
    r.regime = classify_regime(r.diagnostics, {p.numerics.regime_delta, p.numerics.regime_theta});
    return r;
}

} // namespace chemsens::estimation

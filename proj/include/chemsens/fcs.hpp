#pragma once

#include <array>
#include <numbers>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "chemsens/liouvillian.hpp"
#include "chemsens/params.hpp"

namespace chemsens::fcs {

using liouvillian::cplx;
using liouvillian::Vector16c;

// Auxiliary phases at which the counting statistics are taken: the balanced
// homodyne point with the local oscillator reference shifted by pi. With this
// reference S_minus has the sign of the detuning.
inline constexpr std::array<double, 2> kLoPhase{std::numbers::pi / 2.0, -std::numbers::pi / 2.0};

struct EigenResult {
    cplx value;
    double gap = 0.0;  // Re(lambda_0) - Re(lambda_1)
    Vector16c right;
};

// Eigenvalue of maximal real part. When `reference` is given, the branch is
// checked against the eigenvector of largest overlap with it.
// Throws GapTooSmall (gap < 1e-10 gamma) or BranchAmbiguous.
EigenResult dominant_eigenvalue(const liouvillian::CountingLiouvillian& L, double gamma,
                                const Vector16c* reference = nullptr);

// Stationary state of L at chi = 0, normalized to unit trace.
Vector16c stationary_state(const params::ModelParams& p, std::optional<double> flux = std::nullopt);

// log tr[exp(L_chi tau) rho_ss]. Throws PropagationOverflow.
cplx cgf_finite_time(const params::ModelParams& p, const liouvillian::CountingField& chi, double tau,
                     std::optional<double> flux = std::nullopt);

// Per-molecule photon counting rate cumulants (s^-1) of the two detectors:
// c1_k = d lambda / d s_k, c2_kl = d^2 lambda / d s_k d s_l at s = 0.
struct RateCumulants {
    Eigen::Vector2d c1 = Eigen::Vector2d::Zero();
    Eigen::Matrix2d c2 = Eigen::Matrix2d::Zero();
    double gap = 0.0;
};

// Exact derivatives by perturbation theory on the dominant eigenvalue.
RateCumulants rate_cumulants(const params::ModelParams& p, double J);

// Central differences of the dominant eigenvalue in s with one Richardson
// step. step <= 0 picks h = min(1e-3, 0.02 gap / |c1|). Throws
// DifferentiationUnstable if the error estimate exceeds `tolerance` relative.
struct FdCumulants {
    RateCumulants value;
    Eigen::Vector2d c1_error = Eigen::Vector2d::Zero();
    Eigen::Matrix2d c2_error = Eigen::Matrix2d::Zero();
    double step = 0.0;
};
FdCumulants rate_cumulants_fd(const params::ModelParams& p, double J, double step = 0.0,
                              double tolerance = 1e-3);

struct CumulantSet {
    double S1 = 0.0;
    double S2 = 0.0;
    double S_plus = 0.0;
    double S_minus = 0.0;
    Eigen::Matrix2d D = Eigen::Matrix2d::Zero();
    double J = 0.0;
};

// Per-detector cross sections at probe intensity J: S_k = c1_k / (2 J).
std::pair<double, double> cross_sections_at(const params::ModelParams& p, double J);

// Weak-probe cross sections (S1, S2), extrapolated to J -> 0.
std::pair<double, double> cross_sections(const params::ModelParams& p);

// D_J = rho_M tau A c2 (m^-1).
Eigen::Matrix2d diffusion_matrix(const params::ModelParams& p, double J);

CumulantSet cumulant_set(const params::ModelParams& p, double J);

// Fit of D_J / (rho_M tau A) = D1 J + D2 J^2 / 2 through the origin.
struct DiffusionExpansion {
    Eigen::Matrix2d D1 = Eigen::Matrix2d::Zero();
    Eigen::Matrix2d D2 = Eigen::Matrix2d::Zero();
    double fit_residual = 0.0;
};

// Throws FitResidualExceeded if the residual exceeds numerics.fit_tolerance.
DiffusionExpansion fit_diffusion_expansion(const params::ModelParams& p, std::span<const double> J_grid);
DiffusionExpansion fit_diffusion_expansion(const params::ModelParams& p);

std::vector<double> default_flux_grid(const params::ModelParams& p);

} // namespace chemsens::fcs

#pragma once

#include <utility>

#include <Eigen/Dense>

#include "chemsens/params.hpp"

namespace chemsens::propagation {

// Prefactor of the second-order term of the integrated covariance; the 1/2!
// of the intensity expansion survives the integration.
inline constexpr double kKappa = 0.5;

inline constexpr double kMinCrossSection = 1e-40;  // m^2

struct PropagationState {
    double z = 0.0;
    double n_p = 0.0;
    double phase = 0.0;
    Eigen::Matrix2d Sigma2 = Eigen::Matrix2d::Zero();
};

// 1 / (rho_M S+). Throws DegenerateAbsorption for S+ below 1e-40 m^2.
double z_optimal(const params::ModelParams& p, double S_plus);

// Measurement plane: the fixed thickness if configured, z_opt otherwise.
double measurement_depth(const params::ModelParams& p, double S_plus);

// Beer's law and phase accumulation: (n_p, phase).
std::pair<double, double> propagate_mean(const params::ModelParams& p, double S_plus, double S_minus, double z);

// Integrated photon-count covariance at depth z for D_J / (rho tau A) =
// D1 J + D2 J^2 / 2.
Eigen::Matrix2d covariance_closed_form(const params::ModelParams& p, double S_plus, const Eigen::Matrix2d& D1,
                                       const Eigen::Matrix2d& D2, double z);

PropagationState propagate(const params::ModelParams& p, double S_plus, double S_minus, const Eigen::Matrix2d& D1,
                           const Eigen::Matrix2d& D2, double z);

// (Sigma+^2, Sigma-^2) at z_opt.
std::pair<double, double> sigma_pm_at_zopt(const params::ModelParams& p, double S_plus, const Eigen::Matrix2d& D1,
                                           const Eigen::Matrix2d& D2);

inline const Eigen::Vector2d v_plus{1.0, 1.0};
inline const Eigen::Vector2d v_minus{1.0, -1.0};

} // namespace chemsens::propagation

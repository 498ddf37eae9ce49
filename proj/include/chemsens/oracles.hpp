#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Dense>

#include "chemsens/params.hpp"

// Independent reference computations used to validate the closed forms.
namespace chemsens::oracles {

using DiffusionFn = std::function<Eigen::Matrix2d(double J)>;

// Gauss-Kronrod integration of the covariance flow with D_J(J) in m^-1 along
// the attenuated beam J(z') = J0 exp(-rho S+ z'). Throws QuadratureNotConverged.
struct QuadratureResult {
    Eigen::Matrix2d value = Eigen::Matrix2d::Zero();
    double error = 0.0;
};
QuadratureResult quadrature_covariance(const params::ModelParams& p, double S_plus, const DiffusionFn& D_J, double z,
                                       double tolerance = 1e-9);

struct McConfig {
    std::size_t n_trajectories = 10000;
    std::uint64_t seed = 1;
    double dt = 0.0;       // s; 0 selects 0.01 t_R
    double horizon = 0.0;  // s; 0 selects 1000 t_R
    unsigned workers = 1;
};

struct McResult {
    Eigen::Matrix2d value = Eigen::Matrix2d::Zero();           // m^-1, same normalization as D_J
    Eigen::Matrix2d standard_error = Eigen::Matrix2d::Zero();  // jackknife
    double horizon = 0.0;
};

// Telegraph-process simulation of the chemical diffusion term: each
// trajectory integrates the conditioned photon counting rates of the
// instantaneous chemical state. Throws InvalidParam outside the adiabatic gate
// or for invalid configs, InsufficientStatistics if the standard error exceeds
// 10% of the analytic chemical term.
McResult telegraph_mc_diffusion(const params::ModelParams& p, const McConfig& mc);

// Five-point central derivative with Richardson extrapolation over halved
// steps; the step with the smallest successive-estimate disagreement wins.
struct Derivative {
    double value = 0.0;
    double error = 0.0;
};
Derivative fd_pipeline_derivative(const std::function<double(double)>& f, double x, double h0 = 0.0,
                                  double tolerance = 1e-6);

} // namespace chemsens::oracles

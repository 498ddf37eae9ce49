#pragma once

#include <string>

#include <Eigen/Dense>

#include "chemsens/estimation.hpp"
#include "chemsens/fcs.hpp"
#include "chemsens/params.hpp"

namespace chemsens::pipeline {

enum class Route { Full, Adiabatic };

const char* to_string(Route r);

struct PointResult {
    Route route = Route::Full;
    double S_plus = 0.0;
    double S_minus = 0.0;
    fcs::DiffusionExpansion expansion;
    double depth = 0.0;
    Eigen::Matrix2d Sigma2 = Eigen::Matrix2d::Zero();
    estimation::SensitivityReport report;
    double spectral_gap = 0.0;  // rad/s, full route only
    bool adiabatic_gate_ok = true;
};

// Cross sections, diffusion expansion, covariance at the measurement depth
// and the sensitivity report for one parameter set.
PointResult evaluate_point(const params::ModelParams& p, Route route);

// Largest relative deviation between the two routes over S+, S-, the sigma
// ratios and the four sensitivities.
double route_deviation(const PointResult& full, const PointResult& adiabatic);

} // namespace chemsens::pipeline

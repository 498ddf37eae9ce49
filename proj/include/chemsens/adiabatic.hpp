#pragma once

#include <array>
#include <complex>
#include <optional>

#include <Eigen/Dense>

#include "chemsens/fcs.hpp"
#include "chemsens/params.hpp"

// Closed-form theory for chemistry slow compared with the electronic
// dissipation. Diffusion quantities follow the fcs normalization: per-molecule
// rate cumulants c2, with D_J = rho_M tau A c2.
namespace chemsens::adiabatic {

enum class State { A, B };

struct PlusMinus {
    double plus = 0.0;
    double minus = 0.0;
};

// Detector resolved (S1, S2) from (S+, S-).
Eigen::Vector2d per_detector(const PlusMinus& s);

PlusMinus conditioned_cross_sections(const params::ModelParams& p, State state);
PlusMinus effective_cross_sections(const params::ModelParams& p);

// Dominant eigenvalue of the two-state telegraph generator with conditioned
// generating functions K_A, K_B. Throws BranchAmbiguous when the square-root
// argument leaves the right half plane.
std::complex<double> two_state_lambda(std::complex<double> K_A, std::complex<double> K_B, double r_A, double r_B);

// Weak-probe conditioned diffusion, c2 per molecule per second, at probe
// intensity J (default J0).
Eigen::Matrix2d conditioned_diffusion(const params::ModelParams& p, State state,
                                      std::optional<double> J = std::nullopt);

// Intensity orders of the conditioned diffusion: c2 = D1 J + D2 J^2 / 2.
struct Orders {
    Eigen::Matrix2d D1 = Eigen::Matrix2d::Zero();
    Eigen::Matrix2d D2 = Eigen::Matrix2d::Zero();
};
Orders conditioned_diffusion_orders(const params::ModelParams& p, State state);

// Closed-form intensity and phase combinations v D v^T of the conditioned
// orders, in the same J^m / m! convention as Orders.
struct PlusMinusOrders {
    double D1_plus = 0.0;
    double D1_minus = 0.0;
    double D2_plus = 0.0;
    double D2_minus = 0.0;
};
PlusMinusOrders closed_form_orders(const params::ModelParams& p, State state);

// D_J in m^-1, conditioned parts plus the chemical telegraph term.
Eigen::Matrix2d adiabatic_diffusion_matrix(const params::ModelParams& p, double J);

// Chemical telegraph term alone, m^-1.
Eigen::Matrix2d chemical_diffusion(const params::ModelParams& p, double J);

// Expansion orders of the full adiabatic D_J / (rho_M tau A).
fcs::DiffusionExpansion adiabatic_expansion(const params::ModelParams& p);

struct AdiabaticQuantities {
    double p_A = 0.0;
    double p_B = 0.0;
    double t_R = 0.0;
    std::array<PlusMinus, 2> S_cond;
    std::array<Eigen::Matrix2d, 2> D_cond;
    PlusMinusOrders orders_A;
    PlusMinus S_eff;
    Eigen::Matrix2d D_eff;
};
AdiabaticQuantities evaluate(const params::ModelParams& p, std::optional<double> J = std::nullopt);

// True when r_A + r_B <= gamma / 10.
bool within_adiabatic_gate(const params::ModelParams& p);

} // namespace chemsens::adiabatic

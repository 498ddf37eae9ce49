#include "chemsens/adiabatic.hpp"

#include <cmath>

#include "chemsens/errors.hpp"

namespace chemsens::adiabatic {

using cplx = std::complex<double>;

namespace {

struct Probabilities {
    double p_A;
    double p_B;
    double t_R;
};

Probabilities probabilities(const params::ModelParams& p)
{
    const double total = p.molecule.rate_A + p.molecule.rate_B;
    return {p.molecule.rate_A / total, p.molecule.rate_B / total, 1.0 / total};
}

const params::ChemicalState& chemical_state(const params::ModelParams& p, State s)
{
    return s == State::A ? p.molecule.A : p.molecule.B;
}

double beta_sq(const params::ModelParams& p, State s)
{
    return s == State::A ? p.derived.beta_sq_A : p.derived.beta_sq_B;
}

// Weak-probe expansion of the conditioned second cumulant, split into the
// part linear in Omega^2 and the part quadratic in it. Coefficients enter per
// unit Omega^2 so the caller can scale by beta^2 J.
struct Split {
    Eigen::Matrix2d linear;
    Eigen::Matrix2d quadratic;
};

Split conditioned_split(double eps, double gamma)
{
    const cplx i(0.0, 1.0);
    const std::array<cplx, 2> a0{-i * (gamma / 8.0 - eps / 4.0), -i * (gamma / 8.0 + eps / 4.0)};
    const double a0_diag = gamma / 8.0;
    const double a1 = eps * eps + gamma * gamma / 4.0;
    const cplx a1k = -i / 4.0;
    const double a2 = eps * eps / gamma + 5.0 * gamma / 4.0;

    Split out{Eigen::Matrix2d::Zero(), Eigen::Matrix2d::Zero()};
    for (int k = 0; k < 2; ++k) {
        out.linear(k, k) = a0_diag / a1;
        // Upper triangle only and mirrored, so the matrix is symmetric bit for bit.
        for (int l = k; l < 2; ++l) {
            const cplx q = 2.0 * a2 * a0[k] * a0[l] / (a1 * a1 * a1) - (a0[k] * a1k + a0[l] * a1k) / (a1 * a1);
            out.quadratic(k, l) = q.real();
            out.quadratic(l, k) = q.real();
        }
    }
    return out;
}

} // namespace

Eigen::Vector2d per_detector(const PlusMinus& s)
{
    return Eigen::Vector2d(0.5 * (s.plus + s.minus), 0.5 * (s.plus - s.minus));
}

PlusMinus conditioned_cross_sections(const params::ModelParams& p, State state)
{
    const double eps = chemical_state(p, state).detuning;
    const double gamma = p.molecule.decay_gamma;
    const double b2 = beta_sq(p, state);
    const double denom = 4.0 * eps * eps + gamma * gamma;
    return {0.5 * gamma * b2 / denom, eps * b2 / denom};
}

PlusMinus effective_cross_sections(const params::ModelParams& p)
{
    const auto pr = probabilities(p);
    const auto a = conditioned_cross_sections(p, State::A);
    const auto b = conditioned_cross_sections(p, State::B);
    return {pr.p_A * a.plus + pr.p_B * b.plus, pr.p_A * a.minus + pr.p_B * b.minus};
}

cplx two_state_lambda(cplx K_A, cplx K_B, double r_A, double r_B)
{
    const cplx d = K_A - K_B + r_A - r_B;
    const cplx w = d * d + 4.0 * r_A * r_B;
    if (w.real() < 0.0 && !(std::abs(w) == 0.0)) {
        throw Error(ErrorKind::BranchAmbiguous, "square-root argument in the left half plane");
    }
    return 0.5 * (K_A + K_B - r_A - r_B) + 0.5 * std::sqrt(w);
}

Orders conditioned_diffusion_orders(const params::ModelParams& p, State state)
{
    const double b2 = beta_sq(p, state);
    const auto split = conditioned_split(chemical_state(p, state).detuning, p.molecule.decay_gamma);
    // c2 = linear Omega^2 + quadratic Omega^4 with Omega^2 = beta^2 J.
    return {split.linear * b2, 2.0 * split.quadratic * b2 * b2};
}

Eigen::Matrix2d conditioned_diffusion(const params::ModelParams& p, State state, std::optional<double> J)
{
    const double flux = J.value_or(p.derived.photon_flux_J0);
    const auto o = conditioned_diffusion_orders(p, state);
    return o.D1 * flux + 0.5 * o.D2 * flux * flux;
}

PlusMinusOrders closed_form_orders(const params::ModelParams& p, State state)
{
    const double eps = chemical_state(p, state).detuning;
    const double g = p.molecule.decay_gamma;
    const double b2 = beta_sq(p, state);
    const double b4 = b2 * b2;
    const double a = 4.0 * eps * eps + g * g;
    PlusMinusOrders out;
    out.D1_plus = g * b2 / a;
    out.D1_minus = out.D1_plus;
    // The published second orders are coefficients of J^2; doubling converts
    // them to the J^2 / 2 convention used throughout.
    out.D2_plus = 2.0 * b4 * g * (8.0 * eps * eps - 6.0 * g * g) / (a * a * a);
    out.D2_minus = 2.0 * (2.0 * b4 / (g * a) - 8.0 * eps * eps * (4.0 * eps * eps + 5.0 * g * g) * b4 / (g * a * a * a));
    return out;
}

Eigen::Matrix2d chemical_diffusion(const params::ModelParams& p, double J)
{
    const auto pr = probabilities(p);
    const Eigen::Vector2d dS = per_detector(conditioned_cross_sections(p, State::A)) -
                               per_detector(conditioned_cross_sections(p, State::B));
    // Telegraph second cumulant 2 t_R p_A p_B (dc1)^2 with c1 = 2 J S.
    const double scale = p.sample.density * p.laser.measurement_time * p.derived.beam_area;
    return scale * 8.0 * J * J * pr.t_R * pr.p_A * pr.p_B * (dS * dS.transpose());
}

Eigen::Matrix2d adiabatic_diffusion_matrix(const params::ModelParams& p, double J)
{
    const auto pr = probabilities(p);
    const double scale = p.sample.density * p.laser.measurement_time * p.derived.beam_area;
    const Eigen::Matrix2d cond =
        pr.p_A * conditioned_diffusion(p, State::A, J) + pr.p_B * conditioned_diffusion(p, State::B, J);
    return scale * cond + chemical_diffusion(p, J);
}

fcs::DiffusionExpansion adiabatic_expansion(const params::ModelParams& p)
{
    const auto pr = probabilities(p);
    const auto a = conditioned_diffusion_orders(p, State::A);
    const auto b = conditioned_diffusion_orders(p, State::B);
    const Eigen::Vector2d dS = per_detector(conditioned_cross_sections(p, State::A)) -
                               per_detector(conditioned_cross_sections(p, State::B));
    fcs::DiffusionExpansion out;
    out.D1 = pr.p_A * a.D1 + pr.p_B * b.D1;
    out.D2 = pr.p_A * a.D2 + pr.p_B * b.D2 + 16.0 * pr.t_R * pr.p_A * pr.p_B * (dS * dS.transpose());
    out.fit_residual = 0.0;
    return out;
}

AdiabaticQuantities evaluate(const params::ModelParams& p, std::optional<double> J)
{
    const double flux = J.value_or(p.derived.photon_flux_J0);
    const auto pr = probabilities(p);
    AdiabaticQuantities q;
    q.p_A = pr.p_A;
    q.p_B = pr.p_B;
    q.t_R = pr.t_R;
    q.S_cond = {conditioned_cross_sections(p, State::A), conditioned_cross_sections(p, State::B)};
    q.D_cond = {conditioned_diffusion(p, State::A, flux), conditioned_diffusion(p, State::B, flux)};
    q.orders_A = closed_form_orders(p, State::A);
    q.S_eff = effective_cross_sections(p);
    q.D_eff = adiabatic_diffusion_matrix(p, flux);
    return q;
}

bool within_adiabatic_gate(const params::ModelParams& p)
{
    return p.molecule.rate_A + p.molecule.rate_B <= p.molecule.decay_gamma / 10.0;
}

} // namespace chemsens::adiabatic

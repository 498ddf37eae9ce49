#include "chemsens/propagation.hpp"

#include <cmath>
#include <numbers>
#include <tuple>

#include "chemsens/errors.hpp"

namespace chemsens::propagation {

double z_optimal(const params::ModelParams& p, double S_plus)
{
    if (!(S_plus > kMinCrossSection)) {
        throw Error(ErrorKind::DegenerateAbsorption,
                    "absorption cross section " + std::to_string(S_plus) + " m^2 is not positive");
    }
    return 1.0 / (p.sample.density * S_plus);
}

double measurement_depth(const params::ModelParams& p, double S_plus)
{
    if (p.sample.fixed_thickness) {
        return *p.sample.fixed_thickness;
    }
    return z_optimal(p, S_plus);
}

std::pair<double, double> propagate_mean(const params::ModelParams& p, double S_plus, double S_minus, double z)
{
    const double rho = p.sample.density;
    return {p.derived.n_p0 * std::exp(-rho * S_plus * z), rho * S_minus * z};
}

Eigen::Matrix2d covariance_closed_form(const params::ModelParams& p, double S_plus, const Eigen::Matrix2d& D1,
                                       const Eigen::Matrix2d& D2, double z)
{
    const double n0 = p.derived.n_p0;
    const double J0 = p.derived.photon_flux_J0;
    const double rho = p.sample.density;
    const double e1 = std::exp(-rho * S_plus * z);
    const double e2 = e1 * e1;
    Eigen::Matrix2d out = n0 * e2 * Eigen::Matrix2d::Identity();
    if (S_plus > 0.0) {
        out += n0 * (D1 / S_plus) * (e1 - e2);
    } else {
        // S+ -> 0 limit of (e1 - e2) / S+.
        out += n0 * D1 * rho * z;
    }
    out += e2 * n0 * J0 * rho * D2 * z * kKappa;
    return out;
}

PropagationState propagate(const params::ModelParams& p, double S_plus, double S_minus, const Eigen::Matrix2d& D1,
                           const Eigen::Matrix2d& D2, double z)
{
    PropagationState s;
    s.z = z;
    std::tie(s.n_p, s.phase) = propagate_mean(p, S_plus, S_minus, z);
    s.Sigma2 = covariance_closed_form(p, S_plus, D1, D2, z);
    return s;
}

std::pair<double, double> sigma_pm_at_zopt(const params::ModelParams& p, double S_plus, const Eigen::Matrix2d& D1,
                                           const Eigen::Matrix2d& D2)
{
    const double n0 = p.derived.n_p0;
    const double J0 = p.derived.photon_flux_J0;
    const double e = std::numbers::e;
    auto channel = [&](const Eigen::Vector2d& v) {
        const double d1 = v.dot(D1 * v);
        const double d2 = v.dot(D2 * v);
        return 2.0 * n0 / (e * e) + n0 * (d1 / S_plus) * (1.0 / e - 1.0 / (e * e)) +
               kKappa * n0 * J0 * d2 / (e * e * S_plus);
    };
    z_optimal(p, S_plus);
    return {channel(v_plus), channel(v_minus)};
}

} // namespace chemsens::propagation

#include "chemsens/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "chemsens/adiabatic.hpp"
#include "chemsens/liouvillian.hpp"
#include "chemsens/propagation.hpp"

namespace chemsens::pipeline {

const char* to_string(Route r)
{
    return r == Route::Full ? "full" : "adiabatic";
}

PointResult evaluate_point(const params::ModelParams& p, Route route)
{
    PointResult out;
    out.route = route;
    out.adiabatic_gate_ok = adiabatic::within_adiabatic_gate(p);
    if (route == Route::Full) {
        const auto [S1, S2] = fcs::cross_sections(p);
        out.S_plus = S1 + S2;
        out.S_minus = S1 - S2;
        out.expansion = fcs::fit_diffusion_expansion(p);
        out.spectral_gap = fcs::rate_cumulants(p, p.derived.photon_flux_J0).gap;
    } else {
        const auto s = adiabatic::effective_cross_sections(p);
        out.S_plus = s.plus;
        out.S_minus = s.minus;
        out.expansion = adiabatic::adiabatic_expansion(p);
    }
    out.depth = propagation::measurement_depth(p, out.S_plus);
    out.Sigma2 = propagation::covariance_closed_form(p, out.S_plus, out.expansion.D1, out.expansion.D2, out.depth);
    out.report = estimation::assess(p, out.S_plus, out.S_minus, out.Sigma2);
    return out;
}

double route_deviation(const PointResult& a, const PointResult& b)
{
    auto rel = [](double x, double y) {
        if (x == y) {
            return 0.0;
        }
        if (!std::isfinite(x) || !std::isfinite(y)) {
            return std::isinf(x) && std::isinf(y) ? 0.0 : HUGE_VAL;
        }
        return std::abs(x - y) / std::max(std::abs(x), std::abs(y));
    };
    const auto& ra = a.report;
    const auto& rb = b.report;
    return std::max({rel(a.S_plus, b.S_plus), rel(a.S_minus, b.S_minus),
                     rel(ra.diagnostics.sigma_plus_ratio, rb.diagnostics.sigma_plus_ratio),
                     rel(ra.diagnostics.sigma_minus_ratio, rb.diagnostics.sigma_minus_ratio),
                     rel(ra.rel_full, rb.rel_full), rel(ra.rel_intensity, rb.rel_intensity),
                     rel(ra.rel_phase, rb.rel_phase), rel(ra.rel_psn, rb.rel_psn)});
}

} // namespace chemsens::pipeline

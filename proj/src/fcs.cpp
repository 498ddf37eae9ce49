#include "chemsens/fcs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "chemsens/errors.hpp"

namespace chemsens::fcs {

using liouvillian::CountingField;
using liouvillian::Matrix16c;

namespace {

constexpr double kGapFloor = 1e-10;
constexpr double kStepEta = 0.02;
constexpr double kMaxStep = 1e-3;

double flux_or_default(const params::ModelParams& p, std::optional<double> flux)
{
    return flux.value_or(p.derived.photon_flux_J0);
}

Vector16c solve_stationary(const Matrix16c& L0)
{
    // Population rows of L0 sum to zero, so one of them can be traded for the
    // normalization tr(rho) = 1.
    Matrix16c a = L0;
    a.row(0) = liouvillian::trace_functional();
    Vector16c rhs = Vector16c::Zero();
    rhs(0) = 1.0;
    return a.fullPivLu().solve(rhs);
}

double spectral_gap(const Matrix16c& L0)
{
    Eigen::ComplexEigenSolver<Matrix16c> es(L0, false);
    std::array<double, 16> re{};
    for (int i = 0; i < 16; ++i) {
        re[i] = es.eigenvalues()(i).real();
    }
    std::sort(re.begin(), re.end(), std::greater<>());
    return re[0] - re[1];
}

void check_gap(double gap, double gamma)
{
    if (!(gap >= kGapFloor * gamma)) {
        throw Error(ErrorKind::GapTooSmall,
                    "spectral gap " + std::to_string(gap) + " rad/s below " + std::to_string(kGapFloor) + " gamma");
    }
}

double lambda_at(const params::ModelParams& p, double J, double s1, double s2, const Vector16c& ref)
{
    auto L = liouvillian::build_two_sided(p, CountingField::from_moment(s1, s2), kLoPhase, J);
    return dominant_eigenvalue(L, p.molecule.decay_gamma, &ref).value.real();
}

} // namespace

EigenResult dominant_eigenvalue(const liouvillian::CountingLiouvillian& L, double gamma, const Vector16c* reference)
{
    Eigen::ComplexEigenSolver<Matrix16c> es(L.matrix, true);
    if (es.info() != Eigen::Success) {
        throw Error(ErrorKind::BranchAmbiguous, "eigen-decomposition failed");
    }
    const auto& ev = es.eigenvalues();
    std::array<int, 16> order{};
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return ev(a).real() > ev(b).real(); });

    EigenResult out;
    out.value = ev(order[0]);
    out.gap = ev(order[0]).real() - ev(order[1]).real();
    out.right = es.eigenvectors().col(order[0]);
    check_gap(out.gap, gamma);

    if (reference != nullptr) {
        int best = 0;
        double best_overlap = -1.0;
        for (int i = 0; i < 16; ++i) {
            const auto v = es.eigenvectors().col(i);
            const double overlap = std::abs(reference->dot(v)) / v.norm();
            if (overlap > best_overlap) {
                best_overlap = overlap;
                best = i;
            }
        }
        if (best != order[0]) {
            throw Error(ErrorKind::BranchAmbiguous, "largest eigenvalue is not on the stationary branch");
        }
    }
    return out;
}

Vector16c stationary_state(const params::ModelParams& p, std::optional<double> flux)
{
    auto L = liouvillian::build_two_sided(p, {}, kLoPhase, flux_or_default(p, flux));
    return solve_stationary(L.matrix);
}

cplx cgf_finite_time(const params::ModelParams& p, const CountingField& chi, double tau, std::optional<double> flux)
{
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw Error(ErrorKind::InvalidParam, "tau must be > 0");
    }
    const double J = flux_or_default(p, flux);
    const Vector16c rho = stationary_state(p, J);
    auto L = liouvillian::build_two_sided(p, chi, kLoPhase, J);
    const Matrix16c propagator = (L.matrix * tau).exp();
    const cplx tr = (liouvillian::trace_functional() * (propagator * rho)).value();
    if (!std::isfinite(tr.real()) || !std::isfinite(tr.imag()) || std::abs(tr) == 0.0) {
        throw Error(ErrorKind::PropagationOverflow, "matrix exponential is not finite at tau = " + std::to_string(tau));
    }
    return std::log(tr);
}

RateCumulants rate_cumulants(const params::ModelParams& p, double J)
{
    const Matrix16c L0 = liouvillian::build_two_sided(p, {}, kLoPhase, J).matrix;
    const auto d = liouvillian::counting_derivatives(p, kLoPhase, J);
    const auto left = liouvillian::trace_functional();

    RateCumulants out;
    out.gap = spectral_gap(L0);
    check_gap(out.gap, p.molecule.decay_gamma);

    const Vector16c r = solve_stationary(L0);
    // L0 - r l is invertible and maps the traceless subspace onto itself, so
    // it acts there as the reduced resolvent.
    const Eigen::FullPivLU<Matrix16c> shifted(L0 - r * left);

    std::array<cplx, 2> c1{};
    std::array<Vector16c, 2> x;
    for (int k = 0; k < 2; ++k) {
        c1[k] = (left * (d.first[k] * r)).value();
        x[k] = shifted.solve(d.first[k] * r - c1[k] * r);
        out.c1(k) = c1[k].real();
    }
    for (int k = 0; k < 2; ++k) {
        for (int l = 0; l < 2; ++l) {
            cplx v = -(left * (d.first[k] * x[l])).value() - (left * (d.first[l] * x[k])).value();
            if (k == l) {
                v += (left * (d.second[k] * r)).value();
            }
            out.c2(k, l) = v.real();
        }
    }
    out.c2 = 0.5 * (out.c2 + out.c2.transpose()).eval();
    return out;
}

FdCumulants rate_cumulants_fd(const params::ModelParams& p, double J, double step, double tolerance)
{
    const Vector16c ref = stationary_state(p, J);
    const Matrix16c L0 = liouvillian::build_two_sided(p, {}, kLoPhase, J).matrix;
    const double gap = spectral_gap(L0);
    check_gap(gap, p.molecule.decay_gamma);

    double h = step;
    if (h <= 0.0) {
        // Pilot first cumulant: the stationary flux expectation.
        const auto d = liouvillian::counting_derivatives(p, kLoPhase, J);
        const auto left = liouvillian::trace_functional();
        double c1_scale = 0.0;
        for (int k = 0; k < 2; ++k) {
            c1_scale = std::max(c1_scale, std::abs((left * (d.first[k] * ref)).value()));
        }
        h = c1_scale > 0.0 ? std::min(kMaxStep, kStepEta * gap / c1_scale) : kMaxStep;
    }

    const double lam0 = lambda_at(p, J, 0.0, 0.0, ref);
    auto first = [&](double hh) {
        Eigen::Vector2d g;
        g(0) = (lambda_at(p, J, hh, 0.0, ref) - lambda_at(p, J, -hh, 0.0, ref)) / (2.0 * hh);
        g(1) = (lambda_at(p, J, 0.0, hh, ref) - lambda_at(p, J, 0.0, -hh, ref)) / (2.0 * hh);
        return g;
    };
    auto second = [&](double hh) {
        Eigen::Matrix2d m;
        m(0, 0) = (lambda_at(p, J, hh, 0.0, ref) - 2.0 * lam0 + lambda_at(p, J, -hh, 0.0, ref)) / (hh * hh);
        m(1, 1) = (lambda_at(p, J, 0.0, hh, ref) - 2.0 * lam0 + lambda_at(p, J, 0.0, -hh, ref)) / (hh * hh);
        m(0, 1) = (lambda_at(p, J, hh, hh, ref) - lambda_at(p, J, hh, -hh, ref) - lambda_at(p, J, -hh, hh, ref) +
                   lambda_at(p, J, -hh, -hh, ref)) /
                  (4.0 * hh * hh);
        m(1, 0) = m(0, 1);
        return m;
    };

    FdCumulants out;
    out.step = h;
    out.value.gap = gap;
    const Eigen::Vector2d g1 = first(h);
    const Eigen::Vector2d g2 = first(0.5 * h);
    out.value.c1 = (4.0 * g2 - g1) / 3.0;
    out.c1_error = (g2 - g1).cwiseAbs() / 3.0;
    const Eigen::Matrix2d m1 = second(h);
    const Eigen::Matrix2d m2 = second(0.5 * h);
    out.value.c2 = (4.0 * m2 - m1) / 3.0;
    out.c2_error = (m2 - m1).cwiseAbs() / 3.0;

    const double c1_scale = out.value.c1.cwiseAbs().maxCoeff();
    const double c2_scale = out.value.c2.cwiseAbs().maxCoeff();
    if (out.c1_error.maxCoeff() > tolerance * c1_scale || out.c2_error.maxCoeff() > tolerance * c2_scale) {
        throw Error(ErrorKind::DifferentiationUnstable,
                    "Richardson error estimate exceeds " + std::to_string(tolerance) + " relative at step " +
                        std::to_string(h));
    }
    return out;
}

std::pair<double, double> cross_sections_at(const params::ModelParams& p, double J)
{
    const auto c = rate_cumulants(p, J);
    return {c.c1(0) / (2.0 * J), c.c1(1) / (2.0 * J)};
}

std::pair<double, double> cross_sections(const params::ModelParams& p)
{
    const double Jw = p.numerics.weak_probe_fraction * p.derived.photon_flux_J0;
    const auto full = cross_sections_at(p, Jw);
    const auto half = cross_sections_at(p, 0.5 * Jw);
    return {2.0 * half.first - full.first, 2.0 * half.second - full.second};
}

Eigen::Matrix2d diffusion_matrix(const params::ModelParams& p, double J)
{
    if (!(J > 0.0)) {
        throw Error(ErrorKind::InvalidParam, "J must be > 0");
    }
    const double scale = p.sample.density * p.laser.measurement_time * p.derived.beam_area;
    return scale * rate_cumulants(p, J).c2;
}

CumulantSet cumulant_set(const params::ModelParams& p, double J)
{
    const auto c = rate_cumulants(p, J);
    CumulantSet out;
    out.J = J;
    out.S1 = c.c1(0) / (2.0 * J);
    out.S2 = c.c1(1) / (2.0 * J);
    out.S_plus = out.S1 + out.S2;
    out.S_minus = out.S1 - out.S2;
    out.D = p.sample.density * p.laser.measurement_time * p.derived.beam_area * c.c2;
    return out;
}

std::vector<double> default_flux_grid(const params::ModelParams& p)
{
    std::vector<double> grid;
    for (double f : p.numerics.flux_grid) {
        grid.push_back(f * p.derived.photon_flux_J0);
    }
    return grid;
}

DiffusionExpansion fit_diffusion_expansion(const params::ModelParams& p, std::span<const double> J_grid)
{
    if (J_grid.size() < 4) {
        throw Error(ErrorKind::InvalidParam, "J_grid needs at least 4 points");
    }
    // Fit in x = J / J0; raw J columns differ by ~20 orders of magnitude.
    const double J0 = p.derived.photon_flux_J0;
    const auto n = static_cast<Eigen::Index>(J_grid.size());
    Eigen::MatrixXd X(n, 2);
    Eigen::MatrixXd Y(n, 4);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double J = J_grid[static_cast<size_t>(i)];
        if (!(J > 0.0)) {
            throw Error(ErrorKind::InvalidParam, "J_grid entries must be > 0");
        }
        const double x = J / J0;
        X(i, 0) = x;
        X(i, 1) = 0.5 * x * x;
        const Eigen::Matrix2d c2 = rate_cumulants(p, J).c2;
        Y(i, 0) = c2(0, 0);
        Y(i, 1) = c2(0, 1);
        Y(i, 2) = c2(1, 0);
        Y(i, 3) = c2(1, 1);
    }
    const Eigen::MatrixXd coef = X.colPivHouseholderQr().solve(Y);
    const double ynorm = Y.norm();

    DiffusionExpansion out;
    out.fit_residual = ynorm > 0.0 ? (X * coef - Y).norm() / ynorm : 0.0;
    out.D1 << coef(0, 0), coef(0, 1), coef(0, 2), coef(0, 3);
    out.D2 << coef(1, 0), coef(1, 1), coef(1, 2), coef(1, 3);
    out.D1 /= J0;
    out.D2 /= J0 * J0;
    if (out.fit_residual > p.numerics.fit_tolerance) {
        throw Error(ErrorKind::FitResidualExceeded, "two-order fit residual " + std::to_string(out.fit_residual) +
                                                        " exceeds " + std::to_string(p.numerics.fit_tolerance));
    }
    return out;
}

DiffusionExpansion fit_diffusion_expansion(const params::ModelParams& p)
{
    const auto grid = default_flux_grid(p);
    return fit_diffusion_expansion(p, grid);
}

} // namespace chemsens::fcs

#include "chemsens/oracles.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "chemsens/adiabatic.hpp"
#include "chemsens/errors.hpp"
#include "chemsens/parallel.hpp"

namespace chemsens::oracles {

QuadratureResult quadrature_covariance(const params::ModelParams& p, double S_plus, const DiffusionFn& D_J, double z,
                                       double tolerance)
{
    using boost::math::quadrature::gauss_kronrod;
    const double rho = p.sample.density;
    const double J0 = p.derived.photon_flux_J0;
    const double n0 = p.derived.n_p0;

    QuadratureResult out;
    out.value = n0 * std::exp(-2.0 * rho * S_plus * z) * Eigen::Matrix2d::Identity();
    if (z <= 0.0) {
        return out;
    }

    // The three independent entries share nodes; cache D_J per node.
    std::map<double, Eigen::Matrix2d> cache;
    auto integrand = [&](double zp) -> const Eigen::Matrix2d& {
        auto it = cache.find(zp);
        if (it == cache.end()) {
            const Eigen::Matrix2d d = std::exp(-2.0 * rho * S_plus * (z - zp)) * D_J(J0 * std::exp(-rho * S_plus * zp));
            it = cache.emplace(zp, d).first;
        }
        return it->second;
    };

    const std::array<std::pair<int, int>, 3> entries{{{0, 0}, {0, 1}, {1, 1}}};
    std::array<double, 3> values{};
    std::array<double, 3> errors{};
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto [r, c] = entries[i];
        auto f = [&](double zp) { return integrand(zp)(r, c); };
        // Below ~1e-10 the Kronrod error estimate sits on its rounding floor and
        // bisection only inflates it, so ask for exactly `tolerance` and cap
        // the depth.
        values[i] = gauss_kronrod<double, 31>::integrate(f, 0.0, z, 15, tolerance, &errors[i]);
    }
    const double scale = std::max({std::abs(values[0]), std::abs(values[1]), std::abs(values[2]), out.value(0, 0)});
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (!(errors[i] <= tolerance * scale)) {
            throw Error(ErrorKind::QuadratureNotConverged,
                        "estimated error " + std::to_string(errors[i]) + " above tolerance");
        }
        out.error = std::max(out.error, errors[i]);
    }
    out.value(0, 0) += values[0];
    out.value(0, 1) += values[1];
    out.value(1, 0) += values[1];
    out.value(1, 1) += values[2];
    return out;
}

namespace {

// Time spent in state A over [0, horizon], starting from the stationary
// distribution. Out-rate of A is r_B (transfer into B) and vice versa.
double time_in_a(std::mt19937_64& rng, double p_A, double out_of_a, double out_of_b, double horizon)
{
    std::bernoulli_distribution start_in_a(p_A);
    bool in_a = start_in_a(rng);
    double t = 0.0;
    double t_a = 0.0;
    while (t < horizon) {
        const double rate = in_a ? out_of_a : out_of_b;
        double stay = horizon - t;
        if (rate > 0.0) {
            stay = std::min(stay, std::exponential_distribution<double>(rate)(rng));
        }
        if (in_a) {
            t_a += stay;
        }
        t += stay;
        in_a = !in_a;
    }
    return t_a;
}

} // namespace

McResult telegraph_mc_diffusion(const params::ModelParams& p, const McConfig& mc)
{
    if (!adiabatic::within_adiabatic_gate(p)) {
        throw Error(ErrorKind::InvalidParam, "telegraph oracle requires r_A + r_B <= gamma / 10");
    }
    const double r_A = p.molecule.rate_A;
    const double r_B = p.molecule.rate_B;
    const double t_R = 1.0 / (r_A + r_B);
    const double p_A = r_A / (r_A + r_B);
    const double dt = mc.dt > 0.0 ? mc.dt : 0.01 * t_R;
    const double horizon = mc.horizon > 0.0 ? mc.horizon : 1000.0 * t_R;
    if (mc.n_trajectories < 1000) {
        throw Error(ErrorKind::InvalidParam, "n_trajectories must be >= 1000");
    }
    if (dt > 0.01 * t_R * (1.0 + 1e-12)) {
        throw Error(ErrorKind::InvalidParam, "dt must be <= 0.01 t_R");
    }
    if (horizon < 10.0 * t_R * (1.0 - 1e-12)) {
        throw Error(ErrorKind::InvalidParam, "horizon must be >= 10 t_R");
    }

    // Conditioned counting rates are piecewise constant between jumps, so the
    // flux integral over each segment is exact and the count vector is an
    // affine function of the time spent in A.
    const double J0 = p.derived.photon_flux_J0;
    const Eigen::Vector2d c1_A = 2.0 * J0 * adiabatic::per_detector(adiabatic::conditioned_cross_sections(p, adiabatic::State::A));
    const Eigen::Vector2d c1_B = 2.0 * J0 * adiabatic::per_detector(adiabatic::conditioned_cross_sections(p, adiabatic::State::B));

    const std::size_t n = mc.n_trajectories;
    std::vector<double> n1(n), n2(n);
    parallel_for(n, mc.workers, [&](std::size_t i) {
        std::seed_seq seq{static_cast<std::uint32_t>(mc.seed), static_cast<std::uint32_t>(mc.seed >> 32),
                          static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(std::uint64_t(i) >> 32)};
        std::mt19937_64 rng(seq);
        const double t_a = time_in_a(rng, p_A, r_B, r_A, horizon);
        const Eigen::Vector2d counts = c1_A * t_a + c1_B * (horizon - t_a);
        n1[i] = counts(0);
        n2[i] = counts(1);
    });

    // Delete-block jackknife of the covariance; each block statistic uses
    // pairwise sums so the reduction is order independent.
    constexpr std::size_t kBlocks = 100;
    const double scale = p.sample.density * p.laser.measurement_time * p.derived.beam_area / horizon;
    auto covariance_excluding = [&](std::size_t lo, std::size_t hi) {
        std::vector<double> a, b;
        a.reserve(n);
        b.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (i < lo || i >= hi) {
                a.push_back(n1[i]);
                b.push_back(n2[i]);
            }
        }
        const double m = static_cast<double>(a.size());
        const double ma = pairwise_sum(a) / m;
        const double mb = pairwise_sum(b) / m;
        std::vector<double> aa(a.size()), ab(a.size()), bb(a.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            aa[i] = (a[i] - ma) * (a[i] - ma);
            ab[i] = (a[i] - ma) * (b[i] - mb);
            bb[i] = (b[i] - mb) * (b[i] - mb);
        }
        Eigen::Matrix2d c;
        c(0, 0) = pairwise_sum(aa) / (m - 1.0);
        c(0, 1) = c(1, 0) = pairwise_sum(ab) / (m - 1.0);
        c(1, 1) = pairwise_sum(bb) / (m - 1.0);
        return Eigen::Matrix2d(scale * c);
    };

    McResult out;
    out.horizon = horizon;
    out.value = covariance_excluding(n, n);
    std::vector<Eigen::Matrix2d> blocks(kBlocks);
    for (std::size_t g = 0; g < kBlocks; ++g) {
        blocks[g] = covariance_excluding(g * n / kBlocks, (g + 1) * n / kBlocks);
    }
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            std::vector<double> v(kBlocks);
            for (std::size_t g = 0; g < kBlocks; ++g) {
                v[g] = blocks[g](r, c);
            }
            const double mean = pairwise_sum(v) / kBlocks;
            for (auto& x : v) {
                x = (x - mean) * (x - mean);
            }
            out.standard_error(r, c) = std::sqrt((kBlocks - 1.0) / kBlocks * pairwise_sum(v));
        }
    }

    const double analytic = adiabatic::chemical_diffusion(p, J0).cwiseAbs().maxCoeff();
    if (analytic > 0.0 && out.standard_error.maxCoeff() > 0.1 * analytic) {
        throw Error(ErrorKind::InsufficientStatistics, "standard error above 10% of the analytic chemical term");
    }
    return out;
}

Derivative fd_pipeline_derivative(const std::function<double(double)>& f, double x, double h0, double tolerance)
{
    double h = h0 > 0.0 ? h0 : 1e-2 * std::max(std::abs(x), 1.0);
    auto stencil = [&](double hh) {
        return (-f(x + 2.0 * hh) + 8.0 * f(x + hh) - 8.0 * f(x - hh) + f(x - 2.0 * hh)) / (12.0 * hh);
    };
    constexpr int kLevels = 10;
    // Difference quotients cannot resolve changes below the rounding of f itself;
    // the stencil weights sum to 18/12 in absolute value.
    const double f_scale = std::abs(f(x));
    double prev_d = stencil(h);
    double prev_r = std::numeric_limits<double>::quiet_NaN();
    Derivative best{prev_d, std::numeric_limits<double>::infinity()};
    double best_h = h;
    // A level is trusted only when it agrees with both neighbours, so two noisy
    // levels cannot match by chance.
    double prev_diff = std::numeric_limits<double>::infinity();
    double prev_h = h;
    for (int level = 0; level < kLevels; ++level) {
        h *= 0.5;
        const double d = stencil(h);
        const double r = (16.0 * d - prev_d) / 15.0;
        if (std::isfinite(prev_r)) {
            const double diff = std::abs(r - prev_r);
            const double err = std::max(diff, prev_diff);
            if (err < best.error) {
                best = {prev_r, err};
                best_h = prev_h;
            }
            if (err == 0.0) {
                break;
            }
            prev_diff = diff;
        }
        prev_d = d;
        prev_r = r;
        prev_h = h;
    }
    const double rounding = 4.0 * 1.5 * std::numeric_limits<double>::epsilon() * f_scale / best_h;
    if (!std::isfinite(best.value) || best.error > tolerance * std::abs(best.value) + rounding + 1e-300) {
        throw Error(ErrorKind::StencilUnstable, "Richardson estimates disagree by " + std::to_string(best.error));
    }
    return best;
}

} // namespace chemsens::oracles

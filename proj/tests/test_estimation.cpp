#include <doctest.h>

#include <numbers>
#include <random>

#include "chemsens/errors.hpp"
#include "chemsens/estimation.hpp"
#include "chemsens/oracles.hpp"
#include "chemsens/pipeline.hpp"
#include "chemsens/propagation.hpp"
#include "support.hpp"

using namespace chemsens;
using namespace chemsens::estimation;
using testing::rel;
using testing::setup;

TEST_SUITE("estimation") {

TEST_CASE("homodyne means")
{
    const double pi = std::numbers::pi;
    auto [a, b] = homodyne_means(10.0, 0.4, 0.4);
    CHECK(a == doctest::Approx(5.0));
    CHECK(b == doctest::Approx(5.0));
    std::tie(a, b) = homodyne_means(10.0, pi / 2.0, 0.0);
    CHECK(std::abs(a) < 1e-14);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int i = 0; i < 100; ++i) {
        const double n = 1e6 * std::abs(u(rng));
        std::tie(a, b) = homodyne_means(n, u(rng), u(rng));
        CHECK(std::abs(a + b - n) <= 1e-12 * n);
    }
}

TEST_CASE("signal vector channels")
{
    const auto p = setup(0.0, 1e-4);
    const Eigen::Vector2d s = signal_vector(p, 2e-17, 0.0);
    CHECK(s(0) == s(1));
    CHECK(s(0) < 0.0);

    const double Sp = 1e-18, Sm = 2.0 * 80.0 / 10.0 * Sp;
    const Eigen::Vector2d off = signal_vector(p, Sp, Sm);
    const double plus = std::abs(off(0) + off(1)), minus = std::abs(off(0) - off(1));
    CHECK(minus / plus == doctest::Approx(16.0));

    SignalDerivatives zero;
    CHECK_THROWS_AS(signal_vector(zero), Error);
}

TEST_CASE("signal vector equals the density derivative of the homodyne means")
{
    const auto p0 = setup(40.0, 1e-4);
    const auto r = pipeline::evaluate_point(p0, pipeline::Route::Full);
    const double rho0 = p0.sample.density;
    const double z = propagation::z_optimal(p0, r.S_plus);
    const double phase_lo = propagation::propagate_mean(p0, r.S_plus, r.S_minus, z).second;
    auto mean = [&](int k) {
        return [&, k](double rho) {
            auto p = p0;
            p.sample.density = rho;
            const auto [n_p, phase] = propagation::propagate_mean(p, r.S_plus, r.S_minus, z);
            const auto m = homodyne_means(2.0 * n_p, phase, phase_lo);
            return k == 0 ? m.first : m.second;
        };
    };
    const Eigen::Vector2d s = signal_vector(p0, r.S_plus, r.S_minus);
    for (int k = 0; k < 2; ++k) {
        const auto d = oracles::fd_pipeline_derivative(mean(k), rho0);
        CHECK(rel(d.value, s(k)) < 1e-6);
    }
}

TEST_CASE("isotropic Cramer-Rao bound")
{
    const double sigma = 3.0, a = 0.7;
    CHECK(cramer_rao_full(Eigen::Vector2d(a, a), sigma * sigma * Eigen::Matrix2d::Identity()) ==
          doctest::Approx(sigma / (a * std::sqrt(2.0))));
}

TEST_CASE("joint information dominates the single channels")
{
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    for (int i = 0; i < 200; ++i) {
        Eigen::Matrix2d a;
        a << g(rng), g(rng), g(rng), g(rng);
        const Eigen::Matrix2d S = a * a.transpose() + 0.05 * Eigen::Matrix2d::Identity();
        SignalDerivatives d;
        d.dn_p = g(rng);
        d.n_p_dphi = g(rng);
        d.n_p = 1.0;
        const double full = cramer_rao_full(signal_vector(d), S);
        const double sp = propagation::v_plus.dot(S * propagation::v_plus);
        const double sm = propagation::v_minus.dot(S * propagation::v_minus);
        CHECK(full <= cramer_rao_intensity(d, sp) * (1.0 + 1e-12));
        CHECK(full <= cramer_rao_phase(d, sm) * (1.0 + 1e-12));
    }
}

TEST_CASE("degenerate inputs")
{
    CHECK_THROWS_AS(cramer_rao_full(Eigen::Vector2d(1.0, 1.0), Eigen::Matrix2d{{1.0, 1.0}, {1.0, 1.0}}), Error);
    try {
        cramer_rao_full(Eigen::Vector2d(1.0, 0.0), Eigen::Matrix2d{{1.0, 0.0}, {0.0, 1e-14}});
        FAIL("expected SingularCovariance");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SingularCovariance);
    }
    SignalDerivatives d;
    d.dn_p = 1.0;
    try {
        cramer_rao_phase(d, 1.0);
        FAIL("expected DegenerateSignal");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DegenerateSignal);
    }
    const auto r = pipeline::evaluate_point(setup(0.0, 1e-4), pipeline::Route::Full);
    CHECK(std::isinf(r.report.rel_phase));
    CHECK(std::isfinite(r.report.rel_intensity));
}

TEST_CASE("shot-noise estimate")
{
    const auto cl = pipeline::evaluate_point(setup(40.0, 1e-6), pipeline::Route::Full);
    CHECK(cl.report.rel_psn <= cl.report.rel_full);
    const auto psnl = pipeline::evaluate_point(setup(40.0, 100.0), pipeline::Route::Full);
    CHECK(rel(psnl.report.rel_psn, psnl.report.rel_full) < 0.05);

    nlohmann::json c = params::default_config();
    const auto p1 = params::from_json(c);
    c["laser"]["measurement_time_s"] = 2.0;
    const auto p2 = params::from_json(c);
    const double a = pipeline::evaluate_point(p1, pipeline::Route::Adiabatic).report.rel_psn;
    const double b = pipeline::evaluate_point(p2, pipeline::Route::Adiabatic).report.rel_psn;
    CHECK(b == doctest::Approx(a / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("regime classification")
{
    CHECK(classify_regime({1.0, 1.0}) == Regime::PSNL);
    CHECK(classify_regime({50.0, 400.0}) == Regime::CL);
    CHECK(classify_regime({1.05, 30.0}) == Regime::IR);
    CHECK(classify_regime({1.5, 1.5}) == Regime::Unclassified);
    CHECK(classify_regime({1.5, 1.5}, {0.6, 2.0}) == Regime::PSNL);
}

TEST_CASE("sensitivity report invariants")
{
    for (double eps : {-60.0, 10.0, 40.0}) {
        for (double r : {1e-6, 1e-3, 1.0, 100.0}) {
            const auto rep = pipeline::evaluate_point(setup(eps, r), pipeline::Route::Full).report;
            CHECK(rep.rel_full > 0.0);
            CHECK(std::isfinite(rep.rel_full));
            CHECK(std::isfinite(rep.rel_psn));
            CHECK(rep.rel_full <= std::min(rep.rel_intensity, rep.rel_phase) + 1e-12);
        }
    }
}

TEST_CASE("chemically limited sensitivity improves monotonically with detuning")
{
    double prev = pipeline::evaluate_point(setup(0.0, 1e-6), pipeline::Route::Full).report.rel_full;
    for (int i = 1; i <= 50; ++i) {
        const double v = pipeline::evaluate_point(setup(2.0 * i, 1e-6), pipeline::Route::Full).report.rel_full;
        CHECK(v < prev);
        prev = v;
    }
}

}

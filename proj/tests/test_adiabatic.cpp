#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "chemsens/adiabatic.hpp"
#include "chemsens/errors.hpp"
#include "chemsens/propagation.hpp"
#include "support.hpp"

using namespace chemsens;
using namespace chemsens::adiabatic;
using testing::rel;
using testing::setup;

TEST_SUITE("adiabatic") {

TEST_CASE("conditioned cross sections on resonance")
{
    const auto p = setup(0.0, 1e-4);
    const auto s = conditioned_cross_sections(p, State::A);
    CHECK(s.minus == 0.0);
    CHECK(rel(s.plus, p.derived.beta_sq_A / (2.0 * p.molecule.decay_gamma)) < 1e-14);
    const auto b = conditioned_cross_sections(p, State::B);
    CHECK(b.plus == 0.0);
    CHECK(b.minus == 0.0);
}

TEST_CASE("dispersive cross section peaks at half the linewidth")
{
    const double gamma_mhz = 10.0;
    double best_eps = 0.0, best = -1.0;
    for (int i = 0; i <= 2000; ++i) {
        const double eps = 0.01 * i;
        const double v = conditioned_cross_sections(setup(eps, 1e-4), State::A).minus;
        if (v > best) {
            best = v;
            best_eps = eps;
        }
    }
    CHECK(best_eps == doctest::Approx(gamma_mhz / 2.0).epsilon(1e-9));
}

TEST_CASE("effective cross sections weight by stationary probabilities")
{
    const auto sym = setup(40.0, 1e-4);
    const auto a = conditioned_cross_sections(sym, State::A);
    const auto e = effective_cross_sections(sym);
    CHECK(e.plus == doctest::Approx(a.plus / 2.0).epsilon(1e-14));
    CHECK(e.minus == doctest::Approx(a.minus / 2.0).epsilon(1e-14));

    const auto only_a = setup(40.0, 1e-4, 0.0);
    CHECK(effective_cross_sections(only_a).plus == doctest::Approx(a.plus).epsilon(1e-14));
}

TEST_CASE("second absorbing species produces a double peak")
{
    nlohmann::json c = params::default_config();
    c["molecule"]["dipole_b_debye"] = 1.0;
    c["molecule"]["detuning_b_mhz"] = 60.0;
    int maxima = 0;
    double prev2 = 0.0, prev1 = 0.0;
    for (int i = 0; i <= 400; ++i) {
        const double shift = -100.0 + 0.5 * i;
        c["molecule"]["detuning_a_mhz"] = shift;
        c["molecule"]["detuning_b_mhz"] = shift + 60.0;
        const double v = effective_cross_sections(params::from_json(c)).plus;
        if (i >= 2 && prev1 > prev2 && prev1 > v) {
            ++maxima;
        }
        prev2 = prev1;
        prev1 = v;
    }
    CHECK(maxima == 2);
}

TEST_CASE("two-state eigenvalue limits")
{
    using cplx = std::complex<double>;
    CHECK(std::abs(two_state_lambda(0.0, 0.0, 2.0, 3.0)) < 1e-15);
    const cplx K(-0.3, 0.2);
    CHECK(std::abs(two_state_lambda(K, K, 2.0, 3.0) - K) < 1e-14);
    const cplx KA(0.4, 0.1), KB(-0.2, 0.3);
    CHECK(std::abs(two_state_lambda(KA, KB, 1.5, 0.0) - KA) < 1e-14);
    CHECK_THROWS_AS(two_state_lambda(cplx(0.0, 50.0), 0.0, 1e-3, 1e-3), Error);
}

TEST_CASE("conditioned diffusion without a field vanishes and is symmetric")
{
    nlohmann::json c = params::default_config();
    c["molecule"]["dipole_a_debye"] = 0.0;
    CHECK(conditioned_diffusion(params::from_json(c), State::A).norm() == 0.0);
    for (double eps : {-30.0, 0.0, 7.0, 40.0}) {
        const Eigen::Matrix2d D = conditioned_diffusion(setup(eps, 1e-4), State::A);
        CHECK(D(0, 1) == D(1, 0));
    }
}

TEST_CASE("first-order diffusion identity holds exactly")
{
    for (double eps : {-80.0, -3.0, 0.0, 12.5, 40.0, 100.0}) {
        for (double gamma : {1.0, 10.0, 37.0}) {
            nlohmann::json c = params::default_config();
            c["molecule"]["detuning_a_mhz"] = eps;
            c["molecule"]["gamma_mhz"] = gamma;
            const auto p = params::from_json(c);
            const double two_s = 2.0 * conditioned_cross_sections(p, State::A).plus;
            const auto cf = closed_form_orders(p, State::A);
            CHECK(rel(cf.D1_plus, two_s) < 1e-12);
            CHECK(rel(cf.D1_minus, two_s) < 1e-12);
            const Eigen::Matrix2d D1 = conditioned_diffusion_orders(p, State::A).D1;
            CHECK(rel(propagation::v_plus.dot(D1 * propagation::v_plus), two_s) < 1e-12);
            CHECK(rel(propagation::v_minus.dot(D1 * propagation::v_minus), two_s) < 1e-12);
        }
    }
}

TEST_CASE("second-order absorption term changes sign at 4 eps^2 = 3 gamma^2")
{
    const double root = std::sqrt(0.75) * 10.0;
    CHECK(closed_form_orders(setup(0.99 * root, 1e-4), State::A).D2_plus < 0.0);
    CHECK(closed_form_orders(setup(1.01 * root, 1e-4), State::A).D2_plus > 0.0);
}

TEST_CASE("chemical diffusion term")
{
    const auto p = setup(40.0, 1e-4);
    const double J = p.derived.photon_flux_J0;
    const Eigen::Matrix2d chem = chemical_diffusion(p, J);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(chem);
    CHECK(es.eigenvalues()(0) >= -1e-12 * es.eigenvalues()(1));
    CHECK(std::abs(es.eigenvalues()(0)) <= 1e-12 * es.eigenvalues()(1));
    CHECK(es.eigenvalues()(1) > 0.0);

    // halving both rates keeps p_A and doubles t_R
    const Eigen::Matrix2d slower = chemical_diffusion(setup(40.0, 5e-5), J);
    CHECK((slower - 2.0 * chem).norm() <= 1e-13 * chem.norm());

    CHECK(chemical_diffusion(setup(40.0, 1e-4, 0.0), J).norm() == 0.0);

    const Eigen::Matrix2d total = adiabatic_diffusion_matrix(p, J);
    const double scale = p.sample.density * p.laser.measurement_time * p.derived.beam_area;
    const Eigen::Matrix2d cond = 0.5 * scale * conditioned_diffusion(p, State::A, J);
    CHECK((total - cond - chem).norm() <= 1e-13 * total.norm());
}

TEST_CASE("adiabatic expansion reproduces the matrix at J0 to second order")
{
    const auto p = setup(40.0, 1e-4);
    const double J = p.derived.photon_flux_J0;
    const auto e = adiabatic_expansion(p);
    const double scale = p.sample.density * p.laser.measurement_time * p.derived.beam_area;
    const Eigen::Matrix2d from_orders = scale * (e.D1 * J + 0.5 * e.D2 * J * J);
    CHECK((from_orders - adiabatic_diffusion_matrix(p, J)).norm() <= 1e-12 * from_orders.norm());
}

TEST_CASE("evaluate bundles the closed forms")
{
    const auto p = setup(40.0, 3e-4, 1e-4);
    const auto q = evaluate(p);
    CHECK(q.p_A == doctest::Approx(0.75));
    CHECK(q.p_A + q.p_B == doctest::Approx(1.0));
    CHECK(q.t_R == doctest::Approx(1.0 / (p.molecule.rate_A + p.molecule.rate_B)));
    CHECK(q.S_eff.plus == doctest::Approx(0.75 * q.S_cond[0].plus));
}

TEST_CASE("validity gate")
{
    CHECK(within_adiabatic_gate(setup(40.0, 0.5)));
    CHECK_FALSE(within_adiabatic_gate(setup(40.0, 0.6)));
}

}

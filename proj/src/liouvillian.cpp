#include "chemsens/liouvillian.hpp"

#include <cmath>
#include <numbers>

#include <unsupported/Eigen/KroneckerProduct>

#include "chemsens/errors.hpp"

namespace chemsens::liouvillian {

namespace {

constexpr double kQuarterPi = std::numbers::pi / 4.0;
constexpr std::array<double, 2> kPortOffset{kQuarterPi, -kQuarterPi};
const cplx I(0.0, 1.0);

Matrix16c kron(const Matrix4c& a, const Matrix4c& b)
{
    Matrix16c out = Eigen::kroneckerProduct(a, b);
    return out;
}

Matrix4c unit(int row, int col)
{
    Matrix4c m = Matrix4c::Zero();
    m(row, col) = 1.0;
    return m;
}

// rate * D[A] in the row-major vectorization.
Matrix16c lindblad(const Matrix4c& a, double rate)
{
    const Matrix4c id = Matrix4c::Identity();
    const Matrix4c ada = a.adjoint() * a;
    return rate * (kron(a, a.conjugate()) - 0.5 * kron(ada, id) - 0.5 * kron(id, ada.transpose()));
}

struct Transition {
    int g;
    int e;
    double rabi;
    double detuning;
};

std::array<Transition, 2> transitions(const params::ModelParams& p, std::optional<double> flux)
{
    const double J = flux.value_or(p.derived.photon_flux_J0);
    return {Transition{gA, eA, params::rabi_at_flux(p, false, J), p.molecule.A.detuning},
            Transition{gB, eB, params::rabi_at_flux(p, true, J), p.molecule.B.detuning}};
}

// Port-k pieces of H: `up` sits at (e, g) and carries exp(+i phi_k), `down`
// sits at (g, e) and carries exp(-i phi_k).
void port_parts(const params::ModelParams& p, std::array<double, 2> phi, std::optional<double> flux,
                int port, Matrix4c& up, Matrix4c& down)
{
    up.setZero();
    down.setZero();
    for (const auto& t : transitions(p, flux)) {
        const double half_f = t.rabi / std::sqrt(2.0) / 2.0;
        up(t.e, t.g) += half_f * std::exp(I * (phi[port] + kPortOffset[port]));
        down(t.g, t.e) += half_f * std::exp(-I * (phi[port] + kPortOffset[port]));
    }
}

} // namespace

Matrix4c build_hamiltonian(const params::ModelParams& p, const Phases& phi, std::optional<double> flux)
{
    Matrix4c h = Matrix4c::Zero();
    for (const auto& t : transitions(p, flux)) {
        const double f = t.rabi / std::sqrt(2.0);
        h(t.e, t.e) = t.detuning;
        h(t.e, t.g) = 0.5 * f * (std::exp(I * (phi[0] + kPortOffset[0])) + std::exp(I * (phi[1] + kPortOffset[1])));
        h(t.g, t.e) = 0.5 * f * (std::exp(-I * (phi[0] + kPortOffset[0])) + std::exp(-I * (phi[1] + kPortOffset[1])));
    }
    return h;
}

Matrix16c build_dissipator(const params::ModelParams& p)
{
    const auto& m = p.molecule;
    Matrix16c d = lindblad(unit(gA, eA), m.decay_gamma) + lindblad(unit(gB, eB), m.decay_gamma);
    d += lindblad(unit(gA, gB), m.rate_A) + lindblad(unit(eA, eB), m.rate_A);
    d += lindblad(unit(gB, gA), m.rate_B) + lindblad(unit(eB, eA), m.rate_B);
    return d;
}

CountingLiouvillian build_two_sided(const params::ModelParams& p, const CountingField& chi,
                                    std::array<double, 2> phi, std::optional<double> flux)
{
    const double radius = p.numerics.trust_radius;
    if (std::abs(chi.chi1) > radius || std::abs(chi.chi2) > radius) {
        throw Error(ErrorKind::TrustRadiusExceeded,
                    "|chi| = " + std::to_string(std::max(std::abs(chi.chi1), std::abs(chi.chi2))) +
                        " exceeds trust radius " + std::to_string(radius));
    }
    const Phases left{phi[0] + 0.5 * chi.chi1, phi[1] + 0.5 * chi.chi2};
    const Phases right{phi[0] - 0.5 * chi.chi1, phi[1] - 0.5 * chi.chi2};
    const Matrix4c hl = build_hamiltonian(p, left, flux);
    const Matrix4c hr = build_hamiltonian(p, right, flux);
    const Matrix4c id = Matrix4c::Identity();

    CountingLiouvillian out;
    out.matrix = -I * (kron(hl, id) - kron(id, hr.transpose())) + build_dissipator(p);
    out.chi = chi;
    out.phase_phi = phi;
    return out;
}

CountingDerivatives counting_derivatives(const params::ModelParams& p, std::array<double, 2> phi,
                                         std::optional<double> flux)
{
    // With chi = -i s, the left Hamiltonian picks up exp(+-s/2) on up/down and
    // the right one exp(-+s/2).
    const Matrix4c id = Matrix4c::Identity();
    CountingDerivatives d;
    for (int k = 0; k < 2; ++k) {
        Matrix4c up, down;
        port_parts(p, phi, flux, k, up, down);
        const Matrix4c dl = 0.5 * (up - down);
        const Matrix4c dr = -dl;
        const Matrix4c dd = 0.25 * (up + down);
        d.first[k] = -I * (kron(dl, id) - kron(id, dr.transpose()));
        d.second[k] = -I * (kron(dd, id) - kron(id, dd.transpose()));
    }
    return d;
}

Vector16c vec(const Matrix4c& rho)
{
    Vector16c v;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            v(4 * i + j) = rho(i, j);
        }
    }
    return v;
}

Matrix4c unvec(const Vector16c& v)
{
    Matrix4c rho;
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            rho(i, j) = v(4 * i + j);
        }
    }
    return rho;
}

Eigen::Matrix<cplx, 1, 16> trace_functional()
{
    return vec(Matrix4c::Identity()).transpose();
}

Matrix16c transpose_permutation()
{
    Matrix16c perm = Matrix16c::Zero();
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            perm(4 * j + i, 4 * i + j) = 1.0;
        }
    }
    return perm;
}

} // namespace chemsens::liouvillian

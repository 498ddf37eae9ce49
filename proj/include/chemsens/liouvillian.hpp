#pragma once

#include <array>
#include <complex>
#include <optional>

#include <Eigen/Dense>

#include "chemsens/params.hpp"

// Basis order |g_A>, |e_A>, |g_B>, |e_B>. Density matrices are vectorized
// row-major, vec(rho)[4*i + j] = rho(i, j), so vec(X Y Z) = (X kron Z^T) vec(Y).
namespace chemsens::liouvillian {

using cplx = std::complex<double>;
using Matrix4c = Eigen::Matrix<cplx, 4, 4>;
using Matrix16c = Eigen::Matrix<cplx, 16, 16>;
using Vector16c = Eigen::Matrix<cplx, 16, 1>;
using Phases = std::array<cplx, 2>;

enum Level : int { gA = 0, eA = 1, gB = 2, eB = 3 };

// Counting fields for the two detectors. Real chi gives the characteristic
// function; chi = -i s gives the moment generating function in s.
struct CountingField {
    cplx chi1{0.0, 0.0};
    cplx chi2{0.0, 0.0};

    static CountingField from_moment(double s1, double s2) { return {cplx(0.0, -s1), cplx(0.0, -s2)}; }
};

struct CountingLiouvillian {
    Matrix16c matrix;
    CountingField chi;
    std::array<double, 2> phase_phi{0.0, 0.0};
};

// Rotating-frame Hamiltonian divided by hbar (units rad/s). `flux` defaults to
// J0; the Rabi frequencies scale as sqrt(flux). Complex phases are allowed and
// continue the expression analytically (no conjugation of phi).
Matrix4c build_hamiltonian(const params::ModelParams& p, const Phases& phi,
                           std::optional<double> flux = std::nullopt);

// Dissipator: decay at gamma in both chemical states and transfer into state
// alpha at r_alpha for ground and excited levels alike.
Matrix16c build_dissipator(const params::ModelParams& p);

// Throws TrustRadiusExceeded if |chi_k| exceeds p.numerics.trust_radius.
CountingLiouvillian build_two_sided(const params::ModelParams& p, const CountingField& chi,
                                    std::array<double, 2> phi = {0.0, 0.0},
                                    std::optional<double> flux = std::nullopt);

// Derivatives of L with respect to the moment variables s_k at s = 0. Mixed
// second derivatives vanish because each detector phase enters separately.
struct CountingDerivatives {
    std::array<Matrix16c, 2> first;
    std::array<Matrix16c, 2> second;
};

CountingDerivatives counting_derivatives(const params::ModelParams& p, std::array<double, 2> phi,
                                         std::optional<double> flux = std::nullopt);

Vector16c vec(const Matrix4c& rho);
Matrix4c unvec(const Vector16c& v);

// Row vector whose product with vec(rho) is tr(rho).
Eigen::Matrix<cplx, 1, 16> trace_functional();

// Swaps bra and ket indices: vec(rho^T).
Matrix16c transpose_permutation();

} // namespace chemsens::liouvillian

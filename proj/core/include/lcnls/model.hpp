#pragma once

#include <complex>
#include <vector>

namespace lcnls {

using cplx = std::complex<double>;

/// Physical coefficients of the linearly coupled system
///   i psi_t = beta psi_xx + alpha1 (|psi|^2 + |phi|^2) psi - gamma phi
///   i phi_t = beta phi_xx + alpha1 (|psi|^2 + |phi|^2) phi - gamma psi
/// gamma may be complex; a nonzero imaginary part models gain/dissipation and
/// voids every conservation statement, so code that asserts invariants checks
/// conservative() first.
struct ModelParams {
    double beta = 1.0;
    double alpha1 = 0.75;
    cplx gamma = cplx(0.0, 0.0);

    bool conservative() const { return gamma.imag() == 0.0; }
};

/// Uniform spatial mesh on [-L1, L2] with m cells (m+1 nodes including both
/// boundaries) plus the time step. h = (L1+L2)/m exactly.
struct Grid {
    double L1 = 60.0;
    double L2 = 60.0;
    int m = 2400;
    double dtau = 0.01;

    double h() const { return (L1 + L2) / m; }
    int nodes() const { return m + 1; }
    double x(int i) const { return -L1 + i * h(); }
};

/// Discrete two-component field at one time level. Arrays hold one complex
/// sample per node; boundary nodes carry the homogeneous Dirichlet values.
struct FieldState {
    double time = 0.0;
    std::vector<cplx> psi;
    std::vector<cplx> phi;

    bool compatible(const FieldState& o) const {
        return psi.size() == o.psi.size() && phi.size() == o.phi.size();
    }
};

/// One solitary-wave constituent of the initial condition:
///   chi(x, 0) = A_chi(x - X) exp{i [ -(c/2)(x - X) + delta_chi ]}
/// where A_chi comes from an envelope pair. The envelope phase speed c is
/// shared by both components; the component carrier frequencies n_psi, n_phi
/// select the envelope branch. Phases are radians.
struct SolitonSpec {
    double X = 0.0;
    double c = 0.0;
    double n_psi = -1.5;
    double n_phi = -1.5;
    double delta_psi = 0.0;
    double delta_phi = 0.0;
};

} // namespace lcnls

#pragma once

#include "cvtf/channels.hpp"
#include "cvtf/fock.hpp"

namespace cvtf {

enum class FidelityMethod { ClosedForm, Functional, KrausOracle, GaussianFormula };

struct FidelityValue {
  double value;
  FidelityMethod method;
};

const char* to_string(FidelityMethod method) noexcept;

/// Clamps v into [0, 1] if it is within 1e-10 of the interval; throws
/// OutOfRange otherwise.
double clamp_fidelity(double v);

/// <psi|rho|psi>. Throws DimensionMismatch, InvalidArgument if psi is not unit norm.
double fidelity_pure_vs_mixed(const CVector& psi, const CMatrix& rho);
double fidelity_pure_vs_mixed(const CVector& psi, const DensityMatrix& rho);

/// sqrt(1 - F); throws OutOfRange for F outside [0, 1].
double sine_distance(double F);

// Fidelity between |psi>_RA and (id (x) T^xi)(psi) for a twin-Fock input:
//   eta * sum_k [ sum_{n>=k} p_n C(n,k) (1-eta)^k eta^{n-k} ]^2.
double exact_uni_fidelity(const SchmidtSpectrum& spectrum, double xi);

// (1/(1+xi)) [ (sum_n p_n/(1+xi)^n)^2 + (sum_{n>=1} p_n xi/(1+xi)^n)^2 ].
// Lower bound on exact_uni_fidelity, tight iff the support is within {0, 1}.
double lower_bound_uni(const SchmidtSpectrum& spectrum, double xi);

// (1/((1+xi)(1+xi'))) sum p_{m,n} p_{m',n'} T_xi^{mm'} T_xi'^{nn'}.
double exact_bi_fidelity(const BipartiteSpectrum& grid, double xi, double xi_prime);

/// Independent Kraus-composition route: builds |psi>_RA, applies the
/// additive-noise channel to A block by block and takes <psi|out|psi>.
/// oracle_dim <= 0 picks required_output_dim for a 1e-12 deficit.
double kraus_oracle_uni(const SchmidtSpectrum& spectrum, double xi, int oracle_dim = 0);

/// Same for |psi>_RAB with T^xi on A and T^xi' on B.
double kraus_oracle_bi(const BipartiteSpectrum& grid, double xi, double xi_prime,
                       int oracle_dim = 0);

/// 2^N / sqrt(det(V1 + V2)) for 2N x 2N covariance matrices (vacuum = identity).
/// Valid when one of the states is pure and the first moments coincide.
double gaussian_fidelity_det(const RMatrix& V1, const RMatrix& V2, int modes);

/// Covariance matrix of the two-mode squeezed vacuum with mean photon nbar,
/// quadrature order (x_R, p_R, x_A, p_A); and after T^xi on mode A.
RMatrix tmsv_covariance(double nbar);
RMatrix tmsv_covariance_after_noise(double nbar, double xi);

/// Coherent-state input: 1/(1+xi), independent of the amplitude.
double coherent_fidelity(double xi);
/// TMSV input with energy E: 1/(1+(2E+1) xi).
double tmsv_fidelity(double E, double xi);

/// Twin-Fock spectrum of the TMSV with mean photon nbar truncated to 0..M and
/// renormalized.
SchmidtSpectrum truncated_tmsv_spectrum(double nbar, int M);

}  // namespace cvtf

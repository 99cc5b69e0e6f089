#pragma once

// Fock-basis action of the pure-loss channel, the quantum-limited amplifier and
// the additive-noise channel T^xi = A^{1/eta} o L^eta, eta = 1/(1+xi).
//
// The CMatrix overloads are linear maps on arbitrary operators (the Kraus
// oracle feeds them off-diagonal blocks); the DensityMatrix overloads validate.

#include "cvtf/fock.hpp"

namespace cvtf {

inline constexpr double kDefaultDeficitTol = 1e-12;

class ChannelParams {
 public:
  /// Throws InvalidArgument unless xi is finite and >= 0.
  static ChannelParams from_xi(double xi);

  double xi() const noexcept { return xi_; }
  double eta() const noexcept { return eta_; }
  double gain() const noexcept { return 1.0 + xi_; }

 private:
  ChannelParams(double xi, double eta) : xi_(xi), eta_(eta) {}
  double xi_;
  double eta_;
};

/// C(n, k); exact integer arithmetic for n <= 30, log-gamma above.
double binomial(int n, int k);
double log_binomial(int n, int k);

CMatrix apply_pure_loss(const CMatrix& op, double eta, int out_dim);
DensityMatrix apply_pure_loss(const DensityMatrix& rho, double eta, int out_dim);

/// Quantum-limited amplifier with Kraus elements
///   <n+k|A_k|n> = sqrt(C(n+k,k)) G^{-(n+1)/2} (1 - 1/G)^{k/2}.
/// The k-sum is cut where every Fock level in the operator's support has
/// trace deficit <= deficit_tol. Throws DimensionTooSmall when out_dim is below
/// the input dimension and ToleranceUnreachable when the cut does not fit.
CMatrix apply_amplifier(const CMatrix& op, double gain, int out_dim,
                        double deficit_tol = kDefaultDeficitTol);
DensityMatrix apply_amplifier(const DensityMatrix& rho, double gain, int out_dim,
                              double deficit_tol = kDefaultDeficitTol);

CMatrix apply_additive_noise(const CMatrix& op, const ChannelParams& params, int out_dim,
                             double deficit_tol = kDefaultDeficitTol);
DensityMatrix apply_additive_noise(const DensityMatrix& rho, const ChannelParams& params,
                                   int out_dim, double deficit_tol = kDefaultDeficitTol);

/// Number of amplifier Kraus terms needed so that Fock level n loses at most
/// deficit_tol of its trace; -1 if unreachable within max_k.
int amplifier_cutoff(int n, double gain, double deficit_tol, int max_k = 100000);

/// Smallest output dimension at which apply_additive_noise succeeds on any
/// operator supported on Fock levels 0..max_level.
int required_output_dim(int max_level, double xi, double deficit_tol = kDefaultDeficitTol);

/// T_xi^{m m'} = Tr[L^eta(|m><m'|) L^eta(|m'><m|)]
///            = sum_k C(m,k) C(m',k) xi^{2k} / (1+xi)^{m+m'}.
double overlap_trace(int m, int m_prime, double xi);

/// (M+1) x (M+1) matrix of overlap_trace values.
RMatrix overlap_matrix(int M, double xi);

}  // namespace cvtf

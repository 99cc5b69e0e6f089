#include "cvtf/channels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "cvtf/error.hpp"

namespace cvtf {

ChannelParams ChannelParams::from_xi(double xi) {
  if (!std::isfinite(xi) || xi < 0.0) {
    throw Error(ErrorKind::InvalidArgument, "xi must be finite and non-negative");
  }
  return ChannelParams(xi, 1.0 / (1.0 + xi));
}

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0.0;
  if (n <= 30) {
    k = std::min(k, n - k);
    std::uint64_t c = 1;
    for (int i = 1; i <= k; ++i) c = c * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    return static_cast<double>(c);
  }
  return std::exp(log_binomial(n, k));
}

CMatrix apply_pure_loss(const CMatrix& op, double eta, int out_dim) {
  if (!(eta > 0.0 && eta <= 1.0)) throw Error(ErrorKind::InvalidArgument, "eta must lie in (0, 1]");
  const int d = static_cast<int>(op.rows());
  if (out_dim < d) {
    throw Error(ErrorKind::DimensionTooSmall,
                "out_dim " + std::to_string(out_dim) + " < input dimension " + std::to_string(d));
  }
  CMatrix out = CMatrix::Zero(out_dim, out_dim);
  const double loss = 1.0 - eta;
  for (int m = 0; m < d; ++m) {
    for (int mp = 0; mp < d; ++mp) {
      const auto x = op(m, mp);
      if (x == 0.0) continue;
      const int kmax = std::min(m, mp);
      for (int k = 0; k <= kmax; ++k) {
        const double coeff = std::sqrt(binomial(m, k) * binomial(mp, k)) *
                             std::pow(eta, 0.5 * (m + mp - 2 * k)) * std::pow(loss, k);
        out(m - k, mp - k) += coeff * x;
      }
    }
  }
  return out;
}

DensityMatrix apply_pure_loss(const DensityMatrix& rho, double eta, int out_dim) {
  return DensityMatrix(apply_pure_loss(rho.entries(), eta, out_dim), rho.truncation_deficit());
}

int amplifier_cutoff(int n, double gain, double deficit_tol, int max_k) {
  if (gain == 1.0) return 0;
  // Level n spreads over n+k with negative-binomial weights
  // C(n+k,k) G^{-(n+1)} (1-1/G)^k.
  const double log_base = -(n + 1) * std::log(gain);
  const double log_q = std::log1p(-1.0 / gain);
  double cumulative = 0.0;
  for (int k = 0; k <= max_k; ++k) {
    cumulative += std::exp(log_binomial(n + k, k) + log_base + k * log_q);
    if (1.0 - cumulative <= deficit_tol) return k;
  }
  return -1;
}

int required_output_dim(int max_level, double xi, double deficit_tol) {
  const double gain = 1.0 + xi;
  int dim = max_level + 1;
  for (int n = 0; n <= max_level; ++n) {
    const int k = amplifier_cutoff(n, gain, deficit_tol);
    if (k < 0) {
      throw Error(ErrorKind::ToleranceUnreachable, "deficit tolerance cannot be met");
    }
    dim = std::max(dim, n + k + 1);
  }
  return dim;
}

CMatrix apply_amplifier(const CMatrix& op, double gain, int out_dim, double deficit_tol) {
  if (!(gain >= 1.0) || !std::isfinite(gain)) {
    throw Error(ErrorKind::InvalidArgument, "amplifier gain must be >= 1");
  }
  if (!(deficit_tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "deficit_tol must be positive");
  const int d = static_cast<int>(op.rows());
  if (out_dim < d) {
    throw Error(ErrorKind::DimensionTooSmall,
                "out_dim " + std::to_string(out_dim) + " < input dimension " + std::to_string(d));
  }

  int support = -1;
  for (int i = 0; i < d; ++i) {
    if (op.row(i).cwiseAbs().maxCoeff() > 0.0 || op.col(i).cwiseAbs().maxCoeff() > 0.0) support = i;
  }
  CMatrix out = CMatrix::Zero(out_dim, out_dim);
  if (support < 0) return out;

  // Cutoffs grow with n, but take the max explicitly rather than rely on it.
  int kcut = 0;
  for (int n = 0; n <= support; ++n) {
    const int k = amplifier_cutoff(n, gain, deficit_tol, out_dim);
    if (k < 0 || n + k >= out_dim) {
      throw Error(ErrorKind::ToleranceUnreachable,
                  "amplifier tail for level " + std::to_string(n) + " exceeds out_dim " +
                      std::to_string(out_dim) + " at tolerance " + std::to_string(deficit_tol));
    }
    kcut = std::max(kcut, k);
  }
  kcut = std::min(kcut, out_dim - 1 - support);

  // Kraus element table a(n, k) for n <= support, k <= kcut.
  RMatrix kraus = RMatrix::Zero(support + 1, kcut + 1);
  if (gain == 1.0) {
    kraus.col(0).setOnes();
  } else {
    const double log_g = std::log(gain);
    const double log_q = std::log1p(-1.0 / gain);
    for (int n = 0; n <= support; ++n)
      for (int k = 0; k <= kcut; ++k)
        kraus(n, k) = std::exp(0.5 * (log_binomial(n + k, k) - (n + 1) * log_g + k * log_q));
  }

  for (int n = 0; n <= support; ++n) {
    for (int np = 0; np <= support; ++np) {
      const auto x = op(n, np);
      if (x == 0.0) continue;
      for (int k = 0; k <= kcut; ++k) out(n + k, np + k) += kraus(n, k) * kraus(np, k) * x;
    }
  }
  return out;
}

DensityMatrix apply_amplifier(const DensityMatrix& rho, double gain, int out_dim,
                              double deficit_tol) {
  return DensityMatrix(apply_amplifier(rho.entries(), gain, out_dim, deficit_tol),
                       rho.truncation_deficit() + deficit_tol);
}

CMatrix apply_additive_noise(const CMatrix& op, const ChannelParams& params, int out_dim,
                             double deficit_tol) {
  const CMatrix lossy = apply_pure_loss(op, params.eta(), static_cast<int>(op.rows()));
  return apply_amplifier(lossy, params.gain(), out_dim, deficit_tol);
}

DensityMatrix apply_additive_noise(const DensityMatrix& rho, const ChannelParams& params,
                                   int out_dim, double deficit_tol) {
  return DensityMatrix(apply_additive_noise(rho.entries(), params, out_dim, deficit_tol),
                       rho.truncation_deficit() + deficit_tol);
}

double overlap_trace(int m, int m_prime, double xi) {
  if (m < 0 || m_prime < 0) throw Error(ErrorKind::InvalidArgument, "Fock indices must be >= 0");
  const int kmax = std::min(m, m_prime);
  const double denom = std::pow(1.0 + xi, m + m_prime);
  double total = 0.0;
  for (int k = 0; k <= kmax; ++k) {
    total += binomial(m, k) * binomial(m_prime, k) * std::pow(xi, 2 * k);
  }
  return total / denom;
}

RMatrix overlap_matrix(int M, double xi) {
  RMatrix t(M + 1, M + 1);
  for (int m = 0; m <= M; ++m)
    for (int mp = m; mp <= M; ++mp) t(m, mp) = t(mp, m) = overlap_trace(m, mp, xi);
  return t;
}

}  // namespace cvtf

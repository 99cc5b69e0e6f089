#include "cvtf/fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cvtf/error.hpp"

namespace cvtf {

namespace {

constexpr double kClampSlack = 1e-10;

ChannelParams checked_params(double xi) { return ChannelParams::from_xi(xi); }

// Top-left d x d block of T^xi applied to a d x d operator.
CMatrix noisy_block(const CMatrix& op, const ChannelParams& params, int oracle_dim) {
  const auto d = op.rows();
  return apply_additive_noise(op, params, oracle_dim).topLeftCorner(d, d);
}

}  // namespace

const char* to_string(FidelityMethod method) noexcept {
  switch (method) {
    case FidelityMethod::ClosedForm: return "closed_form";
    case FidelityMethod::Functional: return "functional";
    case FidelityMethod::KrausOracle: return "kraus_oracle";
    case FidelityMethod::GaussianFormula: return "gaussian_formula";
  }
  return "unknown";
}

double clamp_fidelity(double v) {
  if (!(v >= -kClampSlack && v <= 1.0 + kClampSlack)) {
    throw Error(ErrorKind::OutOfRange, "fidelity " + std::to_string(v) + " outside [0, 1]");
  }
  return std::clamp(v, 0.0, 1.0);
}

double fidelity_pure_vs_mixed(const CVector& psi, const CMatrix& rho) {
  if (rho.rows() != rho.cols() || psi.size() != rho.rows()) {
    throw Error(ErrorKind::DimensionMismatch,
                "state vector of size " + std::to_string(psi.size()) + " vs matrix of size " +
                    std::to_string(rho.rows()));
  }
  if (std::abs(psi.squaredNorm() - 1.0) > 1e-10) {
    throw Error(ErrorKind::InvalidArgument, "state vector is not unit norm");
  }
  return clamp_fidelity(psi.dot(rho * psi).real());
}

double fidelity_pure_vs_mixed(const CVector& psi, const DensityMatrix& rho) {
  return fidelity_pure_vs_mixed(psi, rho.entries());
}

double sine_distance(double F) {
  if (!(F >= 0.0 && F <= 1.0)) {
    throw Error(ErrorKind::OutOfRange, "fidelity " + std::to_string(F) + " outside [0, 1]");
  }
  return std::sqrt(1.0 - F);
}

double exact_uni_fidelity(const SchmidtSpectrum& spectrum, double xi) {
  const auto params = checked_params(xi);
  const double eta = params.eta();
  const int M = spectrum.truncation();
  double total = 0.0;
  for (int k = 0; k <= M; ++k) {
    double inner = 0.0;
    for (int n = k; n <= M; ++n) {
      inner += spectrum[n] * binomial(n, k) * std::pow(1.0 - eta, k) * std::pow(eta, n - k);
    }
    total += inner * inner;
  }
  return clamp_fidelity(eta * total);
}

double lower_bound_uni(const SchmidtSpectrum& spectrum, double xi) {
  checked_params(xi);
  double first = 0.0;
  double second = 0.0;
  for (int n = 0; n < spectrum.dim(); ++n) {
    const double scale = spectrum[n] / std::pow(1.0 + xi, n);
    first += scale;
    if (n >= 1) second += scale * xi;
  }
  return (first * first + second * second) / (1.0 + xi);
}

double exact_bi_fidelity(const BipartiteSpectrum& grid, double xi, double xi_prime) {
  checked_params(xi);
  checked_params(xi_prime);
  const int M = grid.truncation();
  const RMatrix ta = overlap_matrix(M, xi);
  const RMatrix tb = overlap_matrix(M, xi_prime);
  const RMatrix& p = grid.probs();
  double total = 0.0;
  for (int m = 0; m <= M; ++m) {
    for (int n = 0; n <= M; ++n) {
      if (p(m, n) == 0.0) continue;
      double inner = 0.0;
      for (int mp = 0; mp <= M; ++mp)
        for (int np = 0; np <= M; ++np) inner += p(mp, np) * ta(m, mp) * tb(n, np);
      total += p(m, n) * inner;
    }
  }
  return clamp_fidelity(total / ((1.0 + xi) * (1.0 + xi_prime)));
}

double kraus_oracle_uni(const SchmidtSpectrum& spectrum, double xi, int oracle_dim) {
  const auto params = checked_params(xi);
  const int d = spectrum.dim();
  if (oracle_dim <= 0) oracle_dim = required_output_dim(d - 1, xi);

  const CVector psi = pure_state_vector(spectrum, d);
  // Rows of amps are the A-vectors psi_r attached to reference ket |r>.
  CMatrix amps(d, d);
  for (int r = 0; r < d; ++r)
    for (int a = 0; a < d; ++a) amps(r, a) = psi(r * d + a);

  // (id (x) T)(|psi><psi|) restricted to the support of psi on A.
  CMatrix out = CMatrix::Zero(d * d, d * d);
  for (int r = 0; r < d; ++r) {
    for (int rp = 0; rp < d; ++rp) {
      const CMatrix block = amps.row(r).transpose() * amps.row(rp).conjugate();
      out.block(r * d, rp * d, d, d) = noisy_block(block, params, oracle_dim);
    }
  }
  return fidelity_pure_vs_mixed(psi, out);
}

double kraus_oracle_bi(const BipartiteSpectrum& grid, double xi, double xi_prime,
                       int oracle_dim) {
  const auto pa = checked_params(xi);
  const auto pb = checked_params(xi_prime);
  const int d = grid.dim();
  const int d2 = d * d;
  if (oracle_dim <= 0) {
    oracle_dim = std::max(required_output_dim(d - 1, xi), required_output_dim(d - 1, xi_prime));
  }

  const CVector psi = pure_state_vector(grid, d);
  // amps(r, a*d + b) with r = r1*d + r2.
  CMatrix amps(d2, d2);
  for (int r = 0; r < d2; ++r)
    for (int ab = 0; ab < d2; ++ab) amps(r, ab) = psi(r * d2 + ab);

  CMatrix out = CMatrix::Zero(d2 * d2, d2 * d2);
  CMatrix sub(d, d);
  for (int r = 0; r < d2; ++r) {
    for (int rp = 0; rp < d2; ++rp) {
      const CMatrix block = amps.row(r).transpose() * amps.row(rp).conjugate();
      if (block.cwiseAbs().maxCoeff() == 0.0) continue;

      // Channel on A: fix (b, b') and act on the (a, a') slice.
      CMatrix after_a(d2, d2);
      for (int b = 0; b < d; ++b) {
        for (int bp = 0; bp < d; ++bp) {
          for (int a = 0; a < d; ++a)
            for (int ap = 0; ap < d; ++ap) sub(a, ap) = block(a * d + b, ap * d + bp);
          const CMatrix res = noisy_block(sub, pa, oracle_dim);
          for (int a = 0; a < d; ++a)
            for (int ap = 0; ap < d; ++ap) after_a(a * d + b, ap * d + bp) = res(a, ap);
        }
      }
      // Channel on B: fix (a, a').
      CMatrix after_b(d2, d2);
      for (int a = 0; a < d; ++a) {
        for (int ap = 0; ap < d; ++ap) {
          for (int b = 0; b < d; ++b)
            for (int bp = 0; bp < d; ++bp) sub(b, bp) = after_a(a * d + b, ap * d + bp);
          const CMatrix res = noisy_block(sub, pb, oracle_dim);
          for (int b = 0; b < d; ++b)
            for (int bp = 0; bp < d; ++bp) after_b(a * d + b, ap * d + bp) = res(b, bp);
        }
      }
      out.block(r * d2, rp * d2, d2, d2) = after_b;
    }
  }
  return fidelity_pure_vs_mixed(psi, out);
}

double gaussian_fidelity_det(const RMatrix& V1, const RMatrix& V2, int modes) {
  const auto n = static_cast<Eigen::Index>(2 * modes);
  if (modes <= 0 || V1.rows() != n || V1.cols() != n || V2.rows() != n || V2.cols() != n) {
    throw Error(ErrorKind::DimensionMismatch, "covariance matrices must be 2N x 2N");
  }
  const double det = (V1 + V2).determinant();
  if (!(det > 0.0)) throw Error(ErrorKind::SingularSum, "det(V1 + V2) <= 0");
  return std::pow(2.0, modes) / std::sqrt(det);
}

RMatrix tmsv_covariance(double nbar) {
  if (!(nbar >= 0.0)) throw Error(ErrorKind::InvalidArgument, "nbar must be >= 0");
  RMatrix v = RMatrix::Zero(4, 4);
  const double diag = 2.0 * nbar + 1.0;
  const double corr = 2.0 * std::sqrt(nbar * (nbar + 1.0));
  v.diagonal().setConstant(diag);
  v(0, 2) = v(2, 0) = corr;
  v(1, 3) = v(3, 1) = -corr;
  return v;
}

RMatrix tmsv_covariance_after_noise(double nbar, double xi) {
  checked_params(xi);
  RMatrix v = tmsv_covariance(nbar);
  v(2, 2) += 2.0 * xi;
  v(3, 3) += 2.0 * xi;
  return v;
}

double coherent_fidelity(double xi) {
  checked_params(xi);
  return 1.0 / (1.0 + xi);
}

double tmsv_fidelity(double E, double xi) {
  checked_params(xi);
  if (!(E >= 0.0)) throw Error(ErrorKind::InvalidArgument, "E must be >= 0");
  return 1.0 / (1.0 + (2.0 * E + 1.0) * xi);
}

SchmidtSpectrum truncated_tmsv_spectrum(double nbar, int M) {
  if (!(nbar >= 0.0) || M < 0) throw Error(ErrorKind::InvalidArgument, "bad TMSV parameters");
  std::vector<double> p(static_cast<std::size_t>(M) + 1);
  const double ratio = nbar / (nbar + 1.0);
  double sum = 0.0;
  for (int n = 0; n <= M; ++n) {
    p[static_cast<std::size_t>(n)] = std::pow(ratio, n) / (nbar + 1.0);
    sum += p[static_cast<std::size_t>(n)];
  }
  for (auto& v : p) v /= sum;
  return SchmidtSpectrum::make(std::move(p));
}

}  // namespace cvtf

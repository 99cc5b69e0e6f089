#include "cvtf/fock.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "cvtf/error.hpp"

namespace cvtf {

namespace {

// Shared validation for both spectrum kinds: clip roundoff negatives, check the
// sum, renormalize within the input tolerance. Sums already within the internal
// tolerance are left alone so that make() is idempotent.
template <typename Range>
void validate_probabilities(Range& values, const char* what) {
  double sum = 0.0;
  for (auto& v : values) {
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::InvalidArgument, std::string(what) + " has a non-finite entry");
    }
    if (v < -kNegativeTol) {
      throw Error(ErrorKind::NegativeEntry,
                  std::string(what) + " entry " + std::to_string(v) + " is negative");
    }
    if (v < 0.0) v = 0.0;
    sum += v;
  }
  if (std::abs(sum - 1.0) >= kInputNormTol) {
    throw Error(ErrorKind::NotNormalized,
                std::string(what) + " sums to " + std::to_string(sum));
  }
  if (std::abs(sum - 1.0) > kInternalNormTol) {
    for (auto& v : values) v /= sum;
  }
}

}  // namespace

SchmidtSpectrum SchmidtSpectrum::make(std::vector<double> raw) {
  if (raw.empty()) throw Error(ErrorKind::InvalidArgument, "spectrum is empty");
  if (static_cast<int>(raw.size()) > kMaxTruncation + 1) {
    throw Error(ErrorKind::InvalidArgument, "truncation exceeds M = 64");
  }
  validate_probabilities(raw, "spectrum");
  return SchmidtSpectrum(std::move(raw));
}

BipartiteSpectrum BipartiteSpectrum::make(RMatrix raw) {
  if (raw.size() == 0) throw Error(ErrorKind::InvalidArgument, "grid is empty");
  if (raw.rows() != raw.cols()) throw Error(ErrorKind::InvalidArgument, "grid must be square");
  if (raw.rows() > kMaxTruncation + 1) {
    throw Error(ErrorKind::InvalidArgument, "truncation exceeds M = 64");
  }
  std::span<double> view(raw.data(), static_cast<std::size_t>(raw.size()));
  validate_probabilities(view, "grid");
  return BipartiteSpectrum(std::move(raw));
}

DensityMatrix::DensityMatrix(CMatrix entries, double truncation_deficit)
    : entries_(std::move(entries)), deficit_(truncation_deficit) {
  if (entries_.rows() == 0 || entries_.rows() != entries_.cols()) {
    throw Error(ErrorKind::InvalidArgument, "density matrix must be square and non-empty");
  }
  if (deficit_ < 0.0) throw Error(ErrorKind::InvalidArgument, "negative truncation deficit");
  if ((entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
    throw Error(ErrorKind::InvalidArgument, "density matrix is not Hermitian");
  }
  const double tr = entries_.trace().real();
  if (tr > 1.0 + kInternalNormTol || tr < 1.0 - deficit_ - kInternalNormTol) {
    throw Error(ErrorKind::InvalidArgument,
                "density matrix trace " + std::to_string(tr) + " outside [1 - deficit, 1]");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(entries_, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -1e-10) {
    throw Error(ErrorKind::InvalidArgument, "density matrix has a negative eigenvalue");
  }
}

EnergyBudget::EnergyBudget(double E) : E_(E) {
  if (!(E >= 0.0) || !std::isfinite(E)) {
    throw Error(ErrorKind::InvalidArgument, "energy budget must be finite and non-negative");
  }
}

double mean_photon(const SchmidtSpectrum& spectrum) {
  double total = 0.0;
  for (int n = 0; n < spectrum.dim(); ++n) total += n * spectrum[n];
  return total;
}

double mean_total_photon(const BipartiteSpectrum& grid) {
  double total = 0.0;
  for (int m = 0; m < grid.dim(); ++m)
    for (int n = 0; n < grid.dim(); ++n) total += (m + n) * grid(m, n);
  return total;
}

DensityMatrix reduced_density(const SchmidtSpectrum& spectrum) {
  CMatrix rho = CMatrix::Zero(spectrum.dim(), spectrum.dim());
  for (int n = 0; n < spectrum.dim(); ++n) rho(n, n) = spectrum[n];
  return DensityMatrix(std::move(rho));
}

CVector pure_state_vector(const SchmidtSpectrum& spectrum, int out_dim) {
  if (out_dim < spectrum.dim()) {
    throw Error(ErrorKind::DimensionTooSmall,
                "out_dim " + std::to_string(out_dim) + " < " + std::to_string(spectrum.dim()));
  }
  CVector psi = CVector::Zero(static_cast<Eigen::Index>(out_dim) * out_dim);
  for (int n = 0; n < spectrum.dim(); ++n) psi(n * out_dim + n) = std::sqrt(spectrum[n]);
  return psi;
}

CVector pure_state_vector(const BipartiteSpectrum& grid, int out_dim) {
  if (out_dim < grid.dim()) {
    throw Error(ErrorKind::DimensionTooSmall,
                "out_dim " + std::to_string(out_dim) + " < " + std::to_string(grid.dim()));
  }
  const Eigen::Index d = out_dim;
  CVector psi = CVector::Zero(d * d * d * d);
  for (int m = 0; m < grid.dim(); ++m) {
    for (int n = 0; n < grid.dim(); ++n) {
      const Eigen::Index r = m * d + n;
      psi(r * d * d + r) = std::sqrt(grid(m, n));
    }
  }
  return psi;
}

nlohmann::json to_json(const SchmidtSpectrum& spectrum) {
  return nlohmann::json(std::vector<double>(spectrum.probs().begin(), spectrum.probs().end()));
}

nlohmann::json to_json(const BipartiteSpectrum& grid) {
  auto rows = nlohmann::json::array();
  for (int m = 0; m < grid.dim(); ++m) {
    std::vector<double> row(static_cast<std::size_t>(grid.dim()));
    for (int n = 0; n < grid.dim(); ++n) row[static_cast<std::size_t>(n)] = grid(m, n);
    rows.push_back(row);
  }
  return rows;
}

SchmidtSpectrum schmidt_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error(ErrorKind::InvalidArgument, "spectrum JSON must be an array");
  return SchmidtSpectrum::make(j.get<std::vector<double>>());
}

BipartiteSpectrum bipartite_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) {
    throw Error(ErrorKind::InvalidArgument, "grid JSON must be a non-empty 2-D array");
  }
  const auto d = static_cast<Eigen::Index>(j.size());
  RMatrix raw(d, d);
  for (Eigen::Index m = 0; m < d; ++m) {
    const auto& row = j[static_cast<std::size_t>(m)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != d) {
      throw Error(ErrorKind::InvalidArgument, "grid JSON must be square");
    }
    for (Eigen::Index n = 0; n < d; ++n) raw(m, n) = row[static_cast<std::size_t>(n)].get<double>();
  }
  return BipartiteSpectrum::make(std::move(raw));
}

}  // namespace cvtf

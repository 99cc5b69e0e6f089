#pragma once

// Truncated Fock-space states: twin-Fock Schmidt spectra, bipartite grids,
// and dense density matrices used by the Kraus oracle.

#include <span>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace cvtf {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double kInputNormTol = 1e-9;
inline constexpr double kInternalNormTol = 1e-12;
inline constexpr double kNegativeTol = 1e-12;
inline constexpr int kMaxTruncation = 64;

/// Probabilities p_n of the pure state sum_n sqrt(p_n) |n>_R |n>_A, n = 0..M.
class SchmidtSpectrum {
 public:
  /// Validates `raw`; renormalizes only when the sum is within 1e-9 of one.
  /// Throws NegativeEntry / NotNormalized / InvalidArgument.
  static SchmidtSpectrum make(std::vector<double> raw);

  std::span<const double> probs() const noexcept { return probs_; }
  double operator[](int n) const noexcept { return probs_[static_cast<std::size_t>(n)]; }
  int truncation() const noexcept { return static_cast<int>(probs_.size()) - 1; }
  int dim() const noexcept { return static_cast<int>(probs_.size()); }

  friend bool operator==(const SchmidtSpectrum&, const SchmidtSpectrum&) = default;

 private:
  explicit SchmidtSpectrum(std::vector<double> p) : probs_(std::move(p)) {}
  std::vector<double> probs_;
};

/// Probabilities p_{m,n} of sum sqrt(p_{m,n}) |m,n>_R |m,n>_{AB}, stored dense
/// as an (M+1) x (M+1) matrix; row index m, column index n.
class BipartiteSpectrum {
 public:
  static BipartiteSpectrum make(RMatrix raw);

  const RMatrix& probs() const noexcept { return probs_; }
  double operator()(int m, int n) const noexcept { return probs_(m, n); }
  int truncation() const noexcept { return static_cast<int>(probs_.rows()) - 1; }
  int dim() const noexcept { return static_cast<int>(probs_.rows()); }

  bool operator==(const BipartiteSpectrum& other) const { return probs_ == other.probs_; }

 private:
  explicit BipartiteSpectrum(RMatrix p) : probs_(std::move(p)) {}
  RMatrix probs_;
};

/// Hermitian PSD matrix on the Fock basis 0..d-1 whose trace may fall short of
/// one by at most the declared truncation deficit.
class DensityMatrix {
 public:
  /// Throws InvalidArgument when hermiticity, positivity (eigenvalues
  /// >= -1e-10) or the trace window [1 - deficit, 1] is violated.
  explicit DensityMatrix(CMatrix entries, double truncation_deficit = 0.0);

  const CMatrix& entries() const noexcept { return entries_; }
  int dim() const noexcept { return static_cast<int>(entries_.rows()); }
  double truncation_deficit() const noexcept { return deficit_; }
  double trace() const { return entries_.trace().real(); }

 private:
  CMatrix entries_;
  double deficit_;
};

class EnergyBudget {
 public:
  explicit EnergyBudget(double E);
  double value() const noexcept { return E_; }

 private:
  double E_;
};

double mean_photon(const SchmidtSpectrum& spectrum);
double mean_total_photon(const BipartiteSpectrum& grid);

DensityMatrix reduced_density(const SchmidtSpectrum& spectrum);

/// Amplitudes of sum_n sqrt(p_n)|n>_R|n>_A in C^{out_dim} (x) C^{out_dim},
/// index r * out_dim + a.
CVector pure_state_vector(const SchmidtSpectrum& spectrum, int out_dim);

/// Amplitudes of sum sqrt(p_{m,n})|m,n>_R|m,n>_{AB}; four modes ordered
/// (R1, R2, A, B), each padded to out_dim, row-major.
CVector pure_state_vector(const BipartiteSpectrum& grid, int out_dim);

nlohmann::json to_json(const SchmidtSpectrum& spectrum);
nlohmann::json to_json(const BipartiteSpectrum& grid);
SchmidtSpectrum schmidt_from_json(const nlohmann::json& j);
BipartiteSpectrum bipartite_from_json(const nlohmann::json& j);

}  // namespace cvtf

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "locop/matalg.hpp"

namespace locop {

// How a stability constant was obtained.
//   spectral      σ_min / σ_max from an eigensolve or SVD (certified)
//   orthant_lp    exact face-by-face LP over the ℓ¹ or ℓ∞ unit sphere (certified)
//   inverse_norm  1/‖A⁻¹‖_p for square invertible windows, p ∈ {1, ∞} (certified)
//   multistart    seeded projected descent; an upper bound on the infimum
//   schur_bound   exact max column/row absolute sum (p = 1 / p = ∞)
//   interpolation Riesz–Thorin bound from the p ∈ {1, 2, ∞} norms
enum class Method { spectral, orthant_lp, inverse_norm, multistart, schur_bound, interpolation };

std::string to_string(Method m);

struct ConstantEstimate {
  double value = 0.0;
  bool certified = false;
  Method method = Method::spectral;
};

struct StabilityOptions {
  std::optional<std::uint64_t> seed;  // mandatory whenever multistart runs
  int starts = 64;
  int max_iterations = 5000;
  double min_step = 1e-10;
  std::size_t orthant_max_cols = 14;
};

// inf ‖Ac‖_p / ‖c‖_p over the window.
ConstantEstimate lower_constant(const LocalizedMatrix& a, double p, const StabilityOptions& opts = {});
// sup ‖Ac‖_p / ‖c‖_p (exact for p ∈ {1, 2, ∞}, an upper bound otherwise).
ConstantEstimate upper_constant(const LocalizedMatrix& a, double p);

// Individual estimators, exposed for cross-checking.
ConstantEstimate orthant_lower(const LocalizedMatrix& a, double p);
ConstantEstimate inverse_norm_lower(const LocalizedMatrix& a, double p);
ConstantEstimate multistart_lower(const LocalizedMatrix& a, double p, const StabilityOptions& opts);

// Induced p-norm of a dense matrix for p ∈ {1, ∞} (max column / row abs sum).
double induced_norm_1(const Eigen::MatrixXd& m);
double induced_norm_inf(const Eigen::MatrixXd& m);

enum class Trend { stable, degenerating, undetermined };
std::string to_string(Trend t);

struct TrendOptions {
  double stable_rel_change = 0.05;  // last-doubling relative change below this
  double stable_threshold = 0.01;   // and last value above τ
  double decay_fraction = 0.30;     // ≥ 30 % drop per doubling …
  int decay_doublings = 3;          // … across this many trailing doublings (or all available)
};

// Classifies a ladder of lower constants taken on doubling windows.
Trend classify_ladder(const std::vector<double>& lower, const TrendOptions& opts = {});

struct LadderEntry {
  double window = 0.0;
  ConstantEstimate lower;
  ConstantEstimate upper;
  std::optional<ConstantEstimate> interior_lower;  // test vectors kept off the window edge
};

struct StabilityReport {
  double p = 2.0;
  std::vector<LadderEntry> entries;  // ascending window
  Trend trend = Trend::undetermined;
};

struct EquivalenceOptions {
  StabilityOptions stability;
  TrendOptions trend;
  bool interior = false;
};

struct EquivalenceReport {
  std::vector<StabilityReport> per_p;  // sorted by p
  bool consistent = true;              // every p shares one verdict
  bool counterexample_candidate = false;  // some p stable while another degenerates
  std::vector<std::string> notes;
};

// Windows must be nested finite sections of one model (checked); each window
// size is given alongside its matrix.
EquivalenceReport equivalence_report(const std::vector<LocalizedMatrix>& windows,
                                     const std::vector<double>& window_sizes,
                                     const std::vector<double>& ps,
                                     const EquivalenceOptions& opts = {});

// Throws PreconditionError unless each window is a nested section of the next.
void check_nested(const std::vector<LocalizedMatrix>& windows);

// Columns whose points sit at least `margin` inside the column window.
std::vector<std::size_t> interior_columns(const LocalizedMatrix& a, double margin);

// Finitely supported sequence a(first), a(first+1), ….
struct FiniteSequence {
  long first = 0;
  std::vector<double> values;
  // Sequence centred at 0 (odd lengths only).
  static FiniteSequence centered(std::vector<double> values);
};

enum class SymbolVerdict { stable, unstable, undetermined };
std::string to_string(SymbolVerdict v);

struct SymbolCertificate {
  double grid_min = 0.0;
  double argmin = 0.0;
  double lipschitz = 0.0;  // Σ |a(j)|·|j|
  double spacing = 0.0;    // grid step h
  double certified_lower = 0.0;  // grid_min − L·h/2
  double certified_upper = 0.0;  // grid_min
  SymbolVerdict verdict = SymbolVerdict::undetermined;
};

SymbolCertificate convolution_stability(const FiniteSequence& a, std::size_t grid_size, double tolerance = 1e-12);

struct DecayFit {
  double rate = 0.0;     // r in profile[k] ≈ c·r^{|k|}
  double log_c = 0.0;
  double residual = 0.0;  // RMS of log residuals
  std::size_t used_offsets = 0;
};

struct InverseDecay {
  OffsetProfile profile;  // of A⁻¹ restricted to interior rows
  double condition = 0.0;
  std::optional<DecayFit> fit;
  std::string fit_error;  // why fit is absent
};

InverseDecay inverse_decay_profile(const LocalizedMatrix& a, double margin);

struct DensityVerdict {
  Box box;
  std::size_t cols_in_box = 0;            // |Λ′ ∩ K|
  std::size_t rows_in_neighbourhood = 0;  // |Λ ∩ B(K, R₀)|
  bool pass = true;
};

// B(K, R) = points at Euclidean distance < R from K.
std::vector<DensityVerdict> density_check(const IndexSet& rows, const IndexSet& cols, double r0,
                                          const std::vector<Box>& boxes);

}  // namespace locop

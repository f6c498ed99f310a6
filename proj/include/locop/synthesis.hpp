#pragma once

#include <optional>
#include <vector>

#include "locop/lattice.hpp"
#include "locop/matalg.hpp"
#include "locop/profile.hpp"
#include "locop/stability.hpp"

namespace locop {

// ω(δ) bound: C·δ^α (power) or a monotone table of (δ, bound) pairs, read as
// the bound of the smallest tabulated δ′ ≥ δ.
struct ModulusBound {
  enum class Form { power, table };
  Form form = Form::power;
  double c = 0.0;
  double alpha = 1.0;
  std::vector<std::pair<double, double>> table;

  double operator()(double delta) const;
};

// {φ_λ}: shift rule φ_λ = profiles[i mod N](· − λ_i), or table rule where
// profiles[i] is φ_{λ_i} itself (already positioned). One-dimensional.
class GeneratorFamily {
 public:
  enum class Rule { shift, table };

  GeneratorFamily(IndexSetPtr index, Rule rule, std::vector<Profile1D> profiles, Profile1D envelope,
                  ModulusBound modulus);

  const IndexSet& index() const { return *index_; }
  const IndexSetPtr& index_ptr() const { return index_; }
  Rule rule() const { return rule_; }
  const std::vector<Profile1D>& profiles() const { return profiles_; }
  const Profile1D& envelope() const { return envelope_; }
  const ModulusBound& modulus() const { return modulus_; }

  // φ_λ for the i-th index point, and φ_λ(· + λ).
  Profile1D generator(std::size_t i) const;
  Profile1D centered(std::size_t i) const;

  // The family restricted to index points inside the box.
  GeneratorFamily restricted(const Box& box) const;

 private:
  IndexSetPtr index_;
  Rule rule_;
  std::vector<Profile1D> profiles_;
  Profile1D envelope_;
  ModulusBound modulus_;
  std::vector<std::size_t> assignment_;  // profile used by each index point
};

// Envelope and modulus hypotheses sampled on a probe grid.
struct HypothesisCheck {
  std::size_t probes = 0;         // probe points per distinct generator
  double envelope_excess = 0.0;   // max(|φ_λ(x)| − h(x − λ))
  double modulus_excess = 0.0;    // max(ω_δ(φ_λ)(x) − ω(δ)·h(x − λ)) over the δ-grid
  bool ok() const { return envelope_excess <= 1e-12 && modulus_excess <= 1e-12; }
};

// δ-grid {2^{−1}, …, 2^{−10}}; at least 1000 probes per generator.
HypothesisCheck check_hypotheses(const GeneratorFamily& fam, int per_cell = 64);
// Throws PreconditionError when the check fails.
void require_hypotheses(const GeneratorFamily& fam, int per_cell = 64);

// Fits ω(δ) = C·δ^α to measured moduli (relative to the envelope) and
// inflates C until the fit bounds every measured point.
ModulusBound calibrate_modulus(const std::vector<Profile1D>& centered_profiles, const Profile1D& envelope,
                               int per_cell = 64);

struct UniformGrid {
  double x0 = 0.0;
  double step = 1.0;
  std::size_t count = 0;
};

struct SynthesisSamples {
  UniformGrid grid;
  std::vector<double> values;
  double truncation_bound = 0.0;  // every generator is summed, so 0
};

SynthesisSamples synthesize(const GeneratorFamily& fam, std::span<const double> c, const UniformGrid& grid);

// ‖S_Φc‖_p (Riemann sum on the grid) / (R(Λ)^{1−1/p} ‖h‖_{𝒲₁} ‖c‖_p).
double synthesis_bound_ratio(const GeneratorFamily& fam, std::span<const double> c, const UniformGrid& grid,
                             double p);

// A_{n0}(λ′, λ) = 2^{n0} ∫_{[λ′, λ′+2^{−n0})} φ_λ over the dyadic points covering
// the generator supports.
LocalizedMatrix discretize_synthesis(const GeneratorFamily& fam, int n0);

// max |½(A_{n0+1}(2k) + A_{n0+1}(2k+1)) − A_{n0}(k)| over all entries.
double refinement_defect(const GeneratorFamily& fam, int n0);

struct SynthesisRung {
  double p = 2.0;
  int n0 = 0;
  double window = 0.0;
  ConstantEstimate lower;
  ConstantEstimate upper;
  double bias = 0.0;  // ω(2^{−n0})·‖h‖_{𝒲₁}·R(Λ)^{1−1/p}
  std::optional<double> change_from_previous_n0;
};

struct SynthesisReport {
  HypothesisCheck hypotheses;
  double envelope_amalgam = 0.0;
  long separation = 0;
  std::vector<SynthesisRung> rungs;  // sorted by (p, window, n0)
};

// Windows keep the index points in [lo, lo + W) of the family's index window.
SynthesisReport synthesis_stability(const GeneratorFamily& fam, const std::vector<double>& ps,
                                    const std::vector<int>& n0s, const std::vector<double>& windows,
                                    const StabilityOptions& opts = {});

}  // namespace locop

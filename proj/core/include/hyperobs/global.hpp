#pragma once

#include <functional>
#include <optional>

#include "hyperobs/groebner.hpp"
#include "hyperobs/system.hpp"

namespace hyperobs {

enum class ObsStatus { Observable, Unobservable, Inconclusive };

std::string to_string(ObsStatus status);

// Three-valued result. Unobservable always carries a witness state distinct
// from sigma at which every generator of the substituted ideal vanishes.
struct Verdict {
  ObsStatus status = ObsStatus::Inconclusive;
  std::string criterion;
  std::optional<std::vector<Rat>> witness;
  std::string notes;
};

struct ChainOptions {
  std::optional<int> r_cap;     // default: max(n*q, 6)
  bool two_step_stabilization = false;
  size_t word_budget = 4096;    // cap on Lie words per level
  GroebnerBudget groebner;
};

// The ascending ideal chain J_0 <= J_1 <= ... over the doubled variable
// space. layers[r] holds the new difference generators introduced at Lie
// order r; level_ideals[r] caches the cumulative ideal with its basis.
// stabilization is the first r with J_r = J_{r+1}; the level that certified
// it (r+1 Lie orders computed) is certified_at_level().
struct IdealChain {
  VarSpace::Ptr pair_space;
  int n = 0;
  std::vector<std::vector<Polynomial>> layers;
  std::vector<IdealHandle> level_ideals;
  std::optional<int> stabilization;
  bool aborted = false;
  std::string note;

  bool stabilized() const { return stabilization.has_value(); }
  int levels_computed() const { return static_cast<int>(layers.size()); }
  std::optional<int> certified_at_level() const {
    if (!stabilization) return std::nullopt;
    return *stabilization + 1;
  }
  // generators of J (all layers), zeros dropped
  std::vector<Polynomial> generators() const;
};

int default_r_cap(const HypergraphSystem& sys);

// Layer r holds L_{tau_1}..L_{tau_r} v (xi-copy minus eta-copy) for every
// word over {g_0..g_m} and every output family member, in deterministic
// word-major, output-major order. Zero layers are kept so positions line up
// with the contraction-path route.
std::vector<std::vector<Polynomial>> enumerate_lie_generators(const HypergraphSystem& sys,
                                                              int r_max,
                                                              size_t word_budget = 4096);

IdealChain build_chain(const HypergraphSystem& sys, const ChainOptions& opts = {});

// eta := sigma substituted into every chain generator, projected to the
// xi-only space; ell = <xi_i - sigma_i>.
struct SubstitutedIdeals {
  IdealHandle J;
  IdealHandle ell;
};
SubstitutedIdeals substitute_initial(const IdealChain& chain, const std::vector<Rat>& sigma);

// Appends, for each basis/generator element recognizable as a positive
// combination of squares (even-exponent monomial sums, or exact LDL^T of a
// quadratic), the square roots themselves; iterates to a fixpoint. Keeps the
// real variety unchanged while shrinking the complex one.
IdealHandle sos_real_augment(const IdealHandle& ideal);

struct SearchOptions {
  uint64_t seed = 0;
  size_t max_candidates = 200'000;
};

// Exact witness search: returns a point != sigma at which every generator of
// J vanishes, if one is found within the candidate budget. Absence of a
// witness proves nothing.
std::optional<std::vector<Rat>> find_counterexample(const IdealHandle& J,
                                                    const std::vector<Rat>& sigma,
                                                    const SearchOptions& opts = {});

// Criteria in order: ideal equality with ell; radical containment of ell
// after SOS augmentation; witness search; otherwise Inconclusive.
Verdict decide_global(const IdealHandle& J, const IdealHandle& ell,
                      const std::vector<Rat>& sigma, const SearchOptions& opts = {});

// Convenience pipeline: chain -> substitution -> verdict. Witness search is
// suppressed when the chain did not stabilize (a partial ideal cannot certify
// indistinguishability); Observable conclusions stay sound either way.
struct GlobalAnalysis {
  IdealChain chain;
  std::optional<SubstitutedIdeals> ideals;
  Verdict verdict;
};
GlobalAnalysis analyze_global(const HypergraphSystem& sys, const std::vector<Rat>& sigma,
                              const ChainOptions& chain_opts = {},
                              const SearchOptions& search_opts = {});

// Symmetric-system generators E_r = sym(...sym(C o A)... o A), emitted
// unscaled as E_r(xi) - E_r(eta); each equals the direct Lie difference up to
// a nonzero rational factor.
std::vector<Polynomial> theorem1_generators(const SparseTensor& a, const SparseTensor& c,
                                            int levels, VarSpace::Ptr pair_space);

// Contraction-path generators for no-input systems: per level and output,
// the sum of all slot-contraction chains through the dynamics tensors. Level
// sums coincide exactly with enumerate_lie_generators.
std::vector<std::vector<Polynomial>> theorem2_generators(const HypergraphSystem& sys,
                                                         int r_max,
                                                         size_t path_budget = 1'000'000);

// Fixed-step RK4 in doubles; only used to corroborate verdicts numerically.
struct SimulationResult {
  std::vector<double> times;
  std::vector<std::vector<double>> outputs;  // outputs[sample][i]
  std::optional<double> blowup_time;
};
SimulationResult simulate_outputs(const HypergraphSystem& sys, const std::vector<double>& x0,
                                  const std::vector<double>& u_const, double horizon,
                                  double step);
double max_output_gap(const SimulationResult& a, const SimulationResult& b);

}  // namespace hyperobs

#pragma once

#include <optional>
#include <set>

#include "hyperobs/global.hpp"
#include "hyperobs/linalg.hpp"
#include "hyperobs/system.hpp"

namespace hyperobs {

struct DesignConfig {
  int d_max = 2;       // maximal output-monomial degree
  int p = 1;           // maximum number of sensors
  int r_relax = 1;     // highest Lie order allowed to be nonvanishing
  int support_bound = 0;  // 0 = n; cap on candidate support size in the relaxed step
  ChainOptions chain;
  SearchOptions search;
};

struct DesignTraceEntry {
  int degree = 0;
  int vanishing_order = 0;
  size_t basis_size = 0;
  size_t kernel_dimension = 0;
};

struct DesignResult {
  bool success = false;
  std::vector<Polynomial> outputs;               // designed y_i over the state space
  std::vector<std::vector<SparseTensor>> output_tensors;  // same, as C_{i,k}
  Verdict verdict;
  std::vector<DesignTraceEntry> trace;
  std::string note;
};

// Monomials of total degree 1..d over n states, graded-lex, deterministic.
// Size is C(n+d, d) - 1.
std::vector<Mono> monomial_basis(int n, int d);

// Columns index basis monomials, rows index the monomials of L_f^r applied to
// them: M Gamma = 0 exactly when L_f^r (sum gamma_m m) vanishes identically.
QMatrix vanishing_constraint_matrix(const std::vector<Polynomial>& f,
                                    const std::vector<Mono>& basis, int r);

// Exact kernel basis of M (fraction-free elimination inside).
std::vector<std::vector<Rat>> exact_nullspace(const QMatrix& m);

// Greedy pick of kernel vectors maximizing newly covered state variables,
// preferring sparse vectors, ties broken by graded-lex order of supports.
// Selects at most max_picks vectors; deterministic.
std::vector<std::vector<Rat>> select_candidates(
    const std::vector<std::vector<Rat>>& kernel, const std::vector<Mono>& basis, int n,
    int max_picks, const std::vector<std::set<int>>& already_covered = {});

// Converts a coefficient vector over the monomial basis into the output
// polynomial and its tensor form (one entry per monomial, sorted index tuple).
Polynomial candidate_polynomial(const std::vector<Rat>& gamma,
                                const std::vector<Mono>& basis, VarSpace::Ptr space);
std::vector<SparseTensor> candidate_tensors(const std::vector<Rat>& gamma,
                                            const std::vector<Mono>& basis, int n);

// Incremental output design: grow the basis degree until the Lie-vanishing
// kernel is nontrivial, pick covering candidates, verify with the full global
// pipeline at sigma, augment (more kernel vectors, higher degree, more
// sensors), and finally relax the vanishing order. Failure is explicit.
DesignResult design_outputs(const HypergraphSystem& dynamics_only,
                            const std::vector<Rat>& sigma, const DesignConfig& cfg,
                            const std::vector<Polynomial>& existing_outputs = {});

}  // namespace hyperobs

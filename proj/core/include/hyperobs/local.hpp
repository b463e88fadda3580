#pragma once

#include <map>
#include <optional>

#include "hyperobs/linalg.hpp"
#include "hyperobs/system.hpp"

namespace hyperobs {

// Matrix of polynomials in the states (and, for the input cases, in the
// input symbols u_l and their formal derivatives u_l', u_l'', ...).
struct PolyMatrix {
  VarSpace::Ptr space;
  std::vector<std::vector<Polynomial>> rows;

  size_t row_count() const { return rows.size(); }
  size_t col_count() const { return rows.empty() ? 0 : rows.front().size(); }
};

// x1..xn followed by u1, u1', ..., u1^(jet), u2, ... (input-major).
VarSpace::Ptr ujet_space(int n, int num_inputs, int jet_order);
size_t ujet_var(int n, int jet_order, int input, int derivative);  // 0-based index

// d/dt under formal input jets: u^(s) -> u^(s+1).
Polynomial formal_u_derivative(const Polynomial& p, int n, int num_inputs, int jet_order);

// The extended Lie operator: sum_i f_i d/dx_i + sum_{l,s} u_l^(s+1) d/du_l^(s).
// Drives the direct-Jacobian oracle for the input cases.
Polynomial extended_lie_derivative(const Polynomial& v, const std::vector<Polynomial>& f,
                                   int n, int num_inputs, int jet_order);

// Block factor for differentiating x^{[d]} along the dynamics: one sparse
// matrix per tensor order m, with d/dt x^{[d]} = sum_m M_{d,m} x^{[d+m-2]}
// along trajectories.
struct KroneckerFactor {
  int degree = 0;
  int dim = 0;
  std::map<int, SparseMatrix> blocks;  // order m -> n^d x n^{d+m-2}

  RationalVector apply(const RationalVector& x) const;
};
KroneckerFactor bar_factor(const HypergraphSystem& sys, int degree);

// Observability matrices, assembled by propagating Kronecker coefficient
// rows through the factor blocks; each equals the direct symbolic Jacobian
// entry-by-entry. Rows are stacked Lie-order-major: L^0 of every output,
// then L^1, ... (lie_orders defaults to n, giving n*q rows).
PolyMatrix matrix_O(const HypergraphSystem& sys, std::optional<int> lie_orders = {});
PolyMatrix matrix_O1(const HypergraphSystem& sys, std::optional<int> lie_orders = {});
PolyMatrix matrix_O2(const HypergraphSystem& sys, std::optional<int> lie_orders = {});

// Direct gradient of iterated (extended) Lie derivatives; the oracle the
// factored matrices are checked against, and the fallback for systems with
// both B and D tensors (no factored formula exists for that mix).
PolyMatrix observability_jacobian_direct(const HypergraphSystem& sys,
                                         std::optional<int> lie_orders = {});

// Pascal row for the u-derivative tail terms: binomial(n-1, p-1), p = 1..n.
std::vector<Rat> leibniz_coefficients(int n);

struct RankOptions {
  uint64_t seed = 0;
  int points = 3;
};
struct RankResult {
  size_t rank = 0;
  // generic rank is a probabilistic lower bound; it is exact whenever it
  // reaches min(rows, cols)
  bool certified_full = false;
  std::vector<std::vector<Rat>> evaluation_points;
};

// Evaluates at seeded random rational points (coordinates in {-10..10}\{0},
// denominators <= 7) and takes the maximum observed rank.
RankResult generic_rank(const PolyMatrix& m, const RankOptions& opts = {});

// Exact rank after substituting the full variable assignment (x and u-jet).
size_t rank_at_point(const PolyMatrix& m, const std::vector<Rat>& assignment);

// Common monomial divisor of all nonzero maximal minors (the syntactically
// detectable part of the rank-drop locus); exponent per variable. Intended
// for n <= 3.
std::map<std::string, unsigned> minor_common_monomial_divisor(const PolyMatrix& m);

}  // namespace hyperobs

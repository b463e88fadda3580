#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "hyperobs/rational.hpp"

namespace hyperobs {

// Index tuples are 1-based, matching the hyperedge notation: an order-k
// dynamics tensor entry (a_1,...,a_{k-1}, a_k) is the hyperedge with heads
// a_1..a_{k-1} and tail a_k. The tail always sits on the LAST mode; every
// operation in this module assumes that convention.
using Index = std::vector<int>;
using RationalVector = std::vector<Rat>;

class TensorError : public std::runtime_error {
 public:
  explicit TensorError(const std::string& what) : std::runtime_error(what) {}
};

// Sparse cubical tensor over exact rationals. Zero entries are never stored;
// set/add canonicalize on write. Immutable use after construction is the
// expected pattern (all module operations are pure).
class SparseTensor {
 public:
  SparseTensor(int order, int dim);

  int order() const { return order_; }
  int dim() const { return dim_; }
  const std::map<Index, Rat>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  Rat at(const Index& idx) const;
  void set(const Index& idx, const Rat& value);
  void add(const Index& idx, const Rat& value);

  bool is_symmetric() const;
  SparseTensor scaled(const Rat& s) const;

  bool operator==(const SparseTensor& other) const = default;

 private:
  void check_index(const Index& idx) const;

  int order_;
  int dim_;
  std::map<Index, Rat> entries_;
};

SparseTensor operator+(const SparseTensor& a, const SparseTensor& b);

// Sparse rational matrix, only used for tensor unfoldings. Columns are
// indexed by Kronecker-encoded head tuples and can exceed 32 bits.
struct SparseMatrix {
  int64_t rows = 0;
  int64_t cols = 0;
  std::map<std::pair<int64_t, int64_t>, Rat> entries;

  Rat at(int64_t r, int64_t c) const;
  void add(int64_t r, int64_t c, const Rat& v);
};

// 0-based Kronecker column index of a 1-based index tuple: the first index is
// the most significant digit, matching x^{[k]} = x (x) x^{[k-1]}.
int64_t kron_index(const Index& idx, int dim);

// (T x^{k-1})_i = sum over head tuples of T_{i_1..i_{k-1} i} x_{i_1}...x_{i_{k-1}}.
RationalVector contract_vector_power(const SparseTensor& t, const RationalVector& x);

// Full contraction T x^k, the scalar form used by output tensors.
Rat contract_full(const SparseTensor& t, const RationalVector& x);

// Averages each entry over all distinct permutations of its index tuple.
// Preserves the scalar form: contract_full(symmetrize(T), x) == contract_full(T, x).
SparseTensor symmetrize(const SparseTensor& t);

// (X o Y)_{i_1..i_{p-1} j_1..j_{m-1}} = sum_i X_{i_1..i_{p-1} i} Y_{j_1..j_{m-1} i}.
// Contracts the last (tail) modes of both operands together. Orders may
// differ; the result has order p+m-2.
SparseTensor circ_contract(const SparseTensor& x, const SparseTensor& y);

// Contracts the s-th mode of c (1-based slot) against the tail mode of a:
// result_{j_1..j_{s-1}, p_1..p_{m-1}, j_{s+1}..j_k} =
//   sum_t c_{j_1.. t ..j_k} a_{p_1..p_{m-1} t}.
// This realizes the index-shifted contraction with all dynamics tensors
// stored tail-last.
SparseTensor slot_contract(const SparseTensor& c, const SparseTensor& a, int slot);

// Row i, column kron_index(heads): unfold(T) * kron_power(x, k-1) equals
// contract_vector_power(T, x) for every x.
SparseMatrix unfold(const SparseTensor& t);

// x^{[0]} = (1); x^{[k]} = x (x) x^{[k-1]}.
RationalVector kron_power(const RationalVector& x, int k);

}  // namespace hyperobs

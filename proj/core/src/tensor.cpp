#include "hyperobs/tensor.hpp"

#include <algorithm>

namespace hyperobs {

SparseTensor::SparseTensor(int order, int dim) : order_(order), dim_(dim) {
  if (order < 1) throw TensorError("tensor order must be >= 1");
  if (dim < 1) throw TensorError("tensor dimension must be >= 1");
}

void SparseTensor::check_index(const Index& idx) const {
  if (static_cast<int>(idx.size()) != order_)
    throw TensorError("index tuple length " + std::to_string(idx.size()) +
                      " does not match tensor order " + std::to_string(order_));
  for (int i : idx)
    if (i < 1 || i > dim_)
      throw TensorError("index component " + std::to_string(i) + " out of range 1.." +
                        std::to_string(dim_));
}

Rat SparseTensor::at(const Index& idx) const {
  check_index(idx);
  auto it = entries_.find(idx);
  return it == entries_.end() ? Rat(0) : it->second;
}

void SparseTensor::set(const Index& idx, const Rat& value) {
  check_index(idx);
  if (value == 0)
    entries_.erase(idx);
  else
    entries_[idx] = value;
}

void SparseTensor::add(const Index& idx, const Rat& value) {
  check_index(idx);
  auto it = entries_.find(idx);
  if (it == entries_.end()) {
    if (value != 0) entries_.emplace(idx, value);
    return;
  }
  it->second += value;
  if (it->second == 0) entries_.erase(it);
}

bool SparseTensor::is_symmetric() const {
  for (const auto& [idx, v] : entries_) {
    Index sorted = idx;
    std::sort(sorted.begin(), sorted.end());
    Index perm = sorted;
    do {
      auto it = entries_.find(perm);
      if (it == entries_.end() || it->second != v) return false;
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return true;
}

SparseTensor SparseTensor::scaled(const Rat& s) const {
  SparseTensor out(order_, dim_);
  if (s == 0) return out;
  for (const auto& [idx, v] : entries_) out.entries_.emplace(idx, v * s);
  return out;
}

SparseTensor operator+(const SparseTensor& a, const SparseTensor& b) {
  if (a.order() != b.order() || a.dim() != b.dim())
    throw TensorError("tensor shape mismatch in addition");
  SparseTensor out = a;
  for (const auto& [idx, v] : b.entries()) out.add(idx, v);
  return out;
}

Rat SparseMatrix::at(int64_t r, int64_t c) const {
  auto it = entries.find({r, c});
  return it == entries.end() ? Rat(0) : it->second;
}

void SparseMatrix::add(int64_t r, int64_t c, const Rat& v) {
  auto key = std::make_pair(r, c);
  auto it = entries.find(key);
  if (it == entries.end()) {
    if (v != 0) entries.emplace(key, v);
    return;
  }
  it->second += v;
  if (it->second == 0) entries.erase(it);
}

int64_t kron_index(const Index& idx, int dim) {
  int64_t col = 0;
  for (int i : idx) col = col * dim + (i - 1);
  return col;
}

RationalVector contract_vector_power(const SparseTensor& t, const RationalVector& x) {
  if (static_cast<int>(x.size()) != t.dim())
    throw TensorError("vector dimension does not match tensor dimension");
  RationalVector out(t.dim(), Rat(0));
  const int heads = t.order() - 1;
  for (const auto& [idx, v] : t.entries()) {
    Rat term = v;
    for (int p = 0; p < heads; ++p) term *= x[idx[p] - 1];
    out[idx[heads] - 1] += term;
  }
  return out;
}

Rat contract_full(const SparseTensor& t, const RationalVector& x) {
  if (static_cast<int>(x.size()) != t.dim())
    throw TensorError("vector dimension does not match tensor dimension");
  Rat out(0);
  for (const auto& [idx, v] : t.entries()) {
    Rat term = v;
    for (int i : idx) term *= x[i - 1];
    out += term;
  }
  return out;
}

SparseTensor symmetrize(const SparseTensor& t) {
  SparseTensor out(t.order(), t.dim());
  for (const auto& [idx, v] : t.entries()) {
    Index sorted = idx;
    std::sort(sorted.begin(), sorted.end());
    // count distinct permutations of the multiset
    int count = 0;
    Index perm = sorted;
    do {
      ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    Rat share = v / count;
    perm = sorted;
    do {
      out.add(perm, share);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return out;
}

SparseTensor circ_contract(const SparseTensor& x, const SparseTensor& y) {
  if (x.dim() != y.dim()) throw TensorError("dimension mismatch in circ contraction");
  const int p = x.order();
  const int m = y.order();
  SparseTensor out(p + m - 2, x.dim());
  for (const auto& [xi, xv] : x.entries()) {
    for (const auto& [yi, yv] : y.entries()) {
      if (xi[p - 1] != yi[m - 1]) continue;
      Index idx;
      idx.reserve(p + m - 2);
      idx.insert(idx.end(), xi.begin(), xi.end() - 1);
      idx.insert(idx.end(), yi.begin(), yi.end() - 1);
      out.add(idx, xv * yv);
    }
  }
  return out;
}

SparseTensor slot_contract(const SparseTensor& c, const SparseTensor& a, int slot) {
  if (c.dim() != a.dim()) throw TensorError("dimension mismatch in slot contraction");
  if (slot < 1 || slot > c.order())
    throw TensorError("slot " + std::to_string(slot) + " out of range 1.." +
                      std::to_string(c.order()));
  const int k = c.order();
  const int m = a.order();
  SparseTensor out(k + m - 2, c.dim());
  for (const auto& [ci, cv] : c.entries()) {
    const int t = ci[slot - 1];
    for (const auto& [ai, av] : a.entries()) {
      if (ai[m - 1] != t) continue;
      Index idx;
      idx.reserve(k + m - 2);
      idx.insert(idx.end(), ci.begin(), ci.begin() + (slot - 1));
      idx.insert(idx.end(), ai.begin(), ai.end() - 1);
      idx.insert(idx.end(), ci.begin() + slot, ci.end());
      out.add(idx, cv * av);
    }
  }
  return out;
}

SparseMatrix unfold(const SparseTensor& t) {
  SparseMatrix out;
  out.rows = t.dim();
  out.cols = 1;
  for (int p = 0; p < t.order() - 1; ++p) out.cols *= t.dim();
  for (const auto& [idx, v] : t.entries()) {
    Index heads(idx.begin(), idx.end() - 1);
    out.add(idx.back() - 1, kron_index(heads, t.dim()), v);
  }
  return out;
}

RationalVector kron_power(const RationalVector& x, int k) {
  if (k < 0) throw TensorError("negative Kronecker power");
  RationalVector out{Rat(1)};
  for (int step = 0; step < k; ++step) {
    RationalVector next;
    next.reserve(x.size() * out.size());
    for (const Rat& xi : x)
      for (const Rat& o : out) next.push_back(xi * o);
    out = std::move(next);
  }
  return out;
}

}  // namespace hyperobs

#pragma once

#include <vector>

#include "hyperobs/rational.hpp"

namespace hyperobs {

// Dense rational matrix for the small exact eliminations the library needs
// (design nullspaces, rank tests). Row-major.
struct QMatrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<Rat> data;

  QMatrix() = default;
  QMatrix(size_t r, size_t c) : rows(r), cols(c), data(r * c, Rat(0)) {}

  Rat& at(size_t r, size_t c) { return data[r * cols + c]; }
  const Rat& at(size_t r, size_t c) const { return data[r * cols + c]; }
};

// Rank by fraction-free (Bareiss) elimination, exact.
size_t matrix_rank(QMatrix m);

// Exact basis of {v : M v = 0}. Deterministic: reduced row echelon form with
// unit free variables, returned in free-column order.
std::vector<std::vector<Rat>> nullspace(QMatrix m);

}  // namespace hyperobs

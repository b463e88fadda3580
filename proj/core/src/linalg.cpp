#include "hyperobs/linalg.hpp"

namespace hyperobs {

size_t matrix_rank(QMatrix m) {
  size_t rank = 0;
  Rat prev_pivot(1);
  size_t pivot_row = 0;
  for (size_t col = 0; col < m.cols && pivot_row < m.rows; ++col) {
    size_t sel = pivot_row;
    while (sel < m.rows && m.at(sel, col) == 0) ++sel;
    if (sel == m.rows) continue;
    if (sel != pivot_row)
      for (size_t c = 0; c < m.cols; ++c) std::swap(m.at(sel, c), m.at(pivot_row, c));
    const Rat pivot = m.at(pivot_row, col);
    for (size_t r = pivot_row + 1; r < m.rows; ++r) {
      // Bareiss step: (pivot * a_rc - a_r,col * a_pivot,c) / prev_pivot stays exact
      const Rat factor = m.at(r, col);
      for (size_t c = col; c < m.cols; ++c) {
        Rat v = (pivot * m.at(r, c) - factor * m.at(pivot_row, c)) / prev_pivot;
        v.canonicalize();
        m.at(r, c) = v;
      }
    }
    prev_pivot = pivot;
    ++pivot_row;
    ++rank;
  }
  return rank;
}

std::vector<std::vector<Rat>> nullspace(QMatrix m) {
  // reduced row echelon form
  std::vector<size_t> pivot_col_of_row;
  size_t pivot_row = 0;
  for (size_t col = 0; col < m.cols && pivot_row < m.rows; ++col) {
    size_t sel = pivot_row;
    while (sel < m.rows && m.at(sel, col) == 0) ++sel;
    if (sel == m.rows) continue;
    if (sel != pivot_row)
      for (size_t c = 0; c < m.cols; ++c) std::swap(m.at(sel, c), m.at(pivot_row, c));
    const Rat inv = Rat(1) / m.at(pivot_row, col);
    for (size_t c = col; c < m.cols; ++c) m.at(pivot_row, c) *= inv;
    for (size_t r = 0; r < m.rows; ++r) {
      if (r == pivot_row || m.at(r, col) == 0) continue;
      const Rat factor = m.at(r, col);
      for (size_t c = col; c < m.cols; ++c) m.at(r, c) -= factor * m.at(pivot_row, c);
    }
    pivot_col_of_row.push_back(col);
    ++pivot_row;
  }

  std::vector<bool> is_pivot(m.cols, false);
  for (size_t c : pivot_col_of_row) is_pivot[c] = true;

  std::vector<std::vector<Rat>> basis;
  for (size_t free_col = 0; free_col < m.cols; ++free_col) {
    if (is_pivot[free_col]) continue;
    std::vector<Rat> v(m.cols, Rat(0));
    v[free_col] = 1;
    for (size_t r = 0; r < pivot_col_of_row.size(); ++r)
      v[pivot_col_of_row[r]] = -m.at(r, free_col);
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace hyperobs

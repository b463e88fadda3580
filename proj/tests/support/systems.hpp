#pragma once

// Reference systems used across the unit and acceptance suites, built in
// code so the tests do not depend on the shipped data files (those are
// checked against these builders in the io tests).

#include "hyperobs/system.hpp"

namespace testsys {

using namespace hyperobs;

// xdot = (x2 x3 + x2, x1 x3 + x1, x1 x2), y = x1 x2 x3 + x1 x2
inline HypergraphSystem cubic_ring() {
  HypergraphSystem sys;
  sys.n = 3;
  sys.max_cardinality = 3;
  SparseTensor a3(3, 3);
  for (Index idx : {Index{1, 2, 3}, Index{1, 3, 2}, Index{2, 1, 3}, Index{2, 3, 1},
                    Index{3, 1, 2}, Index{3, 2, 1}})
    a3.set(idx, Rat(1, 2));
  SparseTensor a2(2, 3);
  a2.set({1, 2}, 1);
  a2.set({2, 1}, 1);
  sys.dynamics = {a3, a2};
  SparseTensor c3(3, 3);
  for (Index idx : {Index{1, 2, 3}, Index{1, 3, 2}, Index{2, 1, 3}, Index{2, 3, 1},
                    Index{3, 1, 2}, Index{3, 2, 1}})
    c3.set(idx, Rat(1, 6));
  SparseTensor c2(2, 3);
  c2.set({1, 2}, Rat(1, 2));
  c2.set({2, 1}, Rat(1, 2));
  sys.outputs = {{c3, c2}};
  return sys;
}

// competitive population model: xdot = (x1 - 4 x1 x2, x2 - x2 x3,
// x3 - x2 x3 - x1 x2 x3), y = x2
inline HypergraphSystem population() {
  HypergraphSystem sys;
  sys.n = 3;
  sys.max_cardinality = 4;
  SparseTensor a2(2, 3);
  a2.set({1, 1}, 1);
  a2.set({2, 2}, 1);
  a2.set({3, 3}, 1);
  SparseTensor a3(3, 3);
  a3.set({1, 2, 1}, -4);
  a3.set({2, 3, 2}, -1);
  a3.set({2, 3, 3}, -1);
  SparseTensor a4(4, 3);
  a4.set({1, 2, 3, 3}, -1);
  sys.dynamics = {a2, a3, a4};
  SparseTensor c1(1, 3);
  c1.set({2}, 1);
  sys.outputs = {{c1}};
  return sys;
}

// xdot = (-1/2 x2 x3, x1 x3, -1/2 x1 x2), y = x1^2 + x2^2 + x3^2
inline HypergraphSystem sum_of_squares_output() {
  HypergraphSystem sys;
  sys.n = 3;
  sys.max_cardinality = 3;
  SparseTensor a3(3, 3);
  a3.set({2, 3, 1}, Rat(-1, 2));
  a3.set({1, 3, 2}, 1);
  a3.set({1, 2, 3}, Rat(-1, 2));
  sys.dynamics = {a3};
  SparseTensor c2(2, 3);
  c2.set({1, 1}, 1);
  c2.set({2, 2}, 1);
  c2.set({3, 3}, 1);
  sys.outputs = {{c2}};
  return sys;
}

// same dynamics without any output (design input)
inline HypergraphSystem sum_of_squares_dynamics() {
  HypergraphSystem sys = sum_of_squares_output();
  sys.outputs.clear();
  return sys;
}

// xdot3 = x1 x2, y = x3
inline HypergraphSystem product_edge() {
  HypergraphSystem sys;
  sys.n = 3;
  sys.max_cardinality = 3;
  SparseTensor a3(3, 3);
  a3.set({1, 2, 3}, 1);
  sys.dynamics = {a3};
  SparseTensor c1(1, 3);
  c1.set({3}, 1);
  sys.outputs = {{c1}};
  return sys;
}

// product_edge with the extra sensor y2 = x1
inline HypergraphSystem product_edge_augmented() {
  HypergraphSystem sys = product_edge();
  SparseTensor c1(1, 3);
  c1.set({1}, 1);
  sys.outputs.push_back({c1});
  return sys;
}

// linear pair xdot = A x, y = C x from dense rational matrices
inline HypergraphSystem linear_pair(const std::vector<std::vector<Rat>>& a,
                                    const std::vector<std::vector<Rat>>& c) {
  HypergraphSystem sys;
  sys.n = static_cast<int>(a.size());
  sys.max_cardinality = 2;
  SparseTensor a2(2, sys.n);
  for (int i = 0; i < sys.n; ++i)
    for (int j = 0; j < sys.n; ++j)
      if (a[i][j] != 0) a2.set({j + 1, i + 1}, a[i][j]);  // head j (source), tail i
  sys.dynamics = {a2};
  for (const auto& row : c) {
    SparseTensor c1(1, sys.n);
    for (int j = 0; j < sys.n; ++j)
      if (row[j] != 0) c1.set({j + 1}, row[j]);
    sys.outputs.push_back({c1});
  }
  return sys;
}

}  // namespace testsys

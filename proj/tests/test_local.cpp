#include <doctest.h>

#include "hyperobs/local.hpp"
#include "support/oracles.hpp"
#include "support/systems.hpp"

using namespace hyperobs;

namespace {

Polynomial var(const VarSpace::Ptr& s, size_t i) { return Polynomial::variable(s, i); }

bool matrices_equal(const PolyMatrix& a, const PolyMatrix& b) {
  if (a.row_count() != b.row_count() || a.col_count() != b.col_count()) return false;
  for (size_t r = 0; r < a.row_count(); ++r)
    for (size_t c = 0; c < a.col_count(); ++c)
      if (!(a.rows[r][c] == b.rows[r][c])) return false;
  return true;
}

}  // namespace

TEST_CASE("bar_factor of a linear system is the unfolded matrix") {
  HypergraphSystem sys = testsys::linear_pair({{Rat(0), Rat(1)}, {Rat(2), Rat(0)}},
                                              {{Rat(1), Rat(0)}});
  KroneckerFactor f = bar_factor(sys, 1);
  REQUIRE(f.blocks.count(2) == 1);
  SparseMatrix expect = unfold(sys.dynamics[0]);
  CHECK(f.blocks.at(2).entries == expect.entries);
}

TEST_CASE("bar_factor apply matches the lowered field along kron powers") {
  HypergraphSystem sys = testsys::population();
  VarSpace::Ptr x = VarSpace::states(3);
  auto f_polys = lower_dynamics(sys, x);
  KroneckerFactor factor = bar_factor(sys, 1);
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 5; ++trial) {
    RationalVector point = oracle::random_vector(rng, 3);
    RationalVector via_factor = factor.apply(point);
    for (int i = 0; i < 3; ++i) CHECK(via_factor[i] == f_polys[i].eval(point));
  }
  // d/dt x^{[2]} bookkeeping at degree 2: row (i,j) = xdot_i x_j + x_i xdot_j
  KroneckerFactor deg2 = bar_factor(sys, 2);
  RationalVector p{Rat(2), Rat(-1), Rat(1, 3)};
  RationalVector lhs = deg2.apply(p);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      Rat expect = f_polys[i].eval(p) * p[j] + p[i] * f_polys[j].eval(p);
      CHECK(lhs[kron_index({i + 1, j + 1}, 3)] == expect);
    }
}

TEST_CASE("bar_factor of zero dynamics is empty") {
  HypergraphSystem sys;
  sys.n = 2;
  sys.max_cardinality = 2;
  KroneckerFactor f = bar_factor(sys, 1);
  CHECK(f.blocks.empty());
  CHECK(f.apply({Rat(1), Rat(2)}) == RationalVector{Rat(0), Rat(0)});
}

TEST_CASE("matrix_O of a linear pair is the classical observability matrix") {
  std::vector<std::vector<Rat>> a{{Rat(0), Rat(1)}, {Rat(-2), Rat(-3)}};
  std::vector<std::vector<Rat>> c{{Rat(1), Rat(0)}};
  HypergraphSystem sys = testsys::linear_pair(a, c);
  PolyMatrix o = matrix_O(sys);
  REQUIRE(o.row_count() == 2);

  // rows: C, then C*A
  std::vector<std::vector<Rat>> expected{{Rat(1), Rat(0)}, {Rat(0), Rat(1)}};
  for (size_t r = 0; r < 2; ++r)
    for (size_t col = 0; col < 2; ++col)
      CHECK(o.rows[r][col] == Polynomial::constant(o.space, expected[r][col]));
}

TEST_CASE("matrix_O equals the direct Jacobian on the worked systems") {
  for (auto sys : {testsys::cubic_ring(), testsys::population(),
                   testsys::sum_of_squares_output(), testsys::product_edge()}) {
    PolyMatrix factored = matrix_O(sys);
    PolyMatrix direct = observability_jacobian_direct(sys);
    CHECK(matrices_equal(factored, direct));
  }
}

TEST_CASE("matrix_O equals the direct Jacobian on random systems") {
  std::mt19937_64 rng(62);
  for (int trial = 0; trial < 10; ++trial) {
    HypergraphSystem sys = oracle::random_system(rng, 3, 3, 2);
    CHECK(matrices_equal(matrix_O(sys), observability_jacobian_direct(sys)));
  }
}

TEST_CASE("population rank drops exactly on the x2 x3 locus") {
  HypergraphSystem sys = testsys::population();
  PolyMatrix o = matrix_O(sys);

  RankResult generic = generic_rank(o, RankOptions{.seed = 7});
  CHECK(generic.rank == 3);
  CHECK(generic.certified_full);

  CHECK(rank_at_point(o, {Rat(1), Rat(0), Rat(1)}) < 3);
  CHECK(rank_at_point(o, {Rat(1), Rat(1), Rat(1)}) == 3);

  // det(O) = -x2^3 x3 (verified independently), so the common monomial
  // divisor of the maximal minors is x2^3 x3
  auto divisor = minor_common_monomial_divisor(o);
  REQUIRE(divisor.count("x2"));
  REQUIRE(divisor.count("x3"));
  CHECK(divisor.at("x2") == 3);
  CHECK(divisor.at("x3") == 1);
}

TEST_CASE("sum-of-squares system has generic rank one") {
  PolyMatrix o = matrix_O(testsys::sum_of_squares_output());
  RankResult generic = generic_rank(o, RankOptions{.seed = 3});
  CHECK(generic.rank == 1);
  CHECK(!generic.certified_full);
}

TEST_CASE("matrix_O1 reduces to matrix_O without input tensors") {
  HypergraphSystem sys = testsys::population();
  CHECK(matrices_equal(matrix_O1(sys), matrix_O(sys)));
}

TEST_CASE("matrix_O1 of the bilinear scalar system") {
  // xdot = x u, y = x: rows d/dx of (x, x u, x u^2 + x u', ...)
  HypergraphSystem sys;
  sys.n = 1;
  sys.max_cardinality = 2;
  SparseTensor b(2, 1);
  b.set({1, 1}, 1);
  sys.inputs = {{b}};
  SparseTensor c(1, 1);
  c.set({1}, 1);
  sys.outputs = {{c}};

  PolyMatrix o1 = matrix_O1(sys, 3);
  REQUIRE(o1.row_count() == 3);
  const VarSpace::Ptr& s = o1.space;
  Polynomial u = var(s, *s->index_of("u1"));
  Polynomial du = var(s, *s->index_of("u1'"));
  CHECK(o1.rows[0][0] == Polynomial::constant(s, 1));
  CHECK(o1.rows[1][0] == u);
  CHECK(o1.rows[2][0] == u * u + du);
}

TEST_CASE("matrix_O1 equals the direct extended Jacobian on random input systems") {
  std::mt19937_64 rng(63);
  for (int trial = 0; trial < 6; ++trial) {
    HypergraphSystem sys = oracle::random_system(rng, 2, 3, 1);
    SparseTensor b = oracle::random_tensor(rng, 2, 2, 0.5);
    if (b.empty()) b.set({1, 1}, 1);
    sys.inputs = {{b}};
    CHECK(matrices_equal(matrix_O1(sys), observability_jacobian_direct(sys)));
  }
}

TEST_CASE("matrix_O1 at zero input jets degenerates to matrix_O") {
  HypergraphSystem sys = testsys::population();
  SparseTensor b(2, 3);
  b.set({1, 1}, 1);
  b.set({2, 3}, Rat(1, 2));
  sys.inputs = {{b}};

  PolyMatrix o1 = matrix_O1(sys);
  HypergraphSystem stripped = sys;
  stripped.inputs.clear();
  PolyMatrix o = matrix_O(stripped);

  std::map<size_t, Rat> kill;
  for (size_t v = 3; v < o1.space->size(); ++v) kill[v] = 0;
  for (size_t r = 0; r < o1.row_count(); ++r)
    for (size_t c = 0; c < o1.col_count(); ++c) {
      Polynomial dropped = o1.rows[r][c].substitute(kill);
      Polynomial expect = o.rows[r][c].embedded(o1.space, 0);
      CHECK(dropped == expect);
    }
}

TEST_CASE("matrix_O2 reduces to matrix_O without direct tensors") {
  HypergraphSystem sys = testsys::cubic_ring();
  CHECK(matrices_equal(matrix_O2(sys), matrix_O(sys)));
}

TEST_CASE("the u-derivative tail coefficients are the Pascal row") {
  auto row = leibniz_coefficients(3);
  REQUIRE(row.size() == 3);
  CHECK(row[0] == Rat(1));
  CHECK(row[1] == Rat(2));
  CHECK(row[2] == Rat(1));
}

TEST_CASE("matrix_O2 of the scalar direct-transmission system") {
  // xdot = x^2, y = x + x u
  HypergraphSystem sys;
  sys.n = 1;
  sys.max_cardinality = 3;
  SparseTensor a(3, 1);
  a.set({1, 1, 1}, 1);
  sys.dynamics = {a};
  SparseTensor c(1, 1);
  c.set({1}, 1);
  sys.outputs = {{c}};
  SparseTensor d(1, 1);
  d.set({1}, 1);
  sys.direct = {{{d}}};

  PolyMatrix o2 = matrix_O2(sys, 3);
  PolyMatrix direct = observability_jacobian_direct(sys, 3);
  CHECK(matrices_equal(o2, direct));

  // hand expansion of the first two rows: d/dx (x + x u) = 1 + u,
  // L h = x^2 (1 + u) + x u', so d/dx L h = 2 x (1 + u) + u'
  const VarSpace::Ptr& s = o2.space;
  Polynomial x = var(s, 0);
  Polynomial u = var(s, *s->index_of("u1"));
  Polynomial du = var(s, *s->index_of("u1'"));
  Polynomial one = Polynomial::constant(s, 1);
  CHECK(o2.rows[0][0] == one + u);
  CHECK(o2.rows[1][0] == Rat(2) * (x * (one + u)) + du);
}

TEST_CASE("mixed input and direct transmission refuses the factored matrices") {
  HypergraphSystem sys = testsys::population();
  SparseTensor b(2, 3);
  b.set({1, 1}, 1);
  sys.inputs = {{b}};
  SparseTensor d(1, 3);
  d.set({2}, 1);
  sys.direct = {{{d}}};
  CHECK_THROWS_AS(matrix_O1(sys), SystemError);
  CHECK_THROWS_AS(matrix_O2(sys), SystemError);
  PolyMatrix fallback = observability_jacobian_direct(sys);
  CHECK(fallback.row_count() == 3);
}

TEST_CASE("rank of the zero matrix is zero") {
  PolyMatrix m;
  m.space = VarSpace::states(2);
  m.rows.assign(2, std::vector<Polynomial>(2, Polynomial::zero(m.space)));
  CHECK(generic_rank(m).rank == 0);
  CHECK(rank_at_point(m, {Rat(1), Rat(2)}) == 0);
}

TEST_CASE("point rank never exceeds generic rank") {
  std::mt19937_64 rng(64);
  for (int trial = 0; trial < 20; ++trial) {
    HypergraphSystem sys = oracle::random_system(rng, 3, 3, 1);
    PolyMatrix o = matrix_O(sys);
    RankResult generic = generic_rank(o, RankOptions{.seed = rng()});
    std::vector<Rat> point;
    for (size_t v = 0; v < o.space->size(); ++v) point.push_back(oracle::random_rat(rng));
    CHECK(rank_at_point(o, point) <= generic.rank);
  }
}

TEST_CASE("exact generic rank agrees with a numeric QR oracle on linear pairs") {
  std::mt19937_64 rng(65);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<std::vector<Rat>> a(3, std::vector<Rat>(3));
    std::vector<std::vector<Rat>> c(1, std::vector<Rat>(3));
    for (auto& row : a)
      for (auto& v : row) v = oracle::random_rat(rng, 3, 1);
    for (auto& v : c[0]) v = oracle::random_rat(rng, 3, 1);
    HypergraphSystem sys = testsys::linear_pair(a, c);
    PolyMatrix o = matrix_O(sys);
    // constant entries: evaluate anywhere
    std::vector<std::vector<double>> dbl(o.row_count(),
                                         std::vector<double>(o.col_count()));
    std::vector<Rat> origin(o.space->size(), Rat(0));
    for (size_t r = 0; r < o.row_count(); ++r)
      for (size_t col = 0; col < o.col_count(); ++col)
        dbl[r][col] = o.rows[r][col].eval(origin).get_d();
    CHECK(generic_rank(o, RankOptions{.seed = 1}).rank == oracle::qr_rank(dbl));
  }
}

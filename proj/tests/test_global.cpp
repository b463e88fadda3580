#include <doctest.h>

#include "hyperobs/global.hpp"
#include "hyperobs/linalg.hpp"
#include "support/oracles.hpp"
#include "support/systems.hpp"

using namespace hyperobs;

namespace {

Polynomial var(const VarSpace::Ptr& s, size_t i) { return Polynomial::variable(s, i); }
Polynomial cst(const VarSpace::Ptr& s, const Rat& c) { return Polynomial::constant(s, c); }

// nonzero rational ratio p/q or nullopt
bool is_scalar_multiple(const Polynomial& p, const Polynomial& q) {
  if (p.is_zero() || q.is_zero()) return p.is_zero() && q.is_zero();
  if (p.terms().size() != q.terms().size()) return false;
  Rat ratio = 0;
  for (const auto& [m, c] : p.terms()) {
    Rat qc = q.coefficient(m);
    if (qc == 0) return false;
    Rat r = c / qc;
    if (ratio == 0)
      ratio = r;
    else if (r != ratio)
      return false;
  }
  return true;
}

std::vector<Rat> sig(std::initializer_list<long> xs) {
  std::vector<Rat> v;
  for (long x : xs) v.push_back(Rat(x));
  return v;
}

}  // namespace

TEST_CASE("lie generator layers for the cubic ring") {
  HypergraphSystem sys = testsys::cubic_ring();
  auto layers = enumerate_lie_generators(sys, 2);
  REQUIRE(layers.size() == 3);
  VarSpace::Ptr pair = VarSpace::pair_states(3);
  Polynomial xi1 = var(pair, 0), xi2 = var(pair, 1), xi3 = var(pair, 2);
  Polynomial eta1 = var(pair, 3), eta2 = var(pair, 4), eta3 = var(pair, 5);
  Polynomial one = cst(pair, 1);

  Polynomial expected0 = xi1 * xi2 * (xi3 + one) - eta1 * eta2 * (eta3 + one);
  REQUIRE(layers[0].size() == 1);
  CHECK(layers[0][0] == expected0);

  auto sq = [](const Polynomial& p) { return p * p; };
  Polynomial l1 = sq(xi2 * xi3 + xi2) + sq(xi1 * xi3 + xi1) + sq(xi1 * xi2);
  Polynomial expected1 =
      l1 - (sq(eta2 * eta3 + eta2) + sq(eta1 * eta3 + eta1) + sq(eta1 * eta2));
  REQUIRE(layers[1].size() == 1);
  CHECK(layers[1][0] == expected1);

  // frozen second Lie derivative, cross-checked against an independent
  // finite-difference oracle along an integrated trajectory (value 48 at the
  // all-ones state) and sympy
  Polynomial l2_xi = Rat(4) * (xi1 * xi2 * (xi3 + one) *
                               ((xi3 + one) * (xi3 + one) + xi1 * xi1 + xi2 * xi2));
  Polynomial l2_eta = Rat(4) * (eta1 * eta2 * (eta3 + one) *
                                ((eta3 + one) * (eta3 + one) + eta1 * eta1 + eta2 * eta2));
  REQUIRE(layers[2].size() == 1);
  CHECK(layers[2][0] == l2_xi - l2_eta);
  std::vector<Rat> ones{Rat(1), Rat(1), Rat(1), Rat(0), Rat(0), Rat(0)};
  CHECK(l2_xi.eval(ones) == Rat(48));
}

TEST_CASE("lie layers enumerate words over every vector field") {
  // xdot1 = x2 + x1 u, xdot2 = 0, y = x1: words over {g0, g1}
  HypergraphSystem sys;
  sys.n = 2;
  sys.max_cardinality = 2;
  SparseTensor a2(2, 2);
  a2.set({2, 1}, 1);
  sys.dynamics = {a2};
  SparseTensor b2(2, 2);
  b2.set({1, 1}, 1);
  sys.inputs = {{b2}};
  SparseTensor c1(1, 2);
  c1.set({1}, 1);
  sys.outputs = {{c1}};

  VarSpace::Ptr pair = VarSpace::pair_states(2);
  Polynomial xi1 = var(pair, 0), xi2 = var(pair, 1);
  Polynomial eta1 = var(pair, 2), eta2 = var(pair, 3);

  auto layers = enumerate_lie_generators(sys, 2);
  REQUIRE(layers[0].size() == 1);
  CHECK(layers[0][0] == xi1 - eta1);
  // level 1: L_{g0} y = x2, L_{g1} y = x1
  REQUIRE(layers[1].size() == 2);
  CHECK(layers[1][0] == xi2 - eta2);
  CHECK(layers[1][1] == xi1 - eta1);
  // level 2 words: g0g0 -> 0, g0g1 -> x2, g1g0 -> 0, g1g1 -> x1
  REQUIRE(layers[2].size() == 4);
  CHECK(layers[2][0].is_zero());
  CHECK(layers[2][1] == xi2 - eta2);
  CHECK(layers[2][2].is_zero());
  CHECK(layers[2][3] == xi1 - eta1);

  // the chain over both fields certifies observability everywhere
  GlobalAnalysis analysis = analyze_global(sys, {Rat(3), Rat(-7)});
  CHECK(analysis.verdict.status == ObsStatus::Observable);
}

TEST_CASE("direct-transmission members enter the chain at level zero") {
  // y = x1 + x2 u: both p0 = x1 and p1 = x2 are level-0 generators
  HypergraphSystem sys;
  sys.n = 2;
  sys.max_cardinality = 2;
  SparseTensor c1(1, 2);
  c1.set({1}, 1);
  sys.outputs = {{c1}};
  SparseTensor d1(1, 2);
  d1.set({2}, 1);
  sys.direct = {{{d1}}};

  auto layers = enumerate_lie_generators(sys, 1);
  VarSpace::Ptr pair = VarSpace::pair_states(2);
  REQUIRE(layers[0].size() == 2);
  CHECK(layers[0][0] == var(pair, 0) - var(pair, 2));
  CHECK(layers[0][1] == var(pair, 1) - var(pair, 3));

  GlobalAnalysis analysis = analyze_global(sys, {Rat(5), Rat(2)});
  CHECK(analysis.verdict.status == ObsStatus::Observable);
}

TEST_CASE("zero dynamics produce a single constant layer") {
  HypergraphSystem sys;
  sys.n = 2;
  sys.max_cardinality = 2;
  SparseTensor c1(1, 2);
  c1.set({1}, 1);
  sys.outputs = {{c1}};
  auto layers = enumerate_lie_generators(sys, 3);
  VarSpace::Ptr pair = VarSpace::pair_states(2);
  CHECK(layers[0][0] == var(pair, 0) - var(pair, 2));
  for (int r = 1; r <= 3; ++r)
    for (const auto& g : layers[r]) CHECK(g.is_zero());
}

TEST_CASE("build_chain stabilization indices across the worked examples") {
  IdealChain sos = build_chain(testsys::sum_of_squares_output());
  REQUIRE(sos.stabilization.has_value());
  CHECK(*sos.stabilization == 0);
  CHECK(*sos.certified_at_level() == 1);

  IdealChain ring = build_chain(testsys::cubic_ring());
  REQUIRE(ring.stabilization.has_value());
  CHECK(*ring.stabilization == 3);
  // strict growth below the stabilization point
  CHECK(!ideal_equal(ring.level_ideals[0], ring.level_ideals[1]));

  IdealChain pop = build_chain(testsys::population());
  REQUIRE(pop.stabilization.has_value());
  CHECK(*pop.stabilization == 2);

  IdealChain edge = build_chain(testsys::product_edge());
  REQUIRE(edge.stabilization.has_value());
  CHECK(*edge.stabilization == 1);
}

TEST_CASE("the sum-of-squares chain ideal is the single difference generator") {
  IdealChain chain = build_chain(testsys::sum_of_squares_output());
  VarSpace::Ptr pair = chain.pair_space;
  Polynomial xi1 = var(pair, 0), xi2 = var(pair, 1), xi3 = var(pair, 2);
  Polynomial eta1 = var(pair, 3), eta2 = var(pair, 4), eta3 = var(pair, 5);
  Polynomial expected = xi1 * xi1 + xi2 * xi2 + xi3 * xi3 -
                        (eta1 * eta1 + eta2 * eta2 + eta3 * eta3);
  IdealHandle j = IdealHandle::make(pair, chain.generators());
  IdealHandle ref = IdealHandle::make(pair, {expected});
  CHECK(ideal_equal(j, ref));
}

TEST_CASE("an observable linear pair collapses the ideal to the point ideal") {
  // shift pair: rank (C; CA) = 2 by the classical test
  HypergraphSystem sys = testsys::linear_pair({{Rat(0), Rat(1)}, {Rat(0), Rat(0)}},
                                              {{Rat(1), Rat(0)}});
  {
    QMatrix o(2, 2);
    o.at(0, 0) = 1;  // C
    o.at(1, 1) = 1;  // CA
    REQUIRE(matrix_rank(o) == 2);
  }
  IdealChain chain = build_chain(sys);
  REQUIRE(chain.stabilization.has_value());
  CHECK(*chain.stabilization <= 2);
  SubstitutedIdeals ideals = substitute_initial(chain, sig({3, -5}));
  CHECK(ideal_equal(ideals.J, ideals.ell));
}

TEST_CASE("two-step stabilization flag demands one extra equal level") {
  ChainOptions opts;
  opts.two_step_stabilization = true;
  IdealChain pop = build_chain(testsys::population(), opts);
  REQUIRE(pop.stabilization.has_value());
  CHECK(*pop.stabilization == 2);
  CHECK(pop.levels_computed() == 5);  // levels 0..4: absorbed at 3 and 4
}

TEST_CASE("substitute_initial pins eta to sigma") {
  IdealChain pop = build_chain(testsys::population());
  SubstitutedIdeals ideals = substitute_initial(pop, sig({1, 1, 1}));
  VarSpace::Ptr xi = ideals.J.space();
  std::vector<Polynomial> point;
  for (int i = 0; i < 3; ++i) point.push_back(var(xi, i) - cst(xi, 1));
  CHECK(ideal_equal(ideals.J, IdealHandle::make(xi, point)));

  IdealChain edge = build_chain(testsys::product_edge());
  SubstitutedIdeals at_primes = substitute_initial(edge, sig({2, 3, 5}));
  VarSpace::Ptr xs = at_primes.J.space();
  Polynomial xi1 = var(xs, 0), xi2 = var(xs, 1), xi3 = var(xs, 2);
  IdealHandle expected =
      IdealHandle::make(xs, {xi3 - cst(xs, 5), xi1 * xi2 - cst(xs, 6)});
  CHECK(ideal_equal(at_primes.J, expected));
}

TEST_CASE("substitute_initial on a single linear difference") {
  HypergraphSystem sys;
  sys.n = 2;
  sys.max_cardinality = 2;
  SparseTensor c1(1, 2);
  c1.set({1}, 1);
  sys.outputs = {{c1}};
  IdealChain chain = build_chain(sys);
  SubstitutedIdeals ideals = substitute_initial(chain, sig({3, 7}));
  VarSpace::Ptr xi = ideals.J.space();
  CHECK(ideal_equal(ideals.J, IdealHandle::make(xi, {var(xi, 0) - cst(xi, 3)})));
}

TEST_CASE("sos_real_augment splits positive square combinations") {
  VarSpace::Ptr xi = VarSpace::make({"xi1", "xi2", "xi3"});
  Polynomial x1 = var(xi, 0), x2 = var(xi, 1), x3 = var(xi, 2);

  IdealHandle sphere = IdealHandle::make(xi, {x1 * x1 + x2 * x2 + x3 * x3});
  IdealHandle augmented = sos_real_augment(sphere);
  CHECK(ideal_equal(augmented, IdealHandle::make(xi, {x1, x2, x3})));

  IdealHandle product = IdealHandle::make(xi, {x1 * x2});
  CHECK(ideal_equal(sos_real_augment(product), product));

  // affine quadratic: (xi1 - 1)^2 + 4 xi2^2
  Polynomial g = (x1 - cst(xi, 1)) * (x1 - cst(xi, 1)) + Rat(4) * (x2 * x2);
  IdealHandle affine = IdealHandle::make(xi, {g});
  IdealHandle expect = IdealHandle::make(xi, {x1 - cst(xi, 1), x2});
  CHECK(ideal_equal(sos_real_augment(affine), expect));
}

TEST_CASE("decide_global on the population model") {
  IdealChain chain = build_chain(testsys::population());

  SubstitutedIdeals at_ones = substitute_initial(chain, sig({1, 1, 1}));
  Verdict ones = decide_global(at_ones.J, at_ones.ell, sig({1, 1, 1}));
  CHECK(ones.status == ObsStatus::Observable);
  CHECK(ones.criterion.find("ideal equality") != std::string::npos);

  SubstitutedIdeals at_zero = substitute_initial(chain, sig({0, 0, 0}));
  Verdict zero = decide_global(at_zero.J, at_zero.ell, sig({0, 0, 0}));
  REQUIRE(zero.status == ObsStatus::Unobservable);
  REQUIRE(zero.witness.has_value());
  CHECK(*zero.witness != sig({0, 0, 0}));
  for (const auto& g : at_zero.J.generators()) CHECK(g.eval(*zero.witness) == Rat(0));
}

TEST_CASE("decide_global finds the scaling family of the cubic ring") {
  IdealChain chain = build_chain(testsys::cubic_ring());
  for (auto sigma : {sig({1, 1, 1}), sig({2, 1, 3})}) {
    SubstitutedIdeals ideals = substitute_initial(chain, sigma);
    Verdict v = decide_global(ideals.J, ideals.ell, sigma);
    REQUIRE(v.status == ObsStatus::Unobservable);
    REQUIRE(v.witness.has_value());
    CHECK(*v.witness != sigma);
    for (const auto& g : ideals.J.generators()) CHECK(g.eval(*v.witness) == Rat(0));
  }
}

TEST_CASE("find_counterexample examples") {
  VarSpace::Ptr xi = VarSpace::make({"xi1", "xi2", "xi3"});
  Polynomial x1 = var(xi, 0), x2 = var(xi, 1), x3 = var(xi, 2);
  std::vector<Rat> sigma = sig({1, 1, 1});

  IdealHandle j = IdealHandle::make(xi, {x3 - cst(xi, 1), x1 * x2 - cst(xi, 1)});
  auto witness = find_counterexample(j, sigma);
  REQUIRE(witness.has_value());
  CHECK(*witness != sigma);
  for (const auto& g : j.generators()) CHECK(g.eval(*witness) == Rat(0));

  IdealHandle ell = IdealHandle::make(
      xi, {x1 - cst(xi, 1), x2 - cst(xi, 1), x3 - cst(xi, 1)});
  CHECK(!find_counterexample(ell, sigma).has_value());

  IdealHandle zero = IdealHandle::make(xi, {});
  auto any = find_counterexample(zero, sigma);
  REQUIRE(any.has_value());
  CHECK(*any != sigma);
}

TEST_CASE("scalar rescaling of generators changes neither equality nor verdicts") {
  std::mt19937_64 rng(41);
  IdealChain chain = build_chain(testsys::product_edge());
  std::vector<Rat> sigma = sig({1, 1, 1});
  SubstitutedIdeals ideals = substitute_initial(chain, sigma);

  std::vector<Polynomial> scaled;
  for (const auto& g : ideals.J.generators())
    scaled.push_back(g * oracle::random_rat(rng, 7, 3, true));
  IdealHandle j_scaled = IdealHandle::make(ideals.J.space(), scaled);
  CHECK(ideal_equal(ideals.J, j_scaled));

  Verdict v1 = decide_global(ideals.J, ideals.ell, sigma);
  Verdict v2 = decide_global(j_scaled, ideals.ell, sigma);
  CHECK(v1.status == v2.status);
}

TEST_CASE("all chain generators vanish on the diagonal") {
  std::mt19937_64 rng(42);
  for (auto sys : {testsys::cubic_ring(), testsys::population()}) {
    IdealChain chain = build_chain(sys);
    for (const auto& g : chain.generators()) {
      for (int trial = 0; trial < 5; ++trial) {
        std::vector<Rat> point(6);
        for (int i = 0; i < 3; ++i) point[i] = point[i + 3] = oracle::random_rat(rng);
        CHECK(g.eval(point) == Rat(0));
      }
    }
  }
}

TEST_CASE("theorem-1 generators match direct Lie derivatives up to scalars") {
  HypergraphSystem ring = testsys::cubic_ring();
  const SparseTensor& a3 = ring.dynamics[0];   // symmetric cubic part
  const SparseTensor& c3 = ring.outputs[0][0]; // symmetric cubic output part
  REQUIRE(a3.is_symmetric());
  REQUIRE(c3.is_symmetric());

  VarSpace::Ptr pair = VarSpace::pair_states(3);
  auto gens = theorem1_generators(a3, c3, 2, pair);
  REQUIRE(gens.size() == 3);

  // direct route: y = C3 x^3 along f = A3 x^2 alone
  VarSpace::Ptr x = VarSpace::states(3);
  std::vector<Polynomial> f;
  {
    HypergraphSystem cubic_only = ring;
    cubic_only.dynamics = {a3};
    f = lower_dynamics(cubic_only, x);
  }
  Polynomial v = polynomial_of_tensor(c3, x);
  for (int level = 0; level <= 2; ++level) {
    Polynomial diff = v.embedded(pair, 0) - v.embedded(pair, 3);
    CHECK(is_scalar_multiple(gens[level], diff));
    v = lie_derivative(v, f);
  }
}

TEST_CASE("theorem-1 generators: zero output and base case") {
  VarSpace::Ptr pair = VarSpace::pair_states(2);
  SparseTensor a(2, 2);
  a.set({1, 2}, 1);
  a.set({2, 1}, 1);
  SparseTensor zero_c(2, 2);
  for (const auto& g : theorem1_generators(a, zero_c, 3, pair)) CHECK(g.is_zero());

  SparseTensor c(2, 2);
  c.set({1, 1}, 1);
  auto gens = theorem1_generators(a, c, 0, pair);
  REQUIRE(gens.size() == 1);
  Polynomial xi1 = var(pair, 0), eta1 = var(pair, 2);
  CHECK(gens[0] == xi1 * xi1 - eta1 * eta1);

  SparseTensor asym(2, 2);
  asym.set({1, 2}, 1);
  CHECK_THROWS_AS(theorem1_generators(asym, c, 1, pair), TensorError);
}

TEST_CASE("contraction-path generators reproduce the product-edge ideal") {
  HypergraphSystem sys = testsys::product_edge();
  auto layers = theorem2_generators(sys, 1);
  VarSpace::Ptr pair = VarSpace::pair_states(3);
  Polynomial xi1 = var(pair, 0), xi2 = var(pair, 1), xi3 = var(pair, 2);
  Polynomial eta1 = var(pair, 3), eta2 = var(pair, 4), eta3 = var(pair, 5);
  REQUIRE(layers.size() == 2);
  CHECK(layers[0][0] == xi3 - eta3);          // level 0: the outputs themselves
  CHECK(layers[1][0] == xi1 * xi2 - eta1 * eta2);
}

TEST_CASE("contraction-path level sums equal direct Lie layers exactly") {
  // the central cross-check of the path route, here on the worked systems
  for (auto sys : {testsys::cubic_ring(), testsys::population(),
                   testsys::sum_of_squares_output()}) {
    auto direct = enumerate_lie_generators(sys, 3);
    auto paths = theorem2_generators(sys, 3);
    REQUIRE(direct.size() == paths.size());
    for (size_t r = 0; r < direct.size(); ++r) {
      REQUIRE(direct[r].size() == paths[r].size());
      for (size_t i = 0; i < direct[r].size(); ++i) CHECK(direct[r][i] == paths[r][i]);
    }
  }
}

TEST_CASE("contraction-path route on random systems") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 5; ++trial) {
    HypergraphSystem sys = oracle::random_system(rng, 3, 3, 1);
    auto direct = enumerate_lie_generators(sys, 3);
    auto paths = theorem2_generators(sys, 3);
    for (size_t r = 0; r < direct.size(); ++r)
      for (size_t i = 0; i < direct[r].size(); ++i) CHECK(direct[r][i] == paths[r][i]);
  }
}

TEST_CASE("simulation corroborates witnesses and distinguishability") {
  // the cubic ring flow escapes in finite time from (1,1,1); the witness
  // comparison runs over the common pre-blowup samples
  HypergraphSystem ring = testsys::cubic_ring();
  SimulationResult from_sigma = simulate_outputs(ring, {1, 1, 1}, {}, 1.0, 1e-3);
  SimulationResult from_witness = simulate_outputs(ring, {-1, -1, 1}, {}, 1.0, 1e-3);
  CHECK(std::min(from_sigma.outputs.size(), from_witness.outputs.size()) >= 500);
  CHECK(max_output_gap(from_sigma, from_witness) <= 1e-6);

  HypergraphSystem sos = testsys::sum_of_squares_output();
  SimulationResult at_zero = simulate_outputs(sos, {0, 0, 0}, {}, 1.0, 1e-3);
  for (const auto& sample : at_zero.outputs)
    for (double y : sample) CHECK(y == 0.0);

  HypergraphSystem pop = testsys::population();
  SimulationResult a = simulate_outputs(pop, {1, 1, 1}, {}, 1.0, 1e-3);
  SimulationResult b = simulate_outputs(pop, {1.1, 1, 1}, {}, 1.0, 1e-3);
  CHECK(max_output_gap(a, b) > 1e-3);
}

TEST_CASE("chain ideals absorb one extra level beyond stabilization") {
  for (auto sys : {testsys::population(), testsys::product_edge(),
                   testsys::sum_of_squares_output(), testsys::cubic_ring()}) {
    IdealChain chain = build_chain(sys);
    REQUIRE(chain.stabilization.has_value());
    int n_stable = *chain.stabilization;
    // rebuild two levels past the stabilization point and verify J_N = J_{N+2}
    ChainOptions deep;
    deep.two_step_stabilization = true;
    IdealChain longer = build_chain(sys, deep);
    REQUIRE(longer.levels_computed() >= n_stable + 3);
    CHECK(ideal_equal(longer.level_ideals[n_stable], longer.level_ideals[n_stable + 2]));
  }
}

TEST_CASE("analyze_global end to end") {
  GlobalAnalysis pop = analyze_global(testsys::population(), sig({1, 1, 1}));
  CHECK(pop.verdict.status == ObsStatus::Observable);

  GlobalAnalysis ring = analyze_global(testsys::cubic_ring(), sig({1, 1, 1}));
  CHECK(ring.verdict.status == ObsStatus::Unobservable);

  // capped chain cannot certify a witness
  ChainOptions capped;
  capped.r_cap = 1;
  GlobalAnalysis partial = analyze_global(testsys::cubic_ring(), sig({1, 1, 1}), capped);
  CHECK(!partial.chain.stabilized());
  CHECK(partial.verdict.status == ObsStatus::Inconclusive);
}

#include "hyperobs/global.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "hyperobs/linalg.hpp"

namespace hyperobs {

std::string to_string(ObsStatus status) {
  switch (status) {
    case ObsStatus::Observable: return "Observable";
    case ObsStatus::Unobservable: return "Unobservable";
    case ObsStatus::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

namespace {

VarSpace::Ptr xi_space(int n) {
  std::vector<std::string> names;
  for (int i = 1; i <= n; ++i) names.push_back("xi" + std::to_string(i));
  return VarSpace::make(std::move(names));
}

// xi-copy minus eta-copy of an x-space polynomial
Polynomial pair_difference(const Polynomial& w, const VarSpace::Ptr& pair, int n) {
  return w.embedded(pair, 0) - w.embedded(pair, n);
}

// Drops the eta block of a pair-space polynomial that no longer uses it.
Polynomial project_to_xi(const Polynomial& p, const VarSpace::Ptr& xi, int n) {
  Polynomial out(xi);
  for (const auto& [m, c] : p.terms()) {
    Mono small(static_cast<size_t>(n), 0);
    for (size_t i = 0; i < m.size(); ++i) {
      if (m[i] == 0) continue;
      if (i >= static_cast<size_t>(n))
        throw PolyError("projection: eta variable still present");
      small[i] = m[i];
    }
    out.add_term(small, c);
  }
  return out;
}

std::vector<Polynomial> all_output_members(const HypergraphSystem& sys,
                                           const VarSpace::Ptr& space) {
  OutputFamilies fam = output_families(sys, space);
  std::vector<Polynomial> v;
  for (size_t i = 0; i < fam.p0.size(); ++i) {
    v.push_back(fam.p0[i]);
    for (const auto& pl : fam.p_in[i]) v.push_back(pl);
  }
  return v;
}

}  // namespace

std::vector<Polynomial> IdealChain::generators() const {
  std::vector<Polynomial> gens;
  for (const auto& layer : layers)
    for (const auto& g : layer)
      if (!g.is_zero()) gens.push_back(g);
  return gens;
}

int default_r_cap(const HypergraphSystem& sys) {
  return std::max(sys.n * std::max(sys.num_outputs(), 1), 6);
}

std::vector<std::vector<Polynomial>> enumerate_lie_generators(const HypergraphSystem& sys,
                                                              int r_max,
                                                              size_t word_budget) {
  VarSpace::Ptr x = VarSpace::states(sys.n);
  VarSpace::Ptr pair = VarSpace::pair_states(sys.n);
  std::vector<std::vector<Polynomial>> fields = dynamics_fields(sys, x);
  std::vector<Polynomial> current = all_output_members(sys, x);

  std::vector<std::vector<Polynomial>> layers;
  for (int r = 0; r <= r_max; ++r) {
    if (r > 0) {
      if (current.size() * fields.size() > word_budget)
        throw ResourceExhausted("lie generator enumeration: word budget exceeded at level " +
                                std::to_string(r));
      std::vector<Polynomial> next;
      next.reserve(current.size() * fields.size());
      // L_{tau_1} applied last: children of word w are L_g w for each field g
      for (const auto& g : fields)
        for (const auto& p : current) next.push_back(lie_derivative(p, g));
      current = std::move(next);
    }
    std::vector<Polynomial> layer;
    layer.reserve(current.size());
    for (const auto& p : current) layer.push_back(pair_difference(p, pair, sys.n));
    layers.push_back(std::move(layer));
  }
  return layers;
}

IdealChain build_chain(const HypergraphSystem& sys, const ChainOptions& opts) {
  sys.validate();
  if (sys.num_outputs() == 0)
    throw SystemError("observability chain requires at least one output");

  const int r_cap = opts.r_cap.value_or(default_r_cap(sys));
  VarSpace::Ptr x = VarSpace::states(sys.n);
  VarSpace::Ptr pair = VarSpace::pair_states(sys.n);

  IdealChain chain;
  chain.pair_space = pair;
  chain.n = sys.n;

  std::vector<std::vector<Polynomial>> fields = dynamics_fields(sys, x);
  std::vector<Polynomial> current = all_output_members(sys, x);

  std::vector<Polynomial> cumulative;
  int consecutive_equal = 0;
  try {
    for (int r = 0; r <= r_cap; ++r) {
      if (r > 0) {
        if (current.size() * fields.size() > opts.word_budget)
          throw ResourceExhausted("word budget exceeded at level " + std::to_string(r));
        std::vector<Polynomial> next;
        for (const auto& g : fields)
          for (const auto& p : current) next.push_back(lie_derivative(p, g));
        // duplicates generate nothing new and their children are duplicates
        std::vector<Polynomial> dedup;
        for (auto& p : next) {
          if (p.is_zero()) continue;
          if (std::find(dedup.begin(), dedup.end(), p) == dedup.end())
            dedup.push_back(std::move(p));
        }
        current = std::move(dedup);
      }

      std::vector<Polynomial> layer;
      for (const auto& p : current) {
        Polynomial diff = pair_difference(p, pair, sys.n);
        if (!diff.is_zero()) layer.push_back(std::move(diff));
      }

      bool all_member = true;
      if (r > 0) {
        const IdealHandle& prev = chain.level_ideals.back();
        for (const auto& g : layer)
          if (!ideal_membership(g, prev)) {
            all_member = false;
            break;
          }
      }

      cumulative.insert(cumulative.end(), layer.begin(), layer.end());
      chain.layers.push_back(std::move(layer));
      chain.level_ideals.push_back(
          IdealHandle::make(pair, cumulative, MonomialOrder::grevlex(), opts.groebner));

      if (r > 0 && all_member) {
        ++consecutive_equal;
        const int needed = opts.two_step_stabilization ? 2 : 1;
        if (consecutive_equal >= needed) {
          chain.stabilization = r - consecutive_equal;
          break;
        }
      } else if (r > 0) {
        consecutive_equal = 0;
      }
    }
  } catch (const ResourceExhausted& e) {
    chain.aborted = true;
    chain.note = e.what();
  }
  if (!chain.stabilization && !chain.aborted)
    chain.note = "chain did not stabilize within r_cap = " + std::to_string(r_cap);
  return chain;
}

SubstitutedIdeals substitute_initial(const IdealChain& chain, const std::vector<Rat>& sigma) {
  if (static_cast<int>(sigma.size()) != chain.n)
    throw SystemError("sigma length does not match state dimension");
  VarSpace::Ptr xi = xi_space(chain.n);

  std::map<size_t, Rat> eta_assignment;
  for (int i = 0; i < chain.n; ++i)
    eta_assignment[static_cast<size_t>(chain.n + i)] = sigma[i];

  std::vector<Polynomial> substituted;
  for (const auto& g : chain.generators()) {
    Polynomial s = g.substitute(eta_assignment);
    if (!s.is_zero()) substituted.push_back(project_to_xi(s, xi, chain.n));
  }

  std::vector<Polynomial> ell_gens;
  for (int i = 0; i < chain.n; ++i)
    ell_gens.push_back(Polynomial::variable(xi, i) -
                       Polynomial::constant(xi, sigma[i]));

  GroebnerBudget budget =
      chain.level_ideals.empty() ? GroebnerBudget{} : chain.level_ideals.back().budget();
  SubstitutedIdeals out{
      IdealHandle::make(xi, std::move(substituted), MonomialOrder::grevlex(), budget),
      IdealHandle::make(xi, std::move(ell_gens), MonomialOrder::grevlex(), budget)};
  return out;
}

namespace {

// Positive combination of squared monomials: every coefficient shares one
// sign and every exponent is even. Returns the half-exponent monomials.
std::optional<std::vector<Polynomial>> split_even_squares(const Polynomial& g) {
  if (g.is_zero() || g.is_constant()) return std::nullopt;
  int sign = 0;
  for (const auto& [m, c] : g.terms()) {
    int s = c < 0 ? -1 : 1;
    if (sign == 0) sign = s;
    if (s != sign) return std::nullopt;
    for (uint32_t e : m)
      if (e % 2 != 0) return std::nullopt;
  }
  std::vector<Polynomial> parts;
  for (const auto& [m, c] : g.terms()) {
    Mono half = m;
    for (auto& e : half) e /= 2;
    if (total_degree(half) == 0) continue;  // constant term: the form c + sos
    parts.push_back(Polynomial::monomial(g.space(), half, Rat(1)));
  }
  // a positive constant plus squares never vanishes over R
  bool has_constant = false;
  for (const auto& [m, c] : g.terms())
    if (total_degree(m) == 0) has_constant = true;
  if (has_constant) return std::nullopt;
  if (parts.empty()) return std::nullopt;
  return parts;
}

// Exact LDL^T of a (possibly affine) quadratic over the homogenizing
// coordinate list (vars..., 1). Succeeds only when the form is a positive
// combination of squares of affine forms.
std::optional<std::vector<Polynomial>> split_quadratic_squares(const Polynomial& g) {
  if (g.is_zero() || g.degree() != 2) return std::nullopt;
  const size_t n = g.space()->size();
  const size_t dim = n + 1;  // last coordinate is the constant 1
  QMatrix q(dim, dim);
  for (const auto& [m, c] : g.terms()) {
    std::vector<size_t> vars;
    for (size_t i = 0; i < n; ++i)
      for (uint32_t e = 0; e < m[i]; ++e) vars.push_back(i);
    if (vars.size() == 2) {
      if (vars[0] == vars[1]) {
        q.at(vars[0], vars[0]) += c;
      } else {
        q.at(vars[0], vars[1]) += c / 2;
        q.at(vars[1], vars[0]) += c / 2;
      }
    } else if (vars.size() == 1) {
      q.at(vars[0], n) += c / 2;
      q.at(n, vars[0]) += c / 2;
    } else {
      q.at(n, n) += c;
    }
  }

  // LDL^T restricted to diagonal pivots; fail on any negative pivot or on a
  // nonzero row with vanishing diagonal (indefinite form)
  std::vector<Polynomial> parts;
  std::vector<bool> done(dim, false);
  for (size_t step = 0; step < dim; ++step) {
    size_t pivot = dim;
    for (size_t i = 0; i < dim; ++i)
      if (!done[i] && q.at(i, i) != 0) {
        pivot = i;
        break;
      }
    if (pivot == dim) break;
    const Rat d = q.at(pivot, pivot);
    if (d < 0) return std::nullopt;
    // form: sum_j (q[pivot][j]/d) coord_j
    Polynomial form(g.space());
    for (size_t j = 0; j < dim; ++j) {
      Rat coeff = q.at(pivot, j) / d;
      if (coeff == 0) continue;
      if (j == n)
        form += Polynomial::constant(g.space(), coeff);
      else
        form += Polynomial::variable(g.space(), j) * coeff;
    }
    parts.push_back(form);
    // symmetric elimination step: q[i][j] -= q[i][p] q[p][j] / d
    std::vector<Rat> factors(dim, Rat(0));
    for (size_t i = 0; i < dim; ++i)
      if (!done[i] && i != pivot) factors[i] = q.at(i, pivot) / d;
    for (size_t i = 0; i < dim; ++i) {
      if (done[i] || i == pivot || factors[i] == 0) continue;
      for (size_t j = 0; j < dim; ++j) q.at(i, j) -= factors[i] * q.at(pivot, j);
    }
    done[pivot] = true;
  }
  for (size_t i = 0; i < dim; ++i)
    for (size_t j = 0; j < dim; ++j)
      if (!done[i] && !done[j] && q.at(i, j) != 0) return std::nullopt;

  // drop forms that are pure nonzero constants only if others remain; a
  // nonzero constant square means the generator has no real zero at all, so
  // keeping it (it generates the unit ideal) stays sound
  std::vector<Polynomial> cleaned;
  for (auto& p : parts)
    if (!p.is_zero()) cleaned.push_back(std::move(p));
  if (cleaned.empty()) return std::nullopt;
  return cleaned;
}

}  // namespace

IdealHandle sos_real_augment(const IdealHandle& ideal) {
  std::vector<Polynomial> pool = ideal.generators();
  for (const auto& b : ideal.basis())
    if (std::find(pool.begin(), pool.end(), b) == pool.end()) pool.push_back(b);

  bool any_added = false;
  bool changed = true;
  int rounds = 0;
  while (changed && rounds++ < 16) {
    changed = false;
    std::vector<Polynomial> found;
    for (const auto& g : pool) {
      auto parts = split_even_squares(g);
      if (!parts) parts = split_quadratic_squares(g);
      if (!parts) parts = split_quadratic_squares(-g);
      if (!parts) continue;
      for (auto& p : *parts)
        if (std::find(pool.begin(), pool.end(), p) == pool.end() &&
            std::find(found.begin(), found.end(), p) == found.end())
          found.push_back(std::move(p));
    }
    if (!found.empty()) {
      changed = true;
      any_added = true;
      pool.insert(pool.end(), found.begin(), found.end());
    }
  }
  if (!any_added) return ideal;
  return IdealHandle::make(ideal.space(), std::move(pool), ideal.order(), ideal.budget());
}

namespace {

bool vanishes_on_all(const std::vector<Polynomial>& gens, const std::vector<Rat>& point) {
  for (const auto& g : gens)
    if (g.eval(point) != 0) return false;
  return true;
}

// ranked simple rational values for grid search: integers first, then halves,
// thirds, quarters, all within [-2, 2]
const std::vector<Rat>& grid_values() {
  static const std::vector<Rat> values = [] {
    std::vector<Rat> v;
    std::set<Rat> seen;
    auto push = [&](long num, long den) {
      Rat r(num, den);
      r.canonicalize();
      if (seen.insert(r).second) v.push_back(r);
    };
    for (long num : {0L, 1L, -1L, 2L, -2L}) push(num, 1);
    for (long den : {2L, 3L, 4L}) {
      for (long num = 1; num <= 2 * den; ++num) {
        push(num, den);
        push(-num, den);
      }
    }
    return v;
  }();
  return values;
}

}  // namespace

std::optional<std::vector<Rat>> find_counterexample(const IdealHandle& J,
                                                    const std::vector<Rat>& sigma,
                                                    const SearchOptions& opts) {
  const size_t n = sigma.size();
  const std::vector<Polynomial>& gens = J.generators();
  size_t tried = 0;

  auto consider = [&](const std::vector<Rat>& point) -> bool {
    if (tried >= opts.max_candidates) return false;
    ++tried;
    if (point == sigma) return false;
    return vanishes_on_all(gens, point);
  };

  // linear generators pin an affine subspace; its kernel directions are the
  // sharpest candidates and make linear systems exactly decidable
  {
    std::vector<const Polynomial*> linear;
    for (const auto& g : gens)
      if (g.degree() <= 1 && !g.is_zero()) linear.push_back(&g);
    if (linear.size() < gens.size() || linear.empty()) {
      // fall through to heuristics below; directions still useful when some
      // generators are linear
    }
    if (!linear.empty()) {
      QMatrix m(linear.size(), n);
      for (size_t r = 0; r < linear.size(); ++r)
        for (size_t c = 0; c < n; ++c) {
          Mono unit(n, 0);
          unit[c] = 1;
          m.at(r, c) = linear[r]->coefficient(unit);
        }
      for (const auto& dir : nullspace(std::move(m))) {
        for (const Rat& scale : {Rat(1), Rat(-1), Rat(2), Rat(1, 2)}) {
          std::vector<Rat> point = sigma;
          for (size_t i = 0; i < n; ++i) point[i] += scale * dir[i];
          if (consider(point)) return point;
        }
      }
    } else if (gens.empty()) {
      std::vector<Rat> point = sigma;
      point[0] += 1;
      if (consider(point)) return point;
    }
  }

  // coordinate perturbations of sigma
  for (const Rat& delta : {Rat(1), Rat(-1), Rat(1, 2), Rat(-1, 2), Rat(2), Rat(-2)}) {
    for (size_t i = 0; i < n; ++i) {
      std::vector<Rat> point = sigma;
      point[i] += delta;
      if (consider(point)) return point;
    }
  }

  // one-parameter scalings: single coordinates, compensating pairs, global
  const std::vector<Rat> scales{Rat(2), Rat(1, 2), Rat(-1), Rat(3), Rat(1, 3), Rat(-2),
                                Rat(-1, 2)};
  for (const Rat& t : scales) {
    for (size_t i = 0; i < n; ++i) {
      std::vector<Rat> point = sigma;
      point[i] *= t;
      if (consider(point)) return point;
      for (size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        std::vector<Rat> pair_point = point;
        pair_point[j] = sigma[j] / t;
        if (consider(pair_point)) return pair_point;
      }
    }
    std::vector<Rat> global = sigma;
    for (auto& v : global) v *= t;
    if (consider(global)) return global;
  }

  // two-term generators: fix one support variable on a grid value, solve the
  // other when it appears linearly
  for (const auto& g : gens) {
    if (g.term_count() != 2) continue;
    std::set<size_t> support;
    for (const auto& [m, c] : g.terms())
      for (size_t i = 0; i < n; ++i)
        if (m[i] > 0) support.insert(i);
    if (support.empty() || support.size() > 2) continue;
    for (size_t fixed : support) {
      for (const Rat& t : grid_values()) {
        Polynomial restricted = g.substitute({{fixed, t}});
        // alpha * x_b + beta pattern
        std::optional<size_t> free_var;
        for (size_t i : support)
          if (i != fixed) free_var = i;
        if (!free_var) {
          if (!restricted.is_zero()) continue;
          std::vector<Rat> point = sigma;
          point[fixed] = t;
          if (consider(point)) return point;
          continue;
        }
        Mono unit(n, 0);
        unit[*free_var] = 1;
        Rat alpha = restricted.coefficient(unit);
        Rat beta = restricted.coefficient(Mono(n, 0));
        if (alpha == 0) continue;
        Polynomial check = restricted - Polynomial::variable(g.space(), *free_var) * alpha -
                           Polynomial::constant(g.space(), beta);
        if (!check.is_zero()) continue;
        std::vector<Rat> point = sigma;
        point[fixed] = t;
        point[*free_var] = -beta / alpha;
        if (consider(point)) return point;
      }
    }
  }

  // grid over {-2..2}^n with denominators <= 4; exhaustive for small n,
  // seeded sampling beyond
  const auto& values = grid_values();
  if (n <= 3) {
    std::vector<size_t> digits(n, 0);
    for (;;) {
      std::vector<Rat> point(n);
      for (size_t i = 0; i < n; ++i) point[i] = values[digits[i]];
      if (consider(point)) return point;
      if (tried >= opts.max_candidates) break;
      size_t pos = 0;
      while (pos < n && ++digits[pos] == values.size()) digits[pos++] = 0;
      if (pos == n) break;
    }
  } else {
    std::mt19937_64 rng(opts.seed);
    std::uniform_int_distribution<size_t> pick(0, values.size() - 1);
    for (size_t it = 0; it < opts.max_candidates && tried < opts.max_candidates; ++it) {
      std::vector<Rat> point(n);
      for (size_t i = 0; i < n; ++i) point[i] = values[pick(rng)];
      if (consider(point)) return point;
    }
  }

  return std::nullopt;
}

Verdict decide_global(const IdealHandle& J, const IdealHandle& ell,
                      const std::vector<Rat>& sigma, const SearchOptions& opts) {
  Verdict verdict;
  std::string notes;
  bool aborted = false;

  try {
    if (ideal_equal(J, ell)) {
      verdict.status = ObsStatus::Observable;
      verdict.criterion = "ideal equality J = ell";
      return verdict;
    }
    IdealHandle augmented = sos_real_augment(J);
    if (quotient_is_unit_ideal(augmented, ell)) {
      verdict.status = ObsStatus::Observable;
      verdict.criterion = "ell contained in radical of J (SOS-augmented)";
      return verdict;
    }
  } catch (const ResourceExhausted& e) {
    aborted = true;
    notes = std::string("algebraic tests aborted: ") + e.what();
  }

  if (auto witness = find_counterexample(J, sigma, opts)) {
    verdict.status = ObsStatus::Unobservable;
    verdict.criterion = "counterexample: distinct state zeroes all generators of J";
    verdict.witness = witness;
    verdict.notes = notes;
    return verdict;
  }

  verdict.status = ObsStatus::Inconclusive;
  verdict.criterion = aborted ? "resource budget exhausted" : "no criterion fired";
  verdict.notes = notes.empty() ? "no witness found within search budget" : notes;
  return verdict;
}

GlobalAnalysis analyze_global(const HypergraphSystem& sys, const std::vector<Rat>& sigma,
                              const ChainOptions& chain_opts, const SearchOptions& search_opts) {
  GlobalAnalysis out;
  out.chain = build_chain(sys, chain_opts);
  try {
    out.ideals = substitute_initial(out.chain, sigma);
  } catch (const ResourceExhausted& e) {
    out.verdict.status = ObsStatus::Inconclusive;
    out.verdict.criterion = "resource budget exhausted";
    out.verdict.notes = e.what();
    return out;
  }

  if (out.chain.stabilized()) {
    out.verdict = decide_global(out.ideals->J, out.ideals->ell, sigma, search_opts);
  } else {
    // a partial ideal still certifies observability (more generators only
    // shrink the variety) but cannot certify a witness, so skip the search
    SearchOptions no_search = search_opts;
    no_search.max_candidates = 0;
    Verdict partial = decide_global(out.ideals->J, out.ideals->ell, sigma, no_search);
    if (partial.status == ObsStatus::Observable) {
      out.verdict = partial;
    } else {
      out.verdict.status = ObsStatus::Inconclusive;
      out.verdict.criterion = "chain incomplete";
      out.verdict.notes = out.chain.note;
    }
  }
  if (!out.chain.stabilized() && !out.chain.note.empty()) {
    if (!out.verdict.notes.empty()) out.verdict.notes += "; ";
    out.verdict.notes += out.chain.note;
  }
  return out;
}

std::vector<Polynomial> theorem1_generators(const SparseTensor& a, const SparseTensor& c,
                                            int levels, VarSpace::Ptr pair_space) {
  if (!a.is_symmetric() || !c.is_symmetric())
    throw TensorError("theorem1 generators require symmetric tensors");
  if (a.dim() != c.dim()) throw TensorError("dimension mismatch");
  const int n = a.dim();
  std::vector<Polynomial> gens;
  SparseTensor e = c;
  for (int level = 0; level <= levels; ++level) {
    Polynomial xi_part = polynomial_of_tensor(e, pair_space, 0);
    Polynomial eta_part = polynomial_of_tensor(e, pair_space, static_cast<size_t>(n));
    gens.push_back(xi_part - eta_part);
    if (level < levels) e = circ_contract(symmetrize(e), a);
  }
  return gens;
}

std::vector<std::vector<Polynomial>> theorem2_generators(const HypergraphSystem& sys,
                                                         int r_max, size_t path_budget) {
  if (sys.has_inputs() || sys.has_direct())
    throw SystemError("contraction-path generators require a no-input system");
  VarSpace::Ptr pair = VarSpace::pair_states(sys.n);
  size_t contractions = 0;

  std::vector<std::vector<Polynomial>> layers(r_max + 1);
  for (int r = 0; r <= r_max; ++r) layers[r].reserve(sys.outputs.size());

  for (const auto& output_tensors : sys.outputs) {
    // degree buckets: order -> accumulated coefficient tensor
    std::map<int, SparseTensor> buckets;
    for (const auto& t : output_tensors) {
      auto it = buckets.find(t.order());
      if (it == buckets.end())
        buckets.emplace(t.order(), t);
      else
        it->second = it->second + t;
    }
    for (int r = 0; r <= r_max; ++r) {
      if (r > 0) {
        std::map<int, SparseTensor> next;
        for (const auto& [d, tensor] : buckets) {
          for (int s = 1; s <= d; ++s) {
            for (const auto& a : sys.dynamics) {
              if (++contractions > path_budget)
                throw ResourceExhausted("contraction path budget exceeded");
              SparseTensor contracted = slot_contract(tensor, a, s);
              auto it = next.find(contracted.order());
              if (it == next.end())
                next.emplace(contracted.order(), std::move(contracted));
              else
                it->second = it->second + contracted;
            }
          }
        }
        buckets = std::move(next);
      }
      Polynomial gen(pair);
      for (const auto& [d, tensor] : buckets) {
        gen += polynomial_of_tensor(tensor, pair, 0);
        gen -= polynomial_of_tensor(tensor, pair, static_cast<size_t>(sys.n));
      }
      layers[r].push_back(std::move(gen));
    }
  }
  return layers;
}

SimulationResult simulate_outputs(const HypergraphSystem& sys, const std::vector<double>& x0,
                                  const std::vector<double>& u_const, double horizon,
                                  double step) {
  if (static_cast<int>(x0.size()) != sys.n)
    throw SystemError("initial state length does not match dimension");

  // compile the lowered polynomials once into double term lists
  VarSpace::Ptr x_space = VarSpace::states(sys.n);
  std::optional<std::vector<Rat>> u_rat;
  if (!u_const.empty()) {
    std::vector<Rat> ur;
    for (double u : u_const) {
      // doubles arriving here are plain test constants
      ur.push_back(Rat(u));
    }
    u_rat = ur;
  } else if (sys.num_inputs() > 0) {
    u_rat = std::vector<Rat>(sys.num_inputs(), Rat(0));
  }

  struct CompiledPoly {
    std::vector<std::pair<Mono, double>> terms;
    double eval(const std::vector<double>& p) const {
      double acc = 0;
      for (const auto& [m, c] : terms) {
        double t = c;
        for (size_t i = 0; i < m.size(); ++i)
          for (uint32_t e = 0; e < m[i]; ++e) t *= p[i];
        acc += t;
      }
      return acc;
    }
  };
  auto compile = [](const Polynomial& p) {
    CompiledPoly out;
    for (const auto& [m, c] : p.terms()) out.terms.emplace_back(m, c.get_d());
    return out;
  };

  std::vector<CompiledPoly> f;
  for (const auto& p : lower_dynamics(sys, x_space, u_rat)) f.push_back(compile(p));
  std::vector<CompiledPoly> h;
  for (const auto& p : lower_outputs(sys, x_space, u_rat)) h.push_back(compile(p));

  auto deriv = [&](const std::vector<double>& state) {
    std::vector<double> d(state.size());
    for (size_t i = 0; i < f.size(); ++i) d[i] = f[i].eval(state);
    return d;
  };

  SimulationResult result;
  std::vector<double> state = x0;
  const int steps = static_cast<int>(horizon / step);
  for (int s = 0; s <= steps; ++s) {
    double t = s * step;
    for (double v : state) {
      if (!std::isfinite(v)) {
        result.blowup_time = t;
        return result;
      }
    }
    result.times.push_back(t);
    std::vector<double> y;
    for (const auto& hi : h) y.push_back(hi.eval(state));
    result.outputs.push_back(std::move(y));

    // classic RK4
    std::vector<double> k1 = deriv(state);
    std::vector<double> tmp(state.size());
    for (size_t i = 0; i < state.size(); ++i) tmp[i] = state[i] + 0.5 * step * k1[i];
    std::vector<double> k2 = deriv(tmp);
    for (size_t i = 0; i < state.size(); ++i) tmp[i] = state[i] + 0.5 * step * k2[i];
    std::vector<double> k3 = deriv(tmp);
    for (size_t i = 0; i < state.size(); ++i) tmp[i] = state[i] + step * k3[i];
    std::vector<double> k4 = deriv(tmp);
    for (size_t i = 0; i < state.size(); ++i)
      state[i] += step / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  }
  return result;
}

double max_output_gap(const SimulationResult& a, const SimulationResult& b) {
  double gap = 0;
  const size_t samples = std::min(a.outputs.size(), b.outputs.size());
  for (size_t s = 0; s < samples; ++s) {
    const size_t q = std::min(a.outputs[s].size(), b.outputs[s].size());
    for (size_t i = 0; i < q; ++i)
      gap = std::max(gap, std::abs(a.outputs[s][i] - b.outputs[s][i]));
  }
  return gap;
}

}  // namespace hyperobs

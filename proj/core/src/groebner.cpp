#include "hyperobs/groebner.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace hyperobs {

namespace {

bool divides(const Mono& a, const Mono& b) {
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

Mono mono_lcm(const Mono& a, const Mono& b) {
  Mono out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = std::max(a[i], b[i]);
  return out;
}

Mono mono_quotient(const Mono& a, const Mono& b) {
  Mono out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

Mono mono_product(const Mono& a, const Mono& b) {
  Mono out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

// Divides out the rational content and flips the sign so the leading
// coefficient under `order` is positive; keeps coefficient growth in check
// between reduction steps.
Polynomial content_normalized(const Polynomial& p, const MonomialOrder& order) {
  if (p.is_zero()) return p;
  mpz_class num_gcd = 0;
  mpz_class den_lcm = 1;
  for (const auto& [m, c] : p.terms()) {
    mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), c.get_num().get_mpz_t());
    mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), c.get_den().get_mpz_t());
  }
  Rat content(num_gcd, den_lcm);
  content.canonicalize();
  auto lt = leading_term(p, order);
  if (lt->second < 0) content = -content;
  Polynomial out(p.space());
  for (const auto& [m, c] : p.terms()) {
    Rat scaled = c / content;
    scaled.canonicalize();
    out.add_term(m, scaled);
  }
  return out;
}

Polynomial make_monic(const Polynomial& p, const MonomialOrder& order) {
  auto lt = leading_term(p, order);
  if (!lt) return p;
  return p * Rat(1 / lt->second);
}

struct PendingPair {
  Mono lcm;
  size_t i = 0;
  size_t j = 0;
  uint64_t ticket = 0;  // FIFO tie-break
};

}  // namespace

std::optional<std::pair<Mono, Rat>> leading_term(const Polynomial& p,
                                                 const MonomialOrder& order) {
  if (p.is_zero()) return std::nullopt;
  const Mono* best = nullptr;
  for (const auto& [m, c] : p.terms()) {
    if (!best || order.less(*best, m)) best = &m;
  }
  return std::make_pair(*best, p.coefficient(*best));
}

namespace {

// One division pass; every division step charges the budget when one is
// given, so runaway coefficient growth trips ResourceExhausted instead of
// stalling.
Polynomial reduce_impl(const Polynomial& f, const std::vector<Polynomial>& gens,
                       const MonomialOrder& order, size_t* steps_left) {
  std::vector<std::pair<Mono, Rat>> lts;
  std::vector<const Polynomial*> divisors;
  for (const auto& g : gens) {
    if (auto lt = leading_term(g, order)) {
      lts.push_back(*lt);
      divisors.push_back(&g);
    }
  }

  Polynomial remainder(f.space());
  Polynomial work = f;
  while (!work.is_zero()) {
    auto lt = *leading_term(work, order);
    bool divided = false;
    for (size_t d = 0; d < divisors.size(); ++d) {
      if (!divides(lts[d].first, lt.first)) continue;
      if (steps_left) {
        // charge by actual work: terms touched, weighted by coefficient size,
        // so runaway intermediate growth aborts in bounded wall time
        size_t bits = mpz_sizeinbase(lt.second.get_num().get_mpz_t(), 2) +
                      mpz_sizeinbase(lt.second.get_den().get_mpz_t(), 2);
        size_t cost = divisors[d]->term_count() * std::max<size_t>(1, bits / 128);
        if (*steps_left < cost)
          throw ResourceExhausted("groebner: division work budget exceeded");
        *steps_left -= cost;
      }
      Mono q = mono_quotient(lt.first, lts[d].first);
      Rat coeff = lt.second / lts[d].second;
      // work -= (coeff * q) * divisor
      for (const auto& [m, c] : divisors[d]->terms())
        work.add_term(mono_product(q, m), -coeff * c);
      divided = true;
      break;
    }
    if (!divided) {
      remainder.add_term(lt.first, lt.second);
      Polynomial tail(work.space());
      for (const auto& [m, c] : work.terms())
        if (m != lt.first) tail.add_term(m, c);
      work = std::move(tail);
    }
  }
  return remainder;
}

}  // namespace

Polynomial reduce(const Polynomial& f, const std::vector<Polynomial>& gens,
                  const MonomialOrder& order) {
  return reduce_impl(f, gens, order, nullptr);
}

namespace {

Polynomial s_polynomial(const Polynomial& f, const Polynomial& g,
                        const MonomialOrder& order) {
  auto lf = *leading_term(f, order);
  auto lg = *leading_term(g, order);
  Mono l = mono_lcm(lf.first, lg.first);
  Mono qf = mono_quotient(l, lf.first);
  Mono qg = mono_quotient(l, lg.first);
  Polynomial out(f.space());
  for (const auto& [m, c] : f.terms()) out.add_term(mono_product(qf, m), c / lf.second);
  for (const auto& [m, c] : g.terms()) out.add_term(mono_product(qg, m), -c / lg.second);
  return out;
}

// Interreduce and sort a generating set that is already a Groebner basis.
std::vector<Polynomial> reduced_form(std::vector<Polynomial> basis,
                                     const MonomialOrder& order, size_t* steps_left) {
  // drop elements whose leading term is divisible by another's
  std::vector<bool> keep(basis.size(), true);
  for (size_t i = 0; i < basis.size(); ++i) {
    auto li = leading_term(basis[i], order);
    if (!li) {
      keep[i] = false;
      continue;
    }
    for (size_t j = 0; j < basis.size(); ++j) {
      if (i == j || !keep[j]) continue;
      auto lj = leading_term(basis[j], order);
      if (!lj) continue;
      if (divides(lj->first, li->first) && (lj->first != li->first || j < i)) {
        keep[i] = false;
        break;
      }
    }
  }
  std::vector<Polynomial> kept;
  for (size_t i = 0; i < basis.size(); ++i)
    if (keep[i]) kept.push_back(basis[i]);

  // reduce each element against the others until stable
  for (size_t i = 0; i < kept.size(); ++i) {
    std::vector<Polynomial> others;
    for (size_t j = 0; j < kept.size(); ++j)
      if (j != i) others.push_back(kept[j]);
    kept[i] = reduce_impl(kept[i], others, order, steps_left);
  }
  std::vector<Polynomial> out;
  for (auto& p : kept)
    if (!p.is_zero()) out.push_back(make_monic(p, order));
  std::sort(out.begin(), out.end(), [&](const Polynomial& a, const Polynomial& b) {
    return order.less(leading_term(b, order)->first, leading_term(a, order)->first);
  });
  return out;
}

}  // namespace

std::vector<Polynomial> buchberger(const std::vector<Polynomial>& gens,
                                   const MonomialOrder& order,
                                   const GroebnerBudget& budget) {
  std::vector<Polynomial> basis;
  for (const auto& g : gens) {
    if (g.is_zero()) continue;
    basis.push_back(content_normalized(g, order));
  }
  if (basis.empty()) return {};

  // pair queue: normal strategy picks the smallest lcm under the order,
  // insertion ticket breaks ties first-in-first-out
  uint64_t ticket = 0;
  auto cmp = [&order](const PendingPair& a, const PendingPair& b) {
    if (a.lcm != b.lcm) return order.less(a.lcm, b.lcm);
    return a.ticket < b.ticket;
  };
  std::multiset<PendingPair, decltype(cmp)> queue(cmp);
  std::set<std::pair<size_t, size_t>> handled;

  auto push_pairs_for = [&](size_t j) {
    auto lj = *leading_term(basis[j], order);
    for (size_t i = 0; i < j; ++i) {
      auto li = *leading_term(basis[i], order);
      queue.insert(PendingPair{mono_lcm(li.first, lj.first), i, j, ticket++});
    }
  };
  for (size_t j = 0; j < basis.size(); ++j) push_pairs_for(j);

  size_t steps_left = budget.max_reductions;
  while (!queue.empty()) {
    PendingPair pair = *queue.begin();
    queue.erase(queue.begin());
    handled.insert({pair.i, pair.j});

    auto li = *leading_term(basis[pair.i], order);
    auto lj = *leading_term(basis[pair.j], order);

    // first criterion: coprime leading monomials
    if (mono_product(li.first, lj.first) == pair.lcm) continue;

    // second criterion: some basis[k] with lt dividing the lcm, both
    // companion pairs already handled
    bool pruned = false;
    for (size_t k = 0; k < basis.size() && !pruned; ++k) {
      if (k == pair.i || k == pair.j) continue;
      auto lk = *leading_term(basis[k], order);
      if (!divides(lk.first, pair.lcm)) continue;
      auto key_ik = std::minmax(pair.i, k);
      auto key_jk = std::minmax(pair.j, k);
      if (handled.count({key_ik.first, key_ik.second}) &&
          handled.count({key_jk.first, key_jk.second}))
        pruned = true;
    }
    if (pruned) continue;

    Polynomial s = s_polynomial(basis[pair.i], basis[pair.j], order);
    Polynomial r = reduce_impl(s, basis, order, &steps_left);
    if (r.is_zero()) continue;

    basis.push_back(content_normalized(r, order));
    if (basis.size() > budget.max_basis_size)
      throw ResourceExhausted("buchberger: basis size budget exceeded");
    push_pairs_for(basis.size() - 1);
  }

  return reduced_form(std::move(basis), order, &steps_left);
}

IdealHandle IdealHandle::make(VarSpace::Ptr space, std::vector<Polynomial> generators,
                              MonomialOrder order, GroebnerBudget budget) {
  IdealHandle handle;
  handle.space_ = std::move(space);
  for (const auto& g : generators)
    if (!same_space(g.space(), handle.space_))
      throw PolyError("ideal generator over a foreign variable space");
  handle.generators_ = std::move(generators);
  handle.order_ = order;
  handle.budget_ = budget;
  handle.basis_ = buchberger(handle.generators_, order, budget);
  return handle;
}

bool IdealHandle::is_unit_ideal() const {
  return basis_.size() == 1 && basis_.front().is_constant() && !basis_.front().is_zero();
}

bool ideal_membership(const Polynomial& f, const IdealHandle& ideal) {
  return reduce(f, ideal.basis(), ideal.order()).is_zero();
}

bool ideal_equal(const IdealHandle& a, const IdealHandle& b) {
  for (const auto& g : a.generators())
    if (!ideal_membership(g, b)) return false;
  for (const auto& g : b.generators())
    if (!ideal_membership(g, a)) return false;
  return true;
}

bool radical_membership(const Polynomial& f, const IdealHandle& ideal) {
  if (ideal_membership(f, ideal)) return true;  // cheap path, also handles f = 0
  VarSpace::Ptr ext = ideal.space()->extended({"t"});
  const size_t t_index = ext->size() - 1;
  std::vector<Polynomial> gens;
  gens.reserve(ideal.generators().size() + 1);
  for (const auto& g : ideal.generators()) gens.push_back(g.embedded(ext, 0));
  Polynomial one = Polynomial::constant(ext, 1);
  Polynomial tf = Polynomial::variable(ext, t_index) * f.embedded(ext, 0);
  gens.push_back(one - tf);
  auto basis = buchberger(gens, ideal.order(), ideal.budget());
  return basis.size() == 1 && basis.front().is_constant() && !basis.front().is_zero();
}

bool quotient_is_unit_ideal(const IdealHandle& ideal, const IdealHandle& ell) {
  for (const auto& g : ell.generators())
    if (!radical_membership(g, ideal)) return false;
  return true;
}

}  // namespace hyperobs

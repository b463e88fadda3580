#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "hyperobs/poly.hpp"

namespace hyperobs {

// Thrown when a basis computation exceeds its budget. Callers in the
// observability pipeline translate this into an Inconclusive verdict rather
// than letting Buchberger run unbounded.
class ResourceExhausted : public std::runtime_error {
 public:
  explicit ResourceExhausted(const std::string& what) : std::runtime_error(what) {}
};

struct GroebnerBudget {
  // division work units: each division step costs the divisor's term count
  // scaled by the leading coefficient's bit size
  size_t max_reductions = 50'000;
  size_t max_basis_size = 2'000;
};

// Leading term under `order`; nullopt for the zero polynomial.
std::optional<std::pair<Mono, Rat>> leading_term(const Polynomial& p,
                                                 const MonomialOrder& order);

// Multivariate division: the remainder has no term divisible by any leading
// term of gens, and f - remainder lies in <gens>.
Polynomial reduce(const Polynomial& f, const std::vector<Polynomial>& gens,
                  const MonomialOrder& order);

// Buchberger with normal pair selection (minimal lcm, FIFO tie-break) and the
// first/second pair-pruning criteria. Returns the reduced basis: monic, fully
// interreduced, sorted descending by leading monomial. <0> gives {} and any
// input containing a nonzero constant gives {1}.
std::vector<Polynomial> buchberger(const std::vector<Polynomial>& gens,
                                   const MonomialOrder& order,
                                   const GroebnerBudget& budget = {});

// Immutable ideal with its cached reduced Groebner basis.
class IdealHandle {
 public:
  static IdealHandle make(VarSpace::Ptr space, std::vector<Polynomial> generators,
                          MonomialOrder order = MonomialOrder::grevlex(),
                          GroebnerBudget budget = {});

  const VarSpace::Ptr& space() const { return space_; }
  const std::vector<Polynomial>& generators() const { return generators_; }
  const std::vector<Polynomial>& basis() const { return basis_; }
  const MonomialOrder& order() const { return order_; }
  const GroebnerBudget& budget() const { return budget_; }

  bool is_zero_ideal() const { return basis_.empty(); }
  bool is_unit_ideal() const;

 private:
  IdealHandle() : order_(MonomialOrder::grevlex()) {}
  VarSpace::Ptr space_;
  std::vector<Polynomial> generators_;
  std::vector<Polynomial> basis_;
  MonomialOrder order_;
  GroebnerBudget budget_;
};

// true iff f reduces to zero against the cached basis.
bool ideal_membership(const Polynomial& f, const IdealHandle& ideal);

// Mutual generator membership in both directions.
bool ideal_equal(const IdealHandle& a, const IdealHandle& b);

// Rabinowitsch trick: f lies in the radical of I iff 1 belongs to
// I + <1 - t f> over the space extended with the auxiliary variable t.
bool radical_membership(const Polynomial& f, const IdealHandle& ideal);

// For ell = <xi_i - sigma_i>: sqrt(I) : ell is the unit ideal iff every
// generator of ell is a radical member of I (ell is contained in sqrt(I)).
bool quotient_is_unit_ideal(const IdealHandle& ideal, const IdealHandle& ell);

}  // namespace hyperobs

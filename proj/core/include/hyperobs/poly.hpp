#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hyperobs/order.hpp"
#include "hyperobs/rational.hpp"
#include "hyperobs/tensor.hpp"

namespace hyperobs {

class PolyError : public std::runtime_error {
 public:
  explicit PolyError(const std::string& what) : std::runtime_error(what) {}
};

// Named, ordered variable list. Spaces are value-compared by their name
// vectors; polynomials over different spaces never mix. The standard spaces
// are built by the factories below so variable positions stay deterministic
// across runs: states x1..xn; the doubled space xi1..xin, eta1..etan used by
// indistinguishability ideals; "t" appended for radical-membership tests.
class VarSpace {
 public:
  using Ptr = std::shared_ptr<const VarSpace>;

  static Ptr make(std::vector<std::string> names);
  static Ptr states(int n);                    // x1..xn
  static Ptr pair_states(int n);               // xi1..xin, eta1..etan
  Ptr extended(const std::vector<std::string>& extra) const;

  size_t size() const { return names_.size(); }
  const std::string& name(size_t i) const { return names_[i]; }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<size_t> index_of(const std::string& name) const;

  bool operator==(const VarSpace& other) const { return names_ == other.names_; }

 private:
  explicit VarSpace(std::vector<std::string> names) : names_(std::move(names)) {}
  std::vector<std::string> names_;
};

bool same_space(const VarSpace::Ptr& a, const VarSpace::Ptr& b);

// Sparse multivariate polynomial with exact rational coefficients. Terms are
// stored under a fixed structural ordering; rendering and Groebner code sort
// by the active monomial order on demand. No zero coefficient is ever kept.
class Polynomial {
 public:
  explicit Polynomial(VarSpace::Ptr space);

  static Polynomial zero(VarSpace::Ptr space) { return Polynomial(std::move(space)); }
  static Polynomial constant(VarSpace::Ptr space, const Rat& c);
  static Polynomial variable(VarSpace::Ptr space, size_t var);
  static Polynomial monomial(VarSpace::Ptr space, Mono m, const Rat& c);

  const VarSpace::Ptr& space() const { return space_; }
  const std::map<Mono, Rat>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  size_t term_count() const { return terms_.size(); }
  unsigned degree() const;  // total degree; 0 for the zero polynomial

  Rat coefficient(const Mono& m) const;
  void add_term(const Mono& m, const Rat& c);

  Polynomial operator-() const;
  Polynomial& operator+=(const Polynomial& rhs);
  Polynomial& operator-=(const Polynomial& rhs);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Rat& s);
  friend Polynomial operator*(const Rat& s, const Polynomial& a) { return a * s; }
  bool operator==(const Polynomial& other) const;

  Polynomial pow(unsigned e) const;
  Polynomial derivative(size_t var) const;

  // Partial substitution var -> rational; variables not in the map survive.
  Polynomial substitute(const std::map<size_t, Rat>& assignment) const;
  Rat eval(const std::vector<Rat>& point) const;

  // Rebuilds the polynomial over `target`, shifting every variable index by
  // `offset`. Used to embed x-space polynomials as xi- or eta-copies.
  Polynomial embedded(VarSpace::Ptr target, size_t offset) const;

  // Canonical text form, terms sorted descending under `order`.
  std::string to_string(const MonomialOrder& order = MonomialOrder::grevlex()) const;

 private:
  VarSpace::Ptr space_;
  std::map<Mono, Rat> terms_;
};

// Lie derivative along a vector field: sum_i (dv/dx_i) f_i. The field must
// assign one polynomial per variable of v's space (for state spaces) or per
// leading state variable (callers slice accordingly).
Polynomial lie_derivative(const Polynomial& v, const std::vector<Polynomial>& field);

// The xi- and eta-copies of a state-space polynomial in the doubled space.
std::pair<Polynomial, Polynomial> rename_to_pair(const Polynomial& p,
                                                 VarSpace::Ptr pair_space);

// Lowers a cubical tensor to the homogeneous polynomial T x^k, reading the
// k variables starting at var_offset in `space`.
Polynomial polynomial_of_tensor(const SparseTensor& t, VarSpace::Ptr space,
                                size_t var_offset = 0);

}  // namespace hyperobs

#include "hyperobs/poly.hpp"

#include <algorithm>
#include <sstream>

namespace hyperobs {

VarSpace::Ptr VarSpace::make(std::vector<std::string> names) {
  return Ptr(new VarSpace(std::move(names)));
}

VarSpace::Ptr VarSpace::states(int n) {
  std::vector<std::string> names;
  names.reserve(n);
  for (int i = 1; i <= n; ++i) names.push_back("x" + std::to_string(i));
  return make(std::move(names));
}

VarSpace::Ptr VarSpace::pair_states(int n) {
  std::vector<std::string> names;
  names.reserve(2 * n);
  for (int i = 1; i <= n; ++i) names.push_back("xi" + std::to_string(i));
  for (int i = 1; i <= n; ++i) names.push_back("eta" + std::to_string(i));
  return make(std::move(names));
}

VarSpace::Ptr VarSpace::extended(const std::vector<std::string>& extra) const {
  std::vector<std::string> names = names_;
  names.insert(names.end(), extra.begin(), extra.end());
  return make(std::move(names));
}

std::optional<size_t> VarSpace::index_of(const std::string& name) const {
  for (size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  return std::nullopt;
}

bool same_space(const VarSpace::Ptr& a, const VarSpace::Ptr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

Polynomial::Polynomial(VarSpace::Ptr space) : space_(std::move(space)) {
  if (!space_) throw PolyError("polynomial requires a variable space");
}

Polynomial Polynomial::constant(VarSpace::Ptr space, const Rat& c) {
  Polynomial p(std::move(space));
  if (c != 0) p.terms_.emplace(Mono(p.space_->size(), 0), c);
  return p;
}

Polynomial Polynomial::variable(VarSpace::Ptr space, size_t var) {
  Polynomial p(std::move(space));
  if (var >= p.space_->size()) throw PolyError("variable index out of range");
  Mono m(p.space_->size(), 0);
  m[var] = 1;
  p.terms_.emplace(std::move(m), Rat(1));
  return p;
}

Polynomial Polynomial::monomial(VarSpace::Ptr space, Mono m, const Rat& c) {
  Polynomial p(std::move(space));
  if (m.size() != p.space_->size()) throw PolyError("monomial length mismatch");
  if (c != 0) p.terms_.emplace(std::move(m), c);
  return p;
}

bool Polynomial::is_constant() const {
  if (terms_.empty()) return true;
  return terms_.size() == 1 && total_degree(terms_.begin()->first) == 0;
}

unsigned Polynomial::degree() const {
  unsigned d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, total_degree(m));
  return d;
}

Rat Polynomial::coefficient(const Mono& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Rat(0) : it->second;
}

void Polynomial::add_term(const Mono& m, const Rat& c) {
  if (m.size() != space_->size()) throw PolyError("monomial length mismatch");
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    if (c != 0) terms_.emplace(m, c);
    return;
  }
  it->second += c;
  if (it->second == 0) terms_.erase(it);
}

Polynomial Polynomial::operator-() const {
  Polynomial out(space_);
  for (const auto& [m, c] : terms_) out.terms_.emplace(m, -c);
  return out;
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs) {
  if (!same_space(space_, rhs.space_)) throw PolyError("variable space mismatch");
  for (const auto& [m, c] : rhs.terms_) add_term(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& rhs) {
  if (!same_space(space_, rhs.space_)) throw PolyError("variable space mismatch");
  for (const auto& [m, c] : rhs.terms_) add_term(m, -c);
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (!same_space(a.space_, b.space_)) throw PolyError("variable space mismatch");
  Polynomial out(a.space_);
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      Mono m(ma.size());
      for (size_t i = 0; i < m.size(); ++i) m[i] = ma[i] + mb[i];
      out.add_term(m, ca * cb);
    }
  }
  return out;
}

Polynomial operator*(const Polynomial& a, const Rat& s) {
  Polynomial out(a.space_);
  if (s == 0) return out;
  for (const auto& [m, c] : a.terms_) out.terms_.emplace(m, c * s);
  return out;
}

bool Polynomial::operator==(const Polynomial& other) const {
  return same_space(space_, other.space_) && terms_ == other.terms_;
}

Polynomial Polynomial::pow(unsigned e) const {
  Polynomial out = constant(space_, 1);
  for (unsigned i = 0; i < e; ++i) out = out * (*this);
  return out;
}

Polynomial Polynomial::derivative(size_t var) const {
  if (var >= space_->size()) throw PolyError("variable index out of range");
  Polynomial out(space_);
  for (const auto& [m, c] : terms_) {
    if (m[var] == 0) continue;
    Mono d = m;
    d[var] -= 1;
    out.add_term(d, c * Rat(static_cast<long>(m[var])));
  }
  return out;
}

Polynomial Polynomial::substitute(const std::map<size_t, Rat>& assignment) const {
  for (const auto& [var, value] : assignment)
    if (var >= space_->size()) throw PolyError("unknown variable in substitution");
  Polynomial out(space_);
  for (const auto& [m, c] : terms_) {
    Rat coeff = c;
    Mono rest = m;
    for (const auto& [var, value] : assignment) {
      for (uint32_t e = 0; e < m[var]; ++e) coeff *= value;
      rest[var] = 0;
    }
    out.add_term(rest, coeff);
  }
  return out;
}

Rat Polynomial::eval(const std::vector<Rat>& point) const {
  if (point.size() != space_->size()) throw PolyError("evaluation point length mismatch");
  Rat out(0);
  for (const auto& [m, c] : terms_) {
    Rat term = c;
    for (size_t i = 0; i < m.size(); ++i)
      for (uint32_t e = 0; e < m[i]; ++e) term *= point[i];
    out += term;
  }
  return out;
}

Polynomial Polynomial::embedded(VarSpace::Ptr target, size_t offset) const {
  Polynomial out(std::move(target));
  const size_t tn = out.space_->size();
  if (offset + space_->size() > tn) throw PolyError("embedding does not fit target space");
  for (const auto& [m, c] : terms_) {
    Mono big(tn, 0);
    for (size_t i = 0; i < m.size(); ++i) big[offset + i] = m[i];
    out.terms_.emplace(std::move(big), c);
  }
  return out;
}

std::string Polynomial::to_string(const MonomialOrder& order) const {
  if (terms_.empty()) return "0";
  std::vector<const std::pair<const Mono, Rat>*> sorted;
  sorted.reserve(terms_.size());
  for (const auto& t : terms_) sorted.push_back(&t);
  std::sort(sorted.begin(), sorted.end(),
            [&](auto* a, auto* b) { return order.less(b->first, a->first); });
  std::ostringstream os;
  bool first = true;
  for (auto* t : sorted) {
    const auto& [m, c] = *t;
    Rat abs = c < 0 ? Rat(-c) : c;
    if (first) {
      if (c < 0) os << "-";
      first = false;
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    std::string vars;
    for (size_t i = 0; i < m.size(); ++i) {
      if (m[i] == 0) continue;
      if (!vars.empty()) vars += "*";
      vars += space_->name(i);
      if (m[i] > 1) vars += "^" + std::to_string(m[i]);
    }
    if (vars.empty()) {
      os << rat_to_string(abs);
    } else {
      if (abs != 1) os << rat_to_string(abs) << "*";
      os << vars;
    }
  }
  return os.str();
}

Polynomial lie_derivative(const Polynomial& v, const std::vector<Polynomial>& field) {
  Polynomial out(v.space());
  for (size_t i = 0; i < field.size(); ++i) {
    Polynomial dv = v.derivative(i);
    if (dv.is_zero()) continue;
    out += dv * field[i];
  }
  return out;
}

std::pair<Polynomial, Polynomial> rename_to_pair(const Polynomial& p,
                                                 VarSpace::Ptr pair_space) {
  const size_t n = p.space()->size();
  if (pair_space->size() < 2 * n) throw PolyError("pair space too small");
  return {p.embedded(pair_space, 0), p.embedded(pair_space, n)};
}

Polynomial polynomial_of_tensor(const SparseTensor& t, VarSpace::Ptr space,
                                size_t var_offset) {
  Polynomial out(space);
  if (var_offset + t.dim() > space->size())
    throw PolyError("tensor does not fit variable space");
  for (const auto& [idx, v] : t.entries()) {
    Mono m(space->size(), 0);
    for (int i : idx) m[var_offset + i - 1] += 1;
    out.add_term(m, v);
  }
  return out;
}

}  // namespace hyperobs

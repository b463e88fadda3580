#include "hyperobs/order.hpp"

#include <numeric>

namespace hyperobs {

unsigned total_degree(const Mono& m) { return std::accumulate(m.begin(), m.end(), 0u); }

namespace {

bool grevlex_less(const Mono& a, const Mono& b, size_t lo, size_t hi) {
  unsigned da = 0, db = 0;
  for (size_t i = lo; i < hi; ++i) {
    da += a[i];
    db += b[i];
  }
  if (da != db) return da < db;
  // same degree: reverse-lex on the reversed exponent difference; the
  // monomial with the SMALLER last differing exponent is larger
  for (size_t i = hi; i-- > lo;) {
    if (a[i] != b[i]) return a[i] > b[i];
  }
  return false;
}

bool lex_less(const Mono& a, const Mono& b) {
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

}  // namespace

bool MonomialOrder::less(const Mono& a, const Mono& b) const {
  switch (kind_) {
    case Kind::Lex:
      return lex_less(a, b);
    case Kind::Grevlex:
      return grevlex_less(a, b, 0, a.size());
    case Kind::Block: {
      size_t split = std::min<size_t>(block_, a.size());
      if (grevlex_less(a, b, 0, split)) return true;
      if (grevlex_less(b, a, 0, split)) return false;
      return grevlex_less(a, b, split, a.size());
    }
  }
  return false;
}

}  // namespace hyperobs

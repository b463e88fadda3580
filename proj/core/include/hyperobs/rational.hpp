#pragma once

#include <gmpxx.h>

#include <random>
#include <stdexcept>
#include <string>

namespace hyperobs {

// Exact rational coefficient type. All algebra in the library runs over Q;
// floating point only appears in the trajectory simulator.
using Rat = mpq_class;

class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Parses "p", "-p" or "p/q" with arbitrary-precision integers.
inline Rat rat_from_string(const std::string& s) {
  if (s.empty()) throw ParseError("empty rational literal");
  for (char ch : s) {
    if (!(std::isdigit(static_cast<unsigned char>(ch)) || ch == '-' || ch == '+' || ch == '/'))
      throw ParseError("invalid rational literal: '" + s + "'");
  }
  mpq_class q;
  if (q.set_str(s, 10) != 0) throw ParseError("invalid rational literal: '" + s + "'");
  if (q.get_den() == 0) throw ParseError("zero denominator in rational literal: '" + s + "'");
  q.canonicalize();
  return q;
}

inline std::string rat_to_string(const Rat& r) { return r.get_str(); }

inline Rat rat_factorial(unsigned k) {
  mpz_class acc = 1;
  for (unsigned i = 2; i <= k; ++i) acc *= i;
  return Rat(acc);
}

// Deterministic rational sampler used by seeded procedures (generic rank
// points, counterexample search). Numerators in [-num_bound, num_bound],
// denominators in [1, den_bound]; zero excluded when nonzero is set.
class RatSampler {
 public:
  RatSampler(uint64_t seed, long num_bound, long den_bound)
      : rng_(seed), num_(-num_bound, num_bound), den_(1, den_bound) {}

  Rat draw(bool nonzero) {
    for (;;) {
      Rat r(num_(rng_), den_(rng_));
      r.canonicalize();
      if (!nonzero || r != 0) return r;
    }
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
  std::uniform_int_distribution<long> num_;
  std::uniform_int_distribution<long> den_;
};

}  // namespace hyperobs

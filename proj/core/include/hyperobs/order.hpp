#pragma once

#include <cstdint>
#include <vector>

namespace hyperobs {

using Mono = std::vector<uint32_t>;

unsigned total_degree(const Mono& m);

// Total monomial orders. Grevlex is the default everywhere; lex and the
// elimination block order exist for callers that need them.
class MonomialOrder {
 public:
  enum class Kind { Grevlex, Lex, Block };

  static MonomialOrder grevlex() { return MonomialOrder(Kind::Grevlex, 0); }
  static MonomialOrder lex() { return MonomialOrder(Kind::Lex, 0); }
  // Eliminates the first `block` variables: compares the leading block by
  // grevlex first, then the rest by grevlex.
  static MonomialOrder block(unsigned first_block_size) {
    return MonomialOrder(Kind::Block, first_block_size);
  }

  Kind kind() const { return kind_; }
  unsigned block_size() const { return block_; }

  // strict a < b
  bool less(const Mono& a, const Mono& b) const;

  bool operator==(const MonomialOrder&) const = default;

 private:
  MonomialOrder(Kind kind, unsigned block) : kind_(kind), block_(block) {}
  Kind kind_;
  unsigned block_;
};

}  // namespace hyperobs

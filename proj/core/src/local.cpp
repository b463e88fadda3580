#include "hyperobs/local.hpp"

#include <algorithm>
#include <functional>

namespace hyperobs {

VarSpace::Ptr ujet_space(int n, int num_inputs, int jet_order) {
  std::vector<std::string> names;
  for (int i = 1; i <= n; ++i) names.push_back("x" + std::to_string(i));
  for (int l = 1; l <= num_inputs; ++l) {
    for (int s = 0; s <= jet_order; ++s) {
      std::string name = "u" + std::to_string(l);
      name += std::string(s, '\'');
      names.push_back(std::move(name));
    }
  }
  return VarSpace::make(std::move(names));
}

size_t ujet_var(int n, int jet_order, int input, int derivative) {
  return static_cast<size_t>(n) + static_cast<size_t>(input - 1) * (jet_order + 1) +
         static_cast<size_t>(derivative);
}

Polynomial formal_u_derivative(const Polynomial& p, int n, int num_inputs, int jet_order) {
  Polynomial out(p.space());
  for (int l = 1; l <= num_inputs; ++l) {
    for (int s = 0; s < jet_order; ++s) {
      Polynomial dp = p.derivative(ujet_var(n, jet_order, l, s));
      if (dp.is_zero()) continue;
      out += dp * Polynomial::variable(p.space(), ujet_var(n, jet_order, l, s + 1));
    }
  }
  return out;
}

Polynomial extended_lie_derivative(const Polynomial& v, const std::vector<Polynomial>& f,
                                   int n, int num_inputs, int jet_order) {
  Polynomial out(v.space());
  for (int i = 0; i < n; ++i) {
    Polynomial dv = v.derivative(i);
    if (!dv.is_zero()) out += dv * f[i];
  }
  out += formal_u_derivative(v, n, num_inputs, jet_order);
  return out;
}

RationalVector KroneckerFactor::apply(const RationalVector& x) const {
  int64_t rows = 1;
  for (int i = 0; i < degree; ++i) rows *= dim;
  RationalVector out(rows, Rat(0));
  for (const auto& [m, block] : blocks) {
    RationalVector kron = kron_power(x, degree + m - 2);
    for (const auto& [rc, v] : block.entries) out[rc.first] += v * kron[rc.second];
  }
  return out;
}

KroneckerFactor bar_factor(const HypergraphSystem& sys, int degree) {
  KroneckerFactor factor;
  factor.degree = degree;
  factor.dim = sys.n;
  const int n = sys.n;

  int64_t rows = 1;
  for (int i = 0; i < degree; ++i) rows *= n;

  for (const auto& a : sys.dynamics) {
    const int m = a.order();
    auto [it, inserted] = factor.blocks.try_emplace(m);
    SparseMatrix& block = it->second;
    block.rows = rows;
    block.cols = 1;
    for (int i = 0; i < degree + m - 2; ++i) block.cols *= n;

    // sum over insertion positions j of I (x) ... (x) unfold(A_m) (x) ... (x) I
    std::vector<int> alpha(degree, 1);
    for (;;) {
      for (int j = 0; j < degree; ++j) {
        for (const auto& [idx, w] : a.entries()) {
          if (idx.back() != alpha[j]) continue;
          Index col_idx;
          col_idx.reserve(degree + m - 2);
          col_idx.insert(col_idx.end(), alpha.begin(), alpha.begin() + j);
          col_idx.insert(col_idx.end(), idx.begin(), idx.end() - 1);
          col_idx.insert(col_idx.end(), alpha.begin() + j + 1, alpha.end());
          block.add(kron_index(Index(alpha.begin(), alpha.end()), n),
                    kron_index(col_idx, n), w);
        }
      }
      int pos = degree - 1;
      while (pos >= 0 && alpha[pos] == n) alpha[pos--] = 1;
      if (pos < 0) break;
      ++alpha[pos];
    }
  }
  return factor;
}

namespace {

// Lie-derivative rows in Kronecker coordinates: degree -> multi-index ->
// coefficient polynomial in the input jets (a constant when there are no
// inputs). The x-dependence lives entirely in the multi-index.
struct GradedRow {
  VarSpace::Ptr space;
  std::map<int, std::map<Index, Polynomial>> parts;

  void add(int degree, const Index& idx, const Polynomial& coeff) {
    if (coeff.is_zero()) return;
    auto& bucket = parts[degree];
    auto it = bucket.find(idx);
    if (it == bucket.end()) {
      bucket.emplace(idx, coeff);
    } else {
      it->second += coeff;
      if (it->second.is_zero()) bucket.erase(it);
    }
  }
};

struct FieldTensor {
  const SparseTensor* tensor;
  Polynomial u_multiplier;
};

GradedRow lie_step(const GradedRow& row, const std::vector<FieldTensor>& fields, int n,
                   int num_inputs, int jet_order) {
  GradedRow out;
  out.space = row.space;
  for (const auto& [d, bucket] : row.parts) {
    for (const auto& [alpha, coeff] : bucket) {
      // product-rule hit on the input jets
      Polynomial shifted = formal_u_derivative(coeff, n, num_inputs, jet_order);
      if (!shifted.is_zero()) out.add(d, alpha, shifted);
      // product-rule hit on each state slot
      for (int j = 0; j < d; ++j) {
        for (const auto& field : fields) {
          const int m = field.tensor->order();
          for (const auto& [idx, w] : field.tensor->entries()) {
            if (idx.back() != alpha[j]) continue;
            Index next;
            next.reserve(d + m - 2);
            next.insert(next.end(), alpha.begin(), alpha.begin() + j);
            next.insert(next.end(), idx.begin(), idx.end() - 1);
            next.insert(next.end(), alpha.begin() + j + 1, alpha.end());
            out.add(d + m - 2, next, coeff * field.u_multiplier * w);
          }
        }
      }
    }
  }
  return out;
}

// d/dx_p of sum coeff(u) x^alpha, expanded combinatorially slot by slot.
std::vector<Polynomial> row_gradient(const GradedRow& row, int n) {
  std::vector<Polynomial> grad(n, Polynomial::zero(row.space));
  for (const auto& [d, bucket] : row.parts) {
    for (const auto& [alpha, coeff] : bucket) {
      for (int j = 0; j < d; ++j) {
        Mono mono(row.space->size(), 0);
        for (int t = 0; t < d; ++t)
          if (t != j) mono[alpha[t] - 1] += 1;
        grad[alpha[j] - 1] += coeff * Polynomial::monomial(row.space, mono, Rat(1));
      }
    }
  }
  return grad;
}

int total_direct_inputs(const HypergraphSystem& sys) {
  size_t w = 0;
  for (const auto& per_output : sys.direct) w = std::max(w, per_output.size());
  return static_cast<int>(w);
}

PolyMatrix assemble(const HypergraphSystem& sys, int lie_orders, bool with_b, bool with_d) {
  sys.validate();
  const int n = sys.n;
  const int num_u = std::max(with_b ? sys.num_inputs() : 0,
                             with_d ? total_direct_inputs(sys) : 0);
  const int jet = lie_orders;  // enough headroom for every shift performed
  VarSpace::Ptr space = ujet_space(n, num_u, jet);

  std::vector<FieldTensor> fields;
  for (const auto& a : sys.dynamics) fields.push_back({&a, Polynomial::constant(space, 1)});
  if (with_b) {
    for (size_t j = 0; j < sys.inputs.size(); ++j) {
      Polynomial uj = Polynomial::variable(space, ujet_var(n, jet, static_cast<int>(j) + 1, 0));
      for (const auto& b : sys.inputs[j]) fields.push_back({&b, uj});
    }
  }

  PolyMatrix out;
  out.space = space;

  // per output: initial Kronecker row of h_i, then repeated factored steps
  std::vector<GradedRow> current;
  for (size_t i = 0; i < sys.outputs.size(); ++i) {
    GradedRow row;
    row.space = space;
    for (const auto& c : sys.outputs[i])
      for (const auto& [idx, w] : c.entries())
        row.add(c.order(), idx, Polynomial::constant(space, w));
    if (with_d && i < sys.direct.size()) {
      for (size_t l = 0; l < sys.direct[i].size(); ++l) {
        Polynomial ul =
            Polynomial::variable(space, ujet_var(n, jet, static_cast<int>(l) + 1, 0));
        for (const auto& dten : sys.direct[i][l])
          for (const auto& [idx, w] : dten.entries()) row.add(dten.order(), idx, ul * w);
      }
    }
    current.push_back(std::move(row));
  }

  for (int r = 0; r < lie_orders; ++r) {
    for (const auto& row : current) out.rows.push_back(row_gradient(row, n));
    if (r + 1 < lie_orders)
      for (auto& row : current) row = lie_step(row, fields, n, num_u, jet);
  }
  return out;
}

}  // namespace

PolyMatrix matrix_O(const HypergraphSystem& sys, std::optional<int> lie_orders) {
  if (sys.has_inputs() || sys.has_direct())
    throw SystemError("matrix O requires a system without inputs and direct transmission");
  return assemble(sys, lie_orders.value_or(sys.n), false, false);
}

PolyMatrix matrix_O1(const HypergraphSystem& sys, std::optional<int> lie_orders) {
  if (sys.has_direct())
    throw SystemError("matrix O1 covers inputs without direct transmission; "
                      "use the direct Jacobian for the mixed case");
  return assemble(sys, lie_orders.value_or(sys.n), true, false);
}

PolyMatrix matrix_O2(const HypergraphSystem& sys, std::optional<int> lie_orders) {
  if (sys.has_inputs())
    throw SystemError("matrix O2 covers direct transmission without inputs; "
                      "use the direct Jacobian for the mixed case");
  return assemble(sys, lie_orders.value_or(sys.n), false, true);
}

PolyMatrix observability_jacobian_direct(const HypergraphSystem& sys,
                                         std::optional<int> lie_orders) {
  sys.validate();
  const int n = sys.n;
  const int orders = lie_orders.value_or(n);
  const int num_u = std::max(sys.num_inputs(), total_direct_inputs(sys));
  const int jet = orders;
  VarSpace::Ptr space = ujet_space(n, num_u, jet);

  // f = g0 + sum_j g_j u_j over the jet space
  std::vector<Polynomial> f(n, Polynomial::zero(space));
  {
    auto fields = dynamics_fields(sys, VarSpace::states(n));
    for (int i = 0; i < n; ++i) f[i] = fields[0][i].embedded(space, 0);
    for (size_t j = 1; j < fields.size(); ++j) {
      Polynomial uj = Polynomial::variable(space, ujet_var(n, jet, static_cast<int>(j), 0));
      for (int i = 0; i < n; ++i) f[i] += fields[j][i].embedded(space, 0) * uj;
    }
  }

  // h_i = p_{i,0} + sum_l p_{i,l} u_l
  std::vector<Polynomial> h;
  {
    OutputFamilies fam = output_families(sys, VarSpace::states(n));
    for (size_t i = 0; i < fam.p0.size(); ++i) {
      Polynomial hi = fam.p0[i].embedded(space, 0);
      for (size_t l = 0; l < fam.p_in[i].size(); ++l) {
        Polynomial ul = Polynomial::variable(space, ujet_var(n, jet, static_cast<int>(l) + 1, 0));
        hi += fam.p_in[i][l].embedded(space, 0) * ul;
      }
      h.push_back(std::move(hi));
    }
  }

  PolyMatrix out;
  out.space = space;
  std::vector<Polynomial> current = h;
  for (int r = 0; r < orders; ++r) {
    for (const auto& v : current) {
      std::vector<Polynomial> grad;
      for (int p = 0; p < n; ++p) grad.push_back(v.derivative(p));
      out.rows.push_back(std::move(grad));
    }
    if (r + 1 < orders)
      for (auto& v : current) v = extended_lie_derivative(v, f, n, num_u, jet);
  }
  return out;
}

std::vector<Rat> leibniz_coefficients(int n) {
  std::vector<Rat> row{Rat(1)};
  for (int i = 1; i < n; ++i) {
    std::vector<Rat> next(row.size() + 1, Rat(0));
    for (size_t j = 0; j < row.size(); ++j) {
      next[j] += row[j];
      next[j + 1] += row[j];
    }
    row = std::move(next);
  }
  return row;
}

RankResult generic_rank(const PolyMatrix& m, const RankOptions& opts) {
  RankResult result;
  RatSampler sampler(opts.seed, 10, 7);
  const size_t vars = m.space ? m.space->size() : 0;
  const size_t max_rank = std::min(m.row_count(), m.col_count());
  for (int p = 0; p < opts.points; ++p) {
    std::vector<Rat> point;
    point.reserve(vars);
    for (size_t v = 0; v < vars; ++v) point.push_back(sampler.draw(true));
    size_t r = rank_at_point(m, point);
    result.evaluation_points.push_back(std::move(point));
    result.rank = std::max(result.rank, r);
    if (result.rank == max_rank) break;
  }
  result.certified_full = result.rank == max_rank;
  return result;
}

size_t rank_at_point(const PolyMatrix& m, const std::vector<Rat>& assignment) {
  QMatrix q(m.row_count(), m.col_count());
  for (size_t r = 0; r < m.row_count(); ++r)
    for (size_t c = 0; c < m.col_count(); ++c) q.at(r, c) = m.rows[r][c].eval(assignment);
  return matrix_rank(std::move(q));
}

namespace {

Polynomial poly_determinant(const PolyMatrix& m, const std::vector<size_t>& row_ids) {
  const size_t n = row_ids.size();
  std::function<Polynomial(std::vector<size_t>, std::vector<size_t>)> det =
      [&](std::vector<size_t> rows, std::vector<size_t> cols) -> Polynomial {
    if (rows.size() == 1) return m.rows[rows[0]][cols[0]];
    Polynomial acc = Polynomial::zero(m.space);
    for (size_t k = 0; k < cols.size(); ++k) {
      const Polynomial& pivot = m.rows[rows[0]][cols[k]];
      if (pivot.is_zero()) continue;
      std::vector<size_t> sub_cols;
      for (size_t c = 0; c < cols.size(); ++c)
        if (c != k) sub_cols.push_back(cols[c]);
      Polynomial minor = det(std::vector<size_t>(rows.begin() + 1, rows.end()), sub_cols);
      Polynomial term = pivot * minor;
      acc += (k % 2 == 0) ? term : -term;
    }
    return acc;
  };
  std::vector<size_t> cols(n);
  for (size_t c = 0; c < n; ++c) cols[c] = c;
  return det(row_ids, cols);
}

}  // namespace

std::map<std::string, unsigned> minor_common_monomial_divisor(const PolyMatrix& m) {
  const size_t n = m.col_count();
  std::map<std::string, unsigned> common;
  if (m.row_count() < n || n == 0) return common;

  bool first_minor = true;
  std::vector<size_t> pick(n);
  for (size_t i = 0; i < n; ++i) pick[i] = i;
  auto next_combination = [&]() -> bool {
    size_t i = n;
    while (i > 0) {
      --i;
      if (pick[i] + (n - i) < m.row_count()) {
        ++pick[i];
        for (size_t j = i + 1; j < n; ++j) pick[j] = pick[j - 1] + 1;
        return true;
      }
    }
    return false;
  };
  // iterate over all row n-subsets
  do {
    Polynomial minor = poly_determinant(m, pick);
    if (!minor.is_zero()) {
      // per-variable minimum exponent over the minor's monomials
      std::vector<unsigned> content(m.space->size(), UINT32_MAX);
      for (const auto& [mono, c] : minor.terms())
        for (size_t v = 0; v < mono.size(); ++v)
          content[v] = std::min(content[v], mono[v]);
      if (first_minor) {
        for (size_t v = 0; v < content.size(); ++v)
          if (content[v] > 0) common[m.space->name(v)] = content[v];
        first_minor = false;
      } else {
        for (auto it = common.begin(); it != common.end();) {
          size_t v = *m.space->index_of(it->first);
          it->second = std::min(it->second, content[v]);
          if (it->second == 0)
            it = common.erase(it);
          else
            ++it;
        }
      }
    }
  } while (next_combination());
  return common;
}

}  // namespace hyperobs

#include "hyperobs/design.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace hyperobs {

std::vector<Mono> monomial_basis(int n, int d) {
  std::vector<Mono> basis;
  Mono current(n, 0);
  // graded, lex within a degree (x1 before x2 ...)
  std::function<void(int, int, int)> fill = [&](int var, int remaining, int target) {
    if (var == n - 1) {
      current[var] = remaining;
      basis.push_back(current);
      current[var] = 0;
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      current[var] = e;
      fill(var + 1, remaining - e, target);
    }
    current[var] = 0;
  };
  for (int deg = 1; deg <= d; ++deg) fill(0, deg, deg);
  return basis;
}

QMatrix vanishing_constraint_matrix(const std::vector<Polynomial>& f,
                                    const std::vector<Mono>& basis, int r) {
  if (f.empty()) return QMatrix();
  VarSpace::Ptr space = f.front().space();

  std::vector<Polynomial> images;
  images.reserve(basis.size());
  for (const auto& m : basis) {
    Polynomial p = Polynomial::monomial(space, m, Rat(1));
    for (int step = 0; step < r; ++step) p = lie_derivative(p, f);
    images.push_back(std::move(p));
  }

  std::map<Mono, size_t> row_of;
  for (const auto& img : images)
    for (const auto& [mono, c] : img.terms())
      row_of.emplace(mono, row_of.size());

  QMatrix m(row_of.size(), basis.size());
  for (size_t col = 0; col < images.size(); ++col)
    for (const auto& [mono, c] : images[col].terms()) m.at(row_of[mono], col) = c;
  return m;
}

std::vector<std::vector<Rat>> exact_nullspace(const QMatrix& m) {
  if (m.cols == 0) return {};
  if (m.rows == 0) {
    // no constraints: unit vectors span the kernel
    std::vector<std::vector<Rat>> basis;
    for (size_t c = 0; c < m.cols; ++c) {
      std::vector<Rat> v(m.cols, Rat(0));
      v[c] = 1;
      basis.push_back(std::move(v));
    }
    return basis;
  }
  return nullspace(m);
}

namespace {

std::set<int> support_vars(const std::vector<Rat>& gamma, const std::vector<Mono>& basis) {
  std::set<int> vars;
  for (size_t i = 0; i < gamma.size(); ++i) {
    if (gamma[i] == 0) continue;
    for (size_t v = 0; v < basis[i].size(); ++v)
      if (basis[i][v] > 0) vars.insert(static_cast<int>(v) + 1);
  }
  return vars;
}

size_t sparsity(const std::vector<Rat>& gamma) {
  size_t nz = 0;
  for (const auto& g : gamma)
    if (g != 0) ++nz;
  return nz;
}

// graded-lex comparison of supports (as sorted monomial lists)
std::vector<Mono> support_monos(const std::vector<Rat>& gamma, const std::vector<Mono>& basis) {
  std::vector<Mono> monos;
  for (size_t i = 0; i < gamma.size(); ++i)
    if (gamma[i] != 0) monos.push_back(basis[i]);
  return monos;
}

// a monomial comes earlier when it has lower degree, then larger exponent
// vector (x1 before x2), matching the basis enumeration order
bool mono_before(const Mono& x, const Mono& y) {
  unsigned dx = total_degree(x), dy = total_degree(y);
  if (dx != dy) return dx < dy;
  return x > y;
}

bool support_gradedlex_before(const std::vector<Mono>& a, const std::vector<Mono>& b) {
  for (size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    if (a[i] == b[i]) continue;
    return mono_before(a[i], b[i]);
  }
  return a.size() < b.size();
}

}  // namespace

std::vector<std::vector<Rat>> select_candidates(const std::vector<std::vector<Rat>>& kernel,
                                                const std::vector<Mono>& basis, int n,
                                                int max_picks,
                                                const std::vector<std::set<int>>& already_covered) {
  std::set<int> covered;
  for (const auto& s : already_covered) covered.insert(s.begin(), s.end());

  std::vector<std::vector<Rat>> picks;
  std::vector<bool> used(kernel.size(), false);
  for (int round = 0; round < max_picks; ++round) {
    if (covered.size() >= static_cast<size_t>(n)) break;  // nothing left to gain
    std::optional<size_t> best;
    size_t best_gain = 0;
    for (size_t i = 0; i < kernel.size(); ++i) {
      if (used[i]) continue;
      std::set<int> vars = support_vars(kernel[i], basis);
      size_t gain = 0;
      for (int v : vars)
        if (!covered.count(v)) ++gain;
      if (gain == 0) continue;
      if (!best || gain > best_gain) {
        best = i;
        best_gain = gain;
        continue;
      }
      if (gain < best_gain) continue;
      // tie: prefer sparser, then graded-lex-earlier support
      if (sparsity(kernel[i]) != sparsity(kernel[*best])) {
        if (sparsity(kernel[i]) < sparsity(kernel[*best])) best = i;
        continue;
      }
      if (support_gradedlex_before(support_monos(kernel[i], basis),
                                   support_monos(kernel[*best], basis)))
        best = i;
    }
    if (!best) break;
    used[*best] = true;
    for (int v : support_vars(kernel[*best], basis)) covered.insert(v);
    picks.push_back(kernel[*best]);
  }
  return picks;
}

Polynomial candidate_polynomial(const std::vector<Rat>& gamma, const std::vector<Mono>& basis,
                                VarSpace::Ptr space) {
  Polynomial p(space);
  for (size_t i = 0; i < gamma.size(); ++i)
    if (gamma[i] != 0) p.add_term(basis[i], gamma[i]);
  return p;
}

std::vector<SparseTensor> candidate_tensors(const std::vector<Rat>& gamma,
                                            const std::vector<Mono>& basis, int n) {
  std::map<int, SparseTensor> by_order;
  for (size_t i = 0; i < gamma.size(); ++i) {
    if (gamma[i] == 0) continue;
    const unsigned deg = total_degree(basis[i]);
    Index idx;
    for (size_t v = 0; v < basis[i].size(); ++v)
      for (uint32_t e = 0; e < basis[i][v]; ++e) idx.push_back(static_cast<int>(v) + 1);
    auto it = by_order.find(static_cast<int>(deg));
    if (it == by_order.end())
      it = by_order.emplace(static_cast<int>(deg), SparseTensor(static_cast<int>(deg), n)).first;
    it->second.add(idx, gamma[i]);
  }
  std::vector<SparseTensor> out;
  for (auto& [deg, t] : by_order) out.push_back(std::move(t));
  return out;
}

namespace {

struct Candidate {
  std::vector<Rat> gamma;
  int vanishing_order = 1;
};

HypergraphSystem with_outputs(const HypergraphSystem& dyn,
                              const std::vector<Polynomial>& existing,
                              const std::vector<Candidate>& sensors,
                              const std::vector<Mono>& basis, int d_for_existing) {
  HypergraphSystem sys = dyn;
  sys.outputs.clear();
  sys.direct.clear();
  const int n = sys.n;
  int max_order = std::max(sys.max_cardinality, 1);
  auto push_poly = [&](const Polynomial& p) {
    std::map<int, SparseTensor> by_order;
    for (const auto& [mono, c] : p.terms()) {
      const int deg = static_cast<int>(total_degree(mono));
      Index idx;
      for (size_t v = 0; v < mono.size(); ++v)
        for (uint32_t e = 0; e < mono[v]; ++e) idx.push_back(static_cast<int>(v) + 1);
      auto it = by_order.find(deg);
      if (it == by_order.end()) it = by_order.emplace(deg, SparseTensor(deg, n)).first;
      it->second.add(idx, c);
      max_order = std::max(max_order, deg);
    }
    std::vector<SparseTensor> tensors;
    for (auto& [deg, t] : by_order) tensors.push_back(std::move(t));
    sys.outputs.push_back(std::move(tensors));
  };
  for (const auto& p : existing) push_poly(p);
  for (const auto& c : sensors) {
    for (const auto& t : candidate_tensors(c.gamma, basis, n))
      max_order = std::max(max_order, t.order());
    sys.outputs.push_back(candidate_tensors(c.gamma, basis, n));
  }
  (void)d_for_existing;
  sys.max_cardinality = max_order;
  return sys;
}

// v + lambda*w keeping every variable of vars(v) and vars(w) in the support;
// a couple of scalings dodge accidental cancellation, exact arithmetic tells
// us immediately whether they did
std::optional<std::vector<Rat>> combine_vectors(const std::vector<Rat>& v,
                                                const std::vector<Rat>& w,
                                                const std::vector<Mono>& basis) {
  std::set<int> want = support_vars(v, basis);
  for (int x : support_vars(w, basis)) want.insert(x);
  for (const Rat& lambda : {Rat(1), Rat(2), Rat(1, 2), Rat(3)}) {
    std::vector<Rat> sum(v.size());
    for (size_t i = 0; i < v.size(); ++i) sum[i] = v[i] + lambda * w[i];
    if (support_vars(sum, basis) == want) return sum;
  }
  return std::nullopt;
}

}  // namespace

DesignResult design_outputs(const HypergraphSystem& dynamics_only,
                            const std::vector<Rat>& sigma, const DesignConfig& cfg,
                            const std::vector<Polynomial>& existing_outputs) {
  DesignResult result;
  const int n = dynamics_only.n;
  if (static_cast<int>(sigma.size()) != n) {
    result.note = "sigma length does not match dimension";
    return result;
  }
  const int slots = cfg.p - static_cast<int>(existing_outputs.size());
  if (slots < 0) {
    result.note = "existing outputs already exceed the sensor budget";
    return result;
  }
  const int support_bound = cfg.support_bound > 0 ? cfg.support_bound : n;

  VarSpace::Ptr x = VarSpace::states(n);
  std::vector<Polynomial> f = lower_dynamics(dynamics_only, x);

  std::vector<std::set<int>> existing_cover;
  for (const auto& p : existing_outputs) {
    std::set<int> vars;
    for (const auto& [m, c] : p.terms())
      for (size_t v = 0; v < m.size(); ++v)
        if (m[v] > 0) vars.insert(static_cast<int>(v) + 1);
    existing_cover.push_back(std::move(vars));
  }

  auto verify = [&](const std::vector<Candidate>& sensors,
                    const std::vector<Mono>& basis) -> Verdict {
    HypergraphSystem sys = with_outputs(dynamics_only, existing_outputs, sensors, basis, 0);
    GlobalAnalysis analysis = analyze_global(sys, sigma, cfg.chain, cfg.search);
    return analysis.verdict;
  };

  auto finish = [&](std::vector<Candidate> sensors, const std::vector<Mono>& basis,
                    Verdict verdict, int vanish_r) {
    result.success = true;
    result.verdict = std::move(verdict);
    for (const auto& c : sensors) {
      Polynomial y = candidate_polynomial(c.gamma, basis, x);
      // the returned candidate really does vanish at its declared order
      Polynomial check = y;
      for (int step = 0; step < vanish_r; ++step) check = lie_derivative(check, f);
      if (!check.is_zero()) {
        result.success = false;
        result.note = "internal: candidate fails its vanishing order";
        return;
      }
      result.outputs.push_back(std::move(y));
      result.output_tensors.push_back(candidate_tensors(c.gamma, basis, n));
    }
    result.note = "vanishing order " + std::to_string(vanish_r);
  };

  for (int r = 1; r <= std::max(cfg.r_relax, 1); ++r) {
    for (int d = 1; d <= cfg.d_max; ++d) {
      std::vector<Mono> basis = monomial_basis(n, d);
      QMatrix m = vanishing_constraint_matrix(f, basis, r);
      std::vector<std::vector<Rat>> kernel = exact_nullspace(m);
      if (r > 1) {
        // relaxed step works with sparse candidates only
        std::erase_if(kernel, [&](const std::vector<Rat>& v) {
          return static_cast<int>(support_vars(v, basis).size()) > support_bound;
        });
      }
      result.trace.push_back(
          DesignTraceEntry{d, r, basis.size(), kernel.size()});
      if (kernel.empty() || slots == 0) continue;

      // coverage-driven sensors first
      std::vector<std::vector<Rat>> picks =
          select_candidates(kernel, basis, n, slots, existing_cover);
      std::vector<Candidate> sensors;
      for (auto& g : picks) sensors.push_back(Candidate{std::move(g), r});
      if (sensors.empty()) continue;

      Verdict verdict = verify(sensors, basis);
      if (verdict.status == ObsStatus::Observable) {
        finish(std::move(sensors), basis, std::move(verdict), r);
        if (result.success) return result;
        continue;
      }

      // augmentation: fold unused kernel vectors into the last sensor when
      // no slots remain, or spend further sensors
      std::vector<std::vector<Rat>> unused;
      for (const auto& k : kernel) {
        bool taken = false;
        for (const auto& s : sensors)
          if (s.gamma == k) taken = true;
        if (!taken) unused.push_back(k);
      }
      for (const auto& extra : unused) {
        bool changed = false;
        if (static_cast<int>(sensors.size()) < slots) {
          sensors.push_back(Candidate{extra, r});
          changed = true;
        } else if (auto merged = combine_vectors(sensors.back().gamma, extra, basis)) {
          sensors.back().gamma = *merged;
          changed = true;
        }
        if (!changed) continue;
        verdict = verify(sensors, basis);
        if (verdict.status == ObsStatus::Observable) {
          finish(std::move(sensors), basis, std::move(verdict), r);
          if (result.success) return result;
          break;
        }
      }
    }
  }

  result.success = false;
  if (result.note.empty())
    result.note = "no observable output design within d_max = " + std::to_string(cfg.d_max) +
                  ", p = " + std::to_string(cfg.p) + ", r_relax = " +
                  std::to_string(cfg.r_relax);
  return result;
}

}  // namespace hyperobs

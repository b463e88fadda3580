#include "hyperobs/system.hpp"

namespace hyperobs {

bool HypergraphSystem::has_inputs() const {
  for (const auto& list : inputs)
    for (const auto& t : list)
      if (!t.empty()) return true;
  return false;
}

bool HypergraphSystem::has_direct() const {
  for (const auto& per_output : direct)
    for (const auto& list : per_output)
      for (const auto& t : list)
        if (!t.empty()) return true;
  return false;
}

void HypergraphSystem::validate() const {
  if (n < 1) throw SystemError("state dimension must be >= 1");
  if (max_cardinality < 1) throw SystemError("max cardinality must be >= 1");
  auto check = [&](const SparseTensor& t, int min_order, const std::string& role) {
    if (t.dim() != n)
      throw SystemError(role + " tensor dimension " + std::to_string(t.dim()) +
                        " does not match system dimension " + std::to_string(n));
    if (t.order() < min_order || t.order() > max_cardinality)
      throw SystemError(role + " tensor order " + std::to_string(t.order()) +
                        " outside " + std::to_string(min_order) + ".." +
                        std::to_string(max_cardinality));
  };
  for (const auto& t : dynamics) check(t, 2, "dynamics");
  for (const auto& list : inputs)
    for (const auto& t : list) check(t, 2, "input");
  for (const auto& list : outputs)
    for (const auto& t : list) check(t, 1, "output");
  if (!direct.empty() && direct.size() != outputs.size())
    throw SystemError("direct transmission lists must align with outputs");
  for (const auto& per_output : direct)
    for (const auto& list : per_output)
      for (const auto& t : list) check(t, 1, "direct");
  if (!labels.empty() && static_cast<int>(labels.size()) != n)
    throw SystemError("label count does not match dimension");
}

namespace {

// One component of sum_k T_k x^{k-1} as polynomials over the leading n vars.
std::vector<Polynomial> lowered_field(const std::vector<SparseTensor>& tensors, int n,
                                      const VarSpace::Ptr& space) {
  std::vector<Polynomial> f(n, Polynomial::zero(space));
  for (const auto& t : tensors) {
    for (const auto& [idx, v] : t.entries()) {
      Mono m(space->size(), 0);
      for (size_t p = 0; p + 1 < idx.size(); ++p) m[idx[p] - 1] += 1;
      f[idx.back() - 1].add_term(m, v);
    }
  }
  return f;
}

Polynomial lowered_scalar(const std::vector<SparseTensor>& tensors,
                          const VarSpace::Ptr& space) {
  Polynomial h = Polynomial::zero(space);
  for (const auto& t : tensors) h += polynomial_of_tensor(t, space, 0);
  return h;
}

}  // namespace

std::vector<Polynomial> lower_dynamics(const HypergraphSystem& sys, VarSpace::Ptr space,
                                       const std::optional<std::vector<Rat>>& input_values) {
  std::vector<Polynomial> f = lowered_field(sys.dynamics, sys.n, space);
  if (input_values) {
    if (input_values->size() != sys.inputs.size())
      throw SystemError("input assignment length does not match input count");
    for (size_t j = 0; j < sys.inputs.size(); ++j) {
      if ((*input_values)[j] == 0) continue;
      auto gj = lowered_field(sys.inputs[j], sys.n, space);
      for (int i = 0; i < sys.n; ++i) f[i] += gj[i] * (*input_values)[j];
    }
  }
  return f;
}

std::vector<std::vector<Polynomial>> dynamics_fields(const HypergraphSystem& sys,
                                                     VarSpace::Ptr space) {
  std::vector<std::vector<Polynomial>> fields;
  fields.push_back(lowered_field(sys.dynamics, sys.n, space));
  for (const auto& bj : sys.inputs) fields.push_back(lowered_field(bj, sys.n, space));
  return fields;
}

std::vector<Polynomial> lower_outputs(const HypergraphSystem& sys, VarSpace::Ptr space,
                                      const std::optional<std::vector<Rat>>& input_values) {
  std::vector<Polynomial> h;
  h.reserve(sys.outputs.size());
  for (size_t i = 0; i < sys.outputs.size(); ++i) {
    Polynomial hi = lowered_scalar(sys.outputs[i], space);
    if (i < sys.direct.size() && input_values) {
      const auto& per_input = sys.direct[i];
      for (size_t l = 0; l < per_input.size(); ++l) {
        if (l >= input_values->size() || (*input_values)[l] == 0) continue;
        hi += lowered_scalar(per_input[l], space) * (*input_values)[l];
      }
    }
    h.push_back(std::move(hi));
  }
  return h;
}

OutputFamilies output_families(const HypergraphSystem& sys, VarSpace::Ptr space) {
  OutputFamilies fam;
  for (size_t i = 0; i < sys.outputs.size(); ++i) {
    fam.p0.push_back(lowered_scalar(sys.outputs[i], space));
    std::vector<Polynomial> pl;
    if (i < sys.direct.size())
      for (const auto& dl : sys.direct[i]) pl.push_back(lowered_scalar(dl, space));
    fam.p_in.push_back(std::move(pl));
  }
  return fam;
}

}  // namespace hyperobs

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hyperobs/poly.hpp"
#include "hyperobs/tensor.hpp"

namespace hyperobs {

class SystemError : public std::runtime_error {
 public:
  explicit SystemError(const std::string& what) : std::runtime_error(what) {}
};

// The full input-affine higher-order network model:
//   xdot = sum_k A_k x^{k-1} + sum_j sum_k B_{k,j} x^{k-1} u_j
//   y_i  = sum_k C_{i,k} x^k + sum_l sum_k D_{i,k,l} x^k u_l
// All tensors are stored tail-last; weights are taken literally (the file
// loader optionally applies the factorial normalization before they get here).
struct HypergraphSystem {
  int n = 0;
  int max_cardinality = 1;  // c
  std::vector<std::string> labels;

  std::vector<SparseTensor> dynamics;                          // A_k
  std::vector<std::vector<SparseTensor>> inputs;               // inputs[j] = B_{k,j} list
  std::vector<std::vector<SparseTensor>> outputs;              // outputs[i] = C_{i,k} list
  std::vector<std::vector<std::vector<SparseTensor>>> direct;  // direct[i][l] = D_{i,k,l} list

  int num_inputs() const { return static_cast<int>(inputs.size()); }
  int num_outputs() const { return static_cast<int>(outputs.size()); }
  bool has_inputs() const;
  bool has_direct() const;

  // Throws SystemError on dimension/order violations.
  void validate() const;
};

// Dynamics lowered to polynomials over `space` (the first n variables are the
// states). With `input_values` bound, returns f; otherwise g0 alone.
std::vector<Polynomial> lower_dynamics(const HypergraphSystem& sys, VarSpace::Ptr space,
                                       const std::optional<std::vector<Rat>>& input_values = {});

// The vector fields {g_0, g_1, ..., g_m} of the input-affine form.
std::vector<std::vector<Polynomial>> dynamics_fields(const HypergraphSystem& sys,
                                                     VarSpace::Ptr space);

// Output polynomials h_i with inputs bound (or absent).
std::vector<Polynomial> lower_outputs(const HypergraphSystem& sys, VarSpace::Ptr space,
                                      const std::optional<std::vector<Rat>>& input_values = {});

// The output families {p_{i,0}; p_{i,1}..p_{i,w_i}} of the input-affine form.
struct OutputFamilies {
  std::vector<Polynomial> p0;                  // p_{i,0} per output
  std::vector<std::vector<Polynomial>> p_in;   // p_{i,l} per output, per direct input
};
OutputFamilies output_families(const HypergraphSystem& sys, VarSpace::Ptr space);

}  // namespace hyperobs

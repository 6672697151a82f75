#pragma once

#include <memory>
#include <vector>

#include "dynmap/kernels.hpp"
#include "dynmap/types.hpp"

namespace dynmap {

/// Static cost of one mapping method over every period of a sequence.
///
/// Construction extracts each period's included sub-matrix once. `evaluate`
/// gathers the included rows of a period's configuration, evaluates the
/// method on them, and scatters the gradient back; excluded rows get zero.
class StaticCost {
 public:
  virtual ~StaticCost() = default;

  std::size_t periods() const { return members_.size(); }
  const std::vector<Index>& members(std::size_t t) const { return members_[t]; }

  double evaluate(std::size_t t, const Matrix& x, Matrix* grad) const;

 protected:
  StaticCost(const DissimilaritySequence& d, const InclusionMask* mask, kernels::Exec exec);

  virtual double evaluate_included(std::size_t t, const Matrix& x_sub, Matrix* grad_sub) const = 0;

  const Matrix& delta(std::size_t t) const { return sub_delta_[t]; }
  kernels::Exec exec() const { return exec_; }

 private:
  std::vector<std::vector<Index>> members_;
  std::vector<Matrix> sub_delta_;
  std::vector<bool> complete_;
  kernels::Exec exec_;
};

/// Builds the static cost for `spec.method`. `exaggeration` scales the
/// t-SNE input probabilities and is ignored by the other methods.
std::unique_ptr<StaticCost> make_static_cost(const DissimilaritySequence& d, const FitSpec& spec,
                                             const InclusionMask* mask = nullptr, double exaggeration = 1.0,
                                             kernels::Exec exec = kernels::Exec::parallel);

/// z_i = sum_t ||D_{i,t} - D_{i,t-1}||^2 and w_i = exp(-z_i / max z).
/// Under a mask a transition counts only when i is present in both periods,
/// and only over columns present in both. Throws Error(temporal_data) when T < 2.
ObjectWeights compute_object_weights(const DissimilaritySequence& d, const InclusionMask* mask = nullptr);

/// Weighted sum of squared backward differences of orders 1..p. Terms whose
/// span touches a period where the object is absent are dropped.
double temporal_cost(const ConfigurationSequence& x, int p, const ObjectWeights& w,
                     const InclusionMask* mask = nullptr);
/// Gradient of temporal_cost (without the alpha factor).
std::vector<Matrix> temporal_gradient(const ConfigurationSequence& x, int p, const ObjectWeights& w,
                                      const InclusionMask* mask = nullptr);

/// Temporal terms whose difference stencil involves period t, with the
/// gradient of that partial sum with respect to X_t (both without alpha).
double temporal_local(const ConfigurationSequence& x, std::size_t t, int p, const ObjectWeights& w,
                      const InclusionMask* mask = nullptr, Matrix* grad_t = nullptr);

struct CostBreakdown {
  double total = 0.0;
  double temporal = 0.0;               // unweighted by alpha
  std::vector<double> static_costs;    // one per period
};

/// sum_t C_static(X_t) + alpha * C_temporal. With T == 1 the temporal term is absent.
CostBreakdown total_cost(const ConfigurationSequence& x, const StaticCost& cost, const FitSpec& spec,
                         const ObjectWeights& w, const InclusionMask* mask = nullptr);

std::vector<Matrix> total_gradient(const ConfigurationSequence& x, const StaticCost& cost, const FitSpec& spec,
                                   const ObjectWeights& w, const InclusionMask* mask = nullptr);

/// Cost and gradient in one pass; `grad` is resized to match `x`.
CostBreakdown total_cost_and_gradient(const ConfigurationSequence& x, const StaticCost& cost, const FitSpec& spec,
                                      const ObjectWeights& w, const InclusionMask* mask,
                                      std::vector<Matrix>& grad);

}  // namespace dynmap

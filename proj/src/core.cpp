#include "dynmap/core.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

namespace dynmap {

namespace {

// Signed binomial stencil of the k-th backward difference:
// nabla^k x_t = sum_m coef[m] * x_{t-m}.
std::vector<double> difference_stencil(int k) {
  std::vector<double> coef(static_cast<std::size_t>(k) + 1);
  double c = 1.0;
  for (int m = 0; m <= k; ++m) {
    coef[static_cast<std::size_t>(m)] = (m % 2 == 0) ? c : -c;
    c = c * (k - m) / (m + 1);
  }
  return coef;
}

bool span_included(const InclusionMask* mask, std::size_t t, int k, Index i) {
  if (mask == nullptr) return true;
  for (int m = 0; m <= k; ++m) {
    if (!mask->contains(t - static_cast<std::size_t>(m), i)) return false;
  }
  return true;
}

void check_temporal_args(const ConfigurationSequence& x, int p, const ObjectWeights& w) {
  if (p < 1 || static_cast<std::size_t>(p) >= x.periods_count()) {
    fail(ErrorKind::hyperparameter, "p must satisfy 1 <= p < T (p = " + std::to_string(p) +
                                        ", T = " + std::to_string(x.periods_count()) + ")");
  }
  if (w.w.size() != x.objects()) fail(ErrorKind::config, "object weights do not match the configuration");
}

// Shared loop for cost and gradient. `grad` may be null.
double temporal_pass(const ConfigurationSequence& x, int p, const ObjectWeights& w, const InclusionMask* mask,
                     std::vector<Matrix>* grad) {
  check_temporal_args(x, p, w);
  const std::size_t periods = x.periods_count();
  const Index n = x.objects();
  const Index dims = x.dims();
  if (grad != nullptr) {
    grad->assign(periods, Matrix::Zero(n, dims));
  }
  std::vector<std::vector<double>> stencils;
  for (int k = 1; k <= p; ++k) stencils.push_back(difference_stencil(k));

  double total = 0.0;
  Eigen::RowVectorXd diff(dims);
  for (Index i = 0; i < n; ++i) {
    double object_cost = 0.0;
    for (int k = 1; k <= p; ++k) {
      const auto& coef = stencils[static_cast<std::size_t>(k - 1)];
      for (std::size_t t = static_cast<std::size_t>(k); t < periods; ++t) {
        if (!span_included(mask, t, k, i)) continue;
        diff.setZero();
        for (int m = 0; m <= k; ++m) diff += coef[static_cast<std::size_t>(m)] * x.coords[t - static_cast<std::size_t>(m)].row(i);
        object_cost += diff.squaredNorm();
        if (grad != nullptr) {
          for (int m = 0; m <= k; ++m) {
            (*grad)[t - static_cast<std::size_t>(m)].row(i) += 2.0 * w.w(i) * coef[static_cast<std::size_t>(m)] * diff;
          }
        }
      }
    }
    total += w.w(i) * object_cost;
  }
  return total;
}

}  // namespace

ObjectWeights compute_object_weights(const DissimilaritySequence& d, const InclusionMask* mask) {
  const std::size_t periods = d.periods_count();
  if (periods < 2) fail(ErrorKind::temporal_data, "object weights need at least two periods");
  const Index n = d.objects();
  if (mask != nullptr) mask->validate(periods, n);

  ObjectWeights out;
  out.z = Vector::Zero(n);
  for (std::size_t t = 1; t < periods; ++t) {
    const Matrix& cur = d.matrices[t];
    const Matrix& prev = d.matrices[t - 1];
    for (Index i = 0; i < n; ++i) {
      if (!is_included(mask, t, i) || !is_included(mask, t - 1, i)) continue;
      double s = 0.0;
      for (Index j = 0; j < n; ++j) {
        if (!is_included(mask, t, j) || !is_included(mask, t - 1, j)) continue;
        const double diff = cur(i, j) - prev(i, j);
        s += diff * diff;
      }
      out.z(i) += s;
    }
  }
  const double zmax = out.z.maxCoeff();
  if (zmax > 0.0) {
    out.b = 1.0 / zmax;
    out.w = (-out.b * out.z.array()).exp().matrix();
  } else {
    out.b = 0.0;
    out.w = Vector::Ones(n);
  }
  return out;
}

double temporal_cost(const ConfigurationSequence& x, int p, const ObjectWeights& w, const InclusionMask* mask) {
  return temporal_pass(x, p, w, mask, nullptr);
}

std::vector<Matrix> temporal_gradient(const ConfigurationSequence& x, int p, const ObjectWeights& w,
                                      const InclusionMask* mask) {
  std::vector<Matrix> grad;
  temporal_pass(x, p, w, mask, &grad);
  return grad;
}

double temporal_local(const ConfigurationSequence& x, std::size_t t, int p, const ObjectWeights& w,
                      const InclusionMask* mask, Matrix* grad_t) {
  check_temporal_args(x, p, w);
  const std::size_t periods = x.periods_count();
  const Index n = x.objects();
  if (t >= periods) fail(ErrorKind::config, "period index out of range");
  if (grad_t != nullptr) grad_t->setZero(n, x.dims());
  double total = 0.0;
  Eigen::RowVectorXd diff(x.dims());
  for (int k = 1; k <= p; ++k) {
    const std::vector<double> coef = difference_stencil(k);
    const std::size_t uk = static_cast<std::size_t>(k);
    const std::size_t first = std::max(uk, t);
    const std::size_t last = std::min(periods - 1, t + uk);
    for (std::size_t s = first; s <= last; ++s) {
      const double c_t = coef[s - t];
      for (Index i = 0; i < n; ++i) {
        if (!span_included(mask, s, k, i)) continue;
        diff.setZero();
        for (std::size_t m = 0; m <= uk; ++m) diff += coef[m] * x.coords[s - m].row(i);
        total += w.w(i) * diff.squaredNorm();
        if (grad_t != nullptr) grad_t->row(i) += 2.0 * w.w(i) * c_t * diff;
      }
    }
  }
  return total;
}

namespace {

CostBreakdown evaluate_all(const ConfigurationSequence& x, const StaticCost& cost, const FitSpec& spec,
                           const ObjectWeights& w, const InclusionMask* mask, std::vector<Matrix>* grad) {
  const std::size_t periods = x.periods_count();
  if (cost.periods() != periods) fail(ErrorKind::config, "configuration and data differ in period count");
  CostBreakdown out;
  out.static_costs.assign(periods, 0.0);
  if (grad != nullptr) grad->assign(periods, Matrix());

  const long long count = static_cast<long long>(periods);
  if (count > 1) {
    // Per-period costs are independent; the nested kernels run single-threaded here.
    std::vector<std::exception_ptr> errors(periods);
#pragma omp parallel for schedule(dynamic)
    for (long long t = 0; t < count; ++t) {
      const auto ut = static_cast<std::size_t>(t);
      try {
        out.static_costs[ut] = cost.evaluate(ut, x.coords[ut], grad != nullptr ? &(*grad)[ut] : nullptr);
      } catch (...) {
        errors[ut] = std::current_exception();
      }
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  } else if (count == 1) {
    out.static_costs[0] = cost.evaluate(0, x.coords[0], grad != nullptr ? &(*grad)[0] : nullptr);
  }
  double static_sum = 0.0;
  for (double c : out.static_costs) static_sum += c;
  out.total = static_sum;

  if (periods >= 2) {
    if (grad != nullptr && spec.alpha != 0.0) {
      std::vector<Matrix> tgrad;
      out.temporal = temporal_pass(x, spec.p, w, mask, &tgrad);
      for (std::size_t t = 0; t < periods; ++t) (*grad)[t] += spec.alpha * tgrad[t];
    } else {
      out.temporal = temporal_pass(x, spec.p, w, mask, nullptr);
    }
    out.total += spec.alpha * out.temporal;
  }
  return out;
}

}  // namespace

CostBreakdown total_cost(const ConfigurationSequence& x, const StaticCost& cost, const FitSpec& spec,
                         const ObjectWeights& w, const InclusionMask* mask) {
  return evaluate_all(x, cost, spec, w, mask, nullptr);
}

std::vector<Matrix> total_gradient(const ConfigurationSequence& x, const StaticCost& cost, const FitSpec& spec,
                                   const ObjectWeights& w, const InclusionMask* mask) {
  std::vector<Matrix> grad;
  evaluate_all(x, cost, spec, w, mask, &grad);
  return grad;
}

CostBreakdown total_cost_and_gradient(const ConfigurationSequence& x, const StaticCost& cost, const FitSpec& spec,
                                      const ObjectWeights& w, const InclusionMask* mask,
                                      std::vector<Matrix>& grad) {
  return evaluate_all(x, cost, spec, w, mask, &grad);
}

}  // namespace dynmap

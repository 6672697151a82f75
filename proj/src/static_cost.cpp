#include "dynmap/core.hpp"
#include "dynmap/static_methods.hpp"

namespace dynmap {

StaticCost::StaticCost(const DissimilaritySequence& d, const InclusionMask* mask, kernels::Exec exec)
    : exec_(exec) {
  const std::size_t periods = d.periods_count();
  const Index n = d.objects();
  if (mask != nullptr) mask->validate(periods, n);
  members_.resize(periods);
  sub_delta_.resize(periods);
  complete_.resize(periods);
  for (std::size_t t = 0; t < periods; ++t) {
    if (mask != nullptr) {
      members_[t] = mask->members(t);
    } else {
      members_[t].resize(static_cast<std::size_t>(n));
      for (Index i = 0; i < n; ++i) members_[t][static_cast<std::size_t>(i)] = i;
    }
    complete_[t] = static_cast<Index>(members_[t].size()) == n;
    sub_delta_[t] = complete_[t] ? d.matrices[t] : gather_square(d.matrices[t], members_[t]);
  }
}

double StaticCost::evaluate(std::size_t t, const Matrix& x, Matrix* grad) const {
  if (members_[t].size() < 2) {
    if (grad != nullptr) grad->setZero(x.rows(), x.cols());
    return 0.0;
  }
  if (complete_[t]) return evaluate_included(t, x, grad);
  const Matrix sub = gather_rows(x, members_[t]);
  if (grad == nullptr) return evaluate_included(t, sub, nullptr);
  Matrix sub_grad;
  const double c = evaluate_included(t, sub, &sub_grad);
  grad->setZero(x.rows(), x.cols());
  for (std::size_t r = 0; r < members_[t].size(); ++r) grad->row(members_[t][r]) = sub_grad.row(static_cast<Index>(r));
  return c;
}

namespace {

class MdsCost final : public StaticCost {
 public:
  MdsCost(const DissimilaritySequence& d, const InclusionMask* mask, MdsType type, kernels::Exec exec)
      : StaticCost(d, mask, exec), type_(type) {}

 protected:
  double evaluate_included(std::size_t t, const Matrix& x, Matrix* grad) const override {
    const Matrix dhat = type_ == MdsType::ratio
                            ? delta(t)
                            : fit_disparities(kernels::distances(x, exec()), delta(t), type_);
    return kernels::stress_fixed(x, dhat, grad, exec());
  }

 private:
  MdsType type_;
};

class SammonCost final : public StaticCost {
 public:
  SammonCost(const DissimilaritySequence& d, const InclusionMask* mask, kernels::Exec exec)
      : StaticCost(d, mask, exec) {
    for (std::size_t t = 0; t < periods(); ++t) require_positive_offdiag(delta(t));
  }

 protected:
  double evaluate_included(std::size_t t, const Matrix& x, Matrix* grad) const override {
    return kernels::sammon(x, delta(t), grad, exec());
  }
};

class TsneCost final : public StaticCost {
 public:
  TsneCost(const DissimilaritySequence& d, const InclusionMask* mask, double perplexity, double exaggeration,
           kernels::Exec exec)
      : StaticCost(d, mask, exec) {
    p_.resize(periods());
    for (std::size_t t = 0; t < periods(); ++t) {
      if (members(t).size() < 2) continue;
      p_[t] = tsne_p_matrix(delta(t), perplexity, exec).p * exaggeration;
    }
  }

 protected:
  double evaluate_included(std::size_t t, const Matrix& x, Matrix* grad) const override {
    return kernels::tsne_kl(x, p_[t], grad, exec());
  }

 private:
  std::vector<Matrix> p_;
};

}  // namespace

std::unique_ptr<StaticCost> make_static_cost(const DissimilaritySequence& d, const FitSpec& spec,
                                             const InclusionMask* mask, double exaggeration, kernels::Exec exec) {
  switch (spec.method) {
    case Method::mds: return std::make_unique<MdsCost>(d, mask, spec.method_params.mds_type, exec);
    case Method::sammon: return std::make_unique<SammonCost>(d, mask, exec);
    case Method::tsne:
      return std::make_unique<TsneCost>(d, mask, spec.method_params.perplexity, exaggeration, exec);
  }
  fail(ErrorKind::config, "unknown method");
}

}  // namespace dynmap

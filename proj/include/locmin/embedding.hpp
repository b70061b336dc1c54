#pragma once

// Reparameterized embeddings: a relaxed mean mu~(theta, theta') over
// p + p' coordinates with mu~(theta, 0) = mu(theta) for every theta.
// An embedding is itself a MeanFunction over the stacked vector (theta, theta').

#include "locmin/model.hpp"

#include <memory>
#include <utility>

namespace locmin {

template <class E>
concept Embedding = MeanFunction<E> && requires(const E& e) {
  { e.base_dim() } -> std::convertible_to<Index>;
  { e.extra_dim() } -> std::convertible_to<Index>;
  { e.base() };
};

// (theta, 0): the image of a restricted point in the relaxed space.
inline Vector lift(const Vector& theta, Index extra_dim) {
  Vector out = Vector::Zero(theta.size() + extra_dim);
  out.head(theta.size()) = theta;
  return out;
}

class AnyEmbedding {
 public:
  template <Embedding E>
    requires(!std::same_as<std::remove_cvref_t<E>, AnyEmbedding>)
  AnyEmbedding(E e)  // NOLINT(google-explicit-constructor)
      : self_(std::make_shared<const Model<std::remove_cvref_t<E>>>(std::move(e))) {}

  Index output_dim() const { return self_->output_dim(); }
  Index param_dim() const { return self_->base_dim() + self_->extra_dim(); }
  Index base_dim() const { return self_->base_dim(); }
  Index extra_dim() const { return self_->extra_dim(); }
  Vector value(const Vector& t) const { return self_->value(t); }
  Matrix jacobian(const Vector& t) const { return self_->jacobian(t); }
  Bounds domain() const { return self_->domain(); }
  AnyMean base() const { return self_->base(); }

 private:
  struct Concept {
    virtual ~Concept() = default;
    virtual Index output_dim() const = 0;
    virtual Index base_dim() const = 0;
    virtual Index extra_dim() const = 0;
    virtual Vector value(const Vector&) const = 0;
    virtual Matrix jacobian(const Vector&) const = 0;
    virtual Bounds domain() const = 0;
    virtual AnyMean base() const = 0;
  };
  template <class E>
  struct Model final : Concept {
    explicit Model(E e) : emb(std::move(e)) {}
    Index output_dim() const override { return emb.output_dim(); }
    Index base_dim() const override { return emb.base_dim(); }
    Index extra_dim() const override { return emb.extra_dim(); }
    Vector value(const Vector& t) const override { return emb.value(t); }
    Matrix jacobian(const Vector& t) const override { return emb.jacobian(t); }
    Bounds domain() const override { return emb.domain(); }
    AnyMean base() const override { return AnyMean(emb.base()); }
    E emb;
  };

  std::shared_ptr<const Concept> self_;
};

// Zero extra coordinates; the relaxation changes nothing.
template <MeanFunction F>
class IdentityEmbedding {
 public:
  explicit IdentityEmbedding(F base) : base_(std::move(base)) {}

  const F& base() const { return base_; }
  Index base_dim() const { return base_.param_dim(); }
  Index extra_dim() const { return 0; }
  Index param_dim() const { return base_dim(); }
  Index output_dim() const { return base_.output_dim(); }
  Vector value(const Vector& t) const { return base_.value(t); }
  Matrix jacobian(const Vector& t) const { return base_.jacobian(t); }
  Bounds domain() const { return base_.domain(); }

 private:
  F base_;
};

// The whole measurement domain: mu~(theta, theta') = mu(theta) + theta'.
template <MeanFunction F>
class AdditiveEmbedding {
 public:
  explicit AdditiveEmbedding(F base) : base_(std::move(base)) {}

  const F& base() const { return base_; }
  Index base_dim() const { return base_.param_dim(); }
  Index extra_dim() const { return base_.output_dim(); }
  Index param_dim() const { return base_dim() + extra_dim(); }
  Index output_dim() const { return base_.output_dim(); }

  Vector value(const Vector& t) const {
    return base_.value(t.head(base_dim())) + t.tail(extra_dim());
  }
  Matrix jacobian(const Vector& t) const {
    Matrix jac(output_dim(), param_dim());
    jac.leftCols(base_dim()) = base_.jacobian(t.head(base_dim()));
    jac.rightCols(extra_dim()).setIdentity();
    return jac;
  }
  Vector jacobian_transpose_times(const Vector& t, const Vector& v) const {
    Vector out(param_dim());
    out.head(base_dim()) = base_.jacobian(t.head(base_dim())).transpose() * v;
    out.tail(extra_dim()) = v;
    return out;
  }
  Bounds domain() const {
    return Bounds::concat(base_.domain(), Bounds::unbounded(extra_dim()));
  }

 private:
  F base_;
};

// Restriction of an embedding to theta' = R c, R having orthonormal columns:
// (theta, c) -> mu~(theta, R c). With R empty this is the base model.
template <Embedding E>
class SubspaceRestrictedMean {
 public:
  SubspaceRestrictedMean(E emb, Matrix basis) : emb_(std::move(emb)), basis_(std::move(basis)) {
    if (basis_.rows() != emb_.extra_dim()) {
      throw InvalidInput("subspace basis rows must equal the embedding's extra dimension");
    }
  }

  const Matrix& basis() const { return basis_; }
  Index output_dim() const { return emb_.output_dim(); }
  Index param_dim() const { return emb_.base_dim() + basis_.cols(); }

  Vector value(const Vector& t) const { return emb_.value(expand(t)); }
  Matrix jacobian(const Vector& t) const {
    const Matrix full = emb_.jacobian(expand(t));
    const Index p = emb_.base_dim();
    Matrix jac(output_dim(), param_dim());
    jac.leftCols(p) = full.leftCols(p);
    jac.rightCols(basis_.cols()) = full.rightCols(emb_.extra_dim()) * basis_;
    return jac;
  }
  Bounds domain() const {
    return Bounds::concat(Bounds{emb_.domain().lower.head(emb_.base_dim()),
                                 emb_.domain().upper.head(emb_.base_dim())},
                          Bounds::unbounded(basis_.cols()));
  }

 private:
  Vector expand(const Vector& t) const {
    const Index p = emb_.base_dim();
    Vector full(p + emb_.extra_dim());
    full.head(p) = t.head(p);
    full.tail(emb_.extra_dim()) = basis_ * t.tail(basis_.cols());
    return full;
  }

  E emb_;
  Matrix basis_;
};

// The relaxed space with span(R) moved into the restricted model:
// (theta, c, theta') -> mu~(theta, R c + (I - R R^T) theta').
template <Embedding E>
class DeflatedEmbedding {
 public:
  DeflatedEmbedding(E emb, Matrix basis)
      : restricted_(emb, basis), emb_(std::move(emb)), basis_(std::move(basis)) {
    const Index pe = emb_.extra_dim();
    projector_ = Matrix::Identity(pe, pe) - basis_ * basis_.transpose();
  }

  const SubspaceRestrictedMean<E>& base() const { return restricted_; }
  Index base_dim() const { return restricted_.param_dim(); }
  Index extra_dim() const { return emb_.extra_dim(); }
  Index param_dim() const { return base_dim() + extra_dim(); }
  Index output_dim() const { return emb_.output_dim(); }

  Vector value(const Vector& t) const { return emb_.value(expand(t)); }
  Matrix jacobian(const Vector& t) const {
    const Matrix full = emb_.jacobian(expand(t));
    const Index p = emb_.base_dim();
    const Index k = basis_.cols();
    const auto extra = full.rightCols(emb_.extra_dim());
    Matrix jac(output_dim(), param_dim());
    jac.leftCols(p) = full.leftCols(p);
    jac.middleCols(p, k) = extra * basis_;
    jac.rightCols(extra_dim()) = extra * projector_;
    return jac;
  }
  Bounds domain() const {
    return Bounds::concat(restricted_.domain(), Bounds::unbounded(extra_dim()));
  }

 private:
  Vector expand(const Vector& t) const {
    const Index p = emb_.base_dim();
    const Index k = basis_.cols();
    Vector full(p + emb_.extra_dim());
    full.head(p) = t.head(p);
    full.tail(emb_.extra_dim()) = basis_ * t.segment(p, k) + projector_ * t.tail(extra_dim());
    return full;
  }

  SubspaceRestrictedMean<E> restricted_;
  E emb_;
  Matrix basis_;
  Matrix projector_;
};

}  // namespace locmin

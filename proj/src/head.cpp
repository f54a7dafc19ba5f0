#include "lsdc/head.hpp"

#include <cmath>

#include "lsdc/kernels.hpp"

namespace lsdc {
namespace {

Matrix affine_forward(const Affine& a, const Matrix& x) {
  const std::size_t n = x.rows(), in = a.in_dim(), out = a.out_dim();
  Matrix y(n, out);
  for (std::size_t i = 0; i < n; ++i) {
    real* yi = y.row(i);
    for (std::size_t k = 0; k < out; ++k) yi[k] = a.b[k];
    const real* xi = x.row(i);
    for (std::size_t d = 0; d < in; ++d)
      kernels::axpy(xi[d], a.W.row(d), yi, out);
  }
  return y;
}

// Returns dL/dx; accumulates weight and bias gradients into g.
Matrix affine_backward(const Affine& a, const Matrix& x, const Matrix& dy,
                       AffineGrad& g) {
  const std::size_t n = x.rows(), in = a.in_dim(), out = a.out_dim();
  g.W = Matrix(in, out, 0);
  g.b.assign(out, 0);
  Matrix dx(n, in);
  for (std::size_t i = 0; i < n; ++i) {
    const real* xi = x.row(i);
    const real* dyi = dy.row(i);
    kernels::axpy(real(1), dyi, g.b.data(), out);
    for (std::size_t d = 0; d < in; ++d) {
      kernels::axpy(xi[d], dyi, g.W.row(d), out);
      dx(i, d) = kernels::dot(a.W.row(d), dyi, out);
    }
  }
  return dx;
}

Matrix relu(const Matrix& x) {
  Matrix y = x;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (y.data()[i] < 0) y.data()[i] = 0;
  return y;
}

Matrix relu_backward(const Matrix& post, const Matrix& dpost) {
  Matrix d = dpost;
  for (std::size_t i = 0; i < d.size(); ++i)
    if (post.data()[i] <= 0) d.data()[i] = 0;
  return d;
}

}  // namespace

Affine make_affine(std::size_t in_dim, std::size_t out_dim, Rng& rng) {
  if (in_dim == 0 || out_dim == 0)
    throw ConfigError("layer dimensions must be >= 1");
  Affine a;
  a.W = Matrix(in_dim, out_dim);
  a.b.assign(out_dim, 0);
  const real scale = real(1) / std::sqrt(static_cast<real>(in_dim));
  for (std::size_t i = 0; i < a.W.size(); ++i)
    a.W.data()[i] = scale * static_cast<real>(rng.normal());
  return a;
}

ClassifierHead make_head(HeadKind kind, std::size_t in_dim, std::size_t hidden,
                         std::size_t k, Rng& rng) {
  if (k < 2) throw ConfigError("k_clusters must be >= 2");
  ClassifierHead head;
  head.kind = kind;
  if (kind == HeadKind::TwoLayer) {
    if (hidden == 0) throw ConfigError("head.hidden must be >= 1");
    head.l1 = make_affine(in_dim, hidden, rng);
    head.out = make_affine(hidden, k, rng);
  } else {
    head.out = make_affine(in_dim, k, rng);
  }
  return head;
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix p(logits.rows(), logits.cols());
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    const real* in = logits.row(i);
    real* out = p.row(i);
    real m = in[0];
    for (std::size_t k = 1; k < logits.cols(); ++k) m = std::max(m, in[k]);
    real z = 0;
    for (std::size_t k = 0; k < logits.cols(); ++k) {
      out[k] = std::exp(in[k] - m);
      z += out[k];
    }
    for (std::size_t k = 0; k < logits.cols(); ++k) out[k] /= z;
  }
  return p;
}

HeadForward head_forward(const ClassifierHead& head, const Matrix& x) {
  const std::size_t in =
      head.kind == HeadKind::TwoLayer ? head.l1.in_dim() : head.out.in_dim();
  if (x.cols() != in)
    throw DataError("feature dimension " + std::to_string(x.cols()) +
                    " does not match head input " + std::to_string(in));
  HeadForward f;
  if (head.kind == HeadKind::TwoLayer) {
    f.hidden = relu(affine_forward(head.l1, x));
    f.logits = affine_forward(head.out, f.hidden);
  } else {
    f.logits = affine_forward(head.out, x);
  }
  f.probs = softmax_rows(f.logits);
  return f;
}

HeadGrad head_backward(const ClassifierHead& head, const Matrix& x,
                       const HeadForward& fwd, const Matrix& dprobs) {
  if (dprobs.rows() != x.rows() || dprobs.cols() != fwd.probs.cols() ||
      fwd.probs.rows() != x.rows())
    throw DataError("gradient shape does not match the forward pass");
  const std::size_t n = x.rows(), k = fwd.probs.cols();

  // Softmax Jacobian: dlogit_k = p_k * (dp_k - sum_m p_m dp_m).
  Matrix dlogits(n, k);
  for (std::size_t i = 0; i < n; ++i) {
    const real* p = fwd.probs.row(i);
    const real* dp = dprobs.row(i);
    const real inner = kernels::dot(p, dp, k);
    for (std::size_t c = 0; c < k; ++c) dlogits(i, c) = p[c] * (dp[c] - inner);
  }

  HeadGrad g;
  if (head.kind == HeadKind::TwoLayer) {
    const Matrix dhidden = affine_backward(head.out, fwd.hidden, dlogits, g.out);
    const Matrix dpre = relu_backward(fwd.hidden, dhidden);
    g.input = affine_backward(head.l1, x, dpre, g.l1);
  } else {
    g.input = affine_backward(head.out, x, dlogits, g.out);
  }
  return g;
}

Backbone make_backbone(std::size_t in_dim, std::size_t hidden,
                       std::size_t out_dim, Rng& rng) {
  Backbone bb;
  bb.l1 = make_affine(in_dim, hidden, rng);
  bb.l2 = make_affine(hidden, out_dim, rng);
  return bb;
}

BackboneForward backbone_forward(const Backbone& bb, const Matrix& x) {
  if (x.cols() != bb.l1.in_dim())
    throw DataError("feature dimension " + std::to_string(x.cols()) +
                    " does not match backbone input " +
                    std::to_string(bb.l1.in_dim()));
  BackboneForward f;
  f.hidden = relu(affine_forward(bb.l1, x));
  f.out = affine_forward(bb.l2, f.hidden);
  return f;
}

BackboneGrad backbone_backward(const Backbone& bb, const Matrix& x,
                               const BackboneForward& fwd, const Matrix& dout) {
  BackboneGrad g;
  const Matrix dhidden = affine_backward(bb.l2, fwd.hidden, dout, g.l2);
  const Matrix dpre = relu_backward(fwd.hidden, dhidden);
  affine_backward(bb.l1, x, dpre, g.l1);
  return g;
}

}  // namespace lsdc

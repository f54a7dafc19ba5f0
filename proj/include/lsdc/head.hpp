#pragma once

#include "lsdc/rng.hpp"
#include "lsdc/types.hpp"

namespace lsdc {

// Fully-connected layer; W is stored input-major (in_dim x out_dim) so a
// forward pass is a sum of axpy updates over input coordinates.
struct Affine {
  Matrix W;
  std::vector<real> b;

  std::size_t in_dim() const { return W.rows(); }
  std::size_t out_dim() const { return W.cols(); }
};

// Weights ~ N(0, 1/in_dim), biases zero, drawn row-major from rng.
Affine make_affine(std::size_t in_dim, std::size_t out_dim, Rng& rng);

struct AffineGrad {
  Matrix W;
  std::vector<real> b;
};

enum class HeadKind { Linear, TwoLayer };

struct ClassifierHead {
  HeadKind kind = HeadKind::Linear;
  Affine l1;   // two_layer only, followed by ReLU
  Affine out;  // logits layer
};

ClassifierHead make_head(HeadKind kind, std::size_t in_dim, std::size_t hidden,
                         std::size_t k, Rng& rng);

struct HeadForward {
  Matrix hidden;  // post-ReLU activations, two_layer only
  Matrix logits;
  Matrix probs;  // row-wise softmax of logits
};

HeadForward head_forward(const ClassifierHead& head, const Matrix& x);

struct HeadGrad {
  AffineGrad l1;
  AffineGrad out;
  Matrix input;  // dL/dx, for chaining into a backbone
};

// dprobs is dL/dprobs; the softmax Jacobian is applied internally.
HeadGrad head_backward(const ClassifierHead& head, const Matrix& x,
                       const HeadForward& fwd, const Matrix& dprobs);

// Two affine layers with a ReLU between them and a linear output; maps raw
// coordinates into the space where pairwise labels are extracted.
struct Backbone {
  Affine l1;
  Affine l2;
};

Backbone make_backbone(std::size_t in_dim, std::size_t hidden,
                       std::size_t out_dim, Rng& rng);

struct BackboneForward {
  Matrix hidden;  // post-ReLU
  Matrix out;
};

BackboneForward backbone_forward(const Backbone& bb, const Matrix& x);

struct BackboneGrad {
  AffineGrad l1;
  AffineGrad l2;
};

BackboneGrad backbone_backward(const Backbone& bb, const Matrix& x,
                               const BackboneForward& fwd, const Matrix& dout);

// Softmax over each row, numerically shifted by the row max.
Matrix softmax_rows(const Matrix& logits);

}  // namespace lsdc

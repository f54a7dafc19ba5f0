#include "lsdc/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "lsdc/evaluation.hpp"
#include "lsdc/kernels.hpp"

namespace lsdc {
namespace {

struct ParamBuf {
  real* data;
  std::size_t n;
};

std::vector<ParamBuf> param_buffers(Model& m) {
  std::vector<ParamBuf> out;
  const auto add = [&out](Affine& a) {
    out.push_back({a.W.data(), a.W.size()});
    out.push_back({a.b.data(), a.b.size()});
  };
  if (m.has_backbone) {
    add(m.backbone.l1);
    add(m.backbone.l2);
  }
  if (m.head.kind == HeadKind::TwoLayer) add(m.head.l1);
  add(m.head.out);
  return out;
}

Model zero_like(const Model& m) {
  Model g = m;
  for (const ParamBuf& b : param_buffers(g)) std::memset(b.data, 0, b.n * sizeof(real));
  return g;
}

void add_grad(Affine& dst, const AffineGrad& src) {
  kernels::axpy(real(1), src.W.data(), dst.W.data(), dst.W.size());
  kernels::axpy(real(1), src.b.data(), dst.b.data(), dst.b.size());
}

void format_real(std::string& line, real v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", static_cast<double>(v));
  line += buf;
}

constexpr char kMagic[4] = {'L', 'S', 'D', 'H'};

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& is, const std::string& path) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4))
    throw DataError("truncated checkpoint: " + path);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void put_payload(std::ostream& os, const Affine& a) {
  const auto put_f32 = [&os](real v) {
    float f = static_cast<float>(v);
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    put_u32(os, bits);
  };
  for (std::size_t i = 0; i < a.W.size(); ++i) put_f32(a.W.data()[i]);
  for (const real v : a.b) put_f32(v);
}

void get_payload(std::istream& is, Affine& a, const std::string& path) {
  const auto get_f32 = [&is, &path]() {
    const std::uint32_t bits = get_u32(is, path);
    float f;
    std::memcpy(&f, &bits, 4);
    if (!std::isfinite(f)) throw DataError("non-finite parameter in checkpoint: " + path);
    return static_cast<real>(f);
  };
  for (std::size_t i = 0; i < a.W.size(); ++i) a.W.data()[i] = get_f32();
  for (real& v : a.b) v = get_f32();
}

}  // namespace

void validate(const RunConfig& cfg) {
  if (cfg.k_clusters < 2) throw ConfigError("k_clusters must be >= 2");
  if (cfg.epochs < 1) throw ConfigError("epochs must be >= 1");
  if (cfg.batch_size < 2) throw ConfigError("batch_size must be >= 2");
  if (!(cfg.lr_init > 0)) throw ConfigError("lr_init must be > 0");
  for (std::size_t i = 0; i < cfg.lr_steps.size(); ++i) {
    if (cfg.lr_steps[i] >= cfg.epochs)
      throw ConfigError("lr_steps entries must be < epochs");
    if (i > 0 && cfg.lr_steps[i] <= cfg.lr_steps[i - 1])
      throw ConfigError("lr_steps must be strictly increasing");
  }
  if (!(cfg.lr_decay_factor > 0)) throw ConfigError("lr_decay_factor must be > 0");
  if (!(cfg.momentum >= 0 && cfg.momentum < 1))
    throw ConfigError("momentum must be in [0, 1)");
  if (!(cfg.weight_decay >= 0)) throw ConfigError("weight_decay must be >= 0");
  if (!(cfg.adam_beta1 >= 0 && cfg.adam_beta1 < 1))
    throw ConfigError("adam_beta1 must be in [0, 1)");
  if (!(cfg.adam_beta2 >= 0 && cfg.adam_beta2 < 1))
    throw ConfigError("adam_beta2 must be in [0, 1)");
  if (!(cfg.adam_eps > 0)) throw ConfigError("adam_eps must be > 0");
  if (!(cfg.lambda >= 0)) throw ConfigError("lambda must be >= 0");
  if (cfg.ramp_len_epochs < 1) throw ConfigError("ramp_len_epochs must be >= 1");
  if (cfg.composition == CompositionKind::Mixup &&
      (!(cfg.beta_alpha > 0) || !(cfg.beta_beta > 0)))
    throw ConfigError("beta parameters must be > 0 for mixup");
  if (cfg.composition == CompositionKind::None) {
    if (cfg.augment_mode == AugmentMode::GaussianNoise) {
      if (!(cfg.augment_strength >= 0))
        throw ConfigError("augment.strength must be >= 0");
    } else if (!(cfg.augment_strength >= 0 && cfg.augment_strength < 1)) {
      throw ConfigError("augment.strength must be in [0, 1) for feature_dropout");
    }
  }
  if (cfg.head_kind == HeadKind::TwoLayer && cfg.head_hidden < 1)
    throw ConfigError("head.hidden must be >= 1");
  if (cfg.backbone_enabled && cfg.backbone_hidden < 1)
    throw ConfigError("backbone.hidden must be >= 1");
  validate(cfg.similarity);
  if (cfg.similarity.kind == SimilarityKind::Knn &&
      cfg.similarity.k >= cfg.batch_size)
    throw ConfigError("similarity.k must be smaller than batch_size");
}

Model make_model(const RunConfig& cfg, std::size_t in_dim, Rng& rng) {
  if (in_dim == 0) throw DataError("features must have dimension >= 1");
  Model m;
  std::size_t head_in = in_dim;
  if (cfg.backbone_enabled) {
    m.has_backbone = true;
    const std::size_t out = cfg.backbone_out == 0 ? in_dim : cfg.backbone_out;
    m.backbone = make_backbone(in_dim, cfg.backbone_hidden, out, rng);
    head_in = out;
  }
  m.head = make_head(cfg.head_kind, head_in, cfg.head_hidden, cfg.k_clusters, rng);
  return m;
}

std::size_t model_input_dim(const Model& model) {
  if (model.has_backbone) return model.backbone.l1.in_dim();
  return model.head.kind == HeadKind::TwoLayer ? model.head.l1.in_dim()
                                               : model.head.out.in_dim();
}

Matrix model_features(const Model& model, const Matrix& x) {
  if (!model.has_backbone) return x;
  return backbone_forward(model.backbone, x).out;
}

Matrix model_logits(const Model& model, const Matrix& x) {
  return head_forward(model.head, model_features(model, x)).logits;
}

Matrix model_probs(const Model& model, const Matrix& x) {
  return head_forward(model.head, model_features(model, x)).probs;
}

real lr_at(const RunConfig& cfg, std::size_t epoch) {
  if (epoch >= cfg.epochs) throw ConfigError("epoch out of range");
  real lr = cfg.lr_init;
  for (const std::size_t s : cfg.lr_steps)
    if (s <= epoch) lr *= cfg.lr_decay_factor;
  return lr;
}

std::size_t steps_per_epoch(const RunConfig& cfg, std::size_t n_samples) {
  const std::size_t full = n_samples / cfg.batch_size;
  const std::size_t rem = n_samples % cfg.batch_size;
  bool keep_rem = rem >= 2;
  if (keep_rem && cfg.similarity.kind == SimilarityKind::Knn &&
      rem <= cfg.similarity.k)
    keep_rem = false;  // too small to build a k-neighbor graph
  const std::size_t steps = full + (keep_rem ? 1 : 0);
  if (steps == 0)
    throw ConfigError("no usable minibatch: dataset too small for batch_size/similarity.k");
  return steps;
}

void sgd_step(real* param, const real* grad, real* velocity, std::size_t n,
              real lr, real momentum, real weight_decay) {
  for (std::size_t i = 0; i < n; ++i) {
    const real g = grad[i] + weight_decay * param[i];
    velocity[i] = momentum * velocity[i] + g;
    param[i] -= lr * velocity[i];
  }
}

void adam_step(real* param, const real* grad, real* m, real* v, std::size_t n,
               long t, real lr, real beta1, real beta2, real eps,
               real weight_decay) {
  const real bc1 = 1 - std::pow(beta1, static_cast<real>(t));
  const real bc2 = 1 - std::pow(beta2, static_cast<real>(t));
  for (std::size_t i = 0; i < n; ++i) {
    const real g = grad[i] + weight_decay * param[i];
    m[i] = beta1 * m[i] + (1 - beta1) * g;
    v[i] = beta2 * v[i] + (1 - beta2) * g * g;
    const real mhat = m[i] / bc1;
    const real vhat = v[i] / bc2;
    param[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

TrainReport train(const Matrix& features, const RunConfig& cfg,
                  const LabelVector* labels, const PlanProvider* external_plan) {
  validate(cfg);
  const std::size_t n = features.rows(), dim = features.cols();
  if (n < 2) throw DataError("training needs at least 2 samples");
  if (dim == 0) throw DataError("features must have dimension >= 1");
  if (!all_finite(features)) throw DataError("non-finite values in features");
  if (labels != nullptr && labels->size() != n)
    throw DataError("label count does not match feature rows");
  if (cfg.composition == CompositionKind::ExternalPlan && external_plan == nullptr)
    throw ConfigError("composition=external_plan requires a plan provider");

  TrainReport report;
  report.steps_per_epoch = steps_per_epoch(cfg, n);
  const long ramp_len =
      static_cast<long>(cfg.ramp_len_epochs) * static_cast<long>(report.steps_per_epoch);
  const RampUp ramp{cfg.lambda, ramp_len};

  Rng rng(cfg.seed);
  Model model = make_model(cfg, dim, rng);

  std::vector<ParamBuf> params = param_buffers(model);
  std::vector<std::vector<real>> vel, mom1, mom2;
  if (cfg.optimizer == OptimizerKind::Sgd) {
    for (const ParamBuf& b : params) vel.emplace_back(b.n, 0);
  } else {
    for (const ParamBuf& b : params) {
      mom1.emplace_back(b.n, 0);
      mom2.emplace_back(b.n, 0);
    }
  }
  long adam_t = 0;
  long step = 0;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    const real lr = lr_at(cfg, epoch);
    real sum_clus = 0, sum_cons = 0, sum_total = 0, last_omega = 0;
    std::size_t steps_done = 0;

    for (std::size_t pos = 0; pos < n; pos += cfg.batch_size) {
      const std::size_t bsize = std::min(cfg.batch_size, n - pos);
      if (bsize < 2) continue;  // pairwise losses degenerate at B=1
      if (cfg.similarity.kind == SimilarityKind::Knn && bsize <= cfg.similarity.k)
        continue;

      Matrix xb(bsize, dim);
      for (std::size_t i = 0; i < bsize; ++i)
        std::memcpy(xb.row(i), features.row(order[pos + i]), dim * sizeof(real));

      // Raw branch.
      BackboneForward bf1;
      const Matrix* feats = &xb;
      if (model.has_backbone) {
        bf1 = backbone_forward(model.backbone, xb);
        feats = &bf1.out;
      }
      const HeadForward hf1 = head_forward(model.head, *feats);

      // Pairwise labels from the raw branch, treated as constants.
      const Matrix& label_input =
          cfg.similarity.space == LabelSpace::Feature ? *feats : hf1.logits;
      const Adjacency a = build_adjacency(cfg.similarity, label_input);

      // Second branch: augmented copy, or the composite minibatch.
      Matrix xb2;
      Matrix targets;
      if (cfg.composition == CompositionKind::None) {
        xb2 = augment(xb, cfg.augment_mode, cfg.augment_strength, rng);
        targets = targets_from_adjacency(a);
      } else {
        CompositePlan plan;
        if (cfg.composition == CompositionKind::Mixup)
          plan = mixup_plan(bsize, cfg.beta_alpha, cfg.beta_beta, rng);
        else
          plan = (*external_plan)(bsize, step, rng);
        validate(plan, bsize);
        xb2 = apply_plan(xb, plan);
        targets = composite_targets(a, plan);
      }

      BackboneForward bf2;
      const Matrix* feats2 = &xb2;
      if (model.has_backbone) {
        bf2 = backbone_forward(model.backbone, xb2);
        feats2 = &bf2.out;
      }
      const HeadForward hf2 = head_forward(model.head, *feats2);

      const real omega = cfg.mse_enabled ? rampup_weight(ramp, step) : 0;
      const TotalLoss loss =
          total_loss(hf1.probs, hf2.probs, targets, omega, cfg.mse_enabled);
      if (step == 0) report.first_step_clustering = loss.clustering;

      Model grads = zero_like(model);
      const HeadGrad hg1 = head_backward(model.head, *feats, hf1, loss.dp);
      const HeadGrad hg2 = head_backward(model.head, *feats2, hf2, loss.dq);
      if (model.head.kind == HeadKind::TwoLayer) {
        add_grad(grads.head.l1, hg1.l1);
        add_grad(grads.head.l1, hg2.l1);
      }
      add_grad(grads.head.out, hg1.out);
      add_grad(grads.head.out, hg2.out);
      if (model.has_backbone) {
        const BackboneGrad bg1 = backbone_backward(model.backbone, xb, bf1, hg1.input);
        const BackboneGrad bg2 = backbone_backward(model.backbone, xb2, bf2, hg2.input);
        add_grad(grads.backbone.l1, bg1.l1);
        add_grad(grads.backbone.l1, bg2.l1);
        add_grad(grads.backbone.l2, bg1.l2);
        add_grad(grads.backbone.l2, bg2.l2);
      }

      const std::vector<ParamBuf> gbufs = param_buffers(grads);
      if (cfg.optimizer == OptimizerKind::Sgd) {
        for (std::size_t b = 0; b < params.size(); ++b)
          sgd_step(params[b].data, gbufs[b].data, vel[b].data(), params[b].n, lr,
                   cfg.momentum, cfg.weight_decay);
      } else {
        ++adam_t;
        for (std::size_t b = 0; b < params.size(); ++b)
          adam_step(params[b].data, gbufs[b].data, mom1[b].data(), mom2[b].data(),
                    params[b].n, adam_t, lr, cfg.adam_beta1, cfg.adam_beta2,
                    cfg.adam_eps, cfg.weight_decay);
      }

      sum_clus += loss.clustering;
      sum_cons += loss.consistency;
      sum_total += loss.total;
      last_omega = omega;
      ++steps_done;
      ++step;
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = lr;
    rec.omega = last_omega;
    rec.loss_clus = sum_clus / static_cast<real>(steps_done);
    rec.loss_cons = sum_cons / static_cast<real>(steps_done);
    rec.loss_total = sum_total / static_cast<real>(steps_done);
    if (labels != nullptr) {
      const LabelVector pred = argmax_rows(model_probs(model, features));
      rec.acc = clustering_accuracy(pred, *labels, cfg.k_clusters).acc;
    }
    report.records.push_back(std::move(rec));
  }

  report.total_steps = step;
  report.model = std::move(model);
  return report;
}

void write_report(std::ostream& os, const TrainReport& report) {
  std::string line;
  for (const EpochRecord& r : report.records) {
    line.clear();
    line += std::to_string(r.epoch);
    line += ',';
    format_real(line, r.lr);
    line += ',';
    format_real(line, r.omega);
    line += ',';
    format_real(line, r.loss_clus);
    line += ',';
    format_real(line, r.loss_cons);
    line += ',';
    format_real(line, r.loss_total);
    if (r.acc.has_value()) {
      line += ',';
      format_real(line, *r.acc);
    }
    line += '\n';
    os << line;
  }
}

std::string report_string(const TrainReport& report) {
  std::ostringstream os;
  write_report(os, report);
  return os.str();
}

void save_model(const std::string& path, const Model& model) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open output file: " + path);
  os.write(kMagic, 4);
  put_u32(os, 1);  // version
  put_u32(os, model.has_backbone ? 1u : 0u);
  put_u32(os, model.head.kind == HeadKind::TwoLayer ? 1u : 0u);
  if (model.has_backbone) {
    put_u32(os, static_cast<std::uint32_t>(model.backbone.l1.in_dim()));
    put_u32(os, static_cast<std::uint32_t>(model.backbone.l1.out_dim()));
    put_u32(os, static_cast<std::uint32_t>(model.backbone.l2.out_dim()));
  }
  put_u32(os, static_cast<std::uint32_t>(model.head.kind == HeadKind::TwoLayer
                                             ? model.head.l1.in_dim()
                                             : model.head.out.in_dim()));
  put_u32(os, static_cast<std::uint32_t>(
                  model.head.kind == HeadKind::TwoLayer ? model.head.l1.out_dim() : 0));
  put_u32(os, static_cast<std::uint32_t>(model.head.out.out_dim()));
  if (model.has_backbone) {
    put_payload(os, model.backbone.l1);
    put_payload(os, model.backbone.l2);
  }
  if (model.head.kind == HeadKind::TwoLayer) put_payload(os, model.head.l1);
  put_payload(os, model.head.out);
  if (!os) throw DataError("failed writing output file: " + path);
}

Model load_model(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open checkpoint: " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw DataError("bad magic in checkpoint: " + path);
  if (get_u32(is, path) != 1) throw DataError("unsupported checkpoint version: " + path);

  Model m;
  m.has_backbone = get_u32(is, path) == 1;
  const bool two_layer = get_u32(is, path) == 1;
  std::uint32_t bb_in = 0, bb_hidden = 0, bb_out = 0;
  if (m.has_backbone) {
    bb_in = get_u32(is, path);
    bb_hidden = get_u32(is, path);
    bb_out = get_u32(is, path);
  }
  const std::uint32_t head_in = get_u32(is, path);
  const std::uint32_t head_hidden = get_u32(is, path);
  const std::uint32_t k = get_u32(is, path);
  if (head_in == 0 || k < 2 || (two_layer && head_hidden == 0))
    throw DataError("invalid shape header in checkpoint: " + path);
  if (m.has_backbone && (bb_in == 0 || bb_hidden == 0 || bb_out != head_in))
    throw DataError("invalid shape header in checkpoint: " + path);

  const auto alloc = [](std::uint32_t in, std::uint32_t out) {
    Affine a;
    a.W = Matrix(in, out);
    a.b.assign(out, 0);
    return a;
  };
  if (m.has_backbone) {
    m.backbone.l1 = alloc(bb_in, bb_hidden);
    m.backbone.l2 = alloc(bb_hidden, bb_out);
    get_payload(is, m.backbone.l1, path);
    get_payload(is, m.backbone.l2, path);
  }
  m.head.kind = two_layer ? HeadKind::TwoLayer : HeadKind::Linear;
  if (two_layer) {
    m.head.l1 = alloc(head_in, head_hidden);
    get_payload(is, m.head.l1, path);
    m.head.out = alloc(head_hidden, k);
  } else {
    m.head.out = alloc(head_in, k);
  }
  get_payload(is, m.head.out, path);
  return m;
}

}  // namespace lsdc

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lsdc/config_file.hpp"
#include "lsdc/evaluation.hpp"
#include "lsdc/kernels.hpp"
#include "lsdc/kmeans.hpp"
#include "lsdc/trainer.hpp"

namespace {

struct CommonArgs {
  std::string config;
  std::vector<std::string> sets;
  std::string out;
  long long seed = -1;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config, "config file (key=value lines)")->required();
  cmd->add_option("--set", args.sets, "override a config key (KEY=VALUE, repeatable)");
  cmd->add_option("--seed", args.seed, "override the seed");
  cmd->add_option("--threads", args.threads, "override worker thread count");
  cmd->add_option("--out", args.out, "output path (command-specific)");
}

lsdc::ParsedConfig load(const CommonArgs& args) {
  lsdc::ParsedConfig cfg = lsdc::parse_config(args.config);
  for (const std::string& kv : args.sets) lsdc::apply_override(cfg, kv);
  if (args.seed >= 0)
    cfg.run.seed = static_cast<std::uint64_t>(args.seed);
  if (args.threads > 0) cfg.threads = args.threads;
  lsdc::finalize(cfg);
  lsdc::kernels::set_threads(cfg.threads);
  return cfg;
}

std::string fmt(lsdc::real v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", static_cast<double>(v));
  return buf;
}

int cmd_train(const CommonArgs& args) {
  lsdc::ParsedConfig cfg = load(args);
  lsdc::Rng data_rng(cfg.run.seed);
  const lsdc::Dataset ds = lsdc::realize_dataset(cfg.data, data_rng);

  const lsdc::LabelVector* labels = ds.labels ? &*ds.labels : nullptr;
  if (cfg.run.composition == lsdc::CompositionKind::ExternalPlan)
    throw lsdc::ConfigError(
        "composition=external_plan needs a plan provider and is not available "
        "from the command line");
  const lsdc::TrainReport report = lsdc::train(ds.features, cfg.run, labels);

  if (!cfg.report_path.empty()) {
    std::ofstream os(cfg.report_path);
    if (!os) throw lsdc::DataError("cannot open output file: " + cfg.report_path);
    lsdc::write_report(os, report);
  }
  const std::string ckpt = !args.out.empty() ? args.out : cfg.checkpoint_path;
  if (!ckpt.empty()) lsdc::save_model(ckpt, report.model);

  const lsdc::EpochRecord& last = report.records.back();
  std::cout << "epochs " << report.records.size() << " steps_per_epoch "
            << report.steps_per_epoch << "\n";
  std::cout << "loss_clus " << fmt(last.loss_clus) << " loss_cons "
            << fmt(last.loss_cons) << " loss_total " << fmt(last.loss_total) << "\n";
  if (labels != nullptr) {
    const lsdc::LabelVector pred =
        lsdc::argmax_rows(lsdc::model_probs(report.model, ds.features));
    const lsdc::AccuracyResult res =
        lsdc::clustering_accuracy(pred, *labels, cfg.run.k_clusters);
    std::cout << "acc " << fmt(res.acc) << "\n";
    if (!cfg.confusion_path.empty())
      lsdc::write_confusion_csv(
          cfg.confusion_path,
          lsdc::confusion(pred, *labels, res.mapping, cfg.run.k_clusters));
  }
  return 0;
}

int cmd_eval(const CommonArgs& args) {
  lsdc::ParsedConfig cfg = load(args);
  if (cfg.checkpoint_path.empty())
    throw lsdc::ConfigError("eval requires the 'checkpoint' config key");
  const lsdc::Model model = lsdc::load_model(cfg.checkpoint_path);
  lsdc::Rng data_rng(cfg.run.seed);
  const lsdc::Dataset ds = lsdc::realize_dataset(cfg.data, data_rng);
  if (lsdc::model_input_dim(model) != ds.features.cols())
    throw lsdc::DataError("checkpoint expects dimension " +
                          std::to_string(lsdc::model_input_dim(model)) +
                          " but features have " + std::to_string(ds.features.cols()));

  const lsdc::Matrix probs = lsdc::model_probs(model, ds.features);
  const lsdc::LabelVector pred = lsdc::argmax_rows(probs);
  const std::vector<std::size_t> confident =
      lsdc::confident_subset(probs, cfg.confident_threshold);
  std::cout << "samples " << probs.rows() << " clusters " << probs.cols() << "\n";
  std::cout << "confident_count " << confident.size() << " threshold "
            << fmt(cfg.confident_threshold) << "\n";

  if (ds.labels) {
    const std::size_t k = probs.cols();
    const lsdc::AccuracyResult res = lsdc::clustering_accuracy(pred, *ds.labels, k);
    std::cout << "acc " << fmt(res.acc) << "\n";
    if (!confident.empty()) {
      lsdc::LabelVector cpred, ctruth;
      for (const std::size_t i : confident) {
        cpred.push_back(pred[i]);
        ctruth.push_back((*ds.labels)[i]);
      }
      std::cout << "confident_acc "
                << fmt(lsdc::clustering_accuracy(cpred, ctruth, k).acc) << "\n";
    }
    const std::string confusion_path =
        !args.out.empty() ? args.out : cfg.confusion_path;
    if (!confusion_path.empty())
      lsdc::write_confusion_csv(confusion_path,
                                lsdc::confusion(pred, *ds.labels, res.mapping, k));
  }
  return 0;
}

int cmd_kmeans(const CommonArgs& args) {
  lsdc::ParsedConfig cfg = load(args);
  lsdc::Rng rng(cfg.run.seed);
  const lsdc::Dataset ds = lsdc::realize_dataset(cfg.data, rng);
  lsdc::KMeansConfig kc;
  kc.k = cfg.run.k_clusters;
  const lsdc::KMeansResult res = lsdc::kmeans(ds.features, kc, rng);
  std::cout << "inertia " << fmt(res.inertia) << " iterations " << res.iterations
            << (res.converged ? " converged" : " max_iter") << "\n";
  if (ds.labels) {
    const lsdc::real acc =
        lsdc::clustering_accuracy(res.labels, *ds.labels, kc.k).acc;
    std::cout << "acc " << fmt(acc) << "\n";
  }
  if (!args.out.empty()) {
    std::ofstream os(args.out);
    if (!os) throw lsdc::DataError("cannot open output file: " + args.out);
    for (const std::uint32_t c : res.labels) os << c << '\n';
  }
  return 0;
}

int cmd_gen(const CommonArgs& args) {
  lsdc::ParsedConfig cfg = load(args);
  if (args.out.empty()) throw lsdc::ConfigError("gen requires --out");
  if (cfg.data.source == lsdc::DataSource::File)
    throw lsdc::ConfigError("gen requires data.source=moons or blobs");
  lsdc::Rng rng(cfg.run.seed);
  const lsdc::Dataset ds = lsdc::realize_dataset(cfg.data, rng);
  lsdc::save_features(args.out, ds.features, ds.labels ? &*ds.labels : nullptr);
  std::cout << "wrote " << ds.features.rows() << " x " << ds.features.cols()
            << " to " << args.out << "\n";
  return 0;
}

int cmd_edges(const CommonArgs& args) {
  lsdc::ParsedConfig cfg = load(args);
  if (args.out.empty()) throw lsdc::ConfigError("edges requires --out");
  lsdc::Rng rng(cfg.run.seed);
  const lsdc::Dataset ds = lsdc::realize_dataset(cfg.data, rng);
  const lsdc::Adjacency a = lsdc::build_adjacency(cfg.run.similarity, ds.features);
  lsdc::write_edge_list(args.out, a);
  std::cout << "edges " << lsdc::undirected_edge_count(a) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pairwise pseudo-label clustering engine"};
  app.require_subcommand(1);

  CommonArgs train_args, eval_args, kmeans_args, gen_args, edges_args;
  CLI::App* train = app.add_subcommand("train", "train a clustering head");
  add_common(train, train_args);
  CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  add_common(eval, eval_args);
  CLI::App* km = app.add_subcommand("kmeans", "k-means baseline");
  add_common(km, kmeans_args);
  CLI::App* gen = app.add_subcommand("gen", "generate a toy dataset file");
  add_common(gen, gen_args);
  CLI::App* edges = app.add_subcommand("edges", "export a pairwise-label edge list");
  add_common(edges, edges_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (train->parsed()) return cmd_train(train_args);
    if (eval->parsed()) return cmd_eval(eval_args);
    if (km->parsed()) return cmd_kmeans(kmeans_args);
    if (gen->parsed()) return cmd_gen(gen_args);
    if (edges->parsed()) return cmd_edges(edges_args);
  } catch (const lsdc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const lsdc::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

#include "tasgnn/cli.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "tasgnn/baselines.hpp"
#include "tasgnn/checkpoint.hpp"
#include "tasgnn/config.hpp"
#include "tasgnn/error.hpp"
#include "tasgnn/evaluation.hpp"
#include "tasgnn/features.hpp"
#include "tasgnn/graph.hpp"
#include "tasgnn/labeling.hpp"
#include "tasgnn/model.hpp"
#include "tasgnn/synthetic.hpp"
#include "tasgnn/training.hpp"

namespace tasgnn {
namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config_file;
  std::vector<std::string> overrides;
  std::string data_dir;
  std::string work_dir;
  std::string input;
  std::string checkpoint;
  std::string output;
  std::string roles;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> k;
  std::optional<std::size_t> max_epochs;
};

RunConfig resolve_config(const Options& o) {
  RunConfig cfg = o.config_file.empty() ? RunConfig{} : load_run_config(o.config_file);
  apply_environment(cfg);
  for (const auto& s : o.overrides) apply_override(cfg, s);
  if (!o.data_dir.empty()) cfg.paths.data_dir = o.data_dir;
  if (!o.work_dir.empty()) cfg.paths.work_dir = o.work_dir;
  if (o.k) cfg.labeling.k = *o.k;
  if (o.max_epochs) cfg.train.max_epochs = *o.max_epochs;
  if (o.seed) cfg.train.model_seeds = {*o.seed};
  cfg.validate();
  return cfg;
}

void ensure_work_dir(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.paths.work_dir, ec);
  if (ec) fail(ErrorCategory::kIo, "cannot create work dir " + cfg.paths.work_dir + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorCategory::kIo, "cannot write " + path.string());
  f << text;
}

template <class Fn>
void write_with(const fs::path& path, Fn&& fn) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorCategory::kIo, "cannot write " + path.string());
  fn(f);
}

SignedGraph cached_graph(const RunConfig& cfg) {
  const fs::path p = cfg.work_path("graph.csv");
  if (!fs::exists(p)) fail(ErrorCategory::kIo, "no cached graph at " + p.string() + "; run `ingest` first");
  return load_edge_list(p);
}

LabelSet cached_labels(const RunConfig& cfg, const SignedGraph& graph) {
  const fs::path p = cfg.work_path("labels.csv");
  if (!fs::exists(p)) fail(ErrorCategory::kIo, "no labels at " + p.string() + "; run `label` first");
  LabelSet labels = load_labels(p);
  if (labels.labels.size() != graph.num_nodes())
    fail(ErrorCategory::kData, "labels.csv covers " + std::to_string(labels.labels.size()) +
                                   " nodes but the graph has " + std::to_string(graph.num_nodes()));
  return labels;
}

Checkpoint cached_checkpoint(const RunConfig& cfg, const Options& o) {
  const fs::path p = o.checkpoint.empty() ? cfg.work_path("checkpoint.json") : fs::path(o.checkpoint);
  if (!fs::exists(p)) fail(ErrorCategory::kIo, "checkpoint not found: " + p.string() + "; run `train` first");
  return load_checkpoint(p, cfg.model);
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

void cmd_ingest(const RunConfig& cfg, const Options& o, std::ostream& out) {
  const fs::path src = o.input.empty() ? cfg.edges_path() : fs::path(o.input);
  IngestAudit ingest;
  const SignedGraph graph = load_edge_list(src, cfg.ingest, &ingest);
  ensure_work_dir(cfg);
  save_edge_list(cfg.work_path("graph.csv"), graph);
  const std::string report = format_audit(audit_graph(graph, ingest));
  write_text(cfg.work_path("audit.txt"), report);
  out << "source: " << src.string() << '\n' << report;
}

void cmd_label(const RunConfig& cfg, std::ostream& out) {
  const SignedGraph graph = cached_graph(cfg);
  const LabelSet labels = generate_labels(graph, cfg.labeling);
  save_labels(cfg.work_path("labels.csv"), labels);
  const std::string summary = format_label_summary(label_report(labels));
  write_text(cfg.work_path("label_summary.txt"), summary);
  out << summary;
}

struct Prepared {
  SignedGraph graph;
  LabelSet labels;
  FeatureMatrix features;
  MessageGraph messages;
  SplitAssignment split;
};

Prepared prepare(const RunConfig& cfg) {
  SignedGraph graph = cached_graph(cfg);
  LabelSet labels = cached_labels(cfg, graph);
  FeatureMatrix features = assemble_features(graph, cfg.svd);
  MessageGraph messages = MessageGraph::build(graph);
  SplitAssignment split = make_splits(labels, cfg.train);
  return {std::move(graph), std::move(labels), std::move(features), std::move(messages), std::move(split)};
}

void cmd_train(const RunConfig& cfg, std::ostream& out) {
  const Prepared p = prepare(cfg);
  save_features(cfg.work_path("features.csv"), p.features);
  ModelConfig model = cfg.model;
  model.seed = cfg.train.model_seeds.front();
  const auto t0 = std::chrono::steady_clock::now();
  const TrainResult r =
      train(p.graph, p.messages, p.features.data, p.labels, p.split, model, cfg.train, cfg.loss);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  save_checkpoint(cfg.work_path("checkpoint.json"), {model, p.features.data.cols(), r.best});
  write_with(cfg.work_path("trainlog.jsonl"),
             [&](std::ostream& f) { write_train_log(f, r.log, cfg.train.log_timing); });
  out << "model seed " << model.seed << ": " << r.log.epochs.size() << " epochs, best epoch "
      << r.log.best_epoch << ", val AUC " << fixed(r.log.best_val_auc) << '\n';
  if (cfg.train.log_timing) out << "training time " << fixed(secs, 2) << " s\n";
  out << "split checksum " << std::hex << p.split.checksum() << std::dec << '\n';
}

void cmd_eval(const RunConfig& cfg, const Options& o, std::ostream& out) {
  const Checkpoint ck = cached_checkpoint(cfg, o);
  const Prepared p = prepare(cfg);
  if (ck.input_dim != p.features.data.cols())
    fail(ErrorCategory::kConfig, "checkpoint expects " + std::to_string(ck.input_dim) +
                                     " input features, pipeline produces " +
                                     std::to_string(p.features.data.cols()));
  const auto& test = p.split.test;
  std::vector<EvalReport> reports;

  const auto probs = predict(ck.params, ck.config, p.messages, p.features.data);
  reports.push_back(evaluate_probabilities("TAS-GNN", "test", probs, p.labels, test));
  reports.back().seed = ck.config.seed;

  const BaselineScore lowest = lowest_pct_heuristic(p.graph, cfg.eval.lowest_pct);
  reports.push_back(evaluate_scores("Lowest-5%", "test", lowest.score, lowest.flag, p.labels, test));
  const BaselineScore bad = badrank(p.graph, cfg.eval.badrank);
  reports.push_back(evaluate_scores("BadRank", "test", bad.score, bad.flag, p.labels, test));
  ModelConfig base = cfg.model;
  base.seed = ck.config.seed;
  const GcnBaseline gcn =
      unsigned_gcn(p.graph, p.messages, p.features.data, p.labels, p.split, base, cfg.train, cfg.loss);
  reports.push_back(evaluate_scores("GCN", "test", gcn.score.score, gcn.score.flag, p.labels, test));
  reports.back().seed = ck.config.seed;

  save_scores(cfg.work_path("scores_lowest_pct.csv"), lowest);
  save_scores(cfg.work_path("scores_badrank.csv"), bad);
  save_scores(cfg.work_path("scores_gcn.csv"), gcn.score);

  std::map<std::string, MethodSummary> measured;
  for (const auto& s : aggregate(reports)) measured[s.method] = s;
  std::vector<TableRow> rows;
  for (const auto& ref : reference_table()) {
    TableRow row{ref.category, ref.method, {}, false, ref.auc, ref.f1};
    if (auto it = measured.find(ref.method); it != measured.end()) {
      row.measured = it->second;
      row.has_measured = true;
    }
    rows.push_back(row);
  }
  const std::string table = render_comparison_table(rows);
  write_text(cfg.work_path("eval_table.txt"), table);
  nlohmann::ordered_json doc;
  doc["split_checksum"] = p.split.checksum();
  doc["reports"] = nlohmann::ordered_json::array();
  for (const auto& r : reports) doc["reports"].push_back(to_json(r));
  write_text(cfg.work_path("eval.json"), doc.dump(2) + "\n");
  out << table;
}

void cmd_ablate(const RunConfig& cfg, std::ostream& out) {
  const Prepared p = prepare(cfg);
  AblationInputs in;
  in.graph = &p.graph;
  in.features = &p.features;
  in.labels = &p.labels;
  in.model = cfg.model;
  in.train = cfg.train;
  in.loss = cfg.loss;
  in.random_feature_seed = cfg.random_feature_seed;
  const AblationSuite suite = run_ablation_suite(in, cfg.train.model_seeds);
  const std::string table = render_ablation_table(suite);
  write_text(cfg.work_path("ablation.txt"), table);
  nlohmann::ordered_json doc;
  doc["runs"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < suite.runs.size(); ++i) {
    auto j = to_json(suite.runs[i]);
    j["split_checksum"] = suite.split_checksums[i];
    doc["runs"].push_back(j);
  }
  doc["summary"] = nlohmann::ordered_json::array();
  for (const auto& s : suite.summary) doc["summary"].push_back(to_json(s));
  for (const auto& d : suite.drops)
    doc["drops"].push_back({{"variant", d.variant}, {"auc_pct", d.auc_pct}, {"f1_pct", d.f1_pct}});
  write_text(cfg.work_path("ablation.json"), doc.dump(2) + "\n");
  out << table;
}

void cmd_export(const RunConfig& cfg, const Options& o, std::ostream& out) {
  const Checkpoint ck = cached_checkpoint(cfg, o);
  const Prepared p = prepare(cfg);
  const EmbeddingExport e = export_embeddings(ck.params, ck.config, p.messages, p.features.data, p.labels);
  write_with(cfg.work_path("embeddings.csv"), [&](std::ostream& f) { write_embeddings(f, e.z, p.labels); });
  write_with(cfg.work_path("projection.csv"),
             [&](std::ostream& f) { write_projection(f, e.projection, p.labels); });
  out << "rows " << e.z.rows() << ", embedding dim " << e.z.cols() << '\n'
      << "centroid distance " << fixed(e.stats.centroid_distance) << ", mean intra-class distance "
      << fixed(e.stats.mean_intra_distance) << ", mean distance to own centroid "
      << fixed(e.stats.mean_intra_to_centroid) << '\n'
      << (e.stats.separated() ? "classes separated\n" : "classes not separated\n");
}

void cmd_synth(const RunConfig& cfg, const Options& o, std::ostream& out) {
  synthetic::Config sc;
  if (o.seed) sc.seed = *o.seed;
  const auto net = synthetic::generate(sc);
  const fs::path dst = o.output.empty() ? cfg.edges_path() : fs::path(o.output);
  if (dst.has_parent_path()) fs::create_directories(dst.parent_path());
  synthetic::save_csv(dst, net);
  if (!o.roles.empty()) synthetic::save_roles(o.roles, net);
  out << "wrote " << net.rows.size() << " ratings over " << sc.num_nodes << " nodes to " << dst.string()
      << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Signed-graph fraud detection pipeline", "tasgnn"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("-c,--config", o.config_file, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("-s,--set", o.overrides, "Override a config key: section.key=value (repeatable)");
  app.add_option("--data-dir", o.data_dir, "Directory holding the edge list (also $TASGNN_DATA_DIR)");
  app.add_option("--work-dir", o.work_dir, "Directory for all generated artifacts");
  app.add_option("--k", o.k, "Number of PageRank seeds for labeling");
  app.add_option("--max-epochs", o.max_epochs, "Training epoch cap");
  app.add_option("--seed", o.seed, "Model seed (train/eval/ablate) or generator seed (synth)");

  auto* ingest = app.add_subcommand("ingest", "Load, clean and audit the edge list");
  ingest->add_option("--input", o.input, "Edge list path; defaults to paths.data_dir/paths.edges_file");
  app.add_subcommand("label", "Select PageRank seeds and propagate labels");
  app.add_subcommand("train", "Build features, train, write checkpoint and log");
  auto* eval = app.add_subcommand("eval", "Score the test split against the baselines");
  eval->add_option("--checkpoint", o.checkpoint, "Checkpoint path; defaults to work_dir/checkpoint.json");
  app.add_subcommand("ablate", "Run the ablation suite over the configured seeds");
  auto* exp = app.add_subcommand("export", "Write embeddings and their 2-D projection");
  exp->add_option("--checkpoint", o.checkpoint, "Checkpoint path; defaults to work_dir/checkpoint.json");
  auto* synth = app.add_subcommand("synth", "Write a synthetic trust network in the ingest format");
  synth->add_option("--output", o.output, "Destination; defaults to paths.data_dir/paths.edges_file");
  synth->add_option("--roles", o.roles, "Also write the generating role of every node here");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::Success&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    for (auto& ch : msg)
      if (ch == '\n') ch = ' ';
    err << "error: usage: " << msg << '\n';
    return 2;
  }

  try {
    const RunConfig cfg = resolve_config(o);
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd != "synth" && cmd != "ingest") ensure_work_dir(cfg);
    if (cmd == "ingest") cmd_ingest(cfg, o, out);
    else if (cmd == "label") cmd_label(cfg, out);
    else if (cmd == "train") cmd_train(cfg, out);
    else if (cmd == "eval") cmd_eval(cfg, o, out);
    else if (cmd == "ablate") cmd_ablate(cfg, out);
    else if (cmd == "export") cmd_export(cfg, o, out);
    else if (cmd == "synth") cmd_synth(cfg, o, out);
  } catch (const Error& e) {
    err << "error: " << category_name(e.category()) << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace tasgnn

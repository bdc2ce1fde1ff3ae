// vscreen: virtual-screening toolkit CLI.
//
// Subcommands cover the full workflow: featurize molecules, generate
// synthetic collections, assign folds, train and evaluate multitask nets,
// run the growth-curve / tasks-vs-data / transfer studies, relate
// improvement to shared actives, and render summary tables.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
// Every subcommand takes --seed and --threads; seeds fully determine all
// randomized behavior, and --threads 1 is the determinism reference.
// Flags can also be set through VSCREEN_* environment variables.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "vscreen/chem/fingerprint.hpp"
#include "vscreen/chem/smiles.hpp"
#include "vscreen/core/csv.hpp"
#include "vscreen/core/parallel.hpp"
#include "vscreen/data/analysis.hpp"
#include "vscreen/data/collection.hpp"
#include "vscreen/data/folds.hpp"
#include "vscreen/data/synth.hpp"
#include "vscreen/experiments/analysis.hpp"
#include "vscreen/experiments/growth.hpp"
#include "vscreen/experiments/tasks_vs_data.hpp"
#include "vscreen/experiments/transfer.hpp"
#include "vscreen/net/checkpoint.hpp"
#include "vscreen/net/train.hpp"
#include "vscreen/stats/tests.hpp"

using namespace vscreen;

namespace {

constexpr std::uint64_t kDefaultSeed = 20150206;  // documented default

struct CommonArgs {
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 1;
  std::string out_dir;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--seed", args.seed, "64-bit seed for all randomized steps")
      ->envname("VSCREEN_SEED")
      ->capture_default_str();
  cmd->add_option("--threads", args.threads,
                  "worker threads (1 = determinism reference)")
      ->envname("VSCREEN_THREADS")
      ->capture_default_str();
  cmd->add_option("--out", args.out_dir, "output directory")
      ->envname("VSCREEN_OUT")
      ->required();
}

std::string out_path(const CommonArgs& args, const std::string& name) {
  std::filesystem::create_directories(args.out_dir);
  return (std::filesystem::path(args.out_dir) / name).string();
}

data::Collection load_any_collection(const std::string& manifest,
                                     const std::string& collection,
                                     unsigned threads = 1) {
  if (!manifest.empty() && !collection.empty())
    throw DataError("pass either --manifest or --collection, not both");
  if (!collection.empty()) return data::load_collection_file(collection);
  if (manifest.empty())
    throw DataError("one of --manifest or --collection is required");
  data::LoadResult res = data::load_collection(manifest, threads);
  for (const auto& [group, counts] : res.report.per_group)
    std::printf("featurization %s: %zu/%zu ok, failure rate %.2f%%\n",
                group.c_str(), counts.parsed, counts.total,
                100.0 * counts.failure_rate());
  for (const std::string& msg : res.report.messages)
    std::fprintf(stderr, "featurization failure: %s\n", msg.c_str());
  return std::move(res.collection);
}

net::NetworkConfig config_from_file_or_default(const std::string& path) {
  if (path.empty()) return experiments::desk_study_net();
  std::ifstream in(path);
  if (!in) throw DataError("cannot open network config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return net::NetworkConfig::from_json(ss.str());
}

void print_net_provenance(const net::NetworkConfig& cfg) {
  std::string hidden;
  for (std::size_t h : cfg.hidden_sizes)
    hidden += (hidden.empty() ? "" : ",") + std::to_string(h);
  std::printf(
      "net config: hidden=[%s] dropout=%.3g (%s) lr=%.4g batch=%zu "
      "init_std=%.3g init_bias=%.3g\n",
      hidden.c_str(), cfg.dropout_rate,
      cfg.dropout_all_layers ? "all layers" : "first layer", cfg.learning_rate,
      cfg.batch_size, cfg.init_std, cfg.init_bias);
}

std::optional<data::Group> parse_exclude_group(const std::string& name) {
  if (name.empty()) return {};
  return data::group_from_string(name);
}

int run_featurize(const std::string& in_path, const std::string& out_file,
                  unsigned radius, std::size_t nbits,
                  const std::string& format) {
  std::ifstream probe(in_path);
  if (!probe) throw DataError("cannot open input: " + in_path);
  std::string first_line;
  std::getline(probe, first_line);
  const bool csv_mode = first_line.find("smiles") != std::string::npos;
  probe.close();

  struct Row {
    std::string id;
    std::string smiles;
    std::string label;
  };
  std::vector<Row> rows;
  if (csv_mode) {
    CsvReader csv(in_path);
    const int col_smiles = csv.require_column("smiles");
    const int col_id = csv.column("compound_id");
    const int col_label = csv.column("label");
    std::vector<std::string> fields;
    while (csv.next(fields)) {
      Row r;
      r.smiles = fields[col_smiles];
      r.id = col_id >= 0 ? fields[col_id] : "mol" + std::to_string(rows.size());
      if (col_label >= 0) r.label = fields[col_label];
      rows.push_back(std::move(r));
    }
  } else {
    std::ifstream in(in_path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      rows.push_back({"mol" + std::to_string(rows.size()), line, ""});
    }
  }

  std::ofstream out(out_file);
  if (!out) throw DataError("cannot write output: " + out_file);
  nlohmann::json json_rows = nlohmann::json::array();
  if (format == "hex" || format == "sparse") {
    out << "compound_id,fingerprint";
    if (csv_mode) out << ",label";
    out << "\n";
  }

  std::size_t failed = 0;
  for (const Row& r : rows) {
    try {
      chem::Molecule mol = chem::parse_smiles(r.smiles);
      chem::Fingerprint fp = chem::ecfp(mol, radius, nbits);
      if (format == "hex") {
        out << csv_escape(r.id) << ',' << fp.to_hex();
        if (csv_mode) out << ',' << r.label;
        out << '\n';
      } else if (format == "sparse") {
        out << csv_escape(r.id) << ',';
        const auto bits = fp.on_bits();
        for (std::size_t i = 0; i < bits.size(); ++i)
          out << (i ? " " : "") << bits[i];
        if (csv_mode) out << ',' << r.label;
        out << '\n';
      } else {
        nlohmann::json item = {{"compound_id", r.id}, {"bits", fp.on_bits()}};
        if (csv_mode && !r.label.empty()) item["label"] = r.label;
        json_rows.push_back(std::move(item));
      }
    } catch (const chem::SmilesError& e) {
      ++failed;
      std::fprintf(stderr, "featurization failure %s: %s\n", r.id.c_str(),
                   e.what());
    }
  }
  if (format == "json") out << json_rows.dump(2) << "\n";
  std::printf("featurized %zu/%zu molecules, failure rate %.2f%%\n",
              rows.size() - failed, rows.size(),
              rows.empty() ? 0.0
                           : 100.0 * static_cast<double>(failed) /
                                 static_cast<double>(rows.size()));
  return 0;
}

int run_report(const std::vector<std::string>& report_paths,
               const std::string& reference_name,
               std::optional<data::Group> exclude,
               const std::string& out_dir) {
  if (report_paths.empty()) throw DataError("report needs --reports");
  std::vector<metrics::EvalReport> reports;
  for (const std::string& p : report_paths)
    reports.push_back(metrics::load_report_json(p));

  // the reference is the named model, or the last report
  std::size_t ref = reports.size() - 1;
  if (!reference_name.empty()) {
    bool found = false;
    for (std::size_t i = 0; i < reports.size(); ++i)
      if (reports[i].model == reference_name) {
        ref = i;
        found = true;
      }
    if (!found) throw DataError("reference model not found: " + reference_name);
  }

  const std::string exclude_name = exclude ? data::to_string(*exclude) : "";
  auto filtered_auc = [&](const metrics::EvalReport& r) {
    std::map<std::string, double> auc;
    for (const auto& [dataset, value] : metrics::dataset_kfold_auc(r))
      if (exclude_name.empty() ||
          metrics::group_of_dataset(r, dataset) != exclude_name)
        auc[dataset] = value;
    return auc;
  };
  const auto ref_auc = filtered_auc(reports[ref]);

  std::set<std::string> groups;
  for (const auto& r : reports)
    for (const auto& [group, mm] : metrics::group_auc_summary(r))
      groups.insert(group);

  std::printf("median K-fold-average AUC by group (reference: %s)\n",
              reports[ref].model.c_str());
  std::printf("%-28s", "model");
  for (const auto& g : groups) std::printf(" %8s", g.c_str());
  std::printf("  sign-test CI vs reference\n");

  std::ostringstream csv;
  csv << "model";
  for (const auto& g : groups) csv << ',' << g;
  csv << ",sign_wins,sign_losses,sign_ties,sign_ci_lo,sign_ci_hi\n";

  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto summary = metrics::group_auc_summary(reports[i]);
    std::printf("%-28s", reports[i].model.c_str());
    csv << reports[i].model;
    for (const auto& g : groups) {
      if (summary.count(g)) {
        std::printf(" %8.3f", summary.at(g).median);
        csv << ',' << summary.at(g).median;
      } else {
        std::printf(" %8s", "-");
        csv << ',';
      }
    }
    if (i == ref) {
      std::printf("\n");
      csv << ",,,,,\n";
      continue;
    }
    stats::PairedSample pair;
    for (const auto& [dataset, value] : filtered_auc(reports[i])) {
      auto it = ref_auc.find(dataset);
      if (it == ref_auc.end()) continue;
      pair.a.push_back(value);
      pair.b.push_back(it->second);
    }
    if (pair.a.empty()) {
      std::printf("  (no shared datasets)\n");
      csv << ",,,,,\n";
      continue;
    }
    const auto sign = stats::sign_test_wilson(pair);
    std::printf("  [%.2f, %.2f] (n=%d)\n", sign.ci.lo, sign.ci.hi,
                sign.wins + sign.losses);
    csv << ',' << sign.wins << ',' << sign.losses << ',' << sign.ties << ','
        << sign.ci.lo << ',' << sign.ci.hi << "\n";
  }

  std::ostringstream enr_csv;
  enr_csv << "model,group,metric,median\n";
  bool any_enrichment = false;
  for (const auto& r : reports) {
    for (const auto& [group, table] : metrics::group_enrichment_summary(r)) {
      for (const auto& [metric, median] : table) {
        any_enrichment = true;
        enr_csv << r.model << ',' << group << ',' << metric << ',' << median
                << "\n";
      }
    }
  }
  if (any_enrichment) {
    std::printf("\nmedian fold-mean enrichment by group:\n");
    for (const auto& r : reports) {
      for (const auto& [group, table] : metrics::group_enrichment_summary(r)) {
        std::printf("  %-24s %-8s", r.model.c_str(), group.c_str());
        for (const auto& [metric, median] : table)
          std::printf(" %s=%.1f", metric.c_str(), median);
        std::printf("\n");
      }
    }
  }

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream table(std::filesystem::path(out_dir) / "summary_table.csv");
    table << csv.str();
    if (any_enrichment) {
      std::ofstream enr(std::filesystem::path(out_dir) / "enrichment_table.csv");
      enr << enr_csv.str();
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vscreen: multitask neural-network virtual screening toolkit"};
  app.require_subcommand(1);

  auto* featurize = app.add_subcommand(
      "featurize", "compute circular fingerprints for SMILES inputs");
  std::string feat_in, feat_out, feat_format = "hex";
  unsigned feat_radius = 2;
  std::size_t feat_nbits = 1024;
  featurize
      ->add_option("--in", feat_in,
                   "input CSV (compound_id,smiles[,label]) or SMILES lines")
      ->required();
  featurize->add_option("--out", feat_out, "output file")->required();
  featurize->add_option("--radius", feat_radius, "fragment radius (2 = ECFP4)")
      ->capture_default_str();
  featurize
      ->add_option("--nbits", feat_nbits, "fingerprint length (power of two)")
      ->capture_default_str();
  featurize->add_option("--format", feat_format, "hex | sparse | json")
      ->check(CLI::IsMember({"hex", "sparse", "json"}))
      ->capture_default_str();

  auto* synth = app.add_subcommand(
      "synth", "generate a synthetic labeled collection with planted motifs");
  CommonArgs synth_args;
  data::SynthSpec synth_spec;
  std::string synth_out;
  synth->add_option("--out", synth_out, "output collection file")->required();
  synth->add_option("--tasks", synth_spec.n_tasks)->capture_default_str();
  synth->add_option("--compounds", synth_spec.n_compounds)->capture_default_str();
  synth->add_option("--active-rate", synth_spec.active_rate)
      ->capture_default_str();
  synth->add_option("--shared-motifs", synth_spec.shared_motif_count)
      ->capture_default_str();
  synth->add_option("--nbits", synth_spec.nbits)->capture_default_str();
  synth->add_option("--flip-rate", synth_spec.flip_rate)->capture_default_str();
  synth->add_option("--sigma-max", synth_spec.sigma_max,
                    "top task's shared fraction of actives")
      ->capture_default_str();
  synth->add_option("--bg-density", synth_spec.bg_density)
      ->capture_default_str();
  synth->add_option("--motif-bits", synth_spec.motif_bits)
      ->capture_default_str();
  synth->add_option("--held-in", synth_spec.held_in_count)->capture_default_str();
  synth->add_option("--holdout-shared", synth_spec.n_holdout_shared)
      ->capture_default_str();
  synth->add_option("--holdout-disjoint", synth_spec.n_holdout_disjoint)
      ->capture_default_str();
  synth->add_option("--duplicate-pairs", synth_spec.n_duplicate_pairs)
      ->capture_default_str();
  synth->add_option("--seed", synth_args.seed)
      ->envname("VSCREEN_SEED")
      ->capture_default_str();

  auto* split =
      app.add_subcommand("split", "assign stratified cross-validation folds");
  CommonArgs split_args;
  std::string split_manifest, split_collection, split_out;
  int split_folds = 5;
  split->add_option("--manifest", split_manifest, "dataset manifest JSON");
  split->add_option("--collection", split_collection, "collection file");
  split->add_option("--out", split_out, "output CSV")->required();
  split->add_option("--folds", split_folds)->capture_default_str();
  split->add_option("--seed", split_args.seed)
      ->envname("VSCREEN_SEED")
      ->capture_default_str();

  auto* train_cmd = app.add_subcommand(
      "train", "train one multitask network on a collection");
  CommonArgs train_args;
  std::string train_manifest, train_collection, train_config, train_single;
  int train_exclude_fold = -1;
  int train_fold_count = 5;
  train_cmd->add_option("--manifest", train_manifest);
  train_cmd->add_option("--collection", train_collection);
  train_cmd->add_option("--config", train_config, "network config JSON");
  train_cmd->add_option("--single-task", train_single,
                        "train a single-task net for this dataset only");
  train_cmd->add_option("--exclude-fold", train_exclude_fold,
                        "hold out this fold from training");
  train_cmd->add_option("--folds", train_fold_count)->capture_default_str();
  add_common(train_cmd, train_args);

  auto* eval_cmd = app.add_subcommand(
      "evaluate", "K-fold cross-validated evaluation producing a report");
  CommonArgs eval_args;
  std::string eval_manifest, eval_collection, eval_config;
  std::string eval_model = "multitask";
  std::string eval_exclude;
  int eval_folds = 5;
  bool eval_single = false;
  bool eval_enrichment = true;
  double eval_epochs = 5.0;
  std::size_t eval_floor = 500, eval_cap = 200000;
  eval_cmd->add_option("--manifest", eval_manifest);
  eval_cmd->add_option("--collection", eval_collection);
  eval_cmd->add_option("--config", eval_config);
  eval_cmd->add_option("--folds", eval_folds)->capture_default_str();
  eval_cmd->add_flag("--single-task", eval_single,
                     "independent per-dataset nets instead of one multitask net");
  eval_cmd->add_flag("!--no-enrichment", eval_enrichment,
                     "skip enrichment metrics");
  eval_cmd->add_option("--model-name", eval_model)->capture_default_str();
  eval_cmd->add_option("--exclude-group", eval_exclude,
                       "drop this dataset group (e.g. DUDE)");
  eval_cmd->add_option("--epochs", eval_epochs, "training passes over the pool")
      ->capture_default_str();
  eval_cmd->add_option("--floor-steps", eval_floor)->capture_default_str();
  eval_cmd->add_option("--cap-steps", eval_cap)->capture_default_str();
  add_common(eval_cmd, eval_args);

  auto* growth_cmd = app.add_subcommand(
      "growth-curve", "multitask improvement vs number of training tasks");
  CommonArgs growth_args;
  std::string growth_manifest, growth_collection, growth_spec_path;
  bool growth_keep_ckpt = false;
  growth_cmd->add_option("--manifest", growth_manifest);
  growth_cmd->add_option("--collection", growth_collection);
  growth_cmd->add_option("--spec", growth_spec_path, "study spec JSON");
  growth_cmd->add_flag("--checkpoints", growth_keep_ckpt,
                       "save every (run, rung, fold) source network");
  add_common(growth_cmd, growth_args);

  auto* tvd_cmd = app.add_subcommand(
      "tasks-vs-data", "multitask improvement vs tasks and data budgets");
  CommonArgs tvd_args;
  std::string tvd_manifest, tvd_collection, tvd_spec_path;
  tvd_cmd->add_option("--manifest", tvd_manifest);
  tvd_cmd->add_option("--collection", tvd_collection);
  tvd_cmd->add_option("--spec", tvd_spec_path, "study spec JSON");
  add_common(tvd_cmd, tvd_args);

  auto* transfer_cmd = app.add_subcommand(
      "transfer", "initialize held-out single-task nets from multitask weights");
  CommonArgs transfer_args;
  std::string tr_manifest, tr_collection, tr_spec_path, tr_ckpt_dir;
  transfer_cmd->add_option("--manifest", tr_manifest);
  transfer_cmd->add_option("--collection", tr_collection);
  transfer_cmd->add_option("--spec", tr_spec_path, "study spec JSON");
  transfer_cmd->add_option("--checkpoints", tr_ckpt_dir,
                           "growth-curve checkpoint directory to source from");
  add_common(transfer_cmd, transfer_args);

  auto* aor_cmd = app.add_subcommand(
      "aor", "active occurrence rate vs multitask improvement");
  CommonArgs aor_args;
  std::string aor_manifest, aor_collection, aor_mt, aor_st, aor_exclude;
  aor_cmd->add_option("--manifest", aor_manifest);
  aor_cmd->add_option("--collection", aor_collection);
  aor_cmd->add_option("--multitask", aor_mt, "multitask report JSON")->required();
  aor_cmd->add_option("--single-task", aor_st, "single-task report JSON")
      ->required();
  aor_cmd->add_option("--exclude-group", aor_exclude)->capture_default_str();
  add_common(aor_cmd, aor_args);

  auto* report_cmd = app.add_subcommand(
      "report", "render summary tables from evaluation reports");
  std::vector<std::string> report_files;
  std::string report_reference, report_exclude, report_out;
  report_cmd->add_option("--reports", report_files, "evaluation report JSONs")
      ->required();
  report_cmd->add_option("--reference", report_reference,
                         "model name the sign test compares against "
                         "(default: last report)");
  report_cmd->add_option("--exclude-group", report_exclude)
      ->capture_default_str();
  report_cmd->add_option("--out", report_out, "optional output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*featurize)
      return run_featurize(feat_in, feat_out, feat_radius, feat_nbits,
                           feat_format);

    if (*synth) {
      synth_spec.seed = synth_args.seed;
      data::Collection c = data::synth_collection(synth_spec);
      data::save_collection(c, synth_out);
      std::size_t records = 0;
      for (const auto& d : c.datasets) records += d.records.size();
      std::printf("wrote %zu datasets (%zu records) to %s\n",
                  c.datasets.size(), records, synth_out.c_str());
      return 0;
    }

    if (*split) {
      data::Collection c = load_any_collection(split_manifest, split_collection);
      auto folds = data::assign_folds(c, split_folds, split_args.seed);
      std::ofstream out(split_out);
      if (!out) throw DataError("cannot write fold CSV: " + split_out);
      out << "dataset_id,compound_id,fold\n";
      for (const data::Dataset& d : c.datasets) {
        const auto& fa = folds.at(d.id);
        if (fa.low_active_warning)
          std::fprintf(stderr, "warning: %s has fewer actives than folds\n",
                       d.id.c_str());
        for (std::size_t i = 0; i < d.records.size(); ++i)
          out << csv_escape(d.id) << ','
              << csv_escape(d.records[i].compound_id) << ',' << fa.fold_of[i]
              << '\n';
      }
      return 0;
    }

    if (*train_cmd) {
      data::Collection c = load_any_collection(train_manifest, train_collection, train_args.threads);
      net::NetworkConfig cfg = config_from_file_or_default(train_config);
      cfg.input_dim = c.nbits;
      cfg.seed = train_args.seed;
      cfg.n_workers = train_args.threads;
      std::vector<std::string> ids =
          train_single.empty() ? c.dataset_ids()
                               : std::vector<std::string>{train_single};
      cfg.n_tasks = ids.size();
      print_net_provenance(cfg);

      std::map<std::string, data::FoldAssignment> folds;
      const std::map<std::string, data::FoldAssignment>* folds_ptr = nullptr;
      if (train_exclude_fold >= 0) {
        folds = data::assign_folds(c, train_fold_count, train_args.seed);
        folds_ptr = &folds;
      }
      net::TrainSet ts =
          net::build_train_set(c, ids, folds_ptr, train_exclude_fold);
      net::MultitaskNetwork model = net::init(cfg);
      std::vector<net::StepLog> log;
      net::TrainOptions opts;
      opts.log = &log;
      net::train(model, ts, opts);

      net::save_checkpoint(model, out_path(train_args, "checkpoint.bin"));
      std::ofstream curve(out_path(train_args, "curve.csv"));
      curve << "step,loss\n";
      char buf[64];
      for (const auto& entry : log) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", entry.step, entry.loss);
        curve << buf;
      }
      std::printf("trained %zu steps on %zu examples; checkpoint in %s\n",
                  cfg.n_steps, ts.examples.size(), train_args.out_dir.c_str());
      return 0;
    }

    if (*eval_cmd) {
      data::Collection c = load_any_collection(eval_manifest, eval_collection, eval_args.threads);
      auto exclude = parse_exclude_group(eval_exclude);
      std::vector<std::string> ids;
      for (const data::Dataset& d : c.datasets)
        if (!exclude || d.group != *exclude) ids.push_back(d.id);

      net::NetworkConfig cfg = config_from_file_or_default(eval_config);
      cfg.seed = eval_args.seed;
      print_net_provenance(cfg);
      experiments::StepPolicy steps{eval_epochs, eval_floor, eval_cap};
      experiments::EvalProtocol protocol;
      protocol.folds = eval_folds;
      protocol.fold_seed = eval_args.seed;
      protocol.with_enrichment = eval_enrichment;
      protocol.threads = eval_args.threads;

      metrics::EvalReport report =
          eval_single ? experiments::evaluate_singletask(c, ids, cfg, steps,
                                                         protocol, eval_model)
                      : experiments::evaluate_multitask(c, ids, cfg, steps,
                                                        protocol, eval_model);
      metrics::save_report_json(report, out_path(eval_args, "report.json"));
      metrics::save_report_csv(report, out_path(eval_args, "report.csv"));
      for (const auto& [group, mm] : metrics::group_auc_summary(report))
        std::printf("%s: mean %.4f median %.4f K-fold-average AUC\n",
                    group.c_str(), mm.mean, mm.median);
      return 0;
    }

    if (*growth_cmd) {
      data::Collection c =
          load_any_collection(growth_manifest, growth_collection, growth_args.threads);
      experiments::GrowthCurveSpec spec;
      if (!growth_spec_path.empty()) {
        std::ifstream in(growth_spec_path);
        if (!in) throw DataError("cannot open spec: " + growth_spec_path);
        std::stringstream ss;
        ss << in.rdbuf();
        spec = experiments::GrowthCurveSpec::from_json(ss.str());
      } else {
        spec.net = experiments::desk_study_net();
      }
      spec.seed = growth_args.seed;
      if (growth_keep_ckpt)
        spec.checkpoint_dir = out_path(growth_args, "checkpoints");
      print_net_provenance(spec.net);
      experiments::StudyResult result =
          experiments::run_growth_curve(spec, c, growth_args.threads);
      experiments::save_study_csv(result, out_path(growth_args, "study.csv"));
      experiments::save_study_summary_json(
          result, out_path(growth_args, "summary.json"));
      for (const auto& [key, value] : result.summary)
        std::printf("%s = %.6f\n", key.c_str(), value);
      return 0;
    }

    if (*tvd_cmd) {
      data::Collection c = load_any_collection(tvd_manifest, tvd_collection, tvd_args.threads);
      if (tvd_spec_path.empty())
        throw DataError(
            "tasks-vs-data requires --spec (budgets are data-dependent)");
      std::ifstream in(tvd_spec_path);
      if (!in) throw DataError("cannot open spec: " + tvd_spec_path);
      std::stringstream ss;
      ss << in.rdbuf();
      experiments::TasksVsDataSpec spec =
          experiments::TasksVsDataSpec::from_json(ss.str());
      spec.seed = tvd_args.seed;
      print_net_provenance(spec.net);
      experiments::StudyResult result =
          experiments::run_tasks_vs_data(spec, c, tvd_args.threads);
      experiments::save_study_csv(result, out_path(tvd_args, "study.csv"));
      experiments::save_study_summary_json(result,
                                           out_path(tvd_args, "summary.json"));
      for (const auto& [key, value] : result.summary)
        std::printf("%s = %.6f\n", key.c_str(), value);
      return 0;
    }

    if (*transfer_cmd) {
      data::Collection c = load_any_collection(tr_manifest, tr_collection, transfer_args.threads);
      experiments::TransferSpec spec;
      if (!tr_spec_path.empty()) {
        std::ifstream in(tr_spec_path);
        if (!in) throw DataError("cannot open spec: " + tr_spec_path);
        std::stringstream ss;
        ss << in.rdbuf();
        spec = experiments::TransferSpec::from_json(ss.str());
      } else {
        spec.net = experiments::desk_study_net();
      }
      spec.seed = transfer_args.seed;
      print_net_provenance(spec.net);

      experiments::SourceProvider provider = nullptr;
      if (!tr_ckpt_dir.empty()) {
        provider = [dir = tr_ckpt_dir](std::size_t run, std::size_t rung,
                                       int fold) {
          const std::string path =
              dir + "/" + experiments::growth_checkpoint_name(run, rung, fold);
          return net::load_checkpoint(path);
        };
      }
      experiments::StudyResult result =
          experiments::run_transfer(spec, c, provider, transfer_args.threads);
      experiments::save_study_csv(result, out_path(transfer_args, "study.csv"));
      experiments::save_study_summary_json(
          result, out_path(transfer_args, "summary.json"));
      for (const auto& [key, value] : result.summary)
        std::printf("%s = %.6f\n", key.c_str(), value);
      return 0;
    }

    if (*aor_cmd) {
      data::Collection c = load_any_collection(aor_manifest, aor_collection, aor_args.threads);
      auto exclude = parse_exclude_group(aor_exclude);
      metrics::EvalReport mt = metrics::load_report_json(aor_mt);
      metrics::EvalReport st = metrics::load_report_json(aor_st);
      experiments::AorAnalysis analysis =
          experiments::run_aor_analysis(mt, st, c, exclude);
      experiments::save_aor_csv(analysis, out_path(aor_args, "aor.csv"));
      {
        const auto m = data::intersection_matrix(c);
        std::ofstream inter(out_path(aor_args, "intersections.csv"));
        inter << "dataset";
        for (const auto& d : c.datasets) inter << ',' << csv_escape(d.id);
        inter << '\n';
        char cell[32];
        for (std::size_t x = 0; x < m.size(); ++x) {
          inter << csv_escape(c.datasets[x].id);
          for (std::size_t y = 0; y < m.size(); ++y) {
            std::snprintf(cell, sizeof(cell), ",%.6g", m[x][y]);
            inter << cell;
          }
          inter << '\n';
        }
      }
      experiments::ClassDuplicateResult classes =
          experiments::run_class_and_duplicate_analysis(mt, st, c, exclude);
      experiments::save_class_duplicate_json(
          classes, out_path(aor_args, "class_duplicate.json"));
      std::printf("AOR vs delta log-odds r^2 = %.4f over %zu datasets\n",
                  analysis.r2, analysis.points.size());
      if (classes.duplicates.applicable)
        std::printf(
            "duplicate mean delta %.4f vs unique %.4f (one-sided p=%.4g)\n",
            classes.duplicates.mean_delta_duplicate,
            classes.duplicates.mean_delta_unique,
            classes.duplicates.welch_one_sided.p);
      else
        std::printf(
            "duplicate-vs-unique comparison skipped: all targets unique\n");
      return 0;
    }

    if (*report_cmd)
      return run_report(report_files, report_reference,
                        parse_exclude_group(report_exclude), report_out);
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return 3;
  } catch (const chem::SmilesError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 2;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}

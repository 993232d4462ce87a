#include "cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "fnd/checkpoint.hpp"
#include "fnd/config.hpp"
#include "fnd/earliness.hpp"
#include "fnd/edge_features.hpp"
#include "fnd/ingestion.hpp"
#include "fnd/pipeline.hpp"

namespace fnd::cli {
namespace fs = std::filesystem;

namespace {

constexpr const char* kOutputRootEnv = "FND_OUTPUT_ROOT";

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct CommonOptions {
  std::string data;
  std::string config;
  std::string preset;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<int> epochs;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--data", o.data, "Dataset directory (articles.tsv, engagements.tsv, features.txt)")->required();
  cmd->add_option("--config", o.config, "Config file");
  cmd->add_option("--preset", o.preset, "politifact or gossipcop; applied after --config");
  cmd->add_option("--set", o.overrides, "section.key=value override, repeatable");
  cmd->add_option("--seed", o.seed, "Seed for every random stream");
  cmd->add_option("--epochs", o.epochs, "Training epochs");
  cmd->add_option("--out", o.out, "Run directory (default: $" + std::string(kOutputRootEnv) + "/<timestamp>-seed<seed>)");
}

RunConfig assemble_config(const CommonOptions& o, const std::optional<fs::path>& fallback = std::nullopt) {
  RunConfig cfg;
  if (!o.config.empty()) {
    cfg = load_config(o.config);
  } else if (fallback && fs::exists(*fallback)) {
    cfg = load_config(*fallback);
  }
  if (!o.preset.empty()) set_config_value(cfg, "run.preset", o.preset);
  for (const auto& kv : o.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects section.key=value, got '" + kv + "'");
    set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (o.seed) cfg.train.seed = *o.seed;
  if (o.epochs) cfg.train.epochs = *o.epochs;
  cfg.train.check();
  return cfg;
}

fs::path resolve_run_dir(const std::string& out, std::uint64_t seed) {
  if (!out.empty()) {
    fs::create_directories(out);
    return out;
  }
  const char* env = std::getenv(kOutputRootEnv);
  const fs::path root = env && *env ? fs::path(env) : fs::path("runs");
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y%m%d-%H%M%S", &tm);
  const std::string base = std::string(stamp) + "-seed" + std::to_string(seed);
  fs::path dir = root / base;
  for (int k = 1; fs::exists(dir); ++k) dir = root / (base + "-" + std::to_string(k));
  fs::create_directories(dir);
  return dir;
}

void write_manifest(const fs::path& dir, const std::string& command, const fs::path& data, const Dataset& dataset,
                    const RunConfig& cfg) {
  std::ofstream os(dir / "manifest.ini");
  if (!os) throw std::runtime_error("cannot write manifest in " + dir.string());
  os << "[manifest]\n";
  os << "command = " << command << '\n';
  os << "version = " << FND_VERSION << '\n';
  os << "data = " << fs::absolute(data).string() << '\n';
  os << "fingerprint = " << fingerprint(dataset) << '\n';
  os << "seed = " << cfg.train.seed << '\n';
  os << "output = " << fs::absolute(dir).string() << "\n\n";
  os << to_config_text(cfg);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : "NA"; }

void write_metrics(const fs::path& path, const std::vector<std::pair<std::string, EvalReport>>& reports) {
  std::ofstream os(path);
  os << "band\tacc\tf1\ttp\tfp\ttn\tfn\thomophily_before\thomophily_after\n";
  for (const auto& [band, r] : reports) {
    os << band << '\t' << fmt(r.accuracy) << '\t' << fmt(r.f1) << '\t' << r.tp << '\t' << r.fp << '\t' << r.tn << '\t' << r.fn
       << '\t' << fmt(r.homophily_original) << '\t' << fmt(r.homophily_reweighted) << '\n';
  }
}

struct Prepared {
  Dataset dataset;
  Corpus corpus;
  RunConfig config;
  fs::path dir;
};

Prepared prepare(const std::string& command, const CommonOptions& o,
                 const std::optional<fs::path>& fallback_config = std::nullopt) {
  RunConfig cfg = assemble_config(o, fallback_config);
  Dataset d = load_dataset_dir(o.data);
  Corpus corpus(d);
  const fs::path dir = resolve_run_dir(o.out, cfg.train.seed);
  write_manifest(dir, command, o.data, d, cfg);
  return {std::move(d), std::move(corpus), std::move(cfg), dir};
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int cmd_generate(const SyntheticSpec& spec, const std::string& out_dir, std::ostream& out) {
  try {
    spec.check();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const Dataset d = generate_synthetic(spec);
  write_dataset(d, out_dir);
  std::ofstream os(fs::path(out_dir) / "manifest.ini");
  os << "[manifest]\n";
  os << "command = generate\n";
  os << "version = " << FND_VERSION << '\n';
  os << "fingerprint = " << fingerprint(d) << "\n\n[synthetic]\n";
  os << "n_articles = " << spec.n_articles << '\n';
  os << "fake_fraction = " << spec.fake_fraction << '\n';
  os << "n_users = " << spec.n_users << '\n';
  os << "engagements_mean = " << spec.engagements_mean << '\n';
  os << "engagements_dispersion = " << spec.engagements_dispersion << '\n';
  os << "early_bias = " << spec.early_bias << '\n';
  os << "late_bias = " << spec.late_bias << '\n';
  os << "user_effect = " << spec.user_effect << '\n';
  os << "deadline_seconds = " << spec.deadline_seconds << '\n';
  os << "feature_dim = " << spec.feature_dim << '\n';
  os << "separation = " << spec.separation << '\n';
  os << "seed = " << spec.seed << '\n';
  out << "wrote " << d.articles.size() << " articles, " << d.engagements.size() << " engagements to " << out_dir
      << " (fingerprint " << fingerprint(d) << ")\n";
  return 0;
}

int cmd_ingest(const std::string& data, const std::string& out_dir, std::ostream& out) {
  const Dataset d = load_dataset_dir(data);
  const Corpus corpus(d);
  std::size_t labeled = 0, fake = 0;
  for (const auto& a : d.articles) {
    if (a.label) {
      ++labeled;
      if (*a.label == Veracity::fake) ++fake;
    }
  }
  out << "articles\t" << corpus.num_articles() << '\n';
  out << "labeled\t" << labeled << '\n';
  out << "fake\t" << fake << '\n';
  out << "users\t" << corpus.num_users() << '\n';
  out << "engagements\t" << corpus.num_engagements() << '\n';
  out << "feature_dim\t" << corpus.feature_dim() << '\n';
  out << "fingerprint\t" << fingerprint(d) << '\n';
  if (!out_dir.empty()) write_dataset(d, out_dir);
  return 0;
}

int cmd_split(const CommonOptions& o, std::ostream& out) {
  const Prepared p = prepare("split", o);
  const TemporalSplit split = make_split(p.corpus, p.config);
  const auto bands = prepare_bands(p.corpus, split, p.config.train.earliness);
  std::ofstream os(p.dir / "bands.tsv");
  os << "band\tcut\tarticles\tengagements\tactive_users\tnodes\tedges\n";
  std::ofstream membership(p.dir / "article_bands.tsv");
  membership << "article\tband\n";
  for (Band b : kBands) {
    const BandSet& s = split[b];
    const BandData& d = bands[static_cast<std::size_t>(b)];
    os << to_string(b) << '\t' << s.cut << '\t' << s.articles.size() << '\t' << s.engagements.size() << '\t' << s.users.size()
       << '\t' << d.graph.num_nodes() << '\t' << d.graph.num_edges() << '\n';
    for (int a : s.articles) membership << p.corpus.article_id(a) << '\t' << to_string(b) << '\n';
    const std::string name(to_string(b));
    write_graph_tsv(d.graph, p.corpus, p.dir / ("graph_" + name + "_edges.tsv"), p.dir / ("graph_" + name + "_nodes.tsv"));
  }
  out << "split written to " << p.dir.string() << '\n';
  return 0;
}

int cmd_analyze(const CommonOptions& o, const std::string& band, int bins, std::ostream& out) {
  if (bins < 2) throw UsageError("--bins must be at least 2");
  const Prepared p = prepare("analyze", o);
  EarlinessConfig ecfg = p.config.train.earliness;
  std::vector<int> engagements;
  std::optional<std::array<BandData, 3>> bands;
  Band chosen = Band::train;
  if (band == "all") {
    engagements.resize(p.corpus.num_engagements());
    for (std::size_t e = 0; e < engagements.size(); ++e) engagements[e] = static_cast<int>(e);
  } else {
    if (band == "train") {
      chosen = Band::train;
    } else if (band == "val") {
      chosen = Band::val;
    } else if (band == "test") {
      chosen = Band::test;
    } else {
      throw UsageError("--band must be all, train, val or test");
    }
    const TemporalSplit split = make_split(p.corpus, p.config);
    engagements = split[chosen].engagements;
    bands = prepare_bands(p.corpus, split, ecfg);
  }
  const auto grouped = grouped_fna_scores(p.corpus, engagements, ecfg);
  write_fna_tables(grouped, bins, p.dir);
  std::ofstream os(p.dir / "skewness.tsv");
  os << "group\tusers\tskewness\n";
  for (const auto& [group, scores] : grouped) {
    const auto values = score_values(scores);
    os << group << '\t' << values.size() << '\t' << fmt(skewness(values)) << '\n';
  }
  if (bands) {
    const BandData& d = (*bands)[static_cast<std::size_t>(chosen)];
    write_edge_features_tsv(d.features, d.graph, p.corpus, p.dir / ("edge_features_" + band + ".tsv"));
  }
  out << "analysis written to " << p.dir.string() << '\n';
  return 0;
}

int cmd_train(const CommonOptions& o, std::ostream& out) {
  const Prepared p = prepare("train", o);
  const TrainConfig& tc = p.config.train;
  const TemporalSplit split = make_split(p.corpus, p.config);
  auto bands = prepare_bands(p.corpus, split, tc.earliness);
  assign_edge_inputs(bands, tc);
  const TrainResult res = train(bands[0], bands[1], tc);
  write_history_tsv(res.history, p.dir / "history.tsv");
  Checkpoint ckpt{{{"best_epoch", std::to_string(res.best_epoch)},
                   {"fingerprint", fingerprint(p.dataset)},
                   {"seed", std::to_string(tc.seed)},
                   {"version", FND_VERSION}},
                  res.params};
  save_checkpoint(ckpt, p.dir / "checkpoint.txt");
  const EvalReport val = evaluate(res.params, bands[1], tc);
  const EvalReport test = evaluate(res.params, bands[2], tc);
  write_metrics(p.dir / "metrics.tsv", {{"val", val}, {"test", test}});
  out << "best epoch " << res.best_epoch << ", test acc " << fmt(test.accuracy) << ", test f1 " << fmt(test.f1) << '\n';
  out << "run written to " << p.dir.string() << '\n';
  return 0;
}

int cmd_evaluate(const CommonOptions& o, const std::string& checkpoint, std::ostream& out) {
  const fs::path ckpt_path(checkpoint);
  const Checkpoint ckpt = load_checkpoint(ckpt_path);
  const Prepared p = prepare("evaluate", o, ckpt_path.parent_path() / "manifest.ini");
  const TrainConfig& tc = p.config.train;
  const TemporalSplit split = make_split(p.corpus, p.config);
  auto bands = prepare_bands(p.corpus, split, tc.earliness);
  assign_edge_inputs(bands, tc);
  const BandData& test = bands[2];
  const EvalReport report = evaluate(ckpt.params, test, tc);
  write_metrics(p.dir / "metrics.tsv", {{"test", report}});
  const Inference inf = infer(ckpt.params, test, tc);
  std::ofstream os(p.dir / "predictions.tsv");
  os << "article\tpredicted\tp_fake\tlabel\n";
  for (std::size_t i = 0; i < test.graph.num_nodes(); ++i) {
    const auto n = static_cast<Eigen::Index>(i);
    const int truth = test.graph.labels[n];
    os << p.corpus.article_id(test.graph.nodes[i]) << '\t' << inf.labels[n] << '\t' << fmt(inf.probabilities(n, 1)) << '\t'
       << (truth == kUnlabeled ? std::string("-") : std::to_string(truth)) << '\n';
  }
  out << "test acc " << fmt(report.accuracy) << ", test f1 " << fmt(report.f1) << '\n';
  out << "evaluation written to " << p.dir.string() << '\n';
  return 0;
}

int cmd_ablate(const CommonOptions& o, const std::string& variants_csv, int seeds, std::ostream& out) {
  const auto variants = split_csv(variants_csv);
  if (variants.empty()) throw UsageError("--variants is empty");
  for (const auto& v : variants) apply_variant(TrainConfig{}, v);
  if (seeds < 1) throw UsageError("--seeds must be at least 1");
  const Prepared p = prepare("ablate", o);
  const auto rows = run_ablation(p.corpus, p.config, variants, seeds);
  write_results_tsv(rows, p.dir / "results.tsv");
  std::ofstream os(p.dir / "summary.tsv");
  os << "variant\tseeds\tacc\tf1\thomophily_before\thomophily_after\n";
  for (const auto& v : variants) {
    double acc = 0, f1 = 0, hb = 0, ha = 0;
    int n = 0, nh = 0;
    for (const auto& r : rows) {
      if (r.variant != v) continue;
      acc += r.report.accuracy;
      f1 += r.report.f1;
      ++n;
      if (r.report.homophily_original && r.report.homophily_reweighted) {
        hb += *r.report.homophily_original;
        ha += *r.report.homophily_reweighted;
        ++nh;
      }
    }
    os << v << '\t' << n << '\t' << fmt(acc / n) << '\t' << fmt(f1 / n) << '\t'
       << (nh ? fmt(hb / nh) : std::string("NA")) << '\t' << (nh ? fmt(ha / nh) : std::string("NA")) << '\n';
    out << v << ": acc " << fmt(acc / n) << ", f1 " << fmt(f1 / n) << '\n';
  }
  out << "ablation written to " << p.dir.string() << '\n';
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Temporality-aware fake news detection on co-engagement graphs", "fnd"};
  app.require_subcommand(1);
  app.set_version_flag("--version", FND_VERSION);

  SyntheticSpec spec;
  std::string gen_out;
  double deadline_hours = 48.0;
  auto* gen = app.add_subcommand("generate", "Write a synthetic dataset");
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--seed", spec.seed);
  gen->add_option("--articles", spec.n_articles);
  gen->add_option("--users", spec.n_users);
  gen->add_option("--fake-fraction", spec.fake_fraction);
  gen->add_option("--engagements-mean", spec.engagements_mean);
  gen->add_option("--dispersion", spec.engagements_dispersion);
  gen->add_option("--early-bias", spec.early_bias);
  gen->add_option("--late-bias", spec.late_bias);
  gen->add_option("--user-effect", spec.user_effect);
  gen->add_option("--deadline-hours", deadline_hours);
  gen->add_option("--feature-dim", spec.feature_dim);
  gen->add_option("--separation", spec.separation);

  std::string ingest_data, ingest_out;
  auto* ingest = app.add_subcommand("ingest", "Validate a dataset and print a summary");
  ingest->add_option("--data", ingest_data, "Dataset directory")->required();
  ingest->add_option("--out", ingest_out, "Write a canonical copy here");

  CommonOptions split_o, analyze_o, train_o, eval_o, ablate_o;
  auto* split = app.add_subcommand("split", "Temporal split and per-band graphs");
  add_common(split, split_o);

  std::string band = "all";
  int bins = 10;
  auto* analyze = app.add_subcommand("analyze", "FNA histograms by earliness group");
  add_common(analyze, analyze_o);
  analyze->add_option("--band", band, "all, train, val or test");
  analyze->add_option("--bins", bins, "Histogram bins");

  auto* trn = app.add_subcommand("train", "Train and evaluate one model");
  add_common(trn, train_o);

  std::string checkpoint;
  auto* evl = app.add_subcommand("evaluate", "Evaluate a checkpoint on the test band");
  add_common(evl, eval_o);
  evl->add_option("--checkpoint", checkpoint, "checkpoint.txt from a train run")->required();

  std::string variants = "dawn,no-rank,bc,rand";
  int seeds = 5;
  auto* abl = app.add_subcommand("ablate", "Variant x seed grid");
  add_common(abl, ablate_o);
  abl->add_option("--variants", variants, "Comma-separated: dawn,no-rank,bc,rand,no-user,no-eng,ratio,nf,gcn");
  abl->add_option("--seeds", seeds, "Seeds per variant, counted up from --seed");

  std::vector<std::string> argv_store{"fnd"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::CallForVersion& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\nRun with --help for usage.\n";
    return 2;
  }

  try {
    if (*gen) {
      spec.deadline_seconds = static_cast<Timestamp>(deadline_hours * 3600.0);
      return cmd_generate(spec, gen_out, out);
    }
    if (*ingest) return cmd_ingest(ingest_data, ingest_out, out);
    if (*split) return cmd_split(split_o, out);
    if (*analyze) return cmd_analyze(analyze_o, band, bins, out);
    if (*trn) return cmd_train(train_o, out);
    if (*evl) return cmd_evaluate(eval_o, checkpoint, out);
    if (*abl) return cmd_ablate(ablate_o, variants, seeds, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const UsageError*>(&e) ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace fnd::cli

// Command-line front end: gen, build-keys, train, detect, eval, sweep.
// Every run writes a manifest next to its outputs; identical manifests
// reproduce byte-identical outputs.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "dablog/autoencoder.hpp"
#include "dablog/datagen.hpp"
#include "dablog/detector.hpp"
#include "dablog/evaluation.hpp"
#include "dablog/io.hpp"
#include "dablog/persist.hpp"
#include "dablog/predictor.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dablog;

namespace {

// Distinguishes operator mistakes (exit 1) from runtime failures (exit 2).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  int seqlen = 10;
  Granularity granularity = Granularity::K1;
  std::string model_kind;  // optional; must match the subcommand when set
  int embedding_dim = 32;
  std::vector<int> encoder_hidden{64, 32};
  std::vector<int> decoder_hidden{32, 64};
  std::vector<int> baseline_hidden{64, 64};
  int epochs = 20;
  int batch_size = 32;
  double learning_rate = 1e-3;
  bool interlayer_relu = true;
  double grad_clip_norm = 5.0;
  double theta_n = 9.0;
  double theta_p = 0.5;
  std::uint64_t seed = 1;
  std::optional<std::string> filepath_table;
};

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open config file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad config: ") + e.what());
  }
  RunConfig cfg;
  bool saw_version = false;
  for (const auto& [k, v] : j.items()) {
    try {
      if (k == "version") {
        if (v.get<int>() != 1) throw ValidationError("unsupported config version");
        saw_version = true;
      } else if (k == "seqlen") cfg.seqlen = v.get<int>();
      else if (k == "granularity") cfg.granularity = granularity_from_string(v.get<std::string>());
      else if (k == "model_kind") cfg.model_kind = v.get<std::string>();
      else if (k == "embedding_dim") cfg.embedding_dim = v.get<int>();
      else if (k == "encoder_hidden") cfg.encoder_hidden = v.get<std::vector<int>>();
      else if (k == "decoder_hidden") cfg.decoder_hidden = v.get<std::vector<int>>();
      else if (k == "baseline_hidden") cfg.baseline_hidden = v.get<std::vector<int>>();
      else if (k == "epochs") cfg.epochs = v.get<int>();
      else if (k == "batch_size") cfg.batch_size = v.get<int>();
      else if (k == "learning_rate") cfg.learning_rate = v.get<double>();
      else if (k == "interlayer_relu") cfg.interlayer_relu = v.get<bool>();
      else if (k == "grad_clip_norm") cfg.grad_clip_norm = v.get<double>();
      else if (k == "theta_n") cfg.theta_n = v.get<double>();
      else if (k == "theta_p") cfg.theta_p = v.get<double>();
      else if (k == "seed") cfg.seed = v.get<std::uint64_t>();
      else if (k == "filepath_table") cfg.filepath_table = v.get<std::string>();
      else throw ValidationError("unknown config field: " + k);  // fail closed
    } catch (const json::exception& e) {
      throw ValidationError("bad config field " + k + ": " + e.what());
    }
  }
  if (!saw_version) throw ValidationError("config is missing the version field");
  if (cfg.seqlen < 3) throw ValidationError("seqlen must be >= 3");
  if (cfg.epochs < 1) throw ValidationError("epochs must be >= 1");
  if (cfg.batch_size < 1) throw ValidationError("batch_size must be >= 1");
  if (cfg.embedding_dim < 1) throw ValidationError("embedding_dim must be >= 1");
  if (cfg.learning_rate <= 0.0) throw ValidationError("learning_rate must be > 0");
  if (cfg.theta_n <= 0.0 || cfg.theta_n > 100.0) throw ValidationError("theta_n outside (0, 100]");
  if (cfg.theta_p <= 0.0 || cfg.theta_p >= 1.0) throw ValidationError("theta_p outside (0, 1)");
  if (cfg.encoder_hidden.empty() || cfg.decoder_hidden.empty() || cfg.baseline_hidden.empty()) {
    throw ValidationError("hidden size lists must be non-empty");
  }
  if (cfg.encoder_hidden.back() != cfg.decoder_hidden.front()) {
    throw ValidationError("encoder last hidden size must equal decoder first hidden size");
  }
  return cfg;
}

std::string require_exists(const std::string& path) {
  if (!fs::exists(path)) throw ValidationError("missing file: " + path);
  return path;
}

std::string records_path(const std::string& in) {
  if (fs::is_directory(in)) return (fs::path(in) / "records.jsonl").string();
  return in;
}

std::string labels_path(const std::string& in, const std::string& explicit_labels) {
  if (!explicit_labels.empty()) return explicit_labels;
  if (fs::is_directory(in)) return (fs::path(in) / "labels.jsonl").string();
  return (fs::path(in).parent_path() / "labels.jsonl").string();
}

FilepathTable table_from(const std::optional<std::string>& path) {
  if (!path || path->empty()) return {};
  return io::load_filepath_table(require_exists(*path));
}

std::vector<double> parse_grid(const std::string& spec) {
  // "lo:hi:step" inclusive grid
  double lo = 0, hi = 0, step = 0;
  if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0 || hi < lo) {
    throw ValidationError("bad grid spec (expected lo:hi:step): " + spec);
  }
  std::vector<double> grid;
  for (double t = lo; t <= hi + 1e-9; t += step) grid.push_back(t);
  return grid;
}

// Sessions whose label is normal; all sessions when no labels are known.
std::vector<Session> training_sessions(const std::vector<Session>& sessions,
                                       const LabelMap& labels) {
  if (labels.empty()) return sessions;
  std::vector<Session> out;
  for (const auto& s : sessions) {
    auto it = labels.find(s.session_id);
    if (it == labels.end() || it->second == Label::Normal) out.push_back(s);
  }
  return out;
}

int run_gen(const std::string& grammar_file, std::uint64_t seed, bool seed_given, int n_normal,
            int n_abnormal, const std::string& out_dir) {
  GrammarSpec grammar =
      grammar_file.empty() ? default_grammar() : load_grammar(require_exists(grammar_file));
  if (seed_given) grammar.seed = seed;

  fs::create_directories(out_dir);
  const GeneratedCorpus corpus = generate_corpus(grammar, n_normal, n_abnormal);
  const std::string records = (fs::path(out_dir) / "records.jsonl").string();
  const std::string labels = (fs::path(out_dir) / "labels.jsonl").string();
  const std::string grammar_out = (fs::path(out_dir) / "grammar.json").string();
  io::write_records(corpus.records, records);
  io::write_labels(corpus.items, labels);
  save_grammar(grammar, grammar_out);

  io::Manifest m;
  m.command = "gen";
  if (!grammar_file.empty()) m.inputs.emplace_back(grammar_file, io::hash_hex(io::hash_file(grammar_file)));
  m.settings.emplace_back("seed", std::to_string(grammar.seed));
  m.settings.emplace_back("normal", std::to_string(n_normal));
  m.settings.emplace_back("abnormal", std::to_string(n_abnormal));
  io::write_manifest(m, (fs::path(out_dir) / "manifest.json").string());
  std::cout << "wrote " << corpus.records.size() << " records across " << corpus.items.size()
            << " sessions to " << out_dir << "\n";
  return 0;
}

int run_build_keys(const std::string& in, const std::string& granularity,
                   const std::string& table_file, const std::string& out) {
  const std::string records_file = require_exists(records_path(in));
  const Granularity g = granularity_from_string(granularity);
  FilepathTable table = table_from(table_file.empty() ? std::nullopt
                                                      : std::make_optional(table_file));
  const auto records = io::read_records(records_file);
  const KeySet ks = build_vocabulary(records, g, table);
  io::save_keyset(ks, out);

  io::Manifest m;
  m.command = "build-keys";
  m.inputs.emplace_back(records_file, io::hash_hex(io::hash_file(records_file)));
  if (!table_file.empty()) m.inputs.emplace_back(table_file, io::hash_hex(io::hash_file(table_file)));
  m.settings.emplace_back("granularity", granularity);
  io::write_manifest(m, out + ".manifest.json");
  std::cout << "vocabulary of " << ks.vocab_size() << " keys written to " << out << "\n";
  return 0;
}

int run_train(const std::string& kind, const std::string& config_file, const std::string& in,
              const std::string& keys_file, const std::string& out) {
  const RunConfig cfg = config_file.empty() ? RunConfig{} : load_config(config_file);
  if (!cfg.model_kind.empty() && cfg.model_kind != kind) {
    throw ValidationError("config model_kind '" + cfg.model_kind +
                          "' does not match subcommand '" + kind + "'");
  }
  const std::string records_file = require_exists(records_path(in));
  const auto records = io::read_records(records_file);
  const FilepathTable table = table_from(cfg.filepath_table);

  KeySet ks;
  std::string keys_used = keys_file;
  if (!keys_file.empty()) {
    ks = io::load_keyset(require_exists(keys_file));
  } else {
    ks = build_vocabulary(records, cfg.granularity, table);
    keys_used = out + ".keys.json";
    io::save_keyset(ks, keys_used);
  }

  const std::string labels_file = labels_path(in, "");
  LabelMap labels;
  if (fs::exists(labels_file)) labels = io::label_map(io::read_labels(labels_file));
  const auto all_sessions = assemble_sessions(records, ks, table);
  const auto sessions = training_sessions(all_sessions, labels);
  if (sessions.empty()) throw ValidationError("no training sessions after label filtering");

  TrainConfig tc;
  tc.epochs = cfg.epochs;
  tc.batch_size = cfg.batch_size;
  tc.seed = cfg.seed;
  tc.adam.lr = cfg.learning_rate;
  tc.grad_clip_norm = cfg.grad_clip_norm;

  if (kind == "dablog") {
    DablogConfig mc;
    mc.seqlen = cfg.seqlen;
    mc.embedding_dim = cfg.embedding_dim;
    mc.encoder_hidden = cfg.encoder_hidden;
    mc.decoder_hidden = cfg.decoder_hidden;
    mc.interlayer_relu = cfg.interlayer_relu;
    DablogModel model(mc, ks.extended_size(), ks.hash(), cfg.seed);
    std::vector<SequenceWindow> data;
    for (const auto& s : sessions) {
      for (auto& w : windows(s, ks, cfg.seqlen)) data.push_back(std::move(w));
    }
    const auto trace = model.train(data, tc);
    io::save_model(model, out);
    std::cout << "trained dablog on " << data.size() << " windows; final mean loss "
              << trace.back() << "\n";
  } else if (kind == "baseline") {
    BaselineConfig mc;
    mc.seqlen = cfg.seqlen;
    mc.embedding_dim = cfg.embedding_dim;
    mc.hidden = cfg.baseline_hidden;
    mc.interlayer_relu = cfg.interlayer_relu;
    BaselineModel model(mc, ks.extended_size(), ks.hash(), cfg.seed);
    std::vector<PredictionPair> data;
    for (const auto& s : sessions) {
      for (auto& p : prediction_pairs(s, ks, cfg.seqlen)) data.push_back(std::move(p));
    }
    const auto trace = model.train(data, tc);
    io::save_model(model, out);
    std::cout << "trained baseline on " << data.size() << " pairs; final mean loss "
              << trace.back() << "\n";
  } else if (kind == "freq") {
    const FrequencyModel model = FrequencyModel::fit(sessions, ks);
    io::save_model(model, ks.hash(), out);
    std::cout << "fitted frequency model over " << ks.vocab_size() << " keys\n";
  } else {
    throw ValidationError("unknown model kind: " + kind);
  }

  io::Manifest m;
  m.command = "train " + kind;
  m.inputs.emplace_back(records_file, io::hash_hex(io::hash_file(records_file)));
  if (!config_file.empty()) {
    m.inputs.emplace_back(config_file, io::hash_hex(io::hash_file(config_file)));
  }
  if (!keys_file.empty()) m.inputs.emplace_back(keys_file, io::hash_hex(io::hash_file(keys_file)));
  m.settings.emplace_back("seed", std::to_string(cfg.seed));
  m.settings.emplace_back("epochs", std::to_string(cfg.epochs));
  m.settings.emplace_back("keys", keys_used);
  io::write_manifest(m, out + ".manifest.json");
  return 0;
}

// Cached scores for any of the three model kinds; verifies the keyset hash.
std::vector<SessionScore> score_with_model(const std::string& model_file, const KeySet& ks,
                                           const std::vector<Session>& sessions) {
  const std::string kind = io::peek_model_kind(model_file);
  if (kind == "dablog") {
    auto model = io::load_dablog(model_file);
    if (model->keyset_hash() != ks.hash()) throw ValidationError("keyset does not match model");
    return score_sessions(*model, sessions, ks);
  }
  if (kind == "baseline") {
    auto model = io::load_baseline(model_file);
    if (model->keyset_hash() != ks.hash()) throw ValidationError("keyset does not match model");
    return score_sessions(*model, sessions, ks);
  }
  if (kind == "freq") {
    std::uint64_t hash = 0;
    const FrequencyModel model = io::load_frequency(model_file, &hash);
    if (hash != ks.hash()) throw ValidationError("keyset does not match model");
    return score_sessions(model, sessions, ks);
  }
  throw ValidationError("unknown model kind in file: " + kind);
}

KeySet keys_for_model(const std::string& model_file, const std::string& keys_file) {
  const std::string path = keys_file.empty() ? model_file + ".keys.json" : keys_file;
  return io::load_keyset(require_exists(path));
}

int run_detect(const std::string& model_file, const std::string& keys_file, const std::string& in,
               double theta_n, double theta_p, bool use_threshold, const std::string& out) {
  require_exists(model_file);
  const KeySet ks = keys_for_model(model_file, keys_file);
  const std::string records_file = require_exists(records_path(in));
  const auto records = io::read_records(records_file);
  const auto sessions = assemble_sessions(records, ks);
  const auto scores = score_with_model(model_file, ks, sessions);

  CriticConfig cc;
  cc.mode = use_threshold ? CriticMode::Threshold : CriticMode::Rank;
  cc.theta_n = theta_n;
  cc.theta_p = theta_p;
  if (!use_threshold) rank_slots(cc.theta_n, ks.extended_size());  // validate range

  std::vector<io::SessionVerdict> verdicts;
  verdicts.reserve(scores.size());
  for (const auto& score : scores) {
    verdicts.push_back({score.session_id, verdict_from_score(score, cc, ks.extended_size())});
  }
  io::write_verdicts(verdicts, ks, out);

  io::Manifest m;
  m.command = "detect";
  m.inputs.emplace_back(model_file, io::hash_hex(io::hash_file(model_file)));
  m.inputs.emplace_back(records_file, io::hash_hex(io::hash_file(records_file)));
  m.settings.emplace_back("mode", use_threshold ? "threshold" : "rank");
  m.settings.emplace_back("theta", use_threshold ? std::to_string(theta_p) : std::to_string(theta_n));
  io::write_manifest(m, out + ".manifest.json");

  std::int64_t abnormal = 0;
  for (const auto& v : verdicts) abnormal += v.verdict.label == Label::Abnormal ? 1 : 0;
  std::cout << "judged " << verdicts.size() << " sessions; " << abnormal << " abnormal\n";
  return 0;
}

int run_eval(const std::string& verdicts_file, const std::string& labels_file,
             const std::string& out) {
  const LabelMap predicted = io::read_verdict_labels(require_exists(verdicts_file));
  const LabelMap truth = io::label_map(io::read_labels(require_exists(labels_file)));
  ConfusionCounts counts;
  try {
    counts = confusion(predicted, truth);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  const MetricReport report = metrics(counts);
  io::write_report(counts, report, out);

  io::Manifest m;
  m.command = "eval";
  m.inputs.emplace_back(verdicts_file, io::hash_hex(io::hash_file(verdicts_file)));
  m.inputs.emplace_back(labels_file, io::hash_hex(io::hash_file(labels_file)));
  io::write_manifest(m, out + ".manifest.json");

  char line[160];
  std::snprintf(line, sizeof(line),
                "TP %lld FP %lld TN %lld FN %lld | recall %.2f%% precision %.2f%% f1 %.2f%%",
                static_cast<long long>(counts.tp), static_cast<long long>(counts.fp),
                static_cast<long long>(counts.tn), static_cast<long long>(counts.fn),
                report.recall * 100, report.precision * 100, report.f1 * 100);
  std::cout << line << "\n";
  return 0;
}

int run_sweep(const std::string& model_file, const std::string& keys_file, const std::string& in,
              const std::string& labels_file, const std::string& grid_spec,
              const std::string& out, const std::string& auc_out) {
  require_exists(model_file);
  const KeySet ks = keys_for_model(model_file, keys_file);
  const std::string records_file = require_exists(records_path(in));
  const auto records = io::read_records(records_file);
  const auto sessions = assemble_sessions(records, ks);
  const LabelMap truth =
      io::label_map(io::read_labels(require_exists(labels_path(in, labels_file))));
  const auto scores = score_with_model(model_file, ks, sessions);

  const std::vector<double> grid = parse_grid(grid_spec);
  const auto result = sweep(scores, truth, grid, ks.extended_size());
  io::write_sweep_csv(result, out);

  const double auc = roc_auc(roc_points(result));
  if (!auc_out.empty()) {
    std::ofstream f(auc_out, std::ios::binary);
    f << json{{"auc", auc}}.dump(2) << "\n";
  }

  io::Manifest m;
  m.command = "sweep";
  m.inputs.emplace_back(model_file, io::hash_hex(io::hash_file(model_file)));
  m.inputs.emplace_back(records_file, io::hash_hex(io::hash_file(records_file)));
  m.settings.emplace_back("grid", grid_spec);
  io::write_manifest(m, out + ".manifest.json");

  std::cout << "swept " << grid.size() << " thresholds; auc " << auc << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LSTM-autoencoder anomaly detection for discrete event logs"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a labeled synthetic corpus");
  gen->alias("generate");
  std::string gen_grammar, gen_out;
  std::uint64_t gen_seed = 0;
  int gen_normal = 0, gen_abnormal = 0;
  gen->add_option("--grammar", gen_grammar, "Grammar JSON (defaults to the built-in grammar)");
  auto* seed_opt = gen->add_option("--seed", gen_seed, "Override the grammar seed");
  gen->add_option("--normal", gen_normal, "Number of normal sessions")->required();
  gen->add_option("--abnormal", gen_abnormal, "Number of abnormal sessions")->required();
  gen->add_option("-o,--out", gen_out, "Output directory")->required();

  // build-keys
  auto* bk = app.add_subcommand("build-keys", "Build the event-key vocabulary from records");
  std::string bk_in, bk_gran = "k1", bk_table, bk_out;
  bk->add_option("--in", bk_in, "Records file or corpus directory")->required();
  bk->add_option("--granularity", bk_gran, "k0, k1 or k2");
  bk->add_option("--filepath-table", bk_table, "Filepath add-on rules JSON");
  bk->add_option("-o,--out", bk_out, "Keyset output path")->required();

  // train
  auto* train = app.add_subcommand("train", "Train a model (dablog | baseline | freq)");
  std::string train_kind, train_config, train_in, train_keys, train_out;
  train->add_option("kind", train_kind, "dablog, baseline or freq")->required();
  train->add_option("--config", train_config, "Run configuration JSON");
  train->add_option("--in", train_in, "Corpus directory or records file")->required();
  train->add_option("--keys", train_keys, "Existing keyset (default: built from the corpus)");
  train->add_option("-o,--out", train_out, "Model output path")->required();

  // detect
  auto* detect = app.add_subcommand("detect", "Judge sessions with a trained model");
  std::string det_model, det_keys, det_in, det_out;
  double det_theta_n = 9.0, det_theta_p = 0.0;
  detect->add_option("--model", det_model, "Model file")->required();
  detect->add_option("--keys", det_keys, "Keyset (default: <model>.keys.json)");
  detect->add_option("--in", det_in, "Corpus directory or records file")->required();
  detect->add_option("--theta-n", det_theta_n, "Rank criterion percentage in (0, 100]");
  auto* tp_opt = detect->add_option("--theta-p", det_theta_p, "Threshold criterion in (0, 1)");
  detect->add_option("-o,--out", det_out, "Verdict output path")->required();

  // eval
  auto* eval = app.add_subcommand("eval", "Score verdicts against truth labels");
  eval->alias("evaluate");
  std::string ev_verdicts, ev_labels, ev_out;
  eval->add_option("--verdicts", ev_verdicts, "Verdicts file from detect")->required();
  eval->add_option("--labels", ev_labels, "Truth label sidecar")->required();
  eval->add_option("-o,--out", ev_out, "Report base path (writes .json and .txt)")->required();

  // sweep
  auto* sw = app.add_subcommand("sweep", "Confusion counts across a theta_N grid");
  std::string sw_model, sw_keys, sw_in, sw_labels, sw_grid = "1:100:1", sw_out, sw_auc;
  sw->add_option("--model", sw_model, "Model file")->required();
  sw->add_option("--keys", sw_keys, "Keyset (default: <model>.keys.json)");
  sw->add_option("--in", sw_in, "Corpus directory or records file")->required();
  sw->add_option("--labels", sw_labels, "Truth labels (default: <in>/labels.jsonl)");
  sw->add_option("--grid", sw_grid, "Grid as lo:hi:step (default 1:100:1)");
  sw->add_option("-o,--out", sw_out, "Sweep CSV output path")->required();
  sw->add_option("--auc-out", sw_auc, "Optional AUC JSON output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // CLI11 prints the one-line diagnostic; fold its exit codes into the
    // 0 = success / 1 = validation contract
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) {
      return run_gen(gen_grammar, gen_seed, seed_opt->count() > 0, gen_normal, gen_abnormal,
                     gen_out);
    }
    if (bk->parsed()) return run_build_keys(bk_in, bk_gran, bk_table, bk_out);
    if (train->parsed()) return run_train(train_kind, train_config, train_in, train_keys, train_out);
    if (detect->parsed()) {
      return run_detect(det_model, det_keys, det_in, det_theta_n, det_theta_p,
                        tp_opt->count() > 0, det_out);
    }
    if (eval->parsed()) return run_eval(ev_verdicts, ev_labels, ev_out);
    if (sw->parsed()) return run_sweep(sw_model, sw_keys, sw_in, sw_labels, sw_grid, sw_out, sw_auc);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

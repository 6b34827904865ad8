#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dablog/autoencoder.hpp"
#include "dablog/datagen.hpp"
#include "dablog/detector.hpp"
#include "dablog/evaluation.hpp"
#include "dablog/io.hpp"
#include "dablog/persist.hpp"
#include "dablog/predictor.hpp"

namespace py = pybind11;
using namespace dablog;

namespace {

std::vector<std::vector<double>> matrix_to_rows(const Matrix& m) {
  std::vector<std::vector<double>> rows(m.rows());
  for (int r = 0; r < m.rows(); ++r) rows[r].assign(m.row(r), m.row(r) + m.cols());
  return rows;
}

LabelMap label_map_from_dict(const std::map<std::string, std::string>& labels) {
  LabelMap m;
  for (const auto& [sid, label] : labels) m[sid] = label_from_string(label);
  return m;
}

}  // namespace

PYBIND11_MODULE(dablog, m) {
  m.doc() = "Discrete event log anomaly detection with an LSTM autoencoder";
  m.attr("__version__") = "0.1.0";

  py::enum_<Granularity>(m, "Granularity")
      .value("K0", Granularity::K0)
      .value("K1", Granularity::K1)
      .value("K2", Granularity::K2);

  py::class_<EventAttrs>(m, "EventAttrs")
      .def(py::init<>())
      .def_readwrite("filepath", &EventAttrs::filepath)
      .def_readwrite("size_bytes", &EventAttrs::size_bytes)
      .def_readwrite("src_ip", &EventAttrs::src_ip)
      .def_readwrite("dst_ip", &EventAttrs::dst_ip);

  py::class_<RawEventRecord>(m, "RawEventRecord")
      .def(py::init<>())
      .def_readwrite("session_id", &RawEventRecord::session_id)
      .def_readwrite("ts", &RawEventRecord::ts)
      .def_readwrite("base_key", &RawEventRecord::base_key)
      .def_readwrite("attrs", &RawEventRecord::attrs);

  py::class_<FilepathTable>(m, "FilepathTable")
      .def(py::init<>())
      .def("add_rule", &FilepathTable::add_rule)
      .def("__len__", &FilepathTable::size);

  py::class_<KeySet>(m, "KeySet")
      .def_static("from_keys", &KeySet::from_keys, py::arg("keys"), py::arg("granularity"))
      .def_property_readonly("vocab_size", &KeySet::vocab_size)
      .def_property_readonly("extended_size", &KeySet::extended_size)
      .def_property_readonly("bos_id", &KeySet::bos_id)
      .def_property_readonly("eos_id", &KeySet::eos_id)
      .def_property_readonly("unk_id", &KeySet::unk_id)
      .def_property_readonly("keys", &KeySet::keys)
      .def("key_id", &KeySet::key_id)
      .def("key_text", &KeySet::key_text)
      .def("hash", &KeySet::hash);

  m.def("derive_addon_key", &derive_addon_key, py::arg("base_key"), py::arg("attrs"),
        py::arg("granularity"), py::arg("filepath_table") = FilepathTable{});
  m.def("build_vocabulary", &build_vocabulary, py::arg("records"), py::arg("granularity"),
        py::arg("filepath_table") = FilepathTable{});
  m.def("onehot",
        [](const KeySet& ks, const std::vector<int>& ids) {
          return matrix_to_rows(onehot(ks, ids));
        });

  py::class_<Session>(m, "Session")
      .def(py::init<>())
      .def_readwrite("session_id", &Session::session_id)
      .def_readwrite("event_ids", &Session::event_ids)
      .def_property(
          "label",
          [](const Session& s) -> std::optional<std::string> {
            if (!s.label) return std::nullopt;
            return to_string(*s.label);
          },
          [](Session& s, const std::optional<std::string>& v) {
            if (v) s.label = label_from_string(*v);
            else s.label.reset();
          });

  py::class_<SequenceWindow>(m, "SequenceWindow")
      .def(py::init<>())
      .def_readwrite("ids", &SequenceWindow::ids)
      .def_readwrite("session_id", &SequenceWindow::session_id)
      .def_readwrite("start", &SequenceWindow::start)
      .def_readwrite("has_bos", &SequenceWindow::has_bos)
      .def_readwrite("has_eos", &SequenceWindow::has_eos)
      .def("__len__", &SequenceWindow::length);

  m.def("assemble_sessions", &assemble_sessions, py::arg("records"), py::arg("keyset"),
        py::arg("filepath_table") = FilepathTable{});
  m.def("windows", &windows, py::arg("session"), py::arg("keyset"), py::arg("seqlen"));

  py::class_<DablogConfig>(m, "DablogConfig")
      .def(py::init<>())
      .def_readwrite("seqlen", &DablogConfig::seqlen)
      .def_readwrite("embedding_dim", &DablogConfig::embedding_dim)
      .def_readwrite("encoder_hidden", &DablogConfig::encoder_hidden)
      .def_readwrite("decoder_hidden", &DablogConfig::decoder_hidden)
      .def_readwrite("interlayer_relu", &DablogConfig::interlayer_relu);

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("grad_clip_norm", &TrainConfig::grad_clip_norm)
      .def_property(
          "learning_rate", [](const TrainConfig& tc) { return tc.adam.lr; },
          [](TrainConfig& tc, double lr) { tc.adam.lr = lr; });

  py::class_<DablogModel>(m, "DablogModel")
      .def(py::init<const DablogConfig&, int, std::uint64_t, std::uint64_t>(), py::arg("config"),
           py::arg("vocab_ext"), py::arg("keyset_hash"), py::arg("init_seed"))
      .def_property_readonly("vocab_ext", &DablogModel::vocab_ext)
      .def_property_readonly("code_dim", &DablogModel::code_dim)
      .def("reconstruct",
           [](const DablogModel& model, const SequenceWindow& w) {
             return matrix_to_rows(model.reconstruct(w));
           })
      .def("reconstruct_aligned",
           [](const DablogModel& model, const SequenceWindow& w) {
             return matrix_to_rows(reverse(model.reconstruct(w)));
           })
      .def("code_of", &DablogModel::code_of)
      .def("train", &DablogModel::train, py::arg("windows"), py::arg("train_config"));

  py::class_<BaselineConfig>(m, "BaselineConfig")
      .def(py::init<>())
      .def_readwrite("seqlen", &BaselineConfig::seqlen)
      .def_readwrite("embedding_dim", &BaselineConfig::embedding_dim)
      .def_readwrite("hidden", &BaselineConfig::hidden)
      .def_readwrite("interlayer_relu", &BaselineConfig::interlayer_relu);

  py::class_<PredictionPair>(m, "PredictionPair")
      .def(py::init<>())
      .def_readwrite("prefix", &PredictionPair::prefix)
      .def_readwrite("target", &PredictionPair::target);

  m.def("prediction_pairs", &prediction_pairs, py::arg("session"), py::arg("keyset"),
        py::arg("seqlen"));

  py::class_<BaselineModel>(m, "BaselineModel")
      .def(py::init<const BaselineConfig&, int, std::uint64_t, std::uint64_t>(), py::arg("config"),
           py::arg("vocab_ext"), py::arg("keyset_hash"), py::arg("init_seed"))
      .def_property_readonly("vocab_ext", &BaselineModel::vocab_ext)
      .def("predict_next", &BaselineModel::predict_next)
      .def("train", &BaselineModel::train, py::arg("pairs"), py::arg("train_config"));

  py::class_<FrequencyModel>(m, "FrequencyModel")
      .def_static("fit", &FrequencyModel::fit, py::arg("sessions"), py::arg("keyset"))
      .def_static("from_counts", &FrequencyModel::from_counts)
      .def_property_readonly("counts", &FrequencyModel::counts)
      .def("rank", &FrequencyModel::rank);

  m.def("rank_slots", &rank_slots, py::arg("theta_n"), py::arg("v_ext"));
  m.def("rank_of_true", &rank_of_true, py::arg("p_row"), py::arg("true_id"));
  m.def("event_normal_rank", &event_normal_rank, py::arg("p_row"), py::arg("true_id"),
        py::arg("theta_n"), py::arg("v_ext"));
  m.def("event_normal_threshold", &event_normal_threshold, py::arg("p_row"), py::arg("true_id"),
        py::arg("theta_p"));
  m.def("merge_labels", [](const std::string& a, const std::string& b, const std::string& mode) {
    const MergeMode mm = mode == "intersection" ? MergeMode::Intersection : MergeMode::Union;
    return to_string(merge_labels(label_from_string(a), label_from_string(b), mm));
  });

  py::class_<ScoredEvent>(m, "ScoredEvent")
      .def_readonly("position", &ScoredEvent::position)
      .def_readonly("true_id", &ScoredEvent::true_id)
      .def_readonly("rank", &ScoredEvent::rank)
      .def_readonly("prob", &ScoredEvent::prob)
      .def_readonly("unk", &ScoredEvent::unk);

  py::class_<SessionScore>(m, "SessionScore")
      .def_readonly("session_id", &SessionScore::session_id)
      .def_readonly("events", &SessionScore::events)
      .def("worst_rank", &SessionScore::worst_rank)
      .def("min_prob", &SessionScore::min_prob);

  m.def("score_sessions_dablog",
        [](const DablogModel& model, const std::vector<Session>& sessions, const KeySet& ks) {
          return score_sessions(model, sessions, ks);
        });
  m.def("score_sessions_baseline",
        [](const BaselineModel& model, const std::vector<Session>& sessions, const KeySet& ks) {
          return score_sessions(model, sessions, ks);
        });
  m.def("score_sessions_frequency",
        [](const FrequencyModel& model, const std::vector<Session>& sessions, const KeySet& ks) {
          return score_sessions(model, sessions, ks);
        });

  py::class_<ConfusionCounts>(m, "ConfusionCounts")
      .def(py::init<>())
      .def(py::init([](std::int64_t tp, std::int64_t fp, std::int64_t tn, std::int64_t fn) {
             return ConfusionCounts{tp, fp, tn, fn};
           }),
           py::arg("tp"), py::arg("fp"), py::arg("tn"), py::arg("fn"))
      .def_readwrite("tp", &ConfusionCounts::tp)
      .def_readwrite("fp", &ConfusionCounts::fp)
      .def_readwrite("tn", &ConfusionCounts::tn)
      .def_readwrite("fn", &ConfusionCounts::fn)
      .def("total", &ConfusionCounts::total);

  py::class_<MetricReport>(m, "MetricReport")
      .def_readonly("recall", &MetricReport::recall)
      .def_readonly("precision", &MetricReport::precision)
      .def_readonly("f1", &MetricReport::f1)
      .def_readonly("fp_rate", &MetricReport::fp_rate)
      .def_readonly("accuracy", &MetricReport::accuracy)
      .def_readonly("degenerate", &MetricReport::degenerate);

  m.def("confusion", [](const std::map<std::string, std::string>& predicted,
                        const std::map<std::string, std::string>& truth) {
    return confusion(label_map_from_dict(predicted), label_map_from_dict(truth));
  });
  m.def("metrics", &metrics, py::arg("counts"));
  m.def("sweep",
        [](const std::vector<SessionScore>& scores, const std::map<std::string, std::string>& truth,
           const std::vector<double>& grid, int v_ext) {
          return sweep(scores, label_map_from_dict(truth), grid, v_ext);
        });
  m.def("roc_auc", &roc_auc, py::arg("points"));
  m.def("roc_points", &roc_points, py::arg("sweep_result"));

  py::enum_<AnomalyOp>(m, "AnomalyOp")
      .value("DROP_CAUSE", AnomalyOp::DropCause)
      .value("EFFECT_WITHOUT_CAUSE", AnomalyOp::EffectWithoutCause)
      .value("OUT_OF_ORDER_SWAP", AnomalyOp::OutOfOrderSwap);

  py::class_<GrammarSpec>(m, "GrammarSpec")
      .def_readwrite("seed", &GrammarSpec::seed)
      .def_readwrite("rare_variant_weight", &GrammarSpec::rare_variant_weight);

  py::class_<CorpusItem>(m, "CorpusItem")
      .def_readonly("session_id", &CorpusItem::session_id)
      .def_property_readonly("label", [](const CorpusItem& i) { return to_string(i.label); })
      .def_readonly("rare_variant", &CorpusItem::rare_variant)
      .def_property_readonly("anomaly_op", [](const CorpusItem& i) -> std::optional<std::string> {
        if (!i.anomaly_op) return std::nullopt;
        return to_string(*i.anomaly_op);
      });

  py::class_<GeneratedCorpus>(m, "GeneratedCorpus")
      .def_readonly("records", &GeneratedCorpus::records)
      .def_readonly("items", &GeneratedCorpus::items);

  py::class_<CorpusStats>(m, "CorpusStats")
      .def_readonly("key_counts", &CorpusStats::key_counts)
      .def_readonly("patterns_always_normal", &CorpusStats::patterns_always_normal)
      .def_readonly("patterns_always_abnormal", &CorpusStats::patterns_always_abnormal)
      .def_readonly("patterns_nondeterministic", &CorpusStats::patterns_nondeterministic)
      .def_readonly("patterns_total", &CorpusStats::patterns_total);

  m.def("corpus_stats", &corpus_stats, py::arg("sessions"), py::arg("keyset"), py::arg("seqlen"));

  m.def("default_grammar", &default_grammar);
  m.def("load_grammar", &load_grammar, py::arg("path"));
  m.def("save_grammar", &save_grammar, py::arg("grammar"), py::arg("path"));
  m.def("generate_corpus", &generate_corpus, py::arg("grammar"), py::arg("n_normal"),
        py::arg("n_abnormal"));

  m.def("save_dablog", [](DablogModel& model, const std::string& path) { io::save_model(model, path); });
  m.def("load_dablog", [](const std::string& path) { return io::load_dablog(path); });
  m.def("save_baseline",
        [](BaselineModel& model, const std::string& path) { io::save_model(model, path); });
  m.def("load_baseline", [](const std::string& path) { return io::load_baseline(path); });
}

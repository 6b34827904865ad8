#include "dablog/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace dablog::io {

namespace {

using nlohmann::json;

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  return out;
}

}  // namespace

std::vector<RawEventRecord> read_records(const std::string& path) {
  auto in = open_in(path);
  std::vector<RawEventRecord> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    RawEventRecord rec;
    rec.session_id = j.at("session_id").get<std::string>();
    if (rec.session_id.empty()) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": empty session_id");
    }
    rec.ts = j.at("ts").get<std::int64_t>();
    rec.base_key = j.at("key").get<std::string>();
    if (j.contains("attrs")) {
      const json& a = j["attrs"];
      if (a.contains("filepath")) rec.attrs.filepath = a["filepath"].get<std::string>();
      if (a.contains("size_bytes")) {
        rec.attrs.size_bytes = a["size_bytes"].get<std::int64_t>();
        if (*rec.attrs.size_bytes < 0) {
          throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad size");
        }
      }
      if (a.contains("src_ip")) rec.attrs.src_ip = a["src_ip"].get<std::string>();
      if (a.contains("dst_ip")) rec.attrs.dst_ip = a["dst_ip"].get<std::string>();
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void write_records(const std::vector<RawEventRecord>& records, const std::string& path) {
  auto out = open_out(path);
  for (const auto& rec : records) {
    json j;
    j["session_id"] = rec.session_id;
    j["ts"] = rec.ts;
    j["key"] = rec.base_key;
    if (!rec.attrs.empty()) {
      json a = json::object();
      if (rec.attrs.filepath) a["filepath"] = *rec.attrs.filepath;
      if (rec.attrs.size_bytes) a["size_bytes"] = *rec.attrs.size_bytes;
      if (rec.attrs.src_ip) a["src_ip"] = *rec.attrs.src_ip;
      if (rec.attrs.dst_ip) a["dst_ip"] = *rec.attrs.dst_ip;
      j["attrs"] = std::move(a);
    }
    out << j.dump() << "\n";
  }
}

std::vector<LabelEntry> read_labels(const std::string& path) {
  auto in = open_in(path);
  std::vector<LabelEntry> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    LabelEntry e;
    e.session_id = j.at("session_id").get<std::string>();
    e.label = label_from_string(j.at("label").get<std::string>());
    if (j.contains("rare_variant")) e.rare_variant = j["rare_variant"].get<bool>();
    if (j.contains("anomaly_op") && !j["anomaly_op"].is_null()) {
      e.anomaly_op = j["anomaly_op"].get<std::string>();
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

void write_labels(const std::vector<CorpusItem>& items, const std::string& path) {
  auto out = open_out(path);
  for (const auto& item : items) {
    json j;
    j["session_id"] = item.session_id;
    j["label"] = to_string(item.label);
    j["rare_variant"] = item.rare_variant;
    if (item.anomaly_op) j["anomaly_op"] = to_string(*item.anomaly_op);
    out << j.dump() << "\n";
  }
}

LabelMap label_map(const std::vector<LabelEntry>& entries) {
  LabelMap m;
  m.reserve(entries.size());
  for (const auto& e : entries) m[e.session_id] = e.label;
  return m;
}

void save_keyset(const KeySet& ks, const std::string& path) {
  json j;
  j["version"] = 1;
  j["granularity"] = to_string(ks.granularity());
  j["keys"] = ks.keys();
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

KeySet load_keyset(const std::string& path) {
  auto in = open_in(path);
  json j = json::parse(in);
  if (j.at("version").get<int>() != 1) throw std::runtime_error("unsupported keyset version");
  return KeySet::from_keys(j.at("keys").get<std::vector<std::string>>(),
                           granularity_from_string(j.at("granularity").get<std::string>()));
}

FilepathTable load_filepath_table(const std::string& path) {
  auto in = open_in(path);
  json j = json::parse(in);
  if (j.at("version").get<int>() != 1) throw std::runtime_error("unsupported filepath table version");
  FilepathTable table;
  for (const auto& rule : j.at("rules")) {
    table.add_rule(rule.at("pattern").get<std::string>(), rule.at("addon").get<std::string>());
  }
  return table;
}

void write_verdicts(const std::vector<SessionVerdict>& verdicts, const KeySet& ks,
                    const std::string& path) {
  auto out = open_out(path);
  for (const auto& sv : verdicts) {
    json j;
    j["session_id"] = sv.session_id;
    j["label"] = to_string(sv.verdict.label);
    json offending = json::array();
    for (const auto& off : sv.verdict.offending) {
      json o;
      o["pos"] = off.position;
      o["key"] = ks.key_text(off.true_id);
      o["rank"] = off.rank;
      o["prob"] = off.prob;
      offending.push_back(std::move(o));
    }
    j["offending"] = std::move(offending);
    j["unk_positions"] = sv.verdict.unk_positions;
    out << j.dump() << "\n";
  }
}

LabelMap read_verdict_labels(const std::string& path) {
  auto in = open_in(path);
  LabelMap m;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    m[j.at("session_id").get<std::string>()] =
        label_from_string(j.at("label").get<std::string>());
  }
  return m;
}

namespace {

std::string pct(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f%%", fraction * 100.0);
  return buf;
}

}  // namespace

void write_report(const ConfusionCounts& counts, const MetricReport& metrics,
                  const std::string& base_path) {
  json j;
  j["version"] = 1;
  j["counts"] = {{"tp", counts.tp}, {"fp", counts.fp}, {"tn", counts.tn}, {"fn", counts.fn}};
  j["metrics"] = {{"recall", metrics.recall},     {"precision", metrics.precision},
                  {"f1", metrics.f1},             {"fp_rate", metrics.fp_rate},
                  {"accuracy", metrics.accuracy}, {"degenerate", metrics.degenerate}};
  auto out = open_out(base_path + ".json");
  out << j.dump(2) << "\n";

  auto txt = open_out(base_path + ".txt");
  auto pad = [](std::int64_t v) {
    const std::string s = std::to_string(v);
    return s.size() < 11 ? std::string(11 - s.size(), ' ') + s : s;
  };
  txt << "            count\n";
  txt << "TP    " << pad(counts.tp) << "\n";
  txt << "FP    " << pad(counts.fp) << "\n";
  txt << "TN    " << pad(counts.tn) << "\n";
  txt << "FN    " << pad(counts.fn) << "\n";
  txt << "\n";
  txt << "FP Rate    " << pct(metrics.fp_rate) << "\n";
  txt << "Recall     " << pct(metrics.recall) << "\n";
  txt << "Precision  " << pct(metrics.precision) << "\n";
  txt << "F1 Score   " << pct(metrics.f1) << "\n";
  txt << "Accuracy   " << pct(metrics.accuracy) << "\n";
  if (metrics.degenerate) txt << "(degenerate: a zero denominator was reported as 0)\n";
}

void write_sweep_csv(const std::vector<std::pair<double, ConfusionCounts>>& sweep_result,
                     const std::string& path) {
  auto out = open_out(path);
  out << "theta_n,tp,fp,tn,fn,f1\n";
  for (const auto& [theta, c] : sweep_result) {
    const MetricReport r = metrics(c);
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%.6g,%lld,%lld,%lld,%lld,%.6f\n", theta,
                  static_cast<long long>(c.tp), static_cast<long long>(c.fp),
                  static_cast<long long>(c.tn), static_cast<long long>(c.fn), r.f1);
    out << buf;
  }
}

std::uint64_t hash_file(const std::string& path) {
  auto in = open_in(path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_manifest(const Manifest& m, const std::string& path) {
  json j;
  j["version"] = 1;
  j["tool_version"] = "0.1.0";
  j["command"] = m.command;
  json inputs = json::object();
  for (const auto& [p, h] : m.inputs) inputs[p] = h;
  j["inputs"] = std::move(inputs);
  json settings = json::object();
  for (const auto& [k, v] : m.settings) settings[k] = v;
  j["settings"] = std::move(settings);
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

}  // namespace dablog::io

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "dablog/critic.hpp"
#include "dablog/datagen.hpp"
#include "dablog/evaluation.hpp"
#include "dablog/keyset.hpp"
#include "dablog/sequencer.hpp"

namespace dablog::io {

// --- line-delimited record format -----------------------------------------
// One JSON object per line: {"session_id", "ts", "key", "attrs"?} with
// attrs drawn from {filepath, size_bytes, src_ip, dst_ip}.

std::vector<RawEventRecord> read_records(const std::string& path);
void write_records(const std::vector<RawEventRecord>& records, const std::string& path);

// --- label sidecar ---------------------------------------------------------
// One JSON object per line: {"session_id", "label"} plus optional
// generator provenance ("rare_variant", "anomaly_op").

struct LabelEntry {
  std::string session_id;
  Label label = Label::Normal;
  bool rare_variant = false;
  std::optional<std::string> anomaly_op;
};

std::vector<LabelEntry> read_labels(const std::string& path);
void write_labels(const std::vector<CorpusItem>& items, const std::string& path);
LabelMap label_map(const std::vector<LabelEntry>& entries);

// --- keyset document ---------------------------------------------------------

void save_keyset(const KeySet& ks, const std::string& path);
KeySet load_keyset(const std::string& path);

// --- filepath add-on table ---------------------------------------------------

FilepathTable load_filepath_table(const std::string& path);

// --- verdict export ----------------------------------------------------------

struct SessionVerdict {
  std::string session_id;
  Verdict verdict;
};

void write_verdicts(const std::vector<SessionVerdict>& verdicts, const KeySet& ks,
                    const std::string& path);
LabelMap read_verdict_labels(const std::string& path);

// --- evaluation report -------------------------------------------------------

// Writes <base>.json and <base>.txt (aligned table).
void write_report(const ConfusionCounts& counts, const MetricReport& metrics,
                  const std::string& base_path);

// CSV of sweep points: theta_n,tp,fp,tn,fn,f1
void write_sweep_csv(const std::vector<std::pair<double, ConfusionCounts>>& sweep_result,
                     const std::string& path);

// --- run manifest ------------------------------------------------------------
// Every CLI run records what produced its outputs; identical manifests
// imply byte-identical outputs.

struct Manifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> inputs;   // path -> content hash
  std::vector<std::pair<std::string, std::string>> settings; // flag -> value
};

std::uint64_t hash_file(const std::string& path);
std::string hash_hex(std::uint64_t h);
void write_manifest(const Manifest& m, const std::string& path);

}  // namespace dablog::io

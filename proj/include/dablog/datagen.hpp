#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dablog/keyset.hpp"
#include "dablog/rng.hpp"
#include "dablog/sequencer.hpp"

namespace dablog {

// One alternative at a choice point. An empty key emits nothing (optional
// step). Attr fields may reference a session parameter as "$name".
struct GrammarChoice {
  double weight = 1.0;
  bool rare = false;
  std::string key;  // base key; empty = emit nothing
  std::map<std::string, std::string> attrs;  // filepath/size_bytes/src_ip/dst_ip
};

struct GrammarStep {
  std::vector<GrammarChoice> choices;
  int repeat_min = 1;
  int repeat_max = 1;
};

struct GrammarTemplate {
  std::string name;
  double weight = 1.0;
  std::vector<GrammarStep> steps;
};

// Session-level parameter: drawn once per session and substituted into
// every "$name" reference, so several events echo the same value.
struct SessionParam {
  std::string name;
  std::vector<GrammarChoice> choices;  // key field unused; value lives in attrs["value"]
};

enum class AnomalyOp { DropCause, EffectWithoutCause, OutOfOrderSwap };

std::string to_string(AnomalyOp op);
AnomalyOp anomaly_op_from_string(const std::string& s);

// Cause/effect base keys used by the structural mutations. Drop and swap
// match events by base key, attributes and all; insertion emits the effect
// key bare, so pairs with attribute-bearing effects set insert_effect to
// false to keep inserted events inside the known vocabulary.
struct CausalPair {
  std::string cause;
  std::string effect;
  bool insert_effect = true;
};

struct GrammarSpec {
  std::vector<GrammarTemplate> templates;
  std::vector<SessionParam> params;
  std::vector<CausalPair> causal_pairs;
  std::vector<AnomalyOp> anomaly_ops;
  double rare_variant_weight = 0.02;
  std::uint64_t seed = 1;
};

// Per-session provenance recorded by the generator.
struct CorpusItem {
  std::string session_id;
  Label label = Label::Normal;
  bool rare_variant = false;               // drew at least one rare branch or value
  std::optional<AnomalyOp> anomaly_op;     // set for abnormal sessions
};

struct GeneratedCorpus {
  std::vector<RawEventRecord> records;
  std::vector<CorpusItem> items;
};

// Deterministic generation: the corpus is a pure function of the grammar and
// the counts. Abnormal sessions are fresh normal samples with exactly one
// structural mutation applied.
GeneratedCorpus generate_corpus(const GrammarSpec& g, int n_normal, int n_abnormal);

// The desk-scale grammar shipped with the project: six normal session
// shapes over block-storage style keys with size/peer echoes, one rare
// size class and one rare branch.
GrammarSpec default_grammar();

GrammarSpec load_grammar(const std::string& path);
void save_grammar(const GrammarSpec& g, const std::string& path);

// Distinct-window bookkeeping over labeled sessions.
struct CorpusStats {
  std::map<int, std::int64_t> key_counts;  // id -> occurrences
  std::int64_t patterns_always_normal = 0;
  std::int64_t patterns_always_abnormal = 0;
  std::int64_t patterns_nondeterministic = 0;
  std::int64_t patterns_total = 0;
};

CorpusStats corpus_stats(const std::vector<Session>& sessions, const KeySet& ks, int seqlen);

}  // namespace dablog

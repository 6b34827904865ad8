#include "dablog/datagen.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace dablog {

namespace {

using nlohmann::json;

struct Ev {
  std::string key;
  std::map<std::string, std::string> attrs;
};

// Weighted pick honoring the rare pool: with probability rare_weight the
// pick comes from the rare-marked choices, otherwise from the common ones.
const GrammarChoice& pick_choice(const std::vector<GrammarChoice>& choices, double rare_weight,
                                 Rng& rng, bool& used_rare) {
  std::vector<const GrammarChoice*> common, rare;
  for (const auto& c : choices) (c.rare ? rare : common).push_back(&c);
  const std::vector<const GrammarChoice*>* pool = &common;
  if (!rare.empty() && (common.empty() || rng.next_double() < rare_weight)) {
    pool = &rare;
    used_rare = true;
  }
  std::vector<double> weights;
  weights.reserve(pool->size());
  for (const auto* c : *pool) weights.push_back(c->weight);
  return *(*pool)[rng.weighted_pick(weights)];
}

// Only the parameters a template actually references are drawn, so a rare
// draw always corresponds to an emitted event.
std::map<std::string, std::string> draw_params(const GrammarSpec& g, const GrammarTemplate& tpl,
                                               Rng& rng, bool& used_rare) {
  std::map<std::string, std::string> values;
  for (const auto& p : g.params) {
    bool referenced = false;
    for (const auto& step : tpl.steps) {
      for (const auto& c : step.choices) {
        for (const auto& [field, raw] : c.attrs) {
          (void)field;
          if (raw == "$" + p.name) referenced = true;
        }
      }
    }
    if (!referenced) continue;
    const GrammarChoice& c = pick_choice(p.choices, g.rare_variant_weight, rng, used_rare);
    auto it = c.attrs.find("value");
    if (it == c.attrs.end()) throw std::invalid_argument("param choice without value: " + p.name);
    values[p.name] = it->second;
  }
  return values;
}

std::string resolve(const std::string& raw, const std::map<std::string, std::string>& params) {
  if (raw.empty() || raw[0] != '$') return raw;
  auto it = params.find(raw.substr(1));
  if (it == params.end()) throw std::invalid_argument("unknown grammar param: " + raw);
  return it->second;
}

std::vector<Ev> sample_normal(const GrammarSpec& g, Rng& rng, bool& used_rare) {
  std::vector<double> tw;
  tw.reserve(g.templates.size());
  for (const auto& t : g.templates) tw.push_back(t.weight);
  const GrammarTemplate& tpl = g.templates[rng.weighted_pick(tw)];
  const auto params = draw_params(g, tpl, rng, used_rare);

  std::vector<Ev> events;
  for (const auto& step : tpl.steps) {
    const int span = step.repeat_max - step.repeat_min;
    const int count =
        step.repeat_min + (span > 0 ? static_cast<int>(rng.next_below(span + 1)) : 0);
    for (int rep = 0; rep < count; ++rep) {
      const GrammarChoice& c = pick_choice(step.choices, g.rare_variant_weight, rng, used_rare);
      if (c.key.empty()) continue;
      Ev ev;
      ev.key = c.key;
      for (const auto& [name, raw] : c.attrs) ev.attrs[name] = resolve(raw, params);
      events.push_back(std::move(ev));
    }
  }
  if (events.empty()) throw std::runtime_error("grammar template produced no events: " + tpl.name);
  return events;
}

bool apply_drop_cause(const GrammarSpec& g, std::vector<Ev>& events, Rng& rng) {
  std::vector<std::size_t> candidates;
  for (const auto& pair : g.causal_pairs) {
    for (std::size_t i = 0; i < events.size(); ++i) {
      if (events[i].key != pair.cause) continue;
      for (std::size_t j = i + 1; j < events.size(); ++j) {
        if (events[j].key == pair.effect) {
          candidates.push_back(i);
          break;
        }
      }
    }
  }
  if (candidates.empty() || events.size() < 2) return false;
  const std::size_t victim = candidates[rng.next_below(candidates.size())];
  events.erase(events.begin() + victim);
  return true;
}

bool apply_effect_without_cause(const GrammarSpec& g, std::vector<Ev>& events, Rng& rng) {
  std::vector<const CausalPair*> insertable;
  for (const auto& p : g.causal_pairs) {
    if (p.insert_effect) insertable.push_back(&p);
  }
  if (insertable.empty()) return false;
  const CausalPair& pair = *insertable[rng.next_below(insertable.size())];
  std::size_t first_cause = events.size();
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (events[i].key == pair.cause) {
      first_cause = i;
      break;
    }
  }
  const std::size_t at = rng.next_below(first_cause + 1);
  events.insert(events.begin() + at, Ev{pair.effect, {}});
  return true;
}

bool apply_out_of_order_swap(const GrammarSpec& g, std::vector<Ev>& events, Rng& rng) {
  std::vector<std::pair<std::size_t, std::size_t>> candidates;
  for (const auto& pair : g.causal_pairs) {
    for (std::size_t i = 0; i < events.size(); ++i) {
      if (events[i].key != pair.cause) continue;
      for (std::size_t j = i + 1; j < events.size(); ++j) {
        if (events[j].key == pair.effect) {
          candidates.emplace_back(i, j);
          break;
        }
      }
    }
  }
  if (candidates.empty()) return false;
  const auto [i, j] = candidates[rng.next_below(candidates.size())];
  std::swap(events[i], events[j]);
  return true;
}

bool apply_op(AnomalyOp op, const GrammarSpec& g, std::vector<Ev>& events, Rng& rng) {
  switch (op) {
    case AnomalyOp::DropCause: return apply_drop_cause(g, events, rng);
    case AnomalyOp::EffectWithoutCause: return apply_effect_without_cause(g, events, rng);
    case AnomalyOp::OutOfOrderSwap: return apply_out_of_order_swap(g, events, rng);
  }
  return false;
}

EventAttrs to_event_attrs(const std::map<std::string, std::string>& attrs) {
  EventAttrs out;
  for (const auto& [name, value] : attrs) {
    if (name == "filepath") out.filepath = value;
    else if (name == "size_bytes") out.size_bytes = std::stoll(value);
    else if (name == "src_ip") out.src_ip = value;
    else if (name == "dst_ip") out.dst_ip = value;
    else throw std::invalid_argument("unknown attr field: " + name);
  }
  return out;
}

void emit_session(const std::vector<Ev>& events, const std::string& sid,
                  std::vector<RawEventRecord>& records) {
  for (std::size_t t = 0; t < events.size(); ++t) {
    RawEventRecord rec;
    rec.session_id = sid;
    rec.ts = static_cast<std::int64_t>(t);
    rec.base_key = events[t].key;
    rec.attrs = to_event_attrs(events[t].attrs);
    records.push_back(std::move(rec));
  }
}

std::string session_name(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "s%06d", index);
  return buf;
}

void validate_grammar(const GrammarSpec& g) {
  if (g.templates.empty()) throw std::invalid_argument("grammar has no templates");
  for (const auto& t : g.templates) {
    if (t.weight <= 0.0) throw std::invalid_argument("non-positive template weight: " + t.name);
    if (t.steps.empty()) throw std::invalid_argument("template has no steps: " + t.name);
    for (const auto& step : t.steps) {
      if (step.choices.empty()) throw std::invalid_argument("step has no choices: " + t.name);
      if (step.repeat_min < 0 || step.repeat_max < step.repeat_min) {
        throw std::invalid_argument("bad repeat range in template: " + t.name);
      }
      bool any_common = false;
      for (const auto& c : step.choices) {
        if (c.weight <= 0.0) throw std::invalid_argument("non-positive choice weight");
        if (!c.rare) any_common = true;
      }
      (void)any_common;  // all-rare steps are legal; the rare pool is then always used
    }
  }
  for (const auto& p : g.params) {
    if (p.choices.empty()) throw std::invalid_argument("param has no choices: " + p.name);
  }
  for (const auto& pair : g.causal_pairs) {
    if (pair.cause.empty() || pair.effect.empty() || pair.cause == pair.effect) {
      throw std::invalid_argument("bad causal pair");
    }
  }
  if (g.rare_variant_weight < 0.0 || g.rare_variant_weight >= 1.0) {
    throw std::invalid_argument("rare_variant_weight outside [0, 1)");
  }
}

}  // namespace

std::string to_string(AnomalyOp op) {
  switch (op) {
    case AnomalyOp::DropCause: return "drop_cause";
    case AnomalyOp::EffectWithoutCause: return "effect_without_cause";
    case AnomalyOp::OutOfOrderSwap: return "out_of_order_swap";
  }
  throw std::logic_error("unreachable anomaly op");
}

AnomalyOp anomaly_op_from_string(const std::string& s) {
  if (s == "drop_cause") return AnomalyOp::DropCause;
  if (s == "effect_without_cause") return AnomalyOp::EffectWithoutCause;
  if (s == "out_of_order_swap") return AnomalyOp::OutOfOrderSwap;
  throw std::invalid_argument("unknown anomaly op: " + s);
}

GeneratedCorpus generate_corpus(const GrammarSpec& g, int n_normal, int n_abnormal) {
  validate_grammar(g);
  if (n_normal < 0 || n_abnormal < 0) throw std::invalid_argument("negative session count");
  if (n_abnormal > 0 && g.anomaly_ops.empty()) {
    throw std::invalid_argument("abnormal sessions requested but grammar has no anomaly ops");
  }

  GeneratedCorpus corpus;
  Rng rng(g.seed);
  int next_id = 0;

  for (int i = 0; i < n_normal; ++i) {
    bool used_rare = false;
    const auto events = sample_normal(g, rng, used_rare);
    CorpusItem item;
    item.session_id = session_name(next_id++);
    item.label = Label::Normal;
    item.rare_variant = used_rare;
    emit_session(events, item.session_id, corpus.records);
    corpus.items.push_back(std::move(item));
  }

  for (int i = 0; i < n_abnormal; ++i) {
    bool applied = false;
    for (int attempt = 0; attempt < 100 && !applied; ++attempt) {
      bool used_rare = false;
      auto events = sample_normal(g, rng, used_rare);
      const AnomalyOp op = g.anomaly_ops[rng.next_below(g.anomaly_ops.size())];
      if (!apply_op(op, g, events, rng)) continue;
      CorpusItem item;
      item.session_id = session_name(next_id++);
      item.label = Label::Abnormal;
      item.rare_variant = used_rare;
      item.anomaly_op = op;
      emit_session(events, item.session_id, corpus.records);
      corpus.items.push_back(std::move(item));
      applied = true;
    }
    if (!applied) throw std::runtime_error("could not apply any anomaly op to a fresh sample");
  }
  return corpus;
}

CorpusStats corpus_stats(const std::vector<Session>& sessions, const KeySet& ks, int seqlen) {
  CorpusStats stats;
  std::map<std::vector<int>, std::pair<bool, bool>> seen;  // pattern -> (normal, abnormal)
  for (const auto& s : sessions) {
    for (int id : s.event_ids) ++stats.key_counts[id];
    if (!s.label) continue;
    for (const auto& w : windows(s, ks, seqlen)) {
      auto& flags = seen[w.ids];
      if (*s.label == Label::Normal) flags.first = true;
      else flags.second = true;
    }
  }
  for (const auto& [pattern, flags] : seen) {
    if (flags.first && flags.second) ++stats.patterns_nondeterministic;
    else if (flags.first) ++stats.patterns_always_normal;
    else ++stats.patterns_always_abnormal;
  }
  stats.patterns_total = static_cast<std::int64_t>(seen.size());
  return stats;
}

namespace {

constexpr std::int64_t mib(int n) { return static_cast<std::int64_t>(n) * 1024 * 1024; }

GrammarChoice key_choice(std::string key, double weight = 1.0,
                         std::map<std::string, std::string> attrs = {}, bool rare = false) {
  GrammarChoice c;
  c.key = std::move(key);
  c.weight = weight;
  c.attrs = std::move(attrs);
  c.rare = rare;
  return c;
}

GrammarStep step(std::vector<GrammarChoice> choices, int rep_min = 1, int rep_max = 1) {
  GrammarStep s;
  s.choices = std::move(choices);
  s.repeat_min = rep_min;
  s.repeat_max = rep_max;
  return s;
}

GrammarChoice value_choice(std::int64_t value, double weight, bool rare = false) {
  GrammarChoice c;
  c.weight = weight;
  c.rare = rare;
  c.attrs["value"] = std::to_string(value);
  return c;
}

GrammarChoice value_choice(std::string value, double weight, bool rare = false) {
  GrammarChoice c;
  c.weight = weight;
  c.rare = rare;
  c.attrs["value"] = std::move(value);
  return c;
}

}  // namespace

GrammarSpec default_grammar() {
  GrammarSpec g;
  g.seed = 1;
  g.rare_variant_weight = 0.02;

  // Session structure is deliberately rigid (fixed repeat counts); the
  // variety comes from branch choices and echoed session parameters. The
  // transfer size is announced once and echoed by later events; the
  // 20-30 MB class is the rare-but-normal variant.
  g.params.push_back(SessionParam{
      "size",
      {value_choice(mib(65), 0.50), value_choice(mib(45), 0.28), value_choice(mib(15), 0.22),
       value_choice(mib(25), 1.0, /*rare=*/true)}});
  g.params.push_back(SessionParam{
      "peer",
      {value_choice("10.250.5.17", 0.40), value_choice("10.250.9.3", 0.25),
       value_choice("10.251.40.8", 0.20), value_choice("10.251.71.11", 0.15)}});
  g.params.push_back(SessionParam{
      "peer2", {value_choice("10.250.5.17", 0.5), value_choice("10.251.40.8", 0.5)}});

  GrammarTemplate ingest;
  ingest.name = "ingest";
  ingest.weight = 0.30;
  ingest.steps = {
      step({key_choice("NameSystem.allocateBlock")}),
      step({key_choice("Receiving block", 1.0, {{"src_ip", "$peer"}, {"dst_ip", "$peer"}})}, 2, 2),
      step({key_choice("Received block", 1.0, {{"size_bytes", "$size"}, {"src_ip", "$peer"}})}),
      step({key_choice("blockMap updated", 1.0, {{"size_bytes", "$size"}})}, 2, 2),
      step({key_choice("PacketResponder terminating", 0.85),
            key_choice("PacketResponder interrupted", 0.15)}),
  };
  g.templates.push_back(std::move(ingest));

  GrammarTemplate replicate;
  replicate.name = "replicate";
  replicate.weight = 0.20;
  replicate.steps = {
      step({key_choice("ask to replicate block")}),
      step({key_choice("Starting thread to transfer block")}),
      step({key_choice("Transmitted block", 1.0, {{"src_ip", "$peer"}, {"dst_ip", "$peer2"}})},
           2, 2),
      step({key_choice("replication done", 0.9), key_choice("replication retried", 0.1)}),
  };
  g.templates.push_back(std::move(replicate));

  GrammarTemplate del;
  del.name = "delete";
  del.weight = 0.15;
  del.steps = {
      step({key_choice("scan deletion queue")}),
      step({key_choice("ask to delete block")}),
      step({key_choice("Deleting block")}, 2, 2),
      step({key_choice("deleted block ack")}),
      step({key_choice("purge record written")}),
  };
  g.templates.push_back(std::move(del));

  // Causes sit behind an anchoring first event: a dropped cause then leaves
  // a hole inside the anchored timeline instead of a plain left-shift.
  GrammarTemplate read;
  read.name = "read";
  read.weight = 0.15;
  read.steps = {
      step({key_choice("mount workspace")}),
      step({key_choice("open file")}),
      step({key_choice("read file")}, 3, 3),
      step({key_choice("", 1.0), key_choice("open second file", 1.0, {}, /*rare=*/true)}),
      step({key_choice("read file")}),
      step({key_choice("close file")}),
  };
  g.templates.push_back(std::move(read));

  GrammarTemplate verify;
  verify.name = "verify";
  verify.weight = 0.12;
  verify.steps = {
      step({key_choice("schedule verification")}),
      step({key_choice("verification started")}),
      step({key_choice("Verification succeeded", 0.92), key_choice("Verification failed", 0.08)},
           2, 2),
      step({key_choice("verification report written")}),
  };
  g.templates.push_back(std::move(verify));

  GrammarTemplate serve;
  serve.name = "serve";
  serve.weight = 0.08;
  serve.steps = {
      step({key_choice("serve request received")}),
      step({key_choice("Serving block", 1.0, {{"src_ip", "$peer"}, {"dst_ip", "$peer2"}})}, 2, 2),
      step({key_choice("served ok", 0.85),
            key_choice("Got exception while serving block", 0.15)}),
      step({key_choice("serve done")}),
  };
  g.templates.push_back(std::move(serve));

  g.causal_pairs = {
      {"ask to delete block", "Deleting block", true},
      {"open file", "read file", true},
      {"verification started", "verification report written", true},
      // announce/echo pair: dropped or reordered size announcements leave
      // inconsistent echoes; never inserted (the bare key is off-vocabulary)
      {"Received block", "blockMap updated", false},
  };
  g.anomaly_ops = {AnomalyOp::DropCause, AnomalyOp::EffectWithoutCause,
                   AnomalyOp::OutOfOrderSwap};
  return g;
}

namespace {

json choice_to_json(const GrammarChoice& c) {
  json j;
  j["weight"] = c.weight;
  if (c.rare) j["rare"] = true;
  j["key"] = c.key;
  if (!c.attrs.empty()) j["attrs"] = c.attrs;
  return j;
}

GrammarChoice choice_from_json(const json& j) {
  GrammarChoice c;
  for (const auto& [k, v] : j.items()) {
    if (k == "weight") c.weight = v.get<double>();
    else if (k == "rare") c.rare = v.get<bool>();
    else if (k == "key") c.key = v.get<std::string>();
    else if (k == "attrs") c.attrs = v.get<std::map<std::string, std::string>>();
    else throw std::invalid_argument("unknown grammar choice field: " + k);
  }
  return c;
}

}  // namespace

void save_grammar(const GrammarSpec& g, const std::string& path) {
  json j;
  j["version"] = 1;
  j["seed"] = g.seed;
  j["rare_variant_weight"] = g.rare_variant_weight;
  j["params"] = json::array();
  for (const auto& p : g.params) {
    json jp;
    jp["name"] = p.name;
    jp["choices"] = json::array();
    for (const auto& c : p.choices) jp["choices"].push_back(choice_to_json(c));
    j["params"].push_back(jp);
  }
  j["templates"] = json::array();
  for (const auto& t : g.templates) {
    json jt;
    jt["name"] = t.name;
    jt["weight"] = t.weight;
    jt["steps"] = json::array();
    for (const auto& s : t.steps) {
      json js;
      js["repeat_min"] = s.repeat_min;
      js["repeat_max"] = s.repeat_max;
      js["choices"] = json::array();
      for (const auto& c : s.choices) js["choices"].push_back(choice_to_json(c));
      jt["steps"].push_back(js);
    }
    j["templates"].push_back(jt);
  }
  j["causal_pairs"] = json::array();
  for (const auto& p : g.causal_pairs) {
    j["causal_pairs"].push_back(
        {{"cause", p.cause}, {"effect", p.effect}, {"insert_effect", p.insert_effect}});
  }
  j["anomaly_ops"] = json::array();
  for (AnomalyOp op : g.anomaly_ops) j["anomaly_ops"].push_back(to_string(op));

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write grammar file: " + path);
  out << j.dump(2) << "\n";
}

GrammarSpec load_grammar(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open grammar file: " + path);
  json j = json::parse(in);
  GrammarSpec g;
  for (const auto& [k, v] : j.items()) {
    if (k == "version") {
      if (v.get<int>() != 1) throw std::invalid_argument("unsupported grammar version");
    } else if (k == "seed") {
      g.seed = v.get<std::uint64_t>();
    } else if (k == "rare_variant_weight") {
      g.rare_variant_weight = v.get<double>();
    } else if (k == "params") {
      for (const auto& jp : v) {
        SessionParam p;
        p.name = jp.at("name").get<std::string>();
        for (const auto& jc : jp.at("choices")) p.choices.push_back(choice_from_json(jc));
        g.params.push_back(std::move(p));
      }
    } else if (k == "templates") {
      for (const auto& jt : v) {
        GrammarTemplate t;
        t.name = jt.at("name").get<std::string>();
        t.weight = jt.at("weight").get<double>();
        for (const auto& js : jt.at("steps")) {
          GrammarStep s;
          if (js.contains("repeat_min")) s.repeat_min = js.at("repeat_min").get<int>();
          if (js.contains("repeat_max")) s.repeat_max = js.at("repeat_max").get<int>();
          for (const auto& jc : js.at("choices")) s.choices.push_back(choice_from_json(jc));
          t.steps.push_back(std::move(s));
        }
        g.templates.push_back(std::move(t));
      }
    } else if (k == "causal_pairs") {
      for (const auto& jp : v) {
        CausalPair p;
        p.cause = jp.at("cause").get<std::string>();
        p.effect = jp.at("effect").get<std::string>();
        if (jp.contains("insert_effect")) p.insert_effect = jp.at("insert_effect").get<bool>();
        g.causal_pairs.push_back(std::move(p));
      }
    } else if (k == "anomaly_ops") {
      for (const auto& jo : v) g.anomaly_ops.push_back(anomaly_op_from_string(jo.get<std::string>()));
    } else {
      throw std::invalid_argument("unknown grammar field: " + k);
    }
  }
  validate_grammar(g);
  return g;
}

}  // namespace dablog

#include "dablog/persist.hpp"

#include <fstream>

#include <json.hpp>

#include "dablog/io.hpp"

namespace dablog::io {

namespace {

using nlohmann::json;

json arrays_to_json(const nn::ParamList& params) {
  json arrays = json::object();
  for (const nn::Param* p : params) {
    arrays[p->name] = {{"rows", p->w.rows()}, {"cols", p->w.cols()}, {"data", p->w.data()}};
  }
  return arrays;
}

void arrays_from_json(const json& arrays, const nn::ParamList& params) {
  for (nn::Param* p : params) {
    if (!arrays.contains(p->name)) throw std::runtime_error("model file missing array " + p->name);
    const json& a = arrays[p->name];
    if (a.at("rows").get<int>() != p->w.rows() || a.at("cols").get<int>() != p->w.cols()) {
      throw std::runtime_error("model array shape mismatch for " + p->name);
    }
    auto data = a.at("data").get<std::vector<double>>();
    if (data.size() != p->w.size()) throw std::runtime_error("model array size mismatch");
    p->w.data() = std::move(data);
  }
}

json read_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  json j = json::parse(in);
  if (j.at("version").get<int>() != 1) throw std::runtime_error("unsupported model version");
  return j;
}

void write_model_file(const json& j, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model file: " + path);
  out << j.dump() << "\n";
}

}  // namespace

void save_model(DablogModel& model, const std::string& path) {
  json j;
  j["version"] = 1;
  j["model_kind"] = "dablog";
  j["config"] = {{"seqlen", model.config().seqlen},
                 {"embedding_dim", model.config().embedding_dim},
                 {"encoder_hidden", model.config().encoder_hidden},
                 {"decoder_hidden", model.config().decoder_hidden},
                 {"interlayer_relu", model.config().interlayer_relu},
                 {"vocab_ext", model.vocab_ext()}};
  j["keyset_hash"] = hash_hex(model.keyset_hash());
  j["arrays"] = arrays_to_json(model.params());
  write_model_file(j, path);
}

void save_model(BaselineModel& model, const std::string& path) {
  json j;
  j["version"] = 1;
  j["model_kind"] = "baseline";
  j["config"] = {{"seqlen", model.config().seqlen},
                 {"embedding_dim", model.config().embedding_dim},
                 {"hidden", model.config().hidden},
                 {"interlayer_relu", model.config().interlayer_relu},
                 {"vocab_ext", model.vocab_ext()}};
  j["keyset_hash"] = hash_hex(model.keyset_hash());
  j["arrays"] = arrays_to_json(model.params());
  write_model_file(j, path);
}

void save_model(const FrequencyModel& model, std::uint64_t keyset_hash, const std::string& path) {
  json j;
  j["version"] = 1;
  j["model_kind"] = "freq";
  j["keyset_hash"] = hash_hex(keyset_hash);
  j["counts"] = model.counts();
  write_model_file(j, path);
}

std::string peek_model_kind(const std::string& path) {
  return read_model_file(path).at("model_kind").get<std::string>();
}

std::unique_ptr<DablogModel> load_dablog(const std::string& path) {
  json j = read_model_file(path);
  if (j.at("model_kind").get<std::string>() != "dablog") {
    throw std::runtime_error("not a dablog model file: " + path);
  }
  const json& c = j.at("config");
  DablogConfig cfg;
  cfg.seqlen = c.at("seqlen").get<int>();
  cfg.embedding_dim = c.at("embedding_dim").get<int>();
  cfg.encoder_hidden = c.at("encoder_hidden").get<std::vector<int>>();
  cfg.decoder_hidden = c.at("decoder_hidden").get<std::vector<int>>();
  cfg.interlayer_relu = c.at("interlayer_relu").get<bool>();
  const auto hash = std::stoull(j.at("keyset_hash").get<std::string>(), nullptr, 16);
  auto model = std::make_unique<DablogModel>(cfg, c.at("vocab_ext").get<int>(), hash, 0);
  arrays_from_json(j.at("arrays"), model->params());
  return model;
}

std::unique_ptr<BaselineModel> load_baseline(const std::string& path) {
  json j = read_model_file(path);
  if (j.at("model_kind").get<std::string>() != "baseline") {
    throw std::runtime_error("not a baseline model file: " + path);
  }
  const json& c = j.at("config");
  BaselineConfig cfg;
  cfg.seqlen = c.at("seqlen").get<int>();
  cfg.embedding_dim = c.at("embedding_dim").get<int>();
  cfg.hidden = c.at("hidden").get<std::vector<int>>();
  cfg.interlayer_relu = c.at("interlayer_relu").get<bool>();
  const auto hash = std::stoull(j.at("keyset_hash").get<std::string>(), nullptr, 16);
  auto model = std::make_unique<BaselineModel>(cfg, c.at("vocab_ext").get<int>(), hash, 0);
  arrays_from_json(j.at("arrays"), model->params());
  return model;
}

FrequencyModel load_frequency(const std::string& path, std::uint64_t* keyset_hash) {
  json j = read_model_file(path);
  if (j.at("model_kind").get<std::string>() != "freq") {
    throw std::runtime_error("not a frequency model file: " + path);
  }
  if (keyset_hash) {
    *keyset_hash = std::stoull(j.at("keyset_hash").get<std::string>(), nullptr, 16);
  }
  return FrequencyModel::from_counts(j.at("counts").get<std::vector<std::int64_t>>());
}

}  // namespace dablog::io

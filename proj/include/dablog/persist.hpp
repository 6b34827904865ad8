#pragma once

#include <memory>
#include <string>

#include "dablog/autoencoder.hpp"
#include "dablog/predictor.hpp"

namespace dablog::io {

// Versioned JSON envelope: {version, model_kind, config, keyset_hash,
// arrays}. Arrays round-trip bit-exactly, so a loaded model reproduces the
// saved model's outputs to the last ulp.

void save_model(DablogModel& model, const std::string& path);
void save_model(BaselineModel& model, const std::string& path);
void save_model(const FrequencyModel& model, std::uint64_t keyset_hash, const std::string& path);

std::string peek_model_kind(const std::string& path);

std::unique_ptr<DablogModel> load_dablog(const std::string& path);
std::unique_ptr<BaselineModel> load_baseline(const std::string& path);
FrequencyModel load_frequency(const std::string& path, std::uint64_t* keyset_hash = nullptr);

}  // namespace dablog::io

#pragma once

#include <cstdint>
#include <optional>
#include <regex>
#include <string>
#include <unordered_map>
#include <vector>

#include "dablog/matrix.hpp"

namespace dablog {

enum class Granularity { K0, K1, K2 };

std::string to_string(Granularity g);
Granularity granularity_from_string(const std::string& s);

// Sentinel texts for the three reserved keys. No real key may equal them.
inline constexpr const char* kBosText = "<begin-of-sequence>";
inline constexpr const char* kEosText = "<end-of-sequence>";
inline constexpr const char* kUnkText = "<unknown>";

// Optional structured attributes carried by a raw log record.
struct EventAttrs {
  std::optional<std::string> filepath;
  std::optional<std::int64_t> size_bytes;
  std::optional<std::string> src_ip;
  std::optional<std::string> dst_ip;

  bool empty() const { return !filepath && !size_bytes && !src_ip && !dst_ip; }
};

// Ingestion carrier: one log line before key derivation.
struct RawEventRecord {
  std::string session_id;
  std::int64_t ts = 0;  // monotone ordering token, unitless
  std::string base_key;
  EventAttrs attrs;
};

// Ordered filepath rules: first matching regex contributes its template
// string as an add-on. The rule set is a config input, not mined from data.
class FilepathTable {
 public:
  void add_rule(const std::string& pattern, const std::string& addon);
  std::optional<std::string> lookup(const std::string& filepath) const;
  std::size_t size() const { return rules_.size(); }

 private:
  struct Rule {
    std::string pattern;
    std::regex re;
    std::string addon;
  };
  std::vector<Rule> rules_;
};

// Rewrites a base key under the given granularity by attaching add-on
// strings in fixed order: filepath, then size bucket, then IP direction.
// K0 returns the base key unchanged. Pure and deterministic.
std::string derive_addon_key(const std::string& base_key, const EventAttrs& attrs,
                             Granularity granularity,
                             const FilepathTable& filepath_table = {});

// Vocabulary of real event keys plus BOS/EOS/UNK with stable integer ids:
// real keys take 0..V-1 in first-occurrence order, then BOS=V, EOS=V+1,
// UNK=V+2. Immutable once built.
class KeySet {
 public:
  KeySet() = default;

  int vocab_size() const { return static_cast<int>(keys_.size()); }          // V
  int extended_size() const { return vocab_size() + 3; }                     // V+3
  int bos_id() const { return vocab_size(); }
  int eos_id() const { return vocab_size() + 1; }
  int unk_id() const { return vocab_size() + 2; }
  bool is_reserved(int id) const { return id >= vocab_size() && id < extended_size(); }

  Granularity granularity() const { return granularity_; }
  const std::vector<std::string>& keys() const { return keys_; }

  // Total: known keys map to their id, sentinel texts to their reserved id,
  // anything else to UNK.
  int key_id(const std::string& key) const;

  // Text of any id in [0, V+3), sentinels included.
  const std::string& key_text(int id) const;

  // FNV-1a 64 over granularity and key list; couples models to the exact
  // vocabulary they were trained with.
  std::uint64_t hash() const;

  static KeySet from_keys(std::vector<std::string> keys, Granularity granularity);

 private:
  Granularity granularity_ = Granularity::K0;
  std::vector<std::string> keys_;
  std::unordered_map<std::string, int> id_of_;
};

// Derives keys for every record and collects the distinct ones in
// first-occurrence order. Throws "empty corpus" on an empty stream.
KeySet build_vocabulary(const std::vector<RawEventRecord>& records, Granularity granularity,
                        const FilepathTable& filepath_table = {});

// One-hot rows over the extended vocabulary, shape len(ids) x (V+3).
Matrix onehot(const KeySet& ks, const std::vector<int>& ids);

}  // namespace dablog

#include "dablog/keyset.hpp"

#include <array>
#include <cctype>
#include <stdexcept>

namespace dablog {

std::string to_string(Granularity g) {
  switch (g) {
    case Granularity::K0: return "k0";
    case Granularity::K1: return "k1";
    case Granularity::K2: return "k2";
  }
  throw std::logic_error("unreachable granularity");
}

Granularity granularity_from_string(const std::string& s) {
  if (s == "k0" || s == "K0") return Granularity::K0;
  if (s == "k1" || s == "K1") return Granularity::K1;
  if (s == "k2" || s == "K2") return Granularity::K2;
  throw std::invalid_argument("unknown granularity: " + s);
}

void FilepathTable::add_rule(const std::string& pattern, const std::string& addon) {
  rules_.push_back(Rule{pattern, std::regex(pattern), addon});
}

std::optional<std::string> FilepathTable::lookup(const std::string& filepath) const {
  for (const auto& rule : rules_) {
    if (std::regex_match(filepath, rule.re)) return rule.addon;
  }
  return std::nullopt;
}

namespace {

constexpr std::int64_t kTenMiB = 10LL * 1024 * 1024;
constexpr int kSizeBucketCount = 7;  // 0-10 ... 60-70, top bucket absorbs >= 60 MiB

std::string size_addon(std::int64_t size_bytes) {
  if (size_bytes < 0) throw std::invalid_argument("bad size");
  std::int64_t bucket = size_bytes / kTenMiB;
  if (bucket >= kSizeBucketCount) bucket = kSizeBucketCount - 1;
  const std::int64_t lo = 10 * bucket;
  return "of size " + std::to_string(lo) + "-" + std::to_string(lo + 10) + " MB";
}

std::array<std::string, 4> split_ip(const std::string& ip) {
  std::array<std::string, 4> groups;
  std::size_t pos = 0;
  for (int g = 0; g < 4; ++g) {
    std::size_t dot = (g < 3) ? ip.find('.', pos) : ip.size();
    if (dot == std::string::npos || dot == pos) throw std::invalid_argument("bad ip");
    const std::string part = ip.substr(pos, dot - pos);
    if (part.size() > 3) throw std::invalid_argument("bad ip");
    int value = 0;
    for (char c : part) {
      if (!std::isdigit(static_cast<unsigned char>(c))) throw std::invalid_argument("bad ip");
      value = value * 10 + (c - '0');
    }
    if (value > 255) throw std::invalid_argument("bad ip");
    groups[g] = part;
    pos = dot + 1;
  }
  return groups;
}

// K1: first two dotted groups ("10.250.*"); K2: plus the leading digit of
// the third group ("10.251.7*").
std::string ip_prefix(const std::string& ip, Granularity granularity) {
  const auto groups = split_ip(ip);
  if (granularity == Granularity::K2) {
    return groups[0] + "." + groups[1] + "." + groups[2].substr(0, 1) + "*";
  }
  return groups[0] + "." + groups[1] + ".*";
}

std::string ip_addon(const EventAttrs& attrs, Granularity granularity) {
  if (attrs.src_ip && attrs.dst_ip) {
    if (*attrs.src_ip == *attrs.dst_ip) {
      split_ip(*attrs.src_ip);  // still reject malformed input
      return "within the localhost";
    }
    const std::string src = ip_prefix(*attrs.src_ip, granularity);
    const std::string dst = ip_prefix(*attrs.dst_ip, granularity);
    return src == dst ? "within the subnet" : "between subnets";
  }
  if (attrs.src_ip) return "from " + ip_prefix(*attrs.src_ip, granularity);
  return "to " + ip_prefix(*attrs.dst_ip, granularity);
}

std::string strip(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string derive_addon_key(const std::string& base_key, const EventAttrs& attrs,
                             Granularity granularity, const FilepathTable& filepath_table) {
  std::string key = strip(base_key);
  if (granularity == Granularity::K0) return key;
  if (attrs.filepath) {
    if (auto addon = filepath_table.lookup(*attrs.filepath)) key += " " + *addon;
  }
  if (attrs.size_bytes) key += " " + size_addon(*attrs.size_bytes);
  if (attrs.src_ip || attrs.dst_ip) key += " " + ip_addon(attrs, granularity);
  return key;
}

int KeySet::key_id(const std::string& key) const {
  auto it = id_of_.find(key);
  if (it != id_of_.end()) return it->second;
  if (key == kBosText) return bos_id();
  if (key == kEosText) return eos_id();
  return unk_id();
}

const std::string& KeySet::key_text(int id) const {
  static const std::string bos = kBosText;
  static const std::string eos = kEosText;
  static const std::string unk = kUnkText;
  if (id >= 0 && id < vocab_size()) return keys_[id];
  if (id == bos_id()) return bos;
  if (id == eos_id()) return eos;
  if (id == unk_id()) return unk;
  throw std::out_of_range("key id out of range");
}

std::uint64_t KeySet::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;
    h *= 0x100000001b3ULL;
  };
  mix(to_string(granularity_));
  for (const auto& k : keys_) mix(k);
  return h;
}

KeySet KeySet::from_keys(std::vector<std::string> keys, Granularity granularity) {
  KeySet ks;
  ks.granularity_ = granularity;
  for (auto& raw : keys) {
    std::string key = strip(raw);
    if (key.empty()) throw std::invalid_argument("empty event key");
    if (key == kBosText || key == kEosText || key == kUnkText) {
      throw std::invalid_argument("event key collides with a reserved sentinel: " + key);
    }
    if (ks.id_of_.count(key)) continue;
    ks.id_of_.emplace(key, static_cast<int>(ks.keys_.size()));
    ks.keys_.push_back(std::move(key));
  }
  return ks;
}

KeySet build_vocabulary(const std::vector<RawEventRecord>& records, Granularity granularity,
                        const FilepathTable& filepath_table) {
  if (records.empty()) throw std::invalid_argument("empty corpus");
  std::vector<std::string> derived;
  derived.reserve(records.size());
  for (const auto& rec : records) {
    derived.push_back(derive_addon_key(rec.base_key, rec.attrs, granularity, filepath_table));
  }
  return KeySet::from_keys(std::move(derived), granularity);
}

Matrix onehot(const KeySet& ks, const std::vector<int>& ids) {
  const int dim = ks.extended_size();
  Matrix m(static_cast<int>(ids.size()), dim);
  for (std::size_t r = 0; r < ids.size(); ++r) {
    const int id = ids[r];
    if (id < 0 || id >= dim) throw std::out_of_range("key id out of range for onehot");
    m(static_cast<int>(r), id) = 1.0;
  }
  return m;
}

}  // namespace dablog

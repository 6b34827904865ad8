#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "dablog/io.hpp"

using namespace dablog;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("record files round trip including attrs") {
  std::vector<RawEventRecord> records;
  RawEventRecord r1{"sess-1", 0, "Received block", {}};
  r1.attrs.size_bytes = 26214400;
  r1.attrs.src_ip = "10.250.11.32";
  RawEventRecord r2{"sess-1", 1, "plain", {}};
  RawEventRecord r3{"sess-2", 0, "with path", {}};
  r3.attrs.filepath = "/mnt/x";
  records = {r1, r2, r3};

  const std::string path = temp_path("records_roundtrip.jsonl");
  io::write_records(records, path);
  const auto loaded = io::read_records(path);
  REQUIRE(loaded.size() == 3);
  CHECK(loaded[0].session_id == "sess-1");
  CHECK(loaded[0].attrs.size_bytes == 26214400);
  CHECK(loaded[0].attrs.src_ip == "10.250.11.32");
  CHECK_FALSE(loaded[0].attrs.dst_ip.has_value());
  CHECK(loaded[1].attrs.empty());
  CHECK(loaded[2].attrs.filepath == "/mnt/x");
  std::remove(path.c_str());
}

TEST_CASE("malformed record lines are rejected with location") {
  const std::string path = temp_path("records_bad.jsonl");
  {
    std::ofstream out(path);
    out << R"({"session_id":"a","ts":0,"key":"k"})" << "\n";
    out << "not json\n";
  }
  CHECK_THROWS_AS(io::read_records(path), std::runtime_error);
  std::remove(path.c_str());
}

TEST_CASE("negative sizes are rejected at parse time") {
  const std::string path = temp_path("records_neg.jsonl");
  {
    std::ofstream out(path);
    out << R"({"session_id":"a","ts":0,"key":"k","attrs":{"size_bytes":-5}})" << "\n";
  }
  CHECK_THROWS_AS(io::read_records(path), std::runtime_error);
  std::remove(path.c_str());
}

TEST_CASE("label sidecar round trip") {
  std::vector<CorpusItem> items;
  CorpusItem a{"s1", Label::Normal, true, std::nullopt};
  CorpusItem b{"s2", Label::Abnormal, false, AnomalyOp::DropCause};
  items = {a, b};
  const std::string path = temp_path("labels_roundtrip.jsonl");
  io::write_labels(items, path);
  const auto loaded = io::read_labels(path);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].label == Label::Normal);
  CHECK(loaded[0].rare_variant);
  CHECK_FALSE(loaded[0].anomaly_op.has_value());
  CHECK(loaded[1].label == Label::Abnormal);
  CHECK(loaded[1].anomaly_op == "drop_cause");

  const LabelMap m = io::label_map(loaded);
  CHECK(m.at("s1") == Label::Normal);
  CHECK(m.at("s2") == Label::Abnormal);
  std::remove(path.c_str());
}

TEST_CASE("keyset document round trip preserves ids and granularity") {
  const KeySet ks = KeySet::from_keys({"z key", "a key", "m key"}, Granularity::K2);
  const std::string path = temp_path("keys_roundtrip.json");
  io::save_keyset(ks, path);
  const KeySet loaded = io::load_keyset(path);
  CHECK(loaded.granularity() == Granularity::K2);
  CHECK(loaded.keys() == ks.keys());
  CHECK(loaded.hash() == ks.hash());
  CHECK(loaded.key_id("a key") == 1);
  std::remove(path.c_str());
}

TEST_CASE("verdict export and label re-import") {
  const KeySet ks = KeySet::from_keys({"a", "b"}, Granularity::K0);
  std::vector<io::SessionVerdict> verdicts(2);
  verdicts[0].session_id = "s1";
  verdicts[0].verdict.label = Label::Normal;
  verdicts[1].session_id = "s2";
  verdicts[1].verdict.label = Label::Abnormal;
  verdicts[1].verdict.offending.push_back(Offence{3, 1, 7, 0.001});
  verdicts[1].verdict.unk_positions.push_back(5);

  const std::string path = temp_path("verdicts.jsonl");
  io::write_verdicts(verdicts, ks, path);
  const LabelMap labels = io::read_verdict_labels(path);
  CHECK(labels.at("s1") == Label::Normal);
  CHECK(labels.at("s2") == Label::Abnormal);

  const std::string text = slurp(path);
  CHECK(text.find("\"key\":\"b\"") != std::string::npos);
  CHECK(text.find("\"rank\":7") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("report writer emits json and aligned text") {
  const ConfusionCounts c{16367, 2424, 197576, 471};
  const std::string base = temp_path("report_test");
  io::write_report(c, metrics(c), base);
  const std::string txt = slurp(base + ".txt");
  CHECK(txt.find("FP Rate    1.21%") != std::string::npos);
  CHECK(txt.find("Recall     97.20%") != std::string::npos);
  CHECK(txt.find("Precision  87.10%") != std::string::npos);
  CHECK(txt.find("F1 Score   91.87%") != std::string::npos);
  const std::string js = slurp(base + ".json");
  CHECK(js.find("\"tp\": 16367") != std::string::npos);
  std::remove((base + ".json").c_str());
  std::remove((base + ".txt").c_str());
}

TEST_CASE("file hashing is content-based") {
  const std::string p1 = temp_path("hash_a.txt");
  const std::string p2 = temp_path("hash_b.txt");
  {
    std::ofstream(p1) << "same bytes";
    std::ofstream(p2) << "same bytes";
  }
  CHECK(io::hash_file(p1) == io::hash_file(p2));
  {
    std::ofstream(p2) << "different";
  }
  CHECK(io::hash_file(p1) != io::hash_file(p2));
  CHECK(io::hash_hex(0xabcULL) == "0000000000000abc");
  std::remove(p1.c_str());
  std::remove(p2.c_str());
}

TEST_CASE("filepath table loads ordered rules") {
  const std::string path = temp_path("fp_table.json");
  {
    std::ofstream out(path);
    out << R"({"version":1,"rules":[
      {"pattern":"/mnt/.*","addon":"/mnt/hadoop/*"},
      {"pattern":".*","addon":"/other/*"}
    ]})";
  }
  const FilepathTable table = io::load_filepath_table(path);
  CHECK(table.lookup("/mnt/xyz") == "/mnt/hadoop/*");
  CHECK(table.lookup("/usr/abc") == "/other/*");
  std::remove(path.c_str());
}

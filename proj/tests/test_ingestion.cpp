#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "fnd/ingestion.hpp"
#include "support.hpp"

using namespace fnd;
namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  os << text;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path three_files(const std::string& name, const std::string& articles, const std::string& engagements,
                     const std::string& features) {
  const auto dir = testing::temp_dir(name);
  write_file(dir / kArticlesFile, articles);
  write_file(dir / kEngagementsFile, engagements);
  write_file(dir / kFeaturesFile, features);
  return dir;
}

std::string error_of(const fs::path& dir) {
  try {
    load_dataset_dir(dir);
  } catch (const IngestError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("load: three articles and an empty engagements file") {
  const auto dir = three_files("ingest-3", "id\tpublish_time\tlabel\nc\t30\t\na\t10\t1\nb\t10\t0\n", "",
                               "a 1 2\nb 3 4\nc 5 6\n");
  const Dataset d = load_dataset_dir(dir);
  REQUIRE(d.articles.size() == 3);
  CHECK(d.engagements.empty());
  CHECK(d.feature_dim == 2);
  CHECK(d.articles[0].id == "a");
  CHECK(d.articles[1].id == "b");
  CHECK(d.articles[2].id == "c");
  CHECK(d.articles[0].label == Veracity::fake);
  CHECK(d.articles[1].label == Veracity::real);
  CHECK_FALSE(d.articles[2].label.has_value());
  CHECK(d.articles[2].features[1] == 6.0);
}

TEST_CASE("load: header-only engagements file also reads as empty") {
  const auto dir = three_files("ingest-hdr", "id\tpublish_time\tlabel\na\t1\t0\n", "user_id\tarticle_id\ttime\n",
                               "a 0.5\n");
  CHECK(load_dataset_dir(dir).engagements.empty());
}

TEST_CASE("load: engagement citing a missing article names the row") {
  const auto dir = three_files("ingest-dangling", "id\tpublish_time\tlabel\na\t1\t0\n",
                               "user_id\tarticle_id\ttime\nu\ta\t5\nu\tnope\t6\n", "a 1\n");
  const auto msg = error_of(dir);
  CHECK(msg.find("engagements.tsv:3") != std::string::npos);
  CHECK(msg.find("nope") != std::string::npos);
}

TEST_CASE("load: parse errors carry the line number") {
  const std::string header = "id\tpublish_time\tlabel\n";
  SUBCASE("bad time") {
    const auto dir = three_files("ingest-badtime", header + "a\t1\t0\nb\tnoon\t1\n", "", "a 1\nb 2\n");
    CHECK(error_of(dir).find("articles.tsv:3") != std::string::npos);
  }
  SUBCASE("bad label") {
    const auto dir = three_files("ingest-badlabel", header + "a\t1\t2\n", "", "a 1\n");
    CHECK(error_of(dir).find("articles.tsv:2") != std::string::npos);
  }
  SUBCASE("feature dimension mismatch") {
    const auto dir = three_files("ingest-dim", header + "a\t1\t0\nb\t2\t1\n", "", "a 1 2\nb 3\n");
    const auto msg = error_of(dir);
    CHECK(msg.find("features.txt:2") != std::string::npos);
    CHECK(msg.find("dimension") != std::string::npos);
  }
  SUBCASE("bad real") {
    const auto dir = three_files("ingest-real", header + "a\t1\t0\n", "", "a 1x\n");
    CHECK(error_of(dir).find("features.txt:1") != std::string::npos);
  }
  SUBCASE("missing features") {
    const auto dir = three_files("ingest-missing", header + "a\t1\t0\nb\t2\t1\n", "", "a 1\n");
    CHECK(error_of(dir).find("'b'") != std::string::npos);
  }
  SUBCASE("duplicate article") {
    const auto dir = three_files("ingest-dup", header + "a\t1\t0\na\t2\t1\n", "", "a 1\n");
    CHECK(error_of(dir).find("articles.tsv:3") != std::string::npos);
  }
  SUBCASE("missing column") {
    const auto dir = three_files("ingest-col", "id\tpublish_time\na\t1\n", "", "a 1\n");
    CHECK(error_of(dir).find("label") != std::string::npos);
  }
  SUBCASE("missing file") {
    const auto dir = testing::temp_dir("ingest-none");
    CHECK(error_of(dir).find("cannot open") != std::string::npos);
  }
}

TEST_CASE("load: CRLF endings and fractional seconds") {
  const auto dir = three_files("ingest-crlf", "id\tpublish_time\tlabel\r\na\t10.9\t1\r\n",
                               "user_id\tarticle_id\ttime\r\nu\ta\t12.5\r\n", "a 1.5\r\n");
  const Dataset d = load_dataset_dir(dir);
  CHECK(d.articles[0].publish_time == 10);
  CHECK(d.engagements[0].time == 12);
  CHECK(d.articles[0].label == Veracity::fake);
}

TEST_CASE("parse_timestamp") {
  CHECK(parse_timestamp("0") == 0);
  CHECK(parse_timestamp("-5") == -5);
  CHECK(parse_timestamp("1500000000.75") == 1500000000);
  CHECK(parse_timestamp("") == kInvalidTime);
  CHECK(parse_timestamp("nan") == kInvalidTime);
  CHECK(parse_timestamp("inf") == kInvalidTime);
  CHECK(parse_timestamp("12abc") == kInvalidTime);
}

TEST_CASE("write/load round-trips random datasets exactly") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    testing::RandomDatasetSpec spec;
    spec.unlabeled_fraction = 0.25;
    const Dataset d = testing::random_dataset(rng, spec);
    const auto dir = testing::temp_dir("roundtrip");
    write_dataset(d, dir);
    const Dataset back = load_dataset_dir(dir);
    REQUIRE(back.articles.size() == d.articles.size());
    for (std::size_t i = 0; i < d.articles.size(); ++i) {
      CHECK(back.articles[i].id == d.articles[i].id);
      CHECK(back.articles[i].publish_time == d.articles[i].publish_time);
      CHECK(back.articles[i].label == d.articles[i].label);
      CHECK(back.articles[i].features == d.articles[i].features);
    }
    REQUIRE(back.engagements.size() == d.engagements.size());
    for (std::size_t i = 0; i < d.engagements.size(); ++i) {
      CHECK(back.engagements[i].user == d.engagements[i].user);
      CHECK(back.engagements[i].article == d.engagements[i].article);
      CHECK(back.engagements[i].time == d.engagements[i].time);
    }
    CHECK(fingerprint(back) == fingerprint(d));
    const auto dir2 = testing::temp_dir("roundtrip2");
    write_dataset(back, dir2);
    for (const char* f : {kArticlesFile, kEngagementsFile, kFeaturesFile}) CHECK(slurp(dir / f) == slurp(dir2 / f));
  }
}

TEST_CASE("fingerprint changes with content") {
  auto d = testing::small_dataset({{"a", 1}, {"b", 2}}, {0, 1}, {{"u", "a", 3}});
  const auto before = fingerprint(d);
  CHECK(before.size() == 16);
  d.engagements[0].time = 4;
  CHECK(fingerprint(d) != before);
}

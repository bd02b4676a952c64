#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "qcpd/dump_xml.hpp"
#include "qcpd/io.hpp"
#include "qcpd/labels.hpp"
#include "qcpd/synth.hpp"

using namespace qcpd;

namespace {

std::filesystem::path fixture(const char* name) { return std::filesystem::path(QCPD_FIXTURE_DIR) / name; }

Revision rev(const char* ts, std::string editor, bool registered, PageKind kind, std::string text) {
  return Revision{parse_timestamp(ts), std::move(editor), registered, kind, std::move(text)};
}

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("qcpd_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("registered contributor fixture") {
  auto histories = parse_mediawiki_xml_file(fixture("registered.xml"));
  REQUIRE(histories.size() == 1);
  PageHistory expected;
  expected.article_id = "Alpha Centauri";
  expected.creation_time = parse_timestamp("2010-05-01T12:00:00Z");
  expected.main_revisions = {rev("2010-05-01T12:00:00Z", "Alice", true, PageKind::Main,
                                 "'''Alpha Centauri''' is a [[star system]] & a <b>test</b>.")};
  CHECK(histories[0] == expected);
}

TEST_CASE("IP contributor fixture") {
  auto histories = parse_mediawiki_xml_file(fixture("ip.xml"));
  REQUIRE(histories.size() == 1);
  PageHistory expected;
  expected.article_id = "Beta";
  expected.creation_time = parse_timestamp("2011-02-03T04:05:06Z");
  expected.main_revisions = {rev("2011-02-03T04:05:06Z", "127.0.0.1", false, PageKind::Main, "Beta is a letter.")};
  CHECK(histories[0] == expected);
}

TEST_CASE("talk page pairing fixture") {
  auto histories = parse_mediawiki_xml_file(fixture("talk_pairing.xml"));
  REQUIRE(histories.size() == 1);
  PageHistory expected;
  expected.article_id = "Foo";
  expected.creation_time = parse_timestamp("2012-02-10T10:00:00Z");
  expected.main_revisions = {
      rev("2012-02-10T10:00:00Z", "Bob", true, PageKind::Main, "Foo is a [[placeholder]]."),
      rev("2012-04-10T10:00:00Z", "Dave", true, PageKind::Main, "Foo is a common [[placeholder]] name.")};
  expected.talk_revisions = {
      rev("2012-03-01T00:00:00Z", "Carol", true, PageKind::Talk, "{{WikiProject France|class=GA|importance=high}}"),
      rev("2012-06-15T08:30:00Z", "2001:db8::1", false, PageKind::Talk,
          "{{WikiProject France|class = start|importance=high}}\n== Sources ==\nNeeds more.")};
  CHECK(histories[0] == expected);
  CHECK_NOTHROW(histories[0].validate());
}

TEST_CASE("malformed XML fails with a byte offset") {
  std::istringstream in("<mediawiki><page><title>X</title><revision></page></mediawiki>");
  try {
    parse_mediawiki_xml(in);
    FAIL("expected a parse error");
  } catch (const XmlParseError& e) {
    CHECK(e.byte_offset() > 0);
  }
  std::istringstream bad_ts(
      "<mediawiki><page><title>X</title><revision><timestamp>yesterday</timestamp></revision></page></mediawiki>");
  CHECK_THROWS_AS(parse_mediawiki_xml(bad_ts), XmlParseError);
}

TEST_CASE("streaming delivers pages one at a time") {
  std::ifstream in(fixture("talk_pairing.xml"));
  std::vector<std::string> titles;
  stream_mediawiki_xml(in, [&](DumpPage&& p) { titles.push_back(p.title); });
  CHECK(titles == std::vector<std::string>{"Talk:Foo", "Foo", "Wikipedia:Sandbox"});
  CHECK(talk_subject("Talk:Foo") == "Foo");
  CHECK(talk_subject("Foo") == "");
}

TEST_CASE("banner class extraction") {
  CHECK(banner_class("{{WikiProject France|class=GA|importance=high}}") == RawClass::GA);
  CHECK(banner_class("{{WikiProject X|class = start}}") == RawClass::Start);
  CHECK(banner_class("{{WPMILHIST|Class=FA}}") == RawClass::FA);
  CHECK(banner_class("{{Other|class=B}}") == std::nullopt);
  CHECK(banner_class("{{WikiProject X|class=List}}{{WikiProject Y|class=C}}") == RawClass::C);
  CHECK(banner_class("{{WikiProject banner shell|1={{WikiProject Z|class=B}}}}") == RawClass::B);
  CHECK(banner_class("{{WikiProject A|class=B}}{{WikiProject B|class=Stub}}") == RawClass::B);
}

TEST_CASE("GA banner yields a merged AGA event") {
  std::vector<Revision> talk{rev("2012-03-01T00:00:00Z", "c", true, PageKind::Talk,
                                 "{{WikiProject X|class=GA|importance=high}}")};
  auto ev = extract_quality_labels(talk);
  REQUIRE(ev.size() == 1);
  CHECK(ev[0].raw_class == RawClass::GA);
  CHECK(ev[0].merged_class == QualityClass::AGA);
}

TEST_CASE("consecutive identical classes yield one event") {
  std::vector<Revision> talk{rev("2012-03-01T00:00:00Z", "c", true, PageKind::Talk, "{{WikiProject X|class=B}}"),
                             rev("2012-03-05T00:00:00Z", "c", true, PageKind::Talk, "no banner"),
                             rev("2012-03-09T00:00:00Z", "c", true, PageKind::Talk, "{{WikiProject X|class=B}}"),
                             rev("2012-04-01T00:00:00Z", "c", true, PageKind::Talk, "{{WikiProject X|class=bogus}}"),
                             rev("2012-05-01T00:00:00Z", "c", true, PageKind::Talk, "{{WikiProject X|class=C}}")};
  auto ev = extract_quality_labels(talk);
  REQUIRE(ev.size() == 2);
  CHECK(ev[0].timestamp == parse_timestamp("2012-03-01T00:00:00Z"));
  CHECK(ev[1].raw_class == RawClass::C);
  CHECK(extract_quality_labels({}).empty());
}

TEST_CASE("labels from the talk pairing fixture") {
  auto h = parse_mediawiki_xml_file(fixture("talk_pairing.xml"));
  auto ev = extract_quality_labels(h[0].talk_revisions);
  REQUIRE(ev.size() == 2);
  CHECK(ev[0].merged_class == QualityClass::AGA);
  CHECK(ev[1].raw_class == RawClass::Start);
  CHECK(ev[1].merged_class == QualityClass::SS);
}

TEST_CASE("revision JSONL round-trip is lossless") {
  std::vector<PageHistory> all;
  for (const char* f : {"registered.xml", "ip.xml", "talk_pairing.xml"})
    for (auto& h : parse_mediawiki_xml_file(fixture(f))) all.push_back(std::move(h));
  Rng rng(8);
  for (int i = 0; i < 20; ++i) all.push_back(oracle::random_history(rng, "rand\"" + std::to_string(i) + "\né"));
  std::stringstream buf;
  write_revisions_jsonl(buf, all);
  auto back = read_revisions_jsonl(buf);
  REQUIRE(back.size() == all.size());
  for (std::size_t i = 0; i < all.size(); ++i) CHECK(back[i] == all[i]);
}

TEST_CASE("revision JSONL reader accepts records without creation time or schema") {
  std::istringstream in(
      R"({"article_id":"A","ts":"2010-01-02T00:00:00Z","editor":"x","registered":true,"kind":"main","text":"t"})"
      "\n"
      R"({"article_id":"A","ts":"2010-01-01T00:00:00Z","editor":"y","registered":false,"kind":"talk"})"
      "\n");
  auto h = read_revisions_jsonl(in);
  REQUIRE(h.size() == 1);
  CHECK(h[0].creation_time == parse_timestamp("2010-01-01T00:00:00Z"));
  CHECK(h[0].talk_revisions.size() == 1);
  CHECK(h[0].talk_revisions[0].wikitext.empty());

  std::istringstream wrong(R"({"schema":"qcpd.labels/1","article_id":"A"})");
  CHECK_THROWS(read_revisions_jsonl(wrong));
}

TEST_CASE("labels JSONL round-trip") {
  std::vector<ArticleLabels> labels{
      {"A", parse_timestamp("2009-01-01T00:00:00Z"),
       {QualityLabelEvent::make(parse_timestamp("2010-01-01T00:00:00Z"), RawClass::Stub),
        QualityLabelEvent::make(parse_timestamp("2011-01-01T00:00:00Z"), RawClass::GA)}},
      {"B", parse_timestamp("2009-01-01T00:00:00Z"),
       {QualityLabelEvent::make(parse_timestamp("2012-01-01T00:00:00Z"), RawClass::FA)}}};
  std::stringstream buf;
  write_labels_jsonl(buf, labels);
  CHECK(read_labels_jsonl(buf) == labels);
}

TEST_CASE("corpus directory round-trip") {
  SynthCorpusSpec spec;
  spec.articles = 3;
  spec.dims = kFeatureCount;
  spec.seed = 4;
  auto corpus = synth_corpus(spec);
  corpus[1].latest_class = QualityClass::FA;
  auto dir = temp_dir("corpus");
  write_corpus(dir, corpus);
  auto back = read_corpus(dir);
  REQUIRE(back.size() == corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    CHECK(back[i].article_id == corpus[i].article_id);
    CHECK(back[i].matrix == corpus[i].matrix);
    CHECK(back[i].valid == corpus[i].valid);
    CHECK(back[i].ground_truth == corpus[i].ground_truth);
    CHECK(back[i].latest_class == corpus[i].latest_class);
    CHECK(back[i].calendar == corpus[i].calendar);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("predictions, ground truth and report documents round-trip") {
  SynthCorpusSpec spec;
  spec.articles = 2;
  spec.dims = 3;
  auto corpus = synth_corpus(spec);
  auto gt = parse_ground_truth(ground_truth_json(corpus));
  REQUIRE(gt.size() == 2);
  CHECK(gt.at(corpus[0].article_id).points == corpus[0].ground_truth);
  CHECK(gt.at(corpus[0].article_id).length == 156);

  PredictionSet preds;
  preds.metadata["algorithm"] = "pelt";
  preds.points["a"] = ChangePointSet{{3, 9}};
  preds.points["b"] = ChangePointSet{};
  PredictionSet back = parse_predictions(predictions_json(preds));
  CHECK(back.points == preds.points);
  CHECK(back.metadata == preds.metadata);

  EvalReport r = aggregate_report({evaluate_article("a", ChangePointSet{{5}}, ChangePointSet{{6}}, 10, 2)}, 2, "pelt");
  EvalReport rb = parse_report(report_json(r));
  CHECK(rb.label == r.label);
  CHECK(rb.covering == r.covering);
  CHECK(rb.articles.size() == 1);
  CHECK(rb.articles[0].precision == r.articles[0].precision);
  CHECK_THROWS(parse_predictions(report_json(r)));
}

TEST_CASE("doubles round-trip through their text form") {
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    double v = rng.normal() * std::pow(10.0, static_cast<double>(rng.below(40)) - 20.0);
    CHECK(parse_double(format_double(v)) == v);
  }
}

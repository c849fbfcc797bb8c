#include <gtest/gtest.h>

#include <sstream>

#include "phenoid/common/error.h"
#include "phenoid/hpo/extractor.h"
#include "phenoid/hpo/matcher.h"
#include "phenoid/hpo/ontology.h"

namespace phenoid::hpo {
namespace {

Ontology ParseText(const std::string& text) {
  std::istringstream in(text);
  return Ontology::Parse(in);
}

std::shared_ptr<const Ontology> Tiny() {
  return std::make_shared<const Ontology>(ParseText(
      "[Term]\nid: HP:0000001\nname: All\n\n"
      "[Term]\nid: HP:0000822\nname: Hypertension\nsynonym: \"High blood pressure\" EXACT []\n"
      "is_a: HP:0000001 ! All\n\n"
      "[Term]\nid: HP:0001824\nname: Weight loss\nis_a: HP:0000001\n\n"
      "[Term]\nid: HP:0100526\nname: Lung carcinoma\nis_a: HP:0000001\n\n"
      "[Term]\nid: HP:0030357\nname: Small cell lung carcinoma\nis_a: HP:0100526\n"));
}

TEST(OntologyTest, ParsesStanza) {
  const auto o = Tiny();
  const HpoTerm& t = o->Get("HP:0000822");
  EXPECT_EQ(t.name, "Hypertension");
  ASSERT_EQ(t.synonyms.size(), 1u);
  EXPECT_EQ(t.synonyms[0], "High blood pressure");
  EXPECT_EQ(o->Ancestors("HP:0030357"), (std::set<std::string>{"HP:0100526", "HP:0000001"}));
}

TEST(OntologyTest, EmptyStream) { EXPECT_EQ(ParseText("").size(), 0u); }

TEST(OntologyTest, SelfParentIsCycle) {
  try {
    ParseText("[Term]\nid: HP:0000001\nname: A\nis_a: HP:0000001\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCycle);
  }
}

TEST(OntologyTest, LongCycleDetected) {
  try {
    ParseText(
        "[Term]\nid: HP:0000001\nname: A\nis_a: HP:0000002\n\n"
        "[Term]\nid: HP:0000002\nname: B\nis_a: HP:0000001\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCycle);
  }
}

TEST(OntologyTest, UnknownIdAndBadId) {
  EXPECT_THROW(Tiny()->Get("HP:9999999"), Error);
  EXPECT_THROW(ParseText("[Term]\nid: HP:12\nname: A\n"), Error);
}

TEST(OntologyTest, ShippedSubsetLoads) {
  const auto o = Ontology::ParseFile(PHENOID_DATA_DIR "/hpo_subset.obo");
  EXPECT_GT(o.size(), 50u);
  EXPECT_TRUE(o.Contains("HP:0001824"));
}

TEST(MatcherTest, LongestMatchWins) {
  const Matcher m(*Tiny(), {});
  const auto tokens = Tokenize("small cell lung carcinoma");
  const auto found = m.FindAll(tokens);
  ASSERT_EQ(found.size(), 1u);
  EXPECT_EQ(found[0].hpo_id, "HP:0030357");
  const auto shorter = m.FindAll(Tokenize("a lung carcinoma"));
  ASSERT_EQ(shorter.size(), 1u);
  EXPECT_EQ(shorter[0].hpo_id, "HP:0100526");
}

TEST(MatcherTest, EmptyExtraUsesOntologyOnly) {
  const Matcher m(*Tiny(), {});
  EXPECT_EQ(m.phrase_count(), 6u);
  EXPECT_TRUE(m.FindAll(Tokenize("HTN")).empty());
}

TEST(MatcherTest, ConflictingPhrase) {
  try {
    Matcher m(*Tiny(), {{"bp up", "HP:0000822"}, {"BP  up", "HP:0001824"}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConflict);
  }
}

TEST(MatcherTest, TokenizeOffsets) {
  const auto t = Tokenize("Weight-loss, 3kg");
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[0].text, "weight");
  EXPECT_EQ(t[1].begin, 7u);
  EXPECT_EQ(t[2].text, "3kg");
}

TEST(LexiconTest, ParseRejectsMalformed) {
  std::istringstream ok("HTN\tHP:0000822\n# comment\n\n");
  EXPECT_EQ(ParseLexicon(ok).size(), 1u);
  std::istringstream bad("HTN HP:0000822\n");
  EXPECT_THROW(ParseLexicon(bad), Error);
}

class ShippedExtractorTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { extractor_ = LoadDefaultExtractor(); }
  static std::shared_ptr<const LexiconExtractor> extractor_;
};
std::shared_ptr<const LexiconExtractor> ShippedExtractorTest::extractor_;

TEST_F(ShippedExtractorTest, Name) {
  EXPECT_EQ(extractor_->Extract("patient has hypertension").ids,
            std::set<std::string>{"HP:0000822"});
}

TEST_F(ShippedExtractorTest, Abbreviation) {
  EXPECT_EQ(extractor_->Extract("HTN noted").ids, std::set<std::string>{"HP:0000822"});
}

TEST_F(ShippedExtractorTest, ContextualSynonym) {
  EXPECT_EQ(extractor_->Extract("rise in blood pressure").ids,
            std::set<std::string>{"HP:0000822"});
}

TEST_F(ShippedExtractorTest, NegationFlagsMention) {
  const auto r = extractor_->Extract("no evidence of weight loss");
  ASSERT_EQ(r.mentions.size(), 1u);
  EXPECT_TRUE(r.mentions[0].negated);
  EXPECT_EQ(r.mentions[0].hpo_id, "HP:0001824");
  EXPECT_TRUE(r.ids.empty());
}

TEST_F(ShippedExtractorTest, NegationStopsAtSentenceBoundary) {
  const auto r = extractor_->Extract("No fever. Weight loss reported.");
  EXPECT_TRUE(r.ids.count("HP:0001824"));
}

TEST_F(ShippedExtractorTest, SpansPointIntoText) {
  const std::string text = "Also HTN noted";
  const auto r = extractor_->Extract(text);
  ASSERT_EQ(r.mentions.size(), 1u);
  EXPECT_EQ(text.substr(r.mentions[0].start, r.mentions[0].end - r.mentions[0].start), "HTN");
}

TEST(ExtractorOptionsTest, AncestorPropagation) {
  LexiconExtractorOptions options;
  options.propagate_ancestors = true;
  const LexiconExtractor ex(Tiny(), {}, options);
  EXPECT_EQ(ex.Extract("small cell lung carcinoma").ids,
            (std::set<std::string>{"HP:0000001", "HP:0030357", "HP:0100526"}));
}

TEST(SentenceTest, SplitsOnTerminators) {
  const auto s = SplitSentences("One. Two; Three");
  EXPECT_EQ(s.size(), 3u);
}

}  // namespace
}  // namespace phenoid::hpo

#include <gtest/gtest.h>

#include "phenoid/common/error.h"
#include "phenoid/corpus/criteria.h"
#include "phenoid/hpo/extractor.h"
#include "phenoid/synth/generator.h"
#include "phenoid/synth/oracle.h"
#include "phenoid/synth/profile.h"
#include "phenoid/synth/templates.h"
#include "testing.h"

namespace phenoid::synth {
namespace {

GeneratedCorpus Generate(const DiseaseProfile& profile, int n, double prevalence, uint64_t seed) {
  static const auto extractor = hpo::LoadDefaultExtractor();
  return GenerateCorpus(profile, n, prevalence, seed, extractor->matcher(),
                        corpus::StructuredFeatureCatalog::Default());
}

bool IcdPositive(const corpus::EhrAdmission& a, const DiseaseProfile& p) {
  return corpus::ApplyIcdCriteria(a, corpus::CriteriaByName(p.criteria)) ==
         corpus::CohortVerdict::kPositive;
}

class ShippedProfileTest : public ::testing::TestWithParam<std::string> {};

TEST_P(ShippedProfileTest, NoCorruptionMeansIcdEqualsTruth) {
  DiseaseProfile p = LoadShippedProfile(GetParam());
  p.miscode_fn_rate = 0.0;
  p.miscode_fp_rate = 0.0;
  const auto gen = Generate(p, 400, 0.1, 5);
  for (const auto& a : gen.admissions) {
    EXPECT_EQ(IcdPositive(a, p), gen.truth.Get(a.admission_id).true_label) << a.admission_id;
  }
}

TEST_P(ShippedProfileTest, TotalFalseNegativeCorruption) {
  DiseaseProfile p = LoadShippedProfile(GetParam());
  p.miscode_fn_rate = 1.0;
  p.miscode_fp_rate = 0.0;
  const auto gen = Generate(p, 400, 0.1, 5);
  int positives = 0;
  for (const auto& a : gen.admissions) {
    EXPECT_FALSE(IcdPositive(a, p)) << a.admission_id;
    positives += gen.truth.Get(a.admission_id).true_label ? 1 : 0;
  }
  EXPECT_EQ(positives, 40);
}

TEST_P(ShippedProfileTest, Deterministic) {
  const DiseaseProfile p = LoadShippedProfile(GetParam());
  const auto a = Generate(p, 200, 0.05, 9);
  const auto b = Generate(p, 200, 0.05, 9);
  EXPECT_EQ(corpus::SerializeCorpus(a.admissions), corpus::SerializeCorpus(b.admissions));
  EXPECT_EQ(SerializeGroundTruth(a.truth), SerializeGroundTruth(b.truth));
  const auto c = Generate(p, 200, 0.05, 10);
  EXPECT_NE(corpus::SerializeCorpus(a.admissions), corpus::SerializeCorpus(c.admissions));
}

TEST_P(ShippedProfileTest, ProfileRoundTrip) {
  const DiseaseProfile p = LoadShippedProfile(GetParam());
  EXPECT_NO_THROW(p.Validate());
  EXPECT_EQ(SerializeProfile(ParseProfile(SerializeProfile(p))), SerializeProfile(p));
}

INSTANTIATE_TEST_SUITE_P(Diseases, ShippedProfileTest,
                         ::testing::Values("ovarian", "lung", "cachexia", "lupus"));

TEST(GeneratorTest, ExactPositiveCountAndPatientIds) {
  const auto gen = testing::CachexiaCorpus(500, 0.03, 1);
  ASSERT_EQ(gen.admissions.size(), 500u);
  int positives = 0;
  for (const auto& [id, rec] : gen.truth.records) positives += rec.true_label;
  EXPECT_EQ(positives, 15);
  for (const auto& a : gen.admissions) EXPECT_FALSE(a.patient_id.empty());
}

TEST(GeneratorTest, EmittedPhenotypesAreExtractable) {
  const auto extractor = hpo::LoadDefaultExtractor();
  const auto gen = testing::CachexiaCorpus(200, 0.1, 2);
  size_t checked = 0;
  for (const auto& a : gen.admissions) {
    const auto ids = extractor->Extract(a.note_text).ids;
    for (const std::string& id : gen.truth.Get(a.admission_id).emitted_phenotypes) {
      EXPECT_TRUE(ids.count(id)) << a.admission_id << " " << id;
      ++checked;
    }
  }
  EXPECT_GT(checked, 100u);
}

TEST(GeneratorTest, RejectsBadArguments) {
  const DiseaseProfile p = LoadShippedProfile("cachexia");
  EXPECT_THROW(Generate(p, 0, 0.1, 1), Error);
  EXPECT_THROW(Generate(p, 100, 0.0, 1), Error);
  EXPECT_THROW(Generate(p, 10, 0.01, 1), Error);
}

TEST(GroundTruthTest, SerializeRoundTripAndLookup) {
  const auto gen = testing::CachexiaCorpus(100, 0.1, 3);
  const GroundTruth again = ParseGroundTruth(SerializeGroundTruth(gen.truth));
  EXPECT_EQ(again.records, gen.truth.records);
  try {
    gen.truth.Get("zzz");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLookup);
  }
}

TEST(OracleTest, DiagnosisFollowsTruth) {
  const auto gen = testing::CachexiaCorpus(100, 0.1, 4);
  for (const auto& [id, rec] : gen.truth.records) {
    EXPECT_EQ(OracleDiagnosis(gen.truth, id), rec.true_label);
  }
  EXPECT_THROW(OracleDiagnosis(gen.truth, "zzz"), Error);
}

TEST(OracleTest, FeatureVerdicts) {
  const DiseaseProfile p = LoadShippedProfile("cachexia");
  EXPECT_EQ(OracleFeatureVerdict(p, p.positive_phenotypes[0].hpo_id), FeatureVerdict::kRelevant);
  EXPECT_EQ(OracleFeatureVerdict(p, p.distractor_phenotypes[0].hpo_id),
            FeatureVerdict::kIrrelevant);
  EXPECT_EQ(OracleFeatureVerdict(p, "height"), FeatureVerdict::kIrrelevant);
  ASSERT_FALSE(p.structured_shift.empty());
  EXPECT_EQ(OracleFeatureVerdict(p, p.structured_shift.begin()->first),
            FeatureVerdict::kRelevant);
}

TEST(OracleTest, VerdictNames) {
  EXPECT_EQ(ParseFeatureVerdict(FeatureVerdictName(FeatureVerdict::kRelevant)),
            FeatureVerdict::kRelevant);
  EXPECT_THROW(ParseFeatureVerdict("maybe"), Error);
}

TEST(OracleTest, NoisyClinicianIsDeterministic) {
  const auto gen = testing::CachexiaCorpus(200, 0.1, 6);
  const DiseaseProfile p = LoadShippedProfile("cachexia");
  const SimulatedClinician a(gen.truth, p, 0.2, 1), b(gen.truth, p, 0.2, 1);
  int flipped = 0;
  for (const auto& [id, rec] : gen.truth.records) {
    EXPECT_EQ(a.Diagnose(id), b.Diagnose(id));
    flipped += a.Diagnose(id) != rec.true_label;
  }
  EXPECT_GT(flipped, 10);
  EXPECT_LT(flipped, 70);
}

TEST(TemplatesTest, RealizeSubstitutesPhrase) {
  ASSERT_FALSE(AffirmedTemplates().empty());
  ASSERT_FALSE(NegatedTemplates().empty());
  const std::string s = RealizeTemplate(AffirmedTemplates()[0], "weight loss");
  EXPECT_NE(s.find("weight loss"), std::string::npos);
}

}  // namespace
}  // namespace phenoid::synth

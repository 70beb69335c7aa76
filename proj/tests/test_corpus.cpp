// Copyright 2026 The mpa-eval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <set>

#include "mpa/corpus.hpp"
#include "mpa/text.hpp"
#include "test_support.hpp"

namespace mpa::corpus {
namespace {

const char* kHousekeeper =
    "female\t3\tThe chief gave the housekeeper a tip because she was helpful.\thousekeeper";

TEST(ParseWinomt, ReadsFourFields) {
  const auto set = parse_winomt(kHousekeeper);
  ASSERT_EQ(set.size(), 1u);
  EXPECT_EQ(set[0].gold_gender, Gender::Feminine);
  EXPECT_EQ(set[0].entity_index, 3u);
  EXPECT_EQ(set[0].sentence, "The chief gave the housekeeper a tip because she was helpful.");
  EXPECT_EQ(set[0].profession, "housekeeper");
  EXPECT_EQ(set[0].line_no, 1u);
}

TEST(ParseWinomt, EmptyInput) {
  EXPECT_TRUE(parse_winomt("").empty());
  EXPECT_TRUE(parse_winomt("\n\n").empty());
}

TEST(ParseWinomt, IndexOutOfRange) {
  EXPECT_THROW(parse_winomt("male\t99\tThe cook left.\tcook"), ValidationError);
}

TEST(ParseWinomt, MalformedLinesCarryLineNumber) {
  const std::string good = "male\t1\tThe cook left.\tcook\n";
  for (const std::string bad : {"male\t1\tThe cook left.", "man\t1\tThe cook left.\tcook",
                                "male\t-1\tThe cook left.\tcook", "male\tx\tThe cook left.\tcook",
                                "male\t\tThe cook left.\tcook", "male\t1\ta\tb\tc"}) {
    try {
      parse_winomt(good + "\n" + bad + "\n");
      FAIL() << "accepted: " << bad;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line_no(), 3u) << bad;
      EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    }
  }
}

TEST(ParseWinomt, ProfessionMismatchIsDiagnosed) {
  Diagnostics diag;
  parse_winomt("male\t1\tThe cook left.\tbaker\nmale\t1\tThe cook, left.\tthe cook\n", &diag);
  ASSERT_EQ(diag.size(), 1u);
  EXPECT_NE(diag.messages[0].find("line 1"), std::string::npos);
}

TEST(ParseWinomt, CrlfTolerated) {
  const auto set = parse_winomt("male\t1\tThe cook left.\tcook\r\n");
  ASSERT_EQ(set.size(), 1u);
  EXPECT_EQ(set[0].profession, "cook");
}

TEST(DetectCue, FeminineExample) {
  const auto inst = parse_winomt(kHousekeeper)[0];
  const auto cue = detect_cue(inst);
  EXPECT_EQ(cue.pronoun, "she");
  EXPECT_EQ(cue.cue_index, 8u);
  EXPECT_EQ(cue.cue_gender, Gender::Feminine);
}

TEST(DetectCue, MasculineExample) {
  WinoInstance inst;
  inst.sentence = "The janitor was thanked because he helped clean the room.";
  const auto cue = detect_cue(inst);
  EXPECT_EQ(cue.pronoun, "he");
  EXPECT_EQ(cue.cue_index, 5u);
  EXPECT_EQ(cue.cue_gender, Gender::Masculine);
}

TEST(DetectCue, NoCue) {
  WinoInstance inst;
  inst.sentence = "The cook left.";
  EXPECT_THROW(detect_cue(inst), NoCueError);
  EXPECT_FALSE(find_cue(inst).has_value());
}

TEST(DetectCue, FirstPronounPunctuationAndCase) {
  WinoInstance inst;
  inst.sentence = "Before \"Her\" shift ended, he left.";
  const auto cue = detect_cue(inst);
  EXPECT_EQ(cue.pronoun, "her");
  EXPECT_EQ(cue.cue_index, 1u);
  EXPECT_EQ(cue.cue_gender, Gender::Feminine);
}

TEST(DetectCue, WholeTokenOnly) {
  WinoInstance inst;
  inst.sentence = "The hero saw them there.";
  EXPECT_FALSE(find_cue(inst).has_value());
}

TEST(CueTemplate, KeepsPunctuation) {
  WinoInstance inst;
  inst.sentence = "The nurse thanked him.";
  EXPECT_EQ(cue_template(inst, detect_cue(inst)), "The nurse thanked #CUE#.");
}

TEST(BuildPairs, SingleExample) {
  const auto pro = parse_winomt(kHousekeeper);
  const auto anti = parse_winomt(
      "male\t3\tThe chief gave the housekeeper a tip because he was helpful.\thousekeeper");
  const auto r = build_minimal_pairs(pro, anti);
  ASSERT_EQ(r.pairs.size(), 1u);
  EXPECT_TRUE(r.unmatched.empty());
  EXPECT_EQ(r.pairs[0].stereotype_gender, Gender::Feminine);
  EXPECT_EQ(r.pairs[0].profession, "housekeeper");
  EXPECT_EQ(r.pairs[0].pro.cue.pronoun, "she");
  EXPECT_EQ(r.pairs[0].anti.cue.pronoun, "he");
  EXPECT_EQ(serialize_pairs(r.pairs),
            "{\"pair_id\":0,\"pro_line_no\":1,\"anti_line_no\":1,\"profession\":\"housekeeper\","
            "\"stereotype_gender\":\"feminine\"}\n");
}

TEST(BuildPairs, Empty) {
  const auto r = build_minimal_pairs({}, {});
  EXPECT_TRUE(r.pairs.empty());
  EXPECT_TRUE(r.unmatched.empty());
}

TEST(BuildPairs, DuplicateKeyNamesBothLines) {
  const auto pro = parse_winomt(std::string(kHousekeeper) + "\n" + kHousekeeper + "\n");
  try {
    build_minimal_pairs(pro, {});
    FAIL();
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("lines 1 and 2"), std::string::npos) << what;
  }
}

TEST(BuildPairs, ReportsUnmatched) {
  const auto pro = parse_winomt(
      "male\t1\tThe cook left because he was tired.\tcook\n"      // no counterpart
      "male\t1\tThe cook left early.\tcook\n"                     // no cue
      "female\t1\tThe nurse left because she was ill.\tnurse\n"   // same gold gender
      "male\t1\tThe clerk stayed because he was bored.\tclerk\n"  // paired
  );
  const auto anti = parse_winomt(
      "female\t1\tThe nurse left because she was ill.\tnurse\n"
      "female\t1\tThe clerk stayed because she was bored.\tclerk\n"
      "female\t1\tThe baker sang because she was happy.\tbaker\n");
  const auto r = build_minimal_pairs(pro, anti);
  ASSERT_EQ(r.pairs.size(), 1u);
  EXPECT_EQ(r.pairs[0].pro.instance.line_no, 4u);
  EXPECT_EQ(r.pairs[0].anti.instance.line_no, 2u);
  ASSERT_EQ(r.unmatched.size(), 5u);
  EXPECT_EQ(r.unmatched[0].reason, "no anti counterpart");
  EXPECT_EQ(r.unmatched[1].reason, "no gender cue");
  EXPECT_NE(r.unmatched[2].reason.find("same gold gender"), std::string::npos);
  EXPECT_EQ(r.unmatched[3].side, PairSide::Anti);
  EXPECT_EQ(r.unmatched[3].line_no, 1u);
  EXPECT_EQ(r.unmatched[4].line_no, 3u);
}

TEST(BuildPairs, SamePronounRejected) {
  const auto pro = parse_winomt("male\t1\tThe cook saw her there.\tcook\n");
  const auto anti = parse_winomt("female\t1\tThe cook saw her there.\tcook\n");
  const auto r = build_minimal_pairs(pro, anti);
  EXPECT_TRUE(r.pairs.empty());
  EXPECT_NE(r.unmatched[0].reason.find("same pronoun"), std::string::npos);
}

TEST(BuildPairs, ShippedFixture) {
  const auto pro = testing::load_set(testing::data("winomt/en_pro.txt"));
  const auto anti = testing::load_set(testing::data("winomt/en_anti.txt"));
  const auto r = build_minimal_pairs(pro, anti);
  EXPECT_EQ(r.pairs.size(), 1584u);
  EXPECT_TRUE(r.unmatched.empty());
  EXPECT_NEAR(mean_pair_length(r.pairs), 12.694444444444445, 1e-12);
}

// ---------------------------------------------------------------------------
// Properties over generated sets.

std::set<std::pair<std::size_t, std::size_t>> line_pairs(const PairingResult& r, bool swap) {
  std::set<std::pair<std::size_t, std::size_t>> out;
  for (const auto& p : r.pairs) {
    const auto a = p.pro.instance.line_no, b = p.anti.instance.line_no;
    out.emplace(swap ? b : a, swap ? a : b);
  }
  return out;
}

TEST(BuildPairsProperty, Involution) {
  toy::SplitMix rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto sets = testing::random_sets(rng, 1 + trial * 3);
    const auto fwd = build_minimal_pairs(sets.pro, sets.anti);
    const auto rev = build_minimal_pairs(sets.anti, sets.pro);
    EXPECT_EQ(fwd.pairs.size(), sets.pro.size());
    EXPECT_TRUE(fwd.unmatched.empty());
    EXPECT_EQ(line_pairs(fwd, false), line_pairs(rev, true));
  }
}

TEST(BuildPairsProperty, SingleTokenDifferenceAtCue) {
  toy::SplitMix rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto sets = testing::random_sets(rng, 20);
    for (const auto& p : build_minimal_pairs(sets.pro, sets.anti).pairs) {
      const auto a = text::split_words(p.pro.instance.sentence);
      const auto b = text::split_words(p.anti.instance.sentence);
      ASSERT_EQ(a.size(), b.size());
      std::vector<std::size_t> diff;
      for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) diff.push_back(i);
      ASSERT_EQ(diff.size(), 1u);
      EXPECT_EQ(diff[0], p.pro.cue.cue_index);
      EXPECT_EQ(diff[0], p.anti.cue.cue_index);
      EXPECT_NE(p.pro.instance.gold_gender, p.anti.instance.gold_gender);
      EXPECT_EQ(p.pro.instance.entity_index, p.anti.instance.entity_index);
      EXPECT_EQ(p.stereotype_gender, p.pro.instance.gold_gender);
    }
  }
}

TEST(ParseWinomtProperty, RoundTrip) {
  toy::SplitMix rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto sets = testing::random_sets(rng, 1 + trial);
    const std::string text = serialize_winomt(sets.pro);
    EXPECT_EQ(serialize_winomt(parse_winomt(text)), text);
  }
  const std::string shipped = io::read_text_file(testing::data("winomt/en_pro.txt"));
  EXPECT_EQ(serialize_winomt(parse_winomt(shipped)), shipped);
}

}  // namespace
}  // namespace mpa::corpus

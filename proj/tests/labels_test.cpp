// Copyright 2026 The QGC Authors.
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

#include "qgc/detail/csv.hpp"
#include "qgc/labels.hpp"

namespace qgc {
namespace {

TEST(Labels, CanonicalSpellingsRoundTrip) {
  for (auto e : kAllExplicitness) EXPECT_EQ(parse_explicitness(to_string(e)), e);
  for (auto n : kAllNarrativeElements) EXPECT_EQ(parse_narrative(to_string(n)), n);
  for (auto s : kAllSplits) EXPECT_EQ(parse_split(to_string(s)), s);
}

TEST(Labels, StrictMatchingIsByteExact) {
  EXPECT_FALSE(parse_explicitness("Explicit"));
  EXPECT_FALSE(parse_narrative("causal  relationship"));
  EXPECT_FALSE(parse_narrative(" feeling"));
  EXPECT_FALSE(parse_split("TEST"));
}

TEST(Labels, NormalizedMatchingFoldsCaseAndWhitespace) {
  constexpr auto kNorm = LabelMatching::kNormalized;
  EXPECT_EQ(parse_explicitness("Explicit", kNorm), Explicitness::kExplicit);
  EXPECT_EQ(parse_narrative("  Causal \t Relationship ", kNorm),
            NarrativeElement::kCausalRelationship);
  EXPECT_EQ(parse_narrative("OUTCOME RESOLUTION", kNorm),
            NarrativeElement::kOutcomeResolution);
  EXPECT_EQ(parse_split("Val", kNorm), Split::kVal);
}

TEST(Labels, NormalizedMatchingIsNeverFuzzy) {
  constexpr auto kNorm = LabelMatching::kNormalized;
  EXPECT_FALSE(parse_narrative("causal_relationship", kNorm));
  EXPECT_FALSE(parse_narrative("causal-relationship", kNorm));
  EXPECT_FALSE(parse_narrative("feelings", kNorm));
  EXPECT_FALSE(parse_explicitness("ex", kNorm));
  EXPECT_FALSE(parse_split("validation", kNorm));
}

TEST(Labels, RequireLabelNamesTheOffendingValue) {
  try {
    require_label(parse_explicitness("maybe"), "explicitness", "maybe");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kValidation);
    EXPECT_NE(std::string(e.what()).find("\"maybe\""), std::string::npos);
  }
}

TEST(Errors, ExitCodes) {
  EXPECT_EQ(exit_code_for(ErrorKind::kValidation), 2);
  EXPECT_EQ(exit_code_for(ErrorKind::kBackend), 3);
  EXPECT_EQ(exit_code_for(ErrorKind::kEvaluation), 4);
  EXPECT_EQ(exit_code_for(ErrorKind::kMalformedOutput), 4);
}

TEST(Csv, QuotedFieldsCommasNewlinesAndEscapes) {
  const auto rows = detail::parse_csv(
      "a,b,c\r\n\"x, y\",\"line1\nline2\",\"say \"\"hi\"\"\"\n1,,3\n", "t");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1], (detail::CsvRow{"x, y", "line1\nline2", "say \"hi\""}));
  EXPECT_EQ(rows[2], (detail::CsvRow{"1", "", "3"}));
}

TEST(Csv, ByteOrderMarkAndMissingTrailingNewline) {
  const auto rows = detail::parse_csv("\xEF\xBB\xBFsection,text\n1,hello", "t");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0][0], "section");
  EXPECT_EQ(rows[1][1], "hello");
}

TEST(Csv, StrayQuoteInsideUnquotedFieldIsLiteral) {
  const auto rows = detail::parse_csv("a\nit's 5\" tall\n", "t");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1][0], "it's 5\" tall");
}

TEST(Csv, UnterminatedQuoteIsAnError) {
  EXPECT_THROW(detail::parse_csv("a\n\"open", "t"), Error);
}

TEST(Csv, TableColumnLookup) {
  detail::CsvTable t(detail::parse_csv("section,ex-or-im1,answer1\n2,explicit\n", "t"), "t");
  EXPECT_EQ(t.size(), 1u);
  EXPECT_EQ(t.require_column({"cor_section", "section"}), 0u);
  EXPECT_EQ(t.require_column({"ex-or-im1", "ex-or-im"}), 1u);
  EXPECT_FALSE(t.column("question"));
  EXPECT_EQ(t.cell(0, 2), "");
  EXPECT_THROW(t.require_column({"question"}), Error);
}

}  // namespace
}  // namespace qgc

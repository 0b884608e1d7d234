// wfst-test.cc

// Copyright 2026  The ramdec Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>

#include <gtest/gtest.h>

#include "ramdec/base.h"
#include "ramdec/wfst.h"
#include "test-util.h"

namespace ramdec {
namespace {

std::string ErrorOf(std::string_view text) {
  try {
    ParseFstText(text);
  } catch (const Error &e) {
    return e.what();
  }
  return "<no error>";
}

bool Mentions(const std::vector<std::string> &problems, const std::string &needle) {
  return std::any_of(problems.begin(), problems.end(), [&](const std::string &p) {
    return p.find(needle) != std::string::npos;
  });
}

TEST(ParseFstTest, ArcAndFinal) {
  DecodingGraph g = ParseFstText("0 1 1 2 0.5\n1 0.25\n");
  EXPECT_EQ(g.NumStates(), 2);
  EXPECT_EQ(g.Start(), 0);
  ASSERT_EQ(g.Arcs(0).size(), 1u);
  EXPECT_EQ(g.Arcs(0)[0], (Arc{1, 2, 0.5f, 1}));
  EXPECT_FALSE(g.IsFinal(0));
  EXPECT_EQ(g.Final(1), 0.25f);
}

TEST(ParseFstTest, SingleFinalState) {
  DecodingGraph g = ParseFstText("0\n");
  EXPECT_EQ(g.NumStates(), 1);
  EXPECT_EQ(g.Final(0), 0.0f);
  EXPECT_EQ(g.NumArcs(), 0u);
}

TEST(ParseFstTest, MissingWeightIsZeroAndOrderKept) {
  DecodingGraph g = ParseFstText("3 1 0 0\n1 3 2 0 1\n3 0 1 1\n\n0 2\n");
  EXPECT_EQ(g.Start(), 3);
  EXPECT_EQ(g.NumStates(), 4);
  ASSERT_EQ(g.Arcs(3).size(), 2u);
  EXPECT_EQ(g.Arcs(3)[0], (Arc{0, 0, 0.0f, 1}));
  EXPECT_EQ(g.Arcs(3)[1], (Arc{1, 1, 0.0f, 0}));
  EXPECT_EQ(g.Final(0), 2.0f);
}

TEST(ParseFstTest, Errors) {
  EXPECT_NE(ErrorOf("0 1 x 2\n").find("line 1"), std::string::npos);
  EXPECT_NE(ErrorOf("0 1 1 1\n1 -2 0 0\n").find("line 2"), std::string::npos);
  EXPECT_NE(ErrorOf("0 1 1 1\n\n1 0.5 0\n").find("line 3"), std::string::npos);
  EXPECT_NE(ErrorOf("0 1 1 1 nan\n").find("line 1"), std::string::npos);
  EXPECT_NE(ErrorOf("0 1 1 1 1 1\n").find("line 1"), std::string::npos);
  EXPECT_NE(ErrorOf("").find("empty"), std::string::npos);
  EXPECT_NE(ErrorOf("\n\n").find("empty"), std::string::npos);
}

TEST(ParseFstTest, EmitParseRoundtrip) {
  RandomGenerator rng(31);
  for (int i = 0; i < 200; ++i) {
    DecodingGraph g = testing::RandomGraph(rng, 8, 12, 4);
    // The grammar cannot name a start state that has neither arcs nor a
    // final cost, nor states that are never mentioned.
    if (g.Arcs(g.Start()).empty() && !g.IsFinal(g.Start())) {
      EXPECT_THROW(WriteFstText(g), Error);
      continue;
    }
    std::string text = WriteFstText(g);
    DecodingGraph back = ParseFstText(text);
    ASSERT_LE(back.NumStates(), g.NumStates());
    back.ResizeStates(g.NumStates());
    ASSERT_EQ(back, g) << text;
    EXPECT_EQ(WriteFstText(back), text);
  }
}

TEST(ValidateGraphTest, IlabelBeyondPdfs) {
  DecodingGraph g = ParseFstText("0 1 5 0\n1\n");
  auto problems = ValidateGraph(g, 4);
  ASSERT_EQ(problems.size(), 1u);
  EXPECT_NE(problems[0].find("5"), std::string::npos);
  EXPECT_TRUE(ValidateGraph(g, 5).empty());
}

TEST(ValidateGraphTest, FinalStartWithoutArcsIsOk) {
  EXPECT_TRUE(ValidateGraph(ParseFstText("0\n"), 1).empty());
}

TEST(ValidateGraphTest, ListsEveryViolation) {
  DecodingGraph g = ParseFstText("0 1 7 0\n1 0 9 0\n1\n");
  auto problems = ValidateGraph(g, 4);
  EXPECT_EQ(problems.size(), 2u);
  EXPECT_TRUE(Mentions(problems, "7"));
  EXPECT_TRUE(Mentions(problems, "9"));
}

TEST(ValidateGraphTest, MissingStart) {
  DecodingGraph g;
  g.ResizeStates(2);
  EXPECT_FALSE(ValidateGraph(g, 1).empty());
}

TEST(SymbolTableTest, Parse) {
  SymbolTable t = ParseSymbolTable("<eps> 0\nhello 1\n");
  EXPECT_EQ(t.Size(), 2u);
  EXPECT_EQ(t.Find("hello"), 1);
  ASSERT_NE(t.Find(1), nullptr);
  EXPECT_EQ(*t.Find(1), "hello");
  EXPECT_EQ(t.Find(7), nullptr);
  EXPECT_FALSE(t.Find("bye").has_value());
  EXPECT_EQ(t.ToText(), "<eps> 0\nhello 1\n");
}

TEST(SymbolTableTest, Errors) {
  EXPECT_THROW(ParseSymbolTable("hello 1\n"), Error);
  EXPECT_THROW(ParseSymbolTable("<eps> 0\na 1\nb 1\n"), Error);
  EXPECT_THROW(ParseSymbolTable("<eps> 0\na 1\na 2\n"), Error);
  EXPECT_THROW(ParseSymbolTable("<eps> 0\na\n"), Error);
  EXPECT_THROW(ParseSymbolTable("<eps> 0\na -1\n"), Error);
  EXPECT_THROW(ParseSymbolTable("<eps> 1\n"), Error);
}

}  // namespace
}  // namespace ramdec

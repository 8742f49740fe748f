#include <gtest/gtest.h>

#include <axiograd/cases.hpp>
#include <axiograd/errors.hpp>
#include <axiograd/io.hpp>

namespace axiograd {
namespace {

TEST(CaseGenerator, DeterministicGivenSeed) {
  CaseGenerator a(42, 3);
  CaseGenerator b(42, 3);
  for (int k = 0; k < 10; ++k) {
    EXPECT_EQ(a.point(), b.point());
    EXPECT_EQ(model_to_json(a.model(3, true)), model_to_json(b.model(3, true)));
  }
}

TEST(CaseGenerator, PointsStayInBox) {
  const Box box({-0.5, 1.0}, {0.5, 3.0});
  CaseGenerator gen(1, 2, box);
  for (int k = 0; k < 200; ++k) EXPECT_TRUE(box.contains(gen.point()));
}

TEST(CaseGenerator, PointAwayKeepsGap) {
  CaseGenerator gen(2, 3);
  for (int k = 0; k < 100; ++k) {
    const Vec from = gen.point();
    const Vec x = gen.point_away(from, {0, 2}, 0.2);
    EXPECT_GE(std::abs(x[0] - from[0]), 0.2);
    EXPECT_GE(std::abs(x[2] - from[2]), 0.2);
  }
}

TEST(CaseGenerator, RejectsBadBox) {
  EXPECT_THROW(CaseGenerator(1, 2, Box::unbounded(2)), InvalidConfig);
  EXPECT_THROW(CaseGenerator(1, 2, Box::cube(3, 0.0, 1.0)), InvalidConfig);
}

TEST(CaseGenerator, FamiliesHaveRequestedShape) {
  CaseGenerator gen(3, 4);
  EXPECT_EQ(gen.model(4, ModelFamily::kPolynomial).dim(), 4u);
  EXPECT_FALSE(gen.model(4, ModelFamily::kTanhNet).piecewise());
  EXPECT_TRUE(gen.model(4, ModelFamily::kReluNet).piecewise());
  EXPECT_LE(gen.multi_index(4, 5).one_norm(), 5u);
}

}  // namespace
}  // namespace axiograd

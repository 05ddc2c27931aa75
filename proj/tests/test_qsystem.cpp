#include <gtest/gtest.h>

#include <cmath>

#include "stabnet/qsystem.hpp"
#include "support.hpp"

using namespace stabnet;

namespace {

FusionData fusion(const std::string& name) { return FusionData::load(test::data_path("fusion/" + name + ".json")); }

std::vector<Label> all_labels(const FusionData& fd) {
  std::vector<Label> out;
  for (Label a = 0; a < fd.rank(); ++a) out.push_back(a);
  return out;
}

void expect_qsystem(const QSystemReport& rep, double tol) {
  EXPECT_TRUE(rep.pass);
  for (const auto& [name, value] : rep.residuals()) EXPECT_LE(value, tol) << name;
}

const double kPhi = (1.0 + std::sqrt(5.0)) / 2.0;

}  // namespace

TEST(QSystemTest, TrivialCategory) {
  const auto fd = fusion("trivial");
  const auto q = build_lagrangian_qsystem(fd, {0});
  EXPECT_EQ(q.summands, (std::vector<Label>{0}));
  EXPECT_DOUBLE_EQ(q.dim_e, 1.0);
  expect_qsystem(verify_qsystem(q, fd), 1e-12);
}

TEST(QSystemTest, GroupCategories) {
  for (const auto* name : {"vec_z2", "vec_z3"}) {
    const auto fd = fusion(name);
    const auto regular = regular_algebra(fd);
    EXPECT_EQ(regular.size(), fd.rank());
    EXPECT_DOUBLE_EQ(regular.dim_e, static_cast<double>(fd.rank()));
    expect_qsystem(verify_qsystem(regular, fd), 1e-12);

    const auto pairs = build_lagrangian_qsystem(fd, all_labels(fd));
    EXPECT_EQ(pairs.summands, std::vector<Label>(fd.rank(), fd.unit()));
    expect_qsystem(verify_qsystem(pairs, fd), 1e-12);
  }
}

TEST(QSystemTest, TwistedRegularAlgebraIsNotAssociative) {
  const auto fd = fusion("vec_z2_omega");
  const auto rep = verify_qsystem(regular_algebra(fd), fd);
  EXPECT_FALSE(rep.pass);
  EXPECT_NEAR(rep.associativity, 2.0, 1e-12);
  expect_qsystem(verify_qsystem(build_lagrangian_qsystem(fd, all_labels(fd)), fd), 1e-12);
}

TEST(QSystemTest, FibonacciPairAlgebra) {
  const auto fd = fusion("fibonacci");
  const Label one = fd.label("1"), t = fd.label("tau");
  const auto q = build_lagrangian_qsystem(fd, {t});
  EXPECT_EQ(q.summands, (std::vector<Label>{one, t}));
  const auto full = build_lagrangian_qsystem(fd, {one, t});
  EXPECT_EQ(full.summands, (std::vector<Label>{one, one, t}));
  EXPECT_NEAR(full.dim_e, 2.0 + kPhi, 1e-12);
  expect_qsystem(verify_qsystem(q, fd), 1e-10);
  expect_qsystem(verify_qsystem(full, fd), 1e-10);
}

TEST(QSystemTest, IsingPairAlgebra) {
  const auto fd = fusion("ising");
  const auto q = build_lagrangian_qsystem(fd, all_labels(fd));
  EXPECT_NEAR(q.dim_e, 4.0, 1e-12);
  expect_qsystem(verify_qsystem(q, fd), 1e-10);
}

// dim L = sum_X d_X^2 because d_X d_{dual X} = sum_c N_{X dual X}^c d_c.
TEST(QSystemTest, SummandDimensionsAddUpToDimE) {
  for (const auto* name : {"vec_z3", "fibonacci", "ising"}) {
    const auto fd = fusion(name);
    const auto q = build_lagrangian_qsystem(fd, all_labels(fd));
    double total = 0.0;
    for (Label s : q.summands) total += fd.dim(s);
    EXPECT_NEAR(total, q.dim_e, 1e-12) << name;
  }
}

TEST(QSystemTest, BrokenMultiplicationIsDetected) {
  const auto fd = fusion("fibonacci");
  auto q = build_lagrangian_qsystem(fd, {fd.label("tau")});
  q.multiplication.back() *= 2.0;
  EXPECT_FALSE(verify_qsystem(q, fd).pass);
}

TEST(HalfBraidingTest, UnitAndEmptyWireAreIdentity) {
  const auto fd = fusion("fibonacci");
  const DiagramEngine eng(fd);
  const auto q = build_lagrangian_qsystem(fd, all_labels(fd));
  const auto empty = half_braiding(eng, q, Wire{});
  EXPECT_EQ(eng.residual(empty, eng.identity(Wire{q.strand()})), 0.0);
  const auto unit = half_braiding(eng, q, fd.unit());
  for (const auto& b : unit.blocks) EXPECT_TRUE(b.isIdentity(0.0));
}

TEST(HalfBraidingTest, GroupCaseIsSignedPermutation) {
  const auto fd = fusion("vec_z2");
  const DiagramEngine eng(fd);
  const auto q = build_lagrangian_qsystem(fd, all_labels(fd));
  const auto s = half_braiding(eng, q, fd.label("1"));
  for (const auto& b : s.blocks) {
    if (b.size() == 0) continue;
    for (Eigen::Index r = 0; r < b.rows(); ++r) {
      int nonzero = 0;
      for (Eigen::Index c = 0; c < b.cols(); ++c) {
        const double v = std::abs(b(r, c));
        EXPECT_TRUE(v < 1e-12 || std::abs(v - 1.0) < 1e-12);
        if (v > 0.5) ++nonzero;
      }
      EXPECT_EQ(nonzero, 1);
    }
  }
}

TEST(HalfBraidingTest, AxiomsHold) {
  for (const auto* name : {"vec_z2", "vec_z3", "vec_z2_omega", "fibonacci", "ising"}) {
    const auto fd = fusion(name);
    const auto rep = verify_half_braiding(fd, build_lagrangian_qsystem(fd, all_labels(fd)), 1e-10);
    EXPECT_TRUE(rep.pass) << name;
    for (const auto& [res, value] : rep.residuals()) EXPECT_LE(value, 1e-10) << name << " " << res;
  }
}

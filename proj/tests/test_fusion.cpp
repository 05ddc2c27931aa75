#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "stabnet/errors.hpp"
#include "stabnet/fusion.hpp"
#include "support.hpp"

using namespace stabnet;

namespace {

std::filesystem::path fusion_file(const std::string& name) { return test::data_path("fusion/" + name + ".json"); }

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const double kPhi = (1.0 + std::sqrt(5.0)) / 2.0;

}  // namespace

TEST(FusionLoad, ShippedFilesValidate) {
  for (const auto* name : {"trivial", "vec_z2", "vec_z2_omega", "vec_z3", "fibonacci", "ising"}) {
    const auto fd = FusionData::load(fusion_file(name));
    EXPECT_GE(fd.rank(), 1u) << name;
    EXPECT_EQ(fd.dual(fd.unit()), fd.unit());
  }
  EXPECT_THROW(FusionData::load(fusion_file("fibonacci_corrupted")), InputError);
  EXPECT_THROW(FusionData::load(fusion_file("nonexistent")), InputError);
}

TEST(FusionLoad, MissingEntryOfLargerBlock) {
  auto doc = nlohmann::json::parse(read_text(fusion_file("fibonacci")));
  doc["F"].erase(doc["F"].begin());
  EXPECT_THROW(
      {
        const auto fd = FusionData::parse(doc.dump());
        fd.validate();
      },
      InputError);
}

TEST(FusionLoad, RejectsUnknownLabel) {
  auto doc = nlohmann::json::parse(read_text(fusion_file("vec_z2")));
  doc["fusion"].push_back({"1", "2", "0"});
  EXPECT_THROW(FusionData::parse(doc.dump()), InputError);
}

TEST(QuantumDims, KnownValues) {
  const auto fib = FusionData::load(fusion_file("fibonacci"));
  EXPECT_NEAR(fib.dim(fib.label("tau")), kPhi, 1e-12);
  const auto ising = FusionData::load(fusion_file("ising"));
  EXPECT_NEAR(ising.dim(ising.label("sigma")), std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(ising.dim(ising.label("psi")), 1.0, 1e-12);
}

TEST(QuantumDims, PerronFrobeniusIdentity) {
  for (const auto* name : {"vec_z3", "fibonacci", "ising"}) {
    const auto fd = FusionData::load(fusion_file(name));
    const auto d = quantum_dims(fd);
    for (Label a = 0; a < fd.rank(); ++a) {
      EXPECT_NEAR(d[a], fd.dim(a), 1e-10);
      EXPECT_NEAR(d[a], d[fd.dual(a)], 1e-10);
      for (Label b = 0; b < fd.rank(); ++b) {
        double sum = 0.0;
        for (Label c : fd.fuse(a, b)) sum += d[c];
        EXPECT_NEAR(d[a] * d[b], sum, 1e-10);
      }
    }
  }
}

TEST(FSymbols, FibonacciClosedForm) {
  const auto fd = FusionData::load(fusion_file("fibonacci"));
  const Label one = fd.label("1"), t = fd.label("tau");
  EXPECT_NEAR(std::abs(fd.F(t, t, t, t, one, one) - 1.0 / kPhi), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(fd.F(t, t, t, t, t, t) + 1.0 / kPhi), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(fd.F(t, t, t, t, one, t)), 1.0 / std::sqrt(kPhi), 1e-12);
  EXPECT_NEAR(std::abs(fd.F(t, t, t, t, t, one)), 1.0 / std::sqrt(kPhi), 1e-12);
  EXPECT_EQ(fd.F(t, t, t, one, one, one), 0.0);  // inadmissible vertex
}

TEST(Pentagon, ShippedDataSatisfiesIt) {
  for (const auto* name : {"trivial", "vec_z2", "vec_z2_omega", "vec_z3", "fibonacci", "ising"}) {
    const auto fd = FusionData::load(fusion_file(name));
    const auto rep = verify_pentagon(fd, 1e-10);
    EXPECT_TRUE(rep.pass) << name << " " << rep.residual << " " << rep.worst;
    EXPECT_GT(rep.equations, 0u);
    EXPECT_LE(f_unitarity_residual(fd), 1e-12);
  }
}

TEST(Pentagon, CorruptedDataFails) {
  const auto fd = FusionData::parse_file(fusion_file("fibonacci_corrupted"));
  const auto rep = verify_pentagon(fd, 1e-10);
  EXPECT_FALSE(rep.pass);
  EXPECT_GT(rep.residual, 1.0);
  EXPECT_FALSE(rep.worst.empty());
}

TEST(Pentagon, PhasePerturbationFails) {
  auto doc = nlohmann::json::parse(read_text(fusion_file("ising")));
  doc["F"][0]["re"] = -doc["F"][0]["re"].get<double>();
  const auto fd = FusionData::parse(doc.dump());
  EXPECT_FALSE(verify_pentagon(fd, 1e-10).pass);
}

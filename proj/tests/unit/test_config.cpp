#include <gtest/gtest.h>

#include "silevy/config.hpp"
#include "silevy/error.hpp"
#include "silevy/verify.hpp"

using namespace silevy;

namespace {

std::string field_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<no error>";
}

}  // namespace

TEST(Config, TripletLiteral) {
  const auto t = config::parse_triplet(
      R"({"sigma":1.0,"gamma":0.0,"nu":{"type":"compound","rate":1.0,"marks":{"type":"normal","mean":0,"sd":1}}})");
  EXPECT_EQ(t.sigma, 1.0);
  EXPECT_EQ(t.nu.total_mass(), 1.0);
  EXPECT_EQ(config::parse_triplet(config::triplet_to_json(t)).nu.total_mass(), 1.0);
}

TEST(Config, UncompensatedCompound) {
  const auto t = config::parse_triplet(
      R"({"gamma":0.5,"nu":{"type":"compound","rate":2,"uncompensated":true,"marks":{"type":"uniform","low":0,"high":2}}})");
  EXPECT_NEAR(t.net_drift(), 0.5, 1e-12);
}

TEST(Config, SpecRoundTrip) {
  const auto s = config::parse_spec(
      R"({"triplet":{"sigma":0.5,"nu":{"type":"truncated_stable","alpha":1.2,"scale":0.3,"epsilon":0.01,"cutoff":5}},"dimension":3,"level":2,"seed":9})");
  EXPECT_EQ(s.dimension, 3u);
  EXPECT_EQ(s.level, 2);
  EXPECT_EQ(s.seed, 9u);
  const auto again = config::parse_spec(config::spec_to_json(s));
  EXPECT_EQ(config::spec_to_json(again), config::spec_to_json(s));
}

TEST(Config, ErrorsNameTheField) {
  EXPECT_EQ(field_of([] { config::parse_spec(R"({"triplet":{"sigma":-1}})"); }), "triplet.sigma");
  EXPECT_EQ(field_of([] { config::parse_spec(R"({"triplet":{"sigma":1},"colour":2})"); }), "colour");
  EXPECT_EQ(field_of([] { config::parse_spec(R"({"triplet":{"nu":{"type":"compound","rate":-2,"marks":{"type":"point","value":1}}}})"); }),
            "triplet.nu.rate");
  EXPECT_EQ(field_of([] { config::parse_triplet(R"({"nu":{"type":"levy"}})"); }), "nu.type");
  EXPECT_EQ(field_of([] { config::parse_regions(R"([{"u0":[1.2,1]}])"); }), "regions[0].u0[0]");
  EXPECT_EQ(field_of([] { config::parse_run_config(R"({"seed":-3})"); }), "seed");
  EXPECT_EQ(field_of([] { config::parse_run_config("{not json"); }), "config");
  EXPECT_EQ(field_of([] { config::parse_run_config(R"({"tolerances":{"ecf_c":0}})"); }), "tolerances.ecf_c");
}

TEST(Config, RegionsLiteral) {
  const auto r = config::parse_regions(R"([{"u0":[1.0,1.0],"sub":[[0.5,1.0]]},{"u0":[0.25,0.5]}])");
  ASSERT_EQ(r.size(), 2u);
  EXPECT_DOUBLE_EQ(measure(r[0]), 0.5);
  EXPECT_DOUBLE_EQ(measure(r[1]), 0.125);
}

TEST(Config, FlowLiterals) {
  const auto a = config::parse_flow(R"({"vertices":[[0,1],[1,1]],"knots":[0,1]})");
  EXPECT_NEAR(theta(a, 0.5), 0.5, 1e-15);
  const auto b = config::parse_flow(R"({"shipped":"staircase"})");
  EXPECT_NEAR(theta(b, b.end()), 1.0, 1e-15);
  const auto c = config::parse_flow(
      R"({"segments":[{"vertices":[[0,0.5],[1,0.5]]},{"vertices":[[1,0.5],[1,1]],"knots":[1,2]}]})");
  EXPECT_NEAR(theta(c, 2.0), 1.0, 1e-15);
  EXPECT_EQ(field_of([] { config::parse_flow(R"({"shipped":"spiral"})"); }), "flow.shipped");
}

TEST(Config, RunConfig) {
  const auto c = config::parse_run_config(
      R"({"suite":"semigroup","seed":4,"threads":2,"volumes":[0.3,0.7],"tolerances":{"kernel_tol":1e-6},"semilattice":[[0,0],[0.5,0.5]]})");
  EXPECT_EQ(*c.suite, "semigroup");
  EXPECT_EQ(*c.seed, 4u);
  EXPECT_EQ(*c.threads, 2u);
  EXPECT_EQ(c.volumes.size(), 2u);
  EXPECT_EQ(c.tolerances.kernel_tol, 1e-6);
  EXPECT_EQ(c.tolerances.ecf_c, 5.0);
  EXPECT_EQ(c.semilattice.size(), 2u);
}

TEST(Config, Fnv1a) {
  EXPECT_EQ(config::fnv1a(""), 14695981039346656037ULL);
  EXPECT_EQ(config::fnv1a("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Verify, UnknownSuite) {
  EXPECT_EQ(field_of([] { verify::run_suite("nope", {}); }), "suite");
  EXPECT_EQ(verify::suite_names().size(), 12u);
}

TEST(Verify, SuiteJsonIsDeterministic) {
  verify::Options o;
  o.threads = 2;
  const auto a = verify::run_suite("semigroup", o).to_json();
  o.threads = 1;
  EXPECT_EQ(a, verify::run_suite("semigroup", o).to_json());
}

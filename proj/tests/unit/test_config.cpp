#include "factorlab/config.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace factorlab;
namespace ts = testing_support;

namespace {

std::vector<std::string> violations_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.violations();
  }
  return {};
}

bool mentions(const std::vector<std::string>& v, std::string_view needle) {
  for (const auto& s : v) {
    if (s.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST(Config, DefaultsDescribeThePaperShapedRun) {
  const auto c = default_config();
  EXPECT_EQ(c.seed, 1u);
  EXPECT_EQ(c.synth.n_assets, 569u);
  EXPECT_EQ(c.synth.n_days, 3612u);
  EXPECT_EQ(c.factors.size(), 10u);
  EXPECT_EQ(c.bands.size(), 3u);
  EXPECT_EQ(c.variants.size(), 7u);
  EXPECT_EQ(c.vol_period, 40);
  EXPECT_EQ(c.beta_window, 200);
  EXPECT_EQ(c.fcl_period, 200);
  EXPECT_EQ(c.alt_vol_period, 80);
  EXPECT_TRUE(c.noise);
  EXPECT_EQ(c.prices_path(), std::filesystem::path("out") / "data" / "prices.csv");
}

TEST(Config, ShippedDefaultFileMatchesBuiltInDefaults) {
  const auto file = load_config(std::filesystem::path(FACTORLAB_CONFIGS) / "default.ini");
  EXPECT_EQ(file.canonical, default_config().canonical);
  EXPECT_EQ(file.hash_hex(), default_config().hash_hex());
}

TEST(Config, ParsesSectionsListsAndComments) {
  const auto c = parse_config(
      "; comment\n"
      "# another\n"
      "[run]\nseed = 42\n"
      "[synth]\nn_assets = 100\nplanted = cash 1 0.5 0 0.04 0.01; leverage 0.5 0 0 0.02 0\n"
      "[factors]\nindicators = cash , leverage\nbands = Q3,Q1\nnoise = false\n"
      "[estimators]\nvol = 20\n"
      "[ladder]\nvariants = A6\n");
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.synth.seed, 42u);
  EXPECT_EQ(c.synth.n_assets, 100u);
  ASSERT_EQ(c.synth.planted.size(), 2u);
  EXPECT_EQ(c.synth.planted[1].indicator, Indicator::leverage);
  EXPECT_EQ(c.synth.planted[0].loadings[1], 0.5);
  EXPECT_EQ(c.factors, (std::vector<Indicator>{Indicator::cash, Indicator::leverage}));
  ASSERT_EQ(c.bands.size(), 2u);
  EXPECT_EQ(c.bands[0].name, "Q3");
  EXPECT_FALSE(c.noise);
  EXPECT_EQ(c.vol_period, 20);
  EXPECT_EQ(c.variants, std::vector<Variant>{Variant::A6});
}

TEST(Config, CollectsEveryViolation) {
  const auto v = violations_of(
      "[synth]\nn_assets = many\nmarket_vol = -1\nplanted = momentum 1 0 0 0.1 0\n"
      "[factors]\nindicators = dividend, karma\nbands = Q4\n"
      "[estimators]\nvol = 0\n"
      "[ladder]\nvariants = A9\n"
      "[bogus]\nkey = 1\n");
  EXPECT_GE(v.size(), 7u);
  EXPECT_TRUE(mentions(v, "synth.n_assets"));
  EXPECT_TRUE(mentions(v, "market_vol"));
  EXPECT_TRUE(mentions(v, "momentum cannot carry"));
  EXPECT_TRUE(mentions(v, "karma"));
  EXPECT_TRUE(mentions(v, "Q4"));
  EXPECT_TRUE(mentions(v, "estimators.vol"));
  EXPECT_TRUE(mentions(v, "A9"));
  EXPECT_TRUE(mentions(v, "unknown key 'bogus.key'"));
}

TEST(Config, RejectsMalformedText) {
  EXPECT_FALSE(violations_of("[run\nseed = 1\n").empty());
  EXPECT_TRUE(mentions(violations_of("seed = 1\n"), "outside of a section"));
  EXPECT_TRUE(mentions(violations_of("[data]\nprices = /no/such/file.csv\n"), "does not exist"));
  EXPECT_TRUE(mentions(violations_of("[run]\nuniverse = Mars\n"), "Mars"));
  EXPECT_TRUE(mentions(violations_of("[factors]\nnoise = maybe\n"), "boolean"));
  EXPECT_TRUE(mentions(violations_of("[synth]\nplanted = cash 1 2\n"), "expected"));
  EXPECT_THROW(load_config("/no/such/config.ini"), Error);
}

TEST(Config, OverridesWinAndStayOutOfTheHash) {
  const auto base = parse_config("[run]\nseed = 5\n");
  const auto over = parse_config("[run]\nseed = 5\n", {std::filesystem::path("/tmp/elsewhere"), 9});
  EXPECT_EQ(over.seed, 9u);
  EXPECT_EQ(over.synth.seed, 9u);
  EXPECT_EQ(over.out, std::filesystem::path("/tmp/elsewhere"));
  EXPECT_NE(base.hash(), over.hash());
  const auto moved = parse_config("[run]\nseed = 5\nout = somewhere\n");
  EXPECT_EQ(moved.hash(), base.hash());
}

TEST(Config, HashIsStableAndSensitive) {
  const auto a = parse_config("[synth]\nn_assets = 100\n[estimators]\nvol = 30\n");
  const auto b = parse_config("[estimators]\nvol = 30\n\n[synth]\nn_assets=100\n");
  EXPECT_EQ(a.canonical, b.canonical);
  EXPECT_EQ(a.hash_hex(), b.hash_hex());
  EXPECT_EQ(a.hash_hex().size(), 16u);
  EXPECT_NE(a.hash(), parse_config("[synth]\nn_assets = 101\n[estimators]\nvol = 30\n").hash());
  // Pinned so that a change to the canonical form is noticed.
  EXPECT_EQ(default_config().hash_hex(), "862407bf8d8f71cd");
}

TEST(Config, SmallConfigLoads) {
  const auto c = load_config(std::filesystem::path(FACTORLAB_CONFIGS) / "small.ini");
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.synth.n_assets, 120u);
  EXPECT_EQ(c.factors.size(), 6u);
  EXPECT_EQ(c.variants.size(), 4u);
}

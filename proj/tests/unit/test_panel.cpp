#include "factorlab/commands.hpp"
#include "factorlab/estimators.hpp"
#include "factorlab/panel.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <set>

using namespace factorlab;
namespace ts = testing_support;

namespace {

std::filesystem::path write_prices(const std::string& name, const std::string& body) {
  const auto dir = ts::scratch_dir(name);
  ts::write_file(dir / "prices.csv", body);
  return dir / "prices.csv";
}

ReturnPanel load(const std::filesystem::path& file) {
  return ingest_prices(file, calendar_from_price_csv(file));
}

}  // namespace

TEST(Panel, SimpleReturnFromTwoPrices) {
  const auto file = write_prices("ret", "date,asset_id,close\n2010-01-04,A,100\n2010-01-04,__INDEX__,10\n"
                                        "2010-01-05,A,102\n2010-01-05,__INDEX__,11\n");
  const auto p = load(file);
  ASSERT_EQ(p.n_dates(), 1u);
  EXPECT_EQ(p.dates[0], Date(2010, 1, 5));
  EXPECT_DOUBLE_EQ(p.returns(0, 0), 102.0 / 100.0 - 1.0);
  EXPECT_NEAR(p.returns(0, 0), 0.02, 1e-15);
  EXPECT_NEAR(p.index_returns[0], 0.1, 1e-15);
}

TEST(Panel, ConstantPricesGiveExactZero) {
  std::string body = "date,asset_id,close\n";
  for (auto d : weekday_calendar(Date(2010, 1, 4), 30)) body += d.iso() + ",A,37.3\n" + d.iso() + ",__INDEX__,5\n";
  const auto p = load(write_prices("const", body));
  for (Eigen::Index t = 0; t < p.returns.rows(); ++t) EXPECT_EQ(p.returns(t, 0), 0.0);
}

TEST(Panel, MissingPriceGivesMissingReturns) {
  const auto file = write_prices("gap", "date,asset_id,close\n2010-01-04,A,100\n2010-01-04,B,5\n"
                                        "2010-01-05,B,6\n2010-01-06,A,101\n2010-01-06,B,6\n");
  const auto p = load(file);
  ASSERT_EQ(p.n_dates(), 2u);
  EXPECT_TRUE(is_missing(p.returns(0, 0)));
  EXPECT_TRUE(is_missing(p.returns(1, 0)));
  EXPECT_NEAR(p.returns(0, 1), 0.2, 1e-15);
  EXPECT_EQ(p.returns(1, 1), 0.0);
  EXPECT_TRUE(is_missing(p.index_returns[0]));
}

TEST(Panel, RejectsMalformedInput) {
  EXPECT_THROW(load(write_prices("m1", "date,asset_id,close\n2010-01-04,A,abc\n")), Error);
  EXPECT_THROW(load(write_prices("m2", "date,asset_id,close\n2010-01-05,A,1\n2010-01-04,A,1\n")), Error);
  try {
    load(write_prices("m3", "date,asset_id,close\n2010-01-04,A,1\n2010-01-04,A,2\n"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("prices.csv:3"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("duplicate"), std::string::npos);
  }
  EXPECT_THROW(load(write_prices("m4", "date,asset_id\n2010-01-04,A\n")), Error);
  try {
    load(write_prices("m5", "date,asset_id,close\n2010-01-04,A,1\n2010-01-05,A\n"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
  }
}

TEST(Panel, ReturnReconstructionMatchesPriceRatio) {
  SynthConfig cfg;
  cfg.n_assets = 20;
  cfg.n_days = 500;
  const auto m = generate_market(cfg);
  for (std::size_t i = 0; i < m.panel.n_assets(); ++i) {
    double growth = 1.0;
    for (Eigen::Index t = 0; t < m.panel.returns.rows(); ++t) growth *= 1.0 + m.panel.returns(t, static_cast<Eigen::Index>(i));
    const auto col = static_cast<Eigen::Index>(i);
    const double ratio = m.prices.close(m.prices.close.rows() - 1, col) / m.prices.close(0, col);
    EXPECT_NEAR(growth / ratio, 1.0, 1e-12);
  }
}

TEST(Panel, FullSizeFileRowCountMatchesLineCount) {
  RunConfig cfg = default_config({ts::scratch_dir("rowcount"), 3});
  cmd_simulate(cfg);
  // Independent oracle: count the distinct date strings of the raw file.
  std::ifstream in(cfg.prices_path());
  std::string line;
  std::set<std::string> dates;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("date,", 0) == 0) continue;
    dates.insert(line.substr(0, line.find(',')));
  }
  const auto p = load(cfg.prices_path());
  EXPECT_EQ(dates.size(), 3612u);
  EXPECT_EQ(p.n_dates(), dates.size() - 1);
  EXPECT_EQ(p.n_assets(), 569u);
  std::filesystem::remove_all(cfg.out);
}

TEST(Panel, IngestIsIdempotent) {
  RunConfig cfg = parse_config("[synth]\nn_assets = 30\nn_days = 300\n", {ts::scratch_dir("idem"), std::nullopt});
  cmd_simulate(cfg);
  const auto a = load_dataset(cfg);
  const auto b = load_dataset(cfg);
  EXPECT_TRUE(a.panel.returns.cwiseEqual(b.panel.returns).count() ==
              a.panel.returns.cwiseEqual(a.panel.returns).count());
  EXPECT_EQ(a.panel.dates, b.panel.dates);
  for (const auto& [id, panel] : a.raw) {
    const auto& other = b.raw.at(id).values;
    for (Eigen::Index k = 0; k < panel.values.size(); ++k) {
      const double x = panel.values.data()[k], y = other.data()[k];
      EXPECT_TRUE((is_missing(x) && is_missing(y)) || x == y);
    }
  }
}

class Indicators : public ::testing::Test {
 protected:
  void SetUp() override {
    panel = ts::make_panel(0, 2);
    panel.dates = weekday_calendar(Date(2005, 2, 24), 10);
    panel.returns = Grid::Zero(10, 2);
    panel.index_returns.assign(10, 0.0);
  }
  ReturnPanel panel;
};

TEST_F(Indicators, SinglePublicationForwardFills) {
  const std::vector<IndicatorRecord> rec = {{Date(2005, 3, 1), "A000", Indicator::remuneration, 50000.0}};
  const auto set = indicators_from_records(rec, panel);
  const auto& v = set.at(Indicator::remuneration).values;
  for (std::size_t t = 0; t < panel.n_dates(); ++t) {
    const double x = v(static_cast<Eigen::Index>(t), 0);
    if (panel.dates[t] >= Date(2005, 3, 2)) {
      EXPECT_EQ(x, 50000.0);
    } else {
      EXPECT_TRUE(is_missing(x)) << panel.dates[t].iso();
    }
    EXPECT_TRUE(is_missing(v(static_cast<Eigen::Index>(t), 1)));
  }
}

TEST_F(Indicators, TwoPublicationsStepTheDayAfter) {
  const std::vector<IndicatorRecord> rec = {{Date(2005, 3, 3), "A001", Indicator::cash, 2.0},
                                            {Date(2005, 2, 24), "A001", Indicator::cash, 1.0}};
  const auto set = indicators_from_records(rec, panel);
  const auto& v = set.at(Indicator::cash).values;
  for (std::size_t t = 0; t < panel.n_dates(); ++t) {
    const double x = v(static_cast<Eigen::Index>(t), 1);
    if (panel.dates[t] <= Date(2005, 2, 24)) EXPECT_TRUE(is_missing(x));
    else if (panel.dates[t] <= Date(2005, 3, 3)) EXPECT_EQ(x, 1.0);
    else EXPECT_EQ(x, 2.0);
  }
}

TEST_F(Indicators, ErrorsAndWarnings) {
  const auto dir = ts::scratch_dir("ind");
  ts::write_file(dir / "bad.csv", "publication_date,asset_id,indicator_id,value\n2005-03-01,A000,karma,1\n");
  EXPECT_THROW(ingest_indicators(dir / "bad.csv", panel), Error);
  ts::write_file(dir / "late.csv", "publication_date,asset_id,indicator_id,value\n2009-03-01,A000,cash,1\n");
  IngestReport report;
  const auto set = ingest_indicators(dir / "late.csv", panel, &report);
  EXPECT_EQ(report.warnings.size(), 1u);
  EXPECT_TRUE(set.contains(Indicator::cash));
  const std::vector<IndicatorRecord> unknown = {{Date(2005, 3, 1), "ZZZ", Indicator::cash, 1.0}};
  EXPECT_THROW(indicators_from_records(unknown, panel), Error);
}

TEST(IndicatorsSynthetic, AnnualPlateausMatchBruteForceScan) {
  SynthConfig cfg;
  cfg.n_assets = 15;
  cfg.n_days = 800;
  const auto m = generate_market(cfg);
  const auto set = indicators_from_records(m.records, m.panel);
  for (const auto& [id, ind] : set) {
    for (std::size_t i = 0; i < m.panel.n_assets(); ++i) {
      for (std::size_t t = 0; t < m.panel.n_dates(); ++t) {
        // Latest record strictly before the date, by exhaustive scan.
        double expect = kMissing;
        Date best{};
        for (const auto& r : m.records) {
          if (r.indicator == id && r.asset_id == m.panel.assets[i] && r.publication_date < m.panel.dates[t] &&
              (is_missing(expect) || best < r.publication_date)) {
            expect = r.value;
            best = r.publication_date;
          }
        }
        const double got = ind.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(i));
        ASSERT_TRUE((is_missing(expect) && is_missing(got)) || expect == got);
      }
    }
    // Values change only at 252-day boundaries.
    const auto& v = ind.values;
    for (Eigen::Index t = 2; t < v.rows(); ++t) {
      if (v(t, 0) != v(t - 1, 0)) EXPECT_EQ(t % kTradingDaysPerYear, 0) << t;
    }
  }
}

TEST(Classification, RequiresEveryAsset) {
  auto panel = ts::make_panel(3, 2);
  const auto dir = ts::scratch_dir("cls");
  ts::write_file(dir / "c.csv", "asset_id,country,gics_industry_group\nA000,FR,Banks\nA001,DE,\"Food, Beverage & Tobacco\"\nX,GB,Media\n");
  const auto c = read_classification(dir / "c.csv", panel);
  EXPECT_EQ(c.industry_group[1], "Food, Beverage & Tobacco");
  ts::write_file(dir / "d.csv", "asset_id,country,gics_industry_group\nA000,FR,Banks\n");
  EXPECT_THROW(read_classification(dir / "d.csv", panel), Error);
  ts::write_file(dir / "e.csv", "asset_id,country,gics_industry_group\nA000,FR,Banks\nA000,FR,Banks\nA001,FR,Banks\n");
  EXPECT_THROW(read_classification(dir / "e.csv", panel), Error);
}

TEST(Momentum, IdenticalReturnsGiveZero) {
  auto p = ts::make_panel(50, 4);
  for (Eigen::Index t = 0; t < 50; ++t) p.returns.row(t).setConstant(0.001 * std::sin(0.3 * static_cast<double>(t)));
  Classification c{p.assets, {"FR", "FR", "DE", "DE"}, {"Banks", "Banks", "Banks", "Banks"}};
  const auto m = derive_momentum(p, c);
  for (Eigen::Index t = kMinObservations; t < 50; ++t) {
    for (Eigen::Index i = 0; i < 4; ++i) EXPECT_EQ(m.values(t, i), 0.0);
  }
}

TEST(Momentum, ConstantReturnApproachesItself) {
  // Asset 0 earns c daily, the three others zero; country median is 0.
  auto p = ts::make_panel(3000, 4);
  const double c = 0.0007;
  for (Eigen::Index t = 0; t < 3000; ++t) p.returns(t, 0) = c;
  Classification cls{p.assets, {"FR", "FR", "FR", "FR"}, {"Banks", "Banks", "Banks", "Banks"}};
  const auto m = derive_momentum(p, cls);
  EXPECT_NEAR(m.values(2999, 0), c, 1e-15);
  EXPECT_EQ(m.values(2999, 1), 0.0);
}

TEST(Momentum, SignFollowsDriftAgainstBruteForce) {
  auto p = ts::gaussian_panel(1500, 6, 11);
  for (Eigen::Index t = 0; t < 1500; ++t) p.returns(t, 2) += 0.002;
  Classification cls{p.assets, std::vector<std::string>(6, "FR"), std::vector<std::string>(6, "Banks")};
  const int period = 756;
  const auto m = derive_momentum(p, cls, period);
  for (Eigen::Index t = 800; t < 1500; ++t) {
    std::vector<double> emas;
    for (Eigen::Index i = 0; i < 6; ++i) {
      double y = p.returns(0, i);
      for (Eigen::Index s = 1; s < t; ++s) y = (1.0 - 1.0 / period) * y + p.returns(s, i) / period;
      emas.push_back(y);
    }
    const double med = median(emas);
    EXPECT_NEAR(m.values(t, 2), emas[2] - med, 1e-12);
    EXPECT_GT(m.values(t, 2), 0.0);
  }
}

namespace {

PriceTable liquidity_prices(std::size_t n, double volume) {
  PriceTable pt;
  pt.dates = weekday_calendar(Date(2010, 1, 4), n);
  pt.assets = {"A000"};
  pt.close = Grid::Constant(static_cast<Eigen::Index>(n), 1, 20.0);
  pt.volume = Grid::Constant(static_cast<Eigen::Index>(n), 1, volume);
  pt.index_close.assign(n, 1.0);
  return pt;
}

}  // namespace

TEST(Liquidity, ConstantVolumeOverShares) {
  const auto pt = liquidity_prices(40, 3000.0);
  const auto panel = returns_from_prices(pt);
  // 500 shares at price 20.
  const auto cap = ts::constant_indicator(panel, {500.0 * 20.0}, Indicator::capitalization);
  const auto liq = derive_liquidity(pt, panel, cap);
  for (Eigen::Index t = 0; t < liq.values.rows(); ++t) {
    if (t + 1 < kMinObservations) EXPECT_TRUE(is_missing(liq.values(t, 0)));
    else EXPECT_DOUBLE_EQ(liq.values(t, 0), 3000.0 / 500.0);
  }
  const auto doubled = derive_liquidity(pt, panel, ts::constant_indicator(panel, {1000.0 * 20.0}, Indicator::capitalization));
  EXPECT_DOUBLE_EQ(doubled.values(20, 0), liq.values(20, 0) / 2.0);
  const auto zero = derive_liquidity(pt, panel, ts::constant_indicator(panel, {0.0}, Indicator::capitalization));
  EXPECT_TRUE(is_missing(zero.values(20, 0)));
}

TEST(Liquidity, MatchesOnePassRecomputation) {
  SynthConfig cfg;
  cfg.n_assets = 12;
  cfg.n_days = 400;
  const auto m = generate_market(cfg);
  const auto set = indicators_from_records(m.records, m.panel);
  const auto& cap = set.at(Indicator::capitalization);
  const auto liq = derive_liquidity(m.prices, m.panel, cap, 5);
  for (Eigen::Index i = 0; i < 12; ++i) {
    double y = 0.0;
    for (Eigen::Index t = 0; t < liq.values.rows(); ++t) {
      const double v = m.prices.volume(t, i);
      y = t == 0 ? v : y + 0.2 * (v - y);
      const double shares = cap.values(t, i) / m.prices.close(t, i);
      if (t + 1 < kMinObservations || is_missing(shares)) {
        EXPECT_TRUE(is_missing(liq.values(t, i)));
      } else {
        EXPECT_NEAR(liq.values(t, i), y / shares, 1e-12 * std::abs(y / shares));
      }
    }
  }
}

TEST(Median, EvenAndOddCounts) {
  EXPECT_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(median({4.0, 1.0, 2.0, 3.0}), 2.5);
  EXPECT_EQ(median({kMissing, 5.0}), 5.0);
  EXPECT_TRUE(is_missing(median({})));
}

#pragma once

#include "factorlab/common.hpp"
#include "factorlab/date.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace factorlab {

enum class Indicator {
  dividend,
  capitalization,
  liquidity,
  momentum,
  low_volatility,
  leverage,
  sales_to_market,
  book_to_market,
  remuneration,
  cash,
  noise,
};

std::string_view to_string(Indicator id);
std::optional<Indicator> indicator_from_string(std::string_view s);
/// The ten firm indicators, in reporting order.
std::span<const Indicator> core_indicators();
/// Indicators normalized by dividing by the same-day country median.
bool is_ratio_indicator(Indicator id);

inline constexpr std::string_view kIndexAssetId = "__INDEX__";

/// Close prices (and optional volumes) aligned on a trading calendar.
struct PriceTable {
  std::vector<Date> dates;
  std::vector<std::string> assets;
  Grid close;                       // dates x assets, missing = NaN
  Grid volume;                      // empty when the file has no volume column
  std::vector<double> index_close;  // per date

  bool has_volume() const { return volume.size() > 0; }
};

/// Daily simple returns. Row t holds the return from dates[t]-1 trading day to dates[t].
struct ReturnPanel {
  std::vector<Date> dates;
  std::vector<std::string> assets;  // sorted ascending
  Grid returns;                     // dates x assets, missing = NaN
  std::vector<double> index_returns;

  std::size_t n_dates() const { return dates.size(); }
  std::size_t n_assets() const { return assets.size(); }
  std::optional<std::size_t> asset_index(std::string_view id) const;
};

/// Point-in-time indicator values aligned with a ReturnPanel.
struct IndicatorPanel {
  Indicator id = Indicator::noise;
  std::vector<Date> dates;
  std::vector<std::string> assets;
  Grid values;
};

using IndicatorSet = std::map<Indicator, IndicatorPanel>;

/// Country and GICS industry group per asset, aligned with ReturnPanel::assets.
struct Classification {
  std::vector<std::string> assets;
  std::vector<std::string> country;
  std::vector<std::string> industry_group;
};

/// One published indicator value.
struct IndicatorRecord {
  Date publication_date;
  std::string asset_id;
  Indicator indicator;
  double value;
};

struct IngestReport {
  std::vector<std::string> warnings;
};

/// Distinct dates of a price file, in file order (validated strictly increasing).
std::vector<Date> calendar_from_price_csv(const std::filesystem::path& file);

/// Reads `date,asset_id,close[,volume]`. Rows dated outside [calendar.front(),
/// calendar.back()] are ignored; rows inside that range must fall on a calendar day.
PriceTable read_prices(const std::filesystem::path& file, std::span<const Date> calendar);
ReturnPanel returns_from_prices(const PriceTable& prices);
ReturnPanel ingest_prices(const std::filesystem::path& file, std::span<const Date> calendar);

/// Forward-fills publications onto panel dates: the value at t is the latest
/// publication dated strictly before t.
IndicatorSet indicators_from_records(std::span<const IndicatorRecord> records, const ReturnPanel& panel,
                                     IngestReport* report = nullptr);
IndicatorSet ingest_indicators(const std::filesystem::path& file, const ReturnPanel& panel,
                               IngestReport* report = nullptr);
std::vector<IndicatorRecord> read_indicator_records(const std::filesystem::path& file);

Classification read_classification(const std::filesystem::path& file, const ReturnPanel& panel);

inline constexpr int kMomentumPeriod = 3 * kTradingDaysPerYear;
inline constexpr int kLiquidityPeriod = 5;

/// EMA of past returns (through t-1) minus the same-day country median.
IndicatorPanel derive_momentum(const ReturnPanel& panel, const Classification& classes,
                               int period = kMomentumPeriod);

/// EMA of past daily volume divided by the share count (capitalization / close).
IndicatorPanel derive_liquidity(const PriceTable& prices, const ReturnPanel& panel,
                                const IndicatorPanel& capitalization, int period = kLiquidityPeriod);

/// Median of the non-missing values; NaN when there are none.
double median(std::vector<double> values);

}  // namespace factorlab

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spillnet/date.hpp"

namespace spillnet {

/// One crisis definition, inclusive on both ends.
struct CrisisWindow {
    Date start;
    Date end;
    std::string label; // e.g. "12m", "18m"
};

/// date x firm matrix with explicit missing cells. Missing data is never
/// imputed anywhere downstream; firms with gaps get filtered or skipped.
template <typename Tag>
class Panel {
public:
    Panel() = default;
    Panel(std::vector<Date> dates, std::vector<std::string> firms,
          std::vector<std::optional<double>> cells);

    size_t n_dates() const { return dates_.size(); }
    size_t n_firms() const { return firms_.size(); }
    const std::vector<Date>& dates() const { return dates_; }
    const std::vector<std::string>& firms() const { return firms_; }

    const std::optional<double>& at(size_t t, size_t f) const { return cells_[t * firms_.size() + f]; }
    bool has(size_t t, size_t f) const { return at(t, f).has_value(); }
    double value(size_t t, size_t f) const { return *at(t, f); }

    /// Index of a ticker, or -1.
    int firm_index(const std::string& ticker) const;

    /// Panel restricted to the given firm columns (dates unchanged).
    Panel select_firms(const std::vector<int>& keep) const;

    /// Date indices t with start <= dates[t] <= end.
    std::vector<size_t> window_indices(const Date& start, const Date& end) const;

private:
    std::vector<Date> dates_;
    std::vector<std::string> firms_;
    std::vector<std::optional<double>> cells_; // row-major [date][firm]
};

struct PriceTag {};
struct ReturnTag {};
using PricePanel = Panel<PriceTag>;   // positive cum-dividend prices
using ReturnPanel = Panel<ReturnTag>; // log-returns

/// firm -> sector code (string, e.g. a SIC bucket).
struct SectorMap {
    std::vector<std::pair<std::string, std::string>> entries; // insertion order kept for output

    const std::string* find(const std::string& ticker) const;
};

/// Parse `date,TICK1,...` price CSV. Empty cells become missing markers;
/// non-positive or non-numeric prices are load errors naming row/column.
/// Rows are sorted by date; duplicate dates or tickers are rejected.
PricePanel load_price_csv(const std::string& path);

/// Parse `ticker,sector` CSV.
SectorMap load_sector_csv(const std::string& path);

/// r(t,f) = ln p(t,f) - ln p(t-1,f); missing whenever either price is.
ReturnPanel to_log_returns(const PricePanel& panel);

/// The paper's three sample filters: a run of >= min_consecutive non-missing
/// returns strictly before crisis.start, first observation before
/// crisis.start, and no gaps inside [crisis.start, crisis.end].
ReturnPanel filter_sample(const ReturnPanel& panel, int min_consecutive, const CrisisWindow& crisis);

/// Sum of log-returns with dates inside the window. The firm must be present
/// (non-missing) at every window date.
double cumulative_return(const ReturnPanel& panel, const std::string& firm, const CrisisWindow& window);

/// Largest peak-to-trough relative price decline inside the window, as a
/// positive loss fraction in [0, 1).
double max_drawdown(const PricePanel& panel, const std::string& firm, const CrisisWindow& window);

} // namespace spillnet

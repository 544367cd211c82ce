#include "spillnet/panel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "spillnet/csv.hpp"
#include "spillnet/errors.hpp"

namespace spillnet {

template <typename Tag>
Panel<Tag>::Panel(std::vector<Date> dates, std::vector<std::string> firms,
                  std::vector<std::optional<double>> cells)
    : dates_(std::move(dates)), firms_(std::move(firms)), cells_(std::move(cells)) {
    if (cells_.size() != dates_.size() * firms_.size())
        throw DataError("panel cell count does not match dates x firms");
    for (size_t t = 1; t < dates_.size(); ++t)
        if (!(dates_[t - 1] < dates_[t])) throw DataError("panel dates not strictly increasing");
}

template <typename Tag>
int Panel<Tag>::firm_index(const std::string& ticker) const {
    auto it = std::find(firms_.begin(), firms_.end(), ticker);
    return it == firms_.end() ? -1 : static_cast<int>(it - firms_.begin());
}

template <typename Tag>
Panel<Tag> Panel<Tag>::select_firms(const std::vector<int>& keep) const {
    std::vector<std::string> firms;
    firms.reserve(keep.size());
    for (int f : keep) {
        if (f < 0 || f >= static_cast<int>(n_firms())) throw DataError("firm index out of range");
        firms.push_back(firms_[f]);
    }
    std::vector<std::optional<double>> cells;
    cells.reserve(n_dates() * keep.size());
    for (size_t t = 0; t < n_dates(); ++t)
        for (int f : keep) cells.push_back(at(t, f));
    return Panel(dates_, std::move(firms), std::move(cells));
}

template <typename Tag>
std::vector<size_t> Panel<Tag>::window_indices(const Date& start, const Date& end) const {
    std::vector<size_t> idx;
    for (size_t t = 0; t < dates_.size(); ++t)
        if (!(dates_[t] < start) && !(end < dates_[t])) idx.push_back(t);
    return idx;
}

template class Panel<PriceTag>;
template class Panel<ReturnTag>;

const std::string* SectorMap::find(const std::string& ticker) const {
    for (const auto& [t, s] : entries)
        if (t == ticker) return &s;
    return nullptr;
}

PricePanel load_price_csv(const std::string& path) {
    auto table = csv::read_file(path);
    if (table.header.empty() || csv::trim(table.header[0]) != "date")
        throw DataError("malformed header in '" + path + "': first column must be 'date'");
    if (table.header.size() < 2)
        throw DataError("malformed header in '" + path + "': no ticker columns");

    std::vector<std::string> firms(table.header.begin() + 1, table.header.end());
    {
        std::set<std::string> seen;
        for (const auto& f : firms) {
            if (f.empty()) throw DataError("empty ticker in header of '" + path + "'");
            if (!seen.insert(f).second) throw DataError("duplicate ticker '" + f + "' in '" + path + "'");
        }
    }

    struct Row {
        Date date;
        std::vector<std::optional<double>> prices;
    };
    std::vector<Row> rows;
    rows.reserve(table.rows.size());
    for (size_t r = 0; r < table.rows.size(); ++r) {
        const auto& fields = table.rows[r];
        size_t file_row = r + 2; // 1-based, header is row 1
        if (fields.size() != table.header.size())
            throw DataError("row " + std::to_string(file_row) + " of '" + path + "' has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(table.header.size()));
        Row row;
        row.date = Date::parse(fields[0]);
        row.prices.reserve(firms.size());
        for (size_t f = 1; f < fields.size(); ++f) {
            if (fields[f].empty()) {
                row.prices.emplace_back(std::nullopt);
                continue;
            }
            double p = csv::parse_double(fields[f], "row " + std::to_string(file_row) + ", column " +
                                                        firms[f - 1] + " of '" + path + "'");
            if (p <= 0.0)
                throw DataError("non-positive price at row " + std::to_string(file_row) + ", column " +
                                firms[f - 1] + " of '" + path + "'");
            row.prices.emplace_back(p);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError("'" + path + "' has no data rows");

    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.date < b.date; });
    for (size_t r = 1; r < rows.size(); ++r)
        if (rows[r].date == rows[r - 1].date)
            throw DataError("duplicate date " + rows[r].date.to_string() + " in '" + path + "'");

    std::vector<Date> dates;
    std::vector<std::optional<double>> cells;
    dates.reserve(rows.size());
    cells.reserve(rows.size() * firms.size());
    for (auto& row : rows) {
        dates.push_back(row.date);
        for (auto& p : row.prices) cells.push_back(p);
    }
    return PricePanel(std::move(dates), std::move(firms), std::move(cells));
}

SectorMap load_sector_csv(const std::string& path) {
    auto table = csv::read_file(path);
    if (table.header.size() != 2 || table.header[0] != "ticker" || table.header[1] != "sector")
        throw DataError("malformed header in '" + path + "': expected 'ticker,sector'");
    SectorMap map;
    for (size_t r = 0; r < table.rows.size(); ++r) {
        const auto& fields = table.rows[r];
        if (fields.size() != 2 || fields[0].empty() || fields[1].empty())
            throw DataError("malformed row " + std::to_string(r + 2) + " in '" + path + "'");
        if (map.find(fields[0]))
            throw DataError("duplicate ticker '" + fields[0] + "' in '" + path + "'");
        map.entries.emplace_back(fields[0], fields[1]);
    }
    return map;
}

ReturnPanel to_log_returns(const PricePanel& panel) {
    if (panel.n_dates() < 2) throw DataError("need at least 2 dates to compute returns");
    std::vector<Date> dates(panel.dates().begin() + 1, panel.dates().end());
    std::vector<std::optional<double>> cells;
    cells.reserve((panel.n_dates() - 1) * panel.n_firms());
    for (size_t t = 1; t < panel.n_dates(); ++t) {
        for (size_t f = 0; f < panel.n_firms(); ++f) {
            if (panel.has(t, f) && panel.has(t - 1, f))
                cells.emplace_back(std::log(panel.value(t, f)) - std::log(panel.value(t - 1, f)));
            else
                cells.emplace_back(std::nullopt);
        }
    }
    return ReturnPanel(std::move(dates), panel.firms(), std::move(cells));
}

ReturnPanel filter_sample(const ReturnPanel& panel, int min_consecutive, const CrisisWindow& crisis) {
    if (min_consecutive < 1) throw ConfigError("min_consecutive must be >= 1");
    if (!(crisis.start < crisis.end)) throw ConfigError("crisis window start must precede end");
    if (panel.n_dates() == 0) throw DataError("empty panel");
    if (crisis.start < panel.dates().front() || panel.dates().back() < crisis.end)
        throw ConfigError("crisis window [" + crisis.start.to_string() + ", " + crisis.end.to_string() +
                          "] not contained in panel date range");

    std::vector<int> keep;
    for (size_t f = 0; f < panel.n_firms(); ++f) {
        int longest_run = 0, run = 0;
        bool first_obs_precrisis = false;
        bool full_crisis = true;
        for (size_t t = 0; t < panel.n_dates(); ++t) {
            bool present = panel.has(t, f);
            if (panel.dates()[t] < crisis.start) {
                run = present ? run + 1 : 0;
                longest_run = std::max(longest_run, run);
                if (present) first_obs_precrisis = true;
            } else if (!(crisis.end < panel.dates()[t])) {
                if (!present) full_crisis = false;
            }
        }
        if (longest_run >= min_consecutive && first_obs_precrisis && full_crisis)
            keep.push_back(static_cast<int>(f));
    }
    if (keep.empty()) throw DataError("no firms survive filters");
    return panel.select_firms(keep);
}

double cumulative_return(const ReturnPanel& panel, const std::string& firm, const CrisisWindow& window) {
    int f = panel.firm_index(firm);
    if (f < 0) throw DataError("firm '" + firm + "' not in panel");
    auto idx = panel.window_indices(window.start, window.end);
    if (idx.empty()) throw DataError("no observations for '" + firm + "' in window " + window.label);
    double sum = 0.0;
    for (size_t t : idx) {
        if (!panel.has(t, f))
            throw DataError("firm '" + firm + "' missing at " + panel.dates()[t].to_string() +
                            " inside window " + window.label);
        sum += panel.value(t, f);
    }
    return sum;
}

double max_drawdown(const PricePanel& panel, const std::string& firm, const CrisisWindow& window) {
    int f = panel.firm_index(firm);
    if (f < 0) throw DataError("firm '" + firm + "' not in panel");
    auto idx = panel.window_indices(window.start, window.end);
    double peak = -1.0, worst = 0.0;
    size_t n_present = 0;
    for (size_t t : idx) {
        if (!panel.has(t, f)) continue;
        ++n_present;
        double p = panel.value(t, f);
        peak = std::max(peak, p);
        worst = std::max(worst, (peak - p) / peak);
    }
    if (n_present < 2)
        throw DataError("need at least 2 prices for '" + firm + "' in window " + window.label);
    return worst;
}

} // namespace spillnet

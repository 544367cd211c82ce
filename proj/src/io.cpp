#include "spillnet/io.hpp"

#include <map>

#include "spillnet/csv.hpp"
#include "spillnet/errors.hpp"

namespace spillnet::io {

namespace {

std::map<std::string, int> index_of(const std::vector<std::string>& tickers) {
    std::map<std::string, int> idx;
    for (size_t i = 0; i < tickers.size(); ++i) idx[tickers[i]] = static_cast<int>(i);
    return idx;
}

} // namespace

void write_nodes_csv(const std::string& path, const std::vector<std::string>& tickers) {
    std::vector<std::vector<std::string>> rows;
    for (size_t i = 0; i < tickers.size(); ++i) rows.push_back({std::to_string(i), tickers[i]});
    csv::write_file(path, {"index", "ticker"}, rows);
}

std::vector<std::string> read_nodes_csv(const std::string& path) {
    auto t = csv::read_file(path);
    if (t.header != std::vector<std::string>{"index", "ticker"})
        throw DataError("'" + path + "' is not a node table");
    std::vector<std::string> tickers(t.rows.size());
    for (const auto& row : t.rows) {
        if (row.size() != 2) throw DataError("malformed row in '" + path + "'");
        size_t i = static_cast<size_t>(std::stoul(row[0]));
        if (i >= tickers.size()) throw DataError("node index out of range in '" + path + "'");
        tickers[i] = row[1];
    }
    return tickers;
}

void write_edges_csv(const std::string& path, const DirectedGraph& graph,
                     const std::vector<EdgeTest>& edge_tests) {
    std::map<std::pair<int, int>, const EdgeTest*> stats;
    for (const auto& t : edge_tests) stats[{t.source, t.target}] = &t;
    std::vector<std::vector<std::string>> rows;
    for (const auto& [u, v] : graph.edges()) {
        auto it = stats.find({u, v});
        if (it == stats.end()) throw DataError("edge without test statistics in export");
        rows.push_back({graph.label(u), graph.label(v), csv::format(it->second->f_stat),
                        csv::format(it->second->p_value)});
    }
    csv::write_file(path, {"source", "target", "F", "p_value"}, rows);
}

DirectedGraph read_edges_csv(const std::string& path, const std::vector<std::string>& tickers) {
    auto t = csv::read_file(path);
    if (t.header != std::vector<std::string>{"source", "target", "F", "p_value"})
        throw DataError("'" + path + "' is not an edge list");
    auto idx = index_of(tickers);
    DirectedGraph g(tickers);
    for (const auto& row : t.rows) {
        if (row.size() != 4) throw DataError("malformed row in '" + path + "'");
        auto s = idx.find(row[0]);
        auto d = idx.find(row[1]);
        if (s == idx.end() || d == idx.end())
            throw DataError("edge references unknown ticker in '" + path + "'");
        g.add_edge(s->second, d->second);
    }
    return g;
}

void write_partition_csv(const std::string& path, const std::vector<std::string>& tickers,
                         const Partition& partition) {
    partition.validate(tickers.size());
    std::vector<std::vector<std::string>> rows;
    for (size_t i = 0; i < tickers.size(); ++i)
        rows.push_back({tickers[i], std::to_string(partition.community[i])});
    csv::write_file(path, {"ticker", "community"}, rows);
}

Partition read_partition_csv(const std::string& path, const std::vector<std::string>& tickers) {
    auto t = csv::read_file(path);
    if (t.header != std::vector<std::string>{"ticker", "community"})
        throw DataError("'" + path + "' is not a partition table");
    auto idx = index_of(tickers);
    Partition p;
    p.community.assign(tickers.size(), -1);
    for (const auto& row : t.rows) {
        if (row.size() != 2) throw DataError("malformed row in '" + path + "'");
        auto it = idx.find(row[0]);
        if (it == idx.end()) throw DataError("unknown ticker '" + row[0] + "' in '" + path + "'");
        p.community[it->second] = std::stoi(row[1]);
    }
    p.validate(tickers.size());
    return p;
}

void write_metrics_csv(const std::string& path, const MetricTable& table) {
    std::vector<std::string> header{"ticker"};
    for (const auto& c : table.columns) header.push_back(c.id());
    std::vector<std::vector<std::string>> rows;
    for (size_t i = 0; i < table.tickers.size(); ++i) {
        std::vector<std::string> row{table.tickers[i]};
        for (const auto& c : table.columns) row.push_back(csv::format(c.values[i]));
        rows.push_back(std::move(row));
    }
    csv::write_file(path, header, rows);
}

MetricTable read_metrics_csv(const std::string& path) {
    auto t = csv::read_file(path);
    if (t.header.empty() || t.header[0] != "ticker")
        throw DataError("'" + path + "' is not a metric table");
    MetricTable table;
    for (size_t j = 1; j < t.header.size(); ++j) {
        auto dot = t.header[j].find('.');
        if (dot == std::string::npos)
            throw DataError("metric column '" + t.header[j] + "' lacks a level tag");
        MetricColumn col;
        col.level = parse_level(t.header[j].substr(0, dot));
        col.name = t.header[j].substr(dot + 1);
        table.columns.push_back(std::move(col));
    }
    for (const auto& row : t.rows) {
        if (row.size() != t.header.size()) throw DataError("malformed row in '" + path + "'");
        table.tickers.push_back(row[0]);
        for (size_t j = 1; j < row.size(); ++j)
            table.columns[j - 1].values.push_back(
                csv::parse_double(row[j], "column " + t.header[j] + " of '" + path + "'"));
    }
    return table;
}

void write_correlation_csv(const std::string& path, const CorrelationResult& correlation) {
    std::vector<std::string> header{"metric"};
    header.insert(header.end(), correlation.names.begin(), correlation.names.end());
    std::vector<std::vector<std::string>> rows;
    for (size_t i = 0; i < correlation.names.size(); ++i) {
        std::vector<std::string> row{correlation.names[i]};
        for (size_t j = 0; j < correlation.names.size(); ++j)
            row.push_back(csv::format(correlation.matrix(i, j)));
        rows.push_back(std::move(row));
    }
    csv::write_file(path, header, rows);
}

void write_targets_csv(const std::string& path, const Targets& targets) {
    std::vector<std::string> header{"ticker"};
    header.insert(header.end(), targets.names.begin(), targets.names.end());
    std::vector<std::vector<std::string>> rows;
    for (size_t i = 0; i < targets.tickers.size(); ++i) {
        std::vector<std::string> row{targets.tickers[i]};
        for (Eigen::Index j = 0; j < targets.values.cols(); ++j)
            row.push_back(csv::format(targets.values(i, j)));
        rows.push_back(std::move(row));
    }
    csv::write_file(path, header, rows);
}

Targets read_targets_csv(const std::string& path) {
    auto t = csv::read_file(path);
    if (t.header.empty() || t.header[0] != "ticker")
        throw DataError("'" + path + "' is not a target table");
    Targets targets;
    targets.names.assign(t.header.begin() + 1, t.header.end());
    targets.values.resize(t.rows.size(), targets.names.size());
    for (size_t i = 0; i < t.rows.size(); ++i) {
        const auto& row = t.rows[i];
        if (row.size() != t.header.size()) throw DataError("malformed row in '" + path + "'");
        targets.tickers.push_back(row[0]);
        for (size_t j = 1; j < row.size(); ++j)
            targets.values(i, j - 1) =
                csv::parse_double(row[j], "column " + t.header[j] + " of '" + path + "'");
    }
    return targets;
}

} // namespace spillnet::io

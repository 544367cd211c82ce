#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "spillnet/errors.hpp"
#include "spillnet/granger.hpp"
#include "synth.hpp"

using namespace spillnet;

namespace {

std::vector<double> white_noise(int t_len, std::mt19937& rng, double sd = 1.0) {
    std::normal_distribution<double> noise(0.0, sd);
    std::vector<double> x(t_len);
    for (auto& v : x) v = noise(rng);
    return x;
}

// y_t = coef * x_{t-1} + eps_t
std::vector<double> driven_by(const std::vector<double>& x, double coef, std::mt19937& rng,
                              double sd = 1.0) {
    std::normal_distribution<double> noise(0.0, sd);
    std::vector<double> y(x.size());
    y[0] = noise(rng);
    for (size_t t = 1; t < x.size(); ++t) y[t] = coef * x[t - 1] + noise(rng);
    return y;
}

} // namespace

TEST_CASE("fit_bivariate_var recovers a planted cross coefficient within 3 SE") {
    std::mt19937 rng(101);
    auto x = white_noise(400, rng);
    auto y = driven_by(x, 0.8, rng);
    VarFit fit = fit_bivariate_var(x, y, 1);
    CHECK(std::abs(fit.x_lag_coef(1) - 0.8) <= 3.0 * fit.x_lag_se(1));
    CHECK(fit.sample_size == 399);
    CHECK(fit.rss_restricted >= fit.rss_unrestricted);
    CHECK(fit.rss_unrestricted > 0.0);
}

TEST_CASE("fit_bivariate_var finds no cross effect when x is irrelevant") {
    std::mt19937 rng(102);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> y(400), x = white_noise(400, rng);
    y[0] = noise(rng);
    for (size_t t = 1; t < y.size(); ++t) y[t] = 0.5 * y[t - 1] + noise(rng);
    VarFit fit = fit_bivariate_var(x, y, 1);
    CHECK(std::abs(fit.x_lag_coef(1)) <= 3.0 * fit.x_lag_se(1));
}

TEST_CASE("fit_bivariate_var rejects degenerate inputs") {
    std::mt19937 rng(103);
    auto y = white_noise(60, rng);
    std::vector<double> flat(60, 2.0);
    CHECK_THROWS_AS(fit_bivariate_var(flat, y, 1), NumericalError);

    auto x = white_noise(6, rng);
    auto y6 = white_noise(6, rng);
    CHECK_THROWS_AS(fit_bivariate_var(x, y6, 1), DataError); // below 2p + 5
    CHECK_THROWS_AS(fit_bivariate_var(x, y, 1), DataError);  // unaligned
}

TEST_CASE("granger_test edge cases: no gain and exact fit") {
    VarFit fit;
    fit.lag = 1;
    fit.sample_size = 50;
    fit.rss_unrestricted = 2.0;
    fit.rss_restricted = 2.0;
    EdgeTest t = granger_test(fit, 3, 4);
    CHECK(t.f_stat == 0.0);
    CHECK(t.p_value == 1.0);
    CHECK(t.source == 3);
    CHECK(t.target == 4);

    fit.rss_unrestricted = 0.0;
    CHECK_THROWS_AS(granger_test(fit), NumericalError);
}

TEST_CASE("granger test is calibrated: size near 5% and high power on a strong DGP") {
    std::mt19937 rng(104);
    int rejections = 0;
    const int size_reps = 400;
    for (int rep = 0; rep < size_reps; ++rep) {
        auto x = white_noise(120, rng);
        auto y = white_noise(120, rng);
        if (granger_test(fit_bivariate_var(x, y, 1)).p_value < 0.05) ++rejections;
    }
    double size = static_cast<double>(rejections) / size_reps;
    CHECK(size > 0.02);
    CHECK(size < 0.08);

    int power_hits = 0;
    const int power_reps = 100;
    for (int rep = 0; rep < power_reps; ++rep) {
        auto x = white_noise(120, rng);
        auto y = driven_by(x, 0.8, rng);
        if (granger_test(fit_bivariate_var(x, y, 1)).p_value < 0.05) ++power_hits;
    }
    CHECK(static_cast<double>(power_hits) / power_reps >= 0.9);
}

TEST_CASE("granger F statistic is invariant under affine rescaling of both series") {
    std::mt19937 rng(105);
    auto x = white_noise(150, rng);
    auto y = driven_by(x, 0.4, rng);
    EdgeTest base = granger_test(fit_bivariate_var(x, y, 1));

    std::vector<double> xs(x.size()), ys(y.size());
    for (size_t t = 0; t < x.size(); ++t) {
        xs[t] = 2.5 * x[t] + 1.0;
        ys[t] = -0.7 * y[t] + 3.0;
    }
    EdgeTest scaled = granger_test(fit_bivariate_var(xs, ys, 1));
    CHECK(scaled.f_stat == doctest::Approx(base.f_stat).epsilon(1e-10));
    CHECK(scaled.p_value == doctest::Approx(base.p_value).epsilon(1e-8));
}

namespace {

ReturnPanel panel_of(const std::vector<std::vector<double>>& series,
                     std::vector<std::string> names) {
    Eigen::MatrixXd m(series[0].size(), series.size());
    for (size_t f = 0; f < series.size(); ++f)
        for (size_t t = 0; t < series[f].size(); ++t) m(t, f) = series[f][t];
    return synth::return_panel(synth::monthly_dates(2000, 1, static_cast<int>(series[0].size())),
                               std::move(names), m);
}

} // namespace

TEST_CASE("build_network: white-noise firms produce roughly size-level edge counts") {
    std::mt19937 rng(106);
    NetworkOptions opt;
    double total_edges = 0.0;
    const int reps = 200;
    for (int rep = 0; rep < reps; ++rep) {
        auto panel = panel_of({white_noise(60, rng), white_noise(60, rng), white_noise(60, rng)},
                              {"A", "B", "C"});
        NetworkResult r =
            build_network(panel, Date{2000, 1, 1}, Date{2010, 1, 1}, opt);
        total_edges += static_cast<double>(r.graph.edge_count());
    }
    double mean = total_edges / reps; // 6 ordered pairs at 5% -> 0.3
    CHECK(mean > 0.2);
    CHECK(mean < 0.4);
}

TEST_CASE("build_network recovers a planted chain without inventing the shortcut") {
    std::mt19937 rng(107);
    NetworkOptions opt;
    int ab = 0, bc = 0, ac = 0;
    const int reps = 100;
    for (int rep = 0; rep < reps; ++rep) {
        auto a = white_noise(120, rng);
        auto b = driven_by(a, 0.8, rng);
        auto c = driven_by(b, 0.8, rng);
        auto panel = panel_of({a, b, c}, {"A", "B", "C"});
        NetworkResult r = build_network(panel, Date{2000, 1, 1}, Date{2015, 1, 1}, opt);
        ab += r.graph.has_edge(0, 1);
        bc += r.graph.has_edge(1, 2);
        ac += r.graph.has_edge(0, 2);
    }
    CHECK(ab >= 90);
    CHECK(bc >= 90);
    CHECK(ac <= 15); // at most marginally above the 5% size
}

TEST_CASE("build_network trivial and error cases") {
    std::mt19937 rng(108);
    NetworkOptions opt;
    auto single = panel_of({white_noise(40, rng)}, {"A"});
    NetworkResult r = build_network(single, Date{2000, 1, 1}, Date{2010, 1, 1}, opt);
    CHECK(r.graph.edge_count() == 0);
    CHECK(r.graph.size() == 1);

    auto pair = panel_of({white_noise(40, rng), white_noise(40, rng)}, {"A", "B"});
    CHECK_THROWS_AS(build_network(pair, Date{2000, 1, 31}, Date{2000, 6, 30}, opt), DataError);

    opt.significance = 1.5;
    CHECK_THROWS_AS(build_network(pair, Date{2000, 1, 1}, Date{2010, 1, 1}, opt), ConfigError);
}

TEST_CASE("build_network skips pairs with missing data instead of imputing") {
    std::mt19937 rng(109);
    auto a = white_noise(60, rng);
    auto b = driven_by(a, 0.9, rng);
    auto c = white_noise(60, rng);
    Eigen::MatrixXd m(60, 3);
    for (int t = 0; t < 60; ++t) {
        m(t, 0) = a[t];
        m(t, 1) = b[t];
        m(t, 2) = c[t];
    }
    auto dates = synth::monthly_dates(2000, 1, 60);
    std::vector<std::optional<double>> cells;
    for (int t = 0; t < 60; ++t)
        for (int f = 0; f < 3; ++f) {
            if (f == 2 && t == 30)
                cells.emplace_back(std::nullopt); // one hole in C
            else
                cells.emplace_back(m(t, f));
        }
    ReturnPanel panel(dates, {"A", "B", "C"}, std::move(cells));

    NetworkResult r = build_network(panel, Date{2000, 1, 1}, Date{2010, 1, 1}, NetworkOptions{});
    CHECK(r.graph.has_edge(0, 1)); // strong A->B pair is untouched
    CHECK(r.skipped.size() == 4);  // every ordered pair involving C
    for (const auto& [s, t] : r.skipped) CHECK((s == 2 || t == 2));
    CHECK(r.graph.degree(2, Direction::In) == 0);
    CHECK(r.graph.degree(2, Direction::Out) == 0);
}

TEST_CASE("edge decisions depend only on the pair of series") {
    std::mt19937 rng(110);
    auto a = white_noise(80, rng);
    auto b = driven_by(a, 0.5, rng);
    auto c = white_noise(80, rng);

    NetworkOptions opt;
    auto three = panel_of({a, b, c}, {"A", "B", "C"});
    auto two = panel_of({a, b}, {"A", "B"});
    NetworkResult with3 = build_network(three, Date{2000, 1, 1}, Date{2010, 1, 1}, opt);
    NetworkResult with2 = build_network(two, Date{2000, 1, 1}, Date{2010, 1, 1}, opt);

    CHECK(with3.graph.has_edge(0, 1) == with2.graph.has_edge(0, 1));
    // the recorded statistics are bit-identical
    auto find_test = [](const NetworkResult& r, int s, int t) -> const EdgeTest* {
        for (const auto& e : r.edge_tests)
            if (e.source == s && e.target == t) return &e;
        return nullptr;
    };
    const EdgeTest* t3 = find_test(with3, 0, 1);
    const EdgeTest* t2 = find_test(with2, 0, 1);
    REQUIRE(t3);
    REQUIRE(t2);
    CHECK(t3->f_stat == t2->f_stat);
    CHECK(t3->p_value == t2->p_value);
}

TEST_CASE("build_network output is invariant under firm permutation") {
    std::mt19937 rng(111);
    auto a = white_noise(100, rng);
    auto b = driven_by(a, 0.6, rng);
    auto c = driven_by(b, 0.6, rng);

    NetworkOptions opt;
    auto abc = panel_of({a, b, c}, {"A", "B", "C"});
    auto cab = panel_of({c, a, b}, {"C", "A", "B"});
    NetworkResult r1 = build_network(abc, Date{2000, 1, 1}, Date{2015, 1, 1}, opt);
    NetworkResult r2 = build_network(cab, Date{2000, 1, 1}, Date{2015, 1, 1}, opt);

    auto edges_by_label = [](const DirectedGraph& g) {
        std::set<std::pair<std::string, std::string>> e;
        for (const auto& [u, v] : g.edges()) e.emplace(g.label(u), g.label(v));
        return e;
    };
    CHECK(edges_by_label(r1.graph) == edges_by_label(r2.graph));
}

TEST_CASE("build_snapshots window arithmetic") {
    std::mt19937 rng(112);
    Eigen::MatrixXd m(60, 2);
    for (int t = 0; t < 60; ++t) {
        m(t, 0) = white_noise(1, rng)[0];
        m(t, 1) = white_noise(1, rng)[0];
    }
    auto panel = synth::return_panel(synth::monthly_dates(2000, 1, 60), {"A", "B"}, m);

    NetworkOptions opt;
    SnapshotsResult two = build_snapshots(panel, 48, 12, opt);
    CHECK(two.snapshots.size() == 2);
    CHECK(two.window_rows == std::vector<std::pair<size_t, size_t>>{{0, 48}, {12, 48}});

    SnapshotsResult one = build_snapshots(panel, 48, 100, opt); // step overshoots the rest
    CHECK(one.snapshots.size() == 1);

    CHECK_THROWS_AS(build_snapshots(panel, 48, 0, opt), ConfigError);
    CHECK_THROWS_AS(build_snapshots(panel, 100, 12, opt), DataError);
}

TEST_CASE("build_snapshots on a homogeneous DGP: shared nodes, increasing timestamps, stable counts") {
    std::mt19937 rng(113);
    std::vector<std::vector<double>> series;
    std::vector<std::string> names;
    for (int f = 0; f < 10; ++f) {
        series.push_back(white_noise(120, rng));
        names.push_back("F" + std::to_string(f));
    }
    auto panel = panel_of(series, names);
    SnapshotsResult snaps = build_snapshots(panel, 60, 30, NetworkOptions{});
    REQUIRE(snaps.snapshots.size() == 3);
    for (size_t k = 0; k < snaps.snapshots.size(); ++k) {
        CHECK(snaps.snapshots[k].labels() == names);
        if (k > 0) CHECK(*snaps.snapshots[k - 1].timestamp() < *snaps.snapshots[k].timestamp());
        // 90 ordered pairs at 5%: mean 4.5, sd ~2.1; 4 sigma band
        CHECK(snaps.snapshots[k].edge_count() <= 13);
    }
}

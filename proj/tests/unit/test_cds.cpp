#include "contagion/balance.hpp"
#include "contagion/cds.hpp"
#include "contagion/errors.hpp"
#include "contagion/netgen.hpp"

#include <doctest.h>

#include <algorithm>
#include <iterator>
#include <numeric>

using namespace contagion;

namespace {

// Upper 1% point of chi-square with 9 degrees of freedom.
constexpr double kChi2Df9Q99 = 21.665994333461924;

WeightedNetwork sample_network(std::uint64_t seed) {
    return tune_concentration(generate_topology(500, 0.05, seed), 0.3, 150.0);
}

BalanceSheetSet sheets_with_assets(std::vector<double> a) {
    BalanceSheetSet s;
    s.loans.assign(a.size(), 0.0);
    s.external = std::move(a);
    return s;
}

std::vector<BankIndex> top_by(const std::vector<double>& v, std::size_t k) {
    std::vector<BankIndex> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](auto x, auto y) { return v[x] > v[y]; });
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

} // namespace

TEST_CASE("seller selection ranks by assets with ties to the lower index") {
    CHECK(select_sellers(sheets_with_assets({5, 9, 9, 1}), 2) == std::vector<BankIndex>{1, 2});
    auto all = select_sellers(sheets_with_assets({5, 9, 9, 1}), 4);
    std::sort(all.begin(), all.end());
    CHECK(all == std::vector<BankIndex>{0, 1, 2, 3});
    CHECK(select_sellers(sheets_with_assets({3, 3, 3}), 1) == std::vector<BankIndex>{0});
}

TEST_CASE("largest banks by assets are mostly the largest lenders") {
    // Net borrowers carry their funding gap as external assets, so the top-10
    // sets coincide exactly in only a minority of seeds; the overlap is high.
    int mostly = 0, exact = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto net = sample_network(seed);
        const auto s = compute_balance_sheets(net, 0.3, 0.09);
        auto sellers = select_sellers(s, 10);
        std::sort(sellers.begin(), sellers.end());
        const auto lenders = top_by(s.loans, 10);
        std::vector<BankIndex> common;
        std::set_intersection(sellers.begin(), sellers.end(), lenders.begin(), lenders.end(),
                              std::back_inserter(common));
        mostly += common.size() >= 8;
        exact += sellers == lenders;
    }
    CHECK(mostly >= 90);
    CHECK(exact >= 5);
}

TEST_CASE("single seller without loans covers everything") {
    // bank 7 only borrows
    std::vector<Edge> edges;
    for (BankIndex i = 0; i < 7; ++i)
        edges.push_back({i, BankIndex(i + 1)});
    const auto net = assign_loan_weights(Topology(8, edges), 0.0, 1.0);
    const std::vector<BankIndex> sellers{7};
    const auto p = assign_protection(net, sellers, 1);
    CHECK(p.seller_of_edge.size() == net.weights.size());
    for (auto s : p.seller_of_edge)
        CHECK(s == 7);
    CHECK(p.seller_notional[0] == doctest::Approx(1.0));
}

TEST_CASE("a sole seller cannot insure its own loans") {
    const auto net = assign_loan_weights(Topology(8, {{7, 1}, {2, 3}}), 0.0, 1.0);
    const std::vector<BankIndex> sellers{7};
    CHECK_THROWS_AS(assign_protection(net, sellers, 1), NoEligibleSeller);
}

TEST_CASE("protection covers every edge, excludes the creditor and is deterministic") {
    const auto net = sample_network(2);
    const auto sellers = select_sellers(compute_balance_sheets(net, 0.3, 0.09), 10);
    const auto a = assign_protection(net, sellers, 77);
    const auto b = assign_protection(net, sellers, 77);
    CHECK(a.seller_of_edge == b.seller_of_edge);
    CHECK(a.seller_of_edge != assign_protection(net, sellers, 78).seller_of_edge);
    REQUIRE(a.seller_of_edge.size() == net.topology.edge_count());
    const auto edges = net.topology.edges();
    double notional = 0;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        REQUIRE(a.seller_of_edge[i] != edges[i].creditor);
        REQUIRE(std::find(sellers.begin(), sellers.end(), a.seller_of_edge[i]) != sellers.end());
    }
    for (double x : a.seller_notional)
        notional += x;
    CHECK(notional == doctest::Approx(150.0).epsilon(1e-12));
}

TEST_CASE("seller assignment is uniform over eligible sellers") {
    int pass = 0;
    const int seeds = 100;
    for (int seed = 1; seed <= seeds; ++seed) {
        const auto net = sample_network(std::uint64_t(seed));
        const auto sellers = select_sellers(compute_balance_sheets(net, 0.3, 0.09), 10);
        const auto p = assign_protection(net, sellers, 1000 + std::uint64_t(seed));
        std::vector<double> expected(sellers.size(), 0.0), observed(sellers.size(), 0.0);
        const auto edges = net.topology.edges();
        for (std::size_t i = 0; i < edges.size(); ++i) {
            const bool self = std::find(sellers.begin(), sellers.end(), edges[i].creditor) != sellers.end();
            const double share = 1.0 / double(sellers.size() - (self ? 1 : 0));
            for (std::size_t k = 0; k < sellers.size(); ++k) {
                if (sellers[k] != edges[i].creditor)
                    expected[k] += share;
                if (sellers[k] == p.seller_of_edge[i])
                    observed[k] += 1;
            }
        }
        double chi2 = 0;
        for (std::size_t k = 0; k < sellers.size(); ++k)
            chi2 += (observed[k] - expected[k]) * (observed[k] - expected[k]) / expected[k];
        pass += chi2 < kChi2Df9Q99;
    }
    CHECK(pass >= 95);
}

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "skyrelay/netsim.hpp"
#include "skyrelay/seed.hpp"

using namespace skyrelay;
using namespace skyrelay::netsim;

namespace {

Node bs(Point p, int index, double power = 40.0)
{
    return {p, NodeKind::Bs, index, power, static_cast<std::uint64_t>(index)};
}

double variance(const std::vector<int>& loads)
{
    const double m = std::accumulate(loads.begin(), loads.end(), 0.0) / loads.size();
    double v = 0;
    for (int l : loads) {
        v += (l - m) * (l - m);
    }
    return v / loads.size();
}

Scenario small_scenario()
{
    Scenario sc;
    sc.layout.rings = 1;
    sc.traffic.total_users = 140;
    return sc;
}

}  // namespace

TEST(Associate, SingleBs)
{
    const RadioConfig radio;
    const std::vector<Node> nodes{bs({0, 0}, 0)};
    const std::vector<PlacedUser> ues{{{30, 40}, 0}};
    EXPECT_EQ(associate(ues, nodes, 1, radio), std::vector<int>{0});
}

TEST(Associate, TieGoesToLowerIndex)
{
    const RadioConfig radio;
    const std::vector<Node> nodes{bs({-100, 0}, 0), bs({100, 0}, 1)};
    const std::vector<PlacedUser> ues{{{0, 50}, 0}};
    EXPECT_EQ(associate(ues, nodes, 2, radio), std::vector<int>{0});
}

TEST(Associate, NearbySuavRelayWins)
{
    const RadioConfig radio;
    std::vector<Node> nodes{bs({0, 0}, 0, 1.0), {{510, 0}, NodeKind::SuavRn, 0, 1.0, 1}};
    const std::vector<PlacedUser> ues{{{500, 0}, 0}};
    // K 10^-2 (LoS at 10 m) against K 500^-4 (NLoS at 500 m).
    EXPECT_EQ(associate(ues, nodes, 1, radio), std::vector<int>{1});
    nodes[1].kind = NodeKind::GroundRn;
    nodes[1].pos = {-300, 0};  // NLoS at 800 m loses to the BS at 500 m
    EXPECT_EQ(associate(ues, nodes, 1, radio), std::vector<int>{0});
}

TEST(Associate, RelaysOnlyServeTheirDonorsCell)
{
    const RadioConfig radio;
    // The UE's strongest BS is 0, but the strongest node overall is BS 1's relay.
    const std::vector<Node> nodes{bs({0, 0}, 0), bs({1000, 0}, 1), {{470, 0}, NodeKind::SuavRn, 1, 1.0, 2}};
    const std::vector<PlacedUser> ues{{{450, 0}, 0}};
    EXPECT_EQ(associate(ues, nodes, 2, radio), std::vector<int>{0});
}

TEST(Schedule, EqualShares)
{
    EXPECT_TRUE(schedule(0).empty());
    EXPECT_EQ(schedule(1), std::vector<double>{1.0});
    EXPECT_EQ(schedule(4), std::vector<double>(4, 0.25));
    for (std::size_t n : {3u, 7u, 19u}) {
        const auto s = schedule(n);
        EXPECT_NEAR(std::accumulate(s.begin(), s.end(), 0.0), 1.0, 1e-12);
    }
}

TEST(Throughput, Direct)
{
    RadioConfig radio;
    radio.rate_calibration = 1.0;
    EXPECT_DOUBLE_EQ(throughput_direct(1.0, 1.0, radio), 1e7);
    EXPECT_DOUBLE_EQ(throughput_direct(1.0, 1e9, radio), 4.8e7);
    EXPECT_DOUBLE_EQ(throughput_direct(0.5, kInfiniteSinr, radio), 2.4e7);
    EXPECT_EQ(throughput_direct(0.0, 10.0, radio), 0.0);
    EXPECT_EQ(throughput_direct(1.0, 0.0, radio), 0.0);
    radio.rate_calibration = 2.0;
    EXPECT_DOUBLE_EQ(throughput_direct(1.0, 1.0, radio), 2e7);
}

TEST(Throughput, Relayed)
{
    EXPECT_DOUBLE_EQ(throughput_relayed(4e6, 4e6), 2e6);
    EXPECT_DOUBLE_EQ(throughput_relayed(6.0, 3.0), 2.0);
    EXPECT_EQ(throughput_relayed(0.0, 3.0), 0.0);
    EXPECT_EQ(throughput_relayed(3.0, 0.0), 0.0);
    // Best time split: max over eta of min(eta Cb, (1 - eta) Ca).
    const double cb = 7.0, ca = 2.5;
    double best = 0;
    for (int i = 0; i <= 100000; ++i) {
        const double eta = i / 100000.0;
        best = std::max(best, std::min(eta * cb, (1 - eta) * ca));
    }
    EXPECT_NEAR(throughput_relayed(cb, ca), best, 1e-4);
}

TEST(LoadBalance, SingleBoundaryUeMoves)
{
    const RadioConfig radio;
    const std::vector<Node> nodes{bs({0, 0}, 0), bs({1000, 0}, 1)};
    std::vector<PlacedUser> ues;
    for (int i = 0; i < 9; ++i) {
        ues.push_back({{10.0 + i, 5.0}, 0});
    }
    ues.push_back({{480, 0}, 0});
    const std::vector<int> assoc(10, 0);
    const auto out = load_balance(ues, nodes, 2, assoc, radio, 6.0);
    EXPECT_EQ(node_loads(out, 2), (std::vector<int>{9, 1}));
    EXPECT_EQ(out[9], 1);
}

TEST(LoadBalance, BalancedIsAFixedPoint)
{
    const RadioConfig radio;
    const std::vector<Node> nodes{bs({0, 0}, 0), bs({1000, 0}, 1)};
    const std::vector<PlacedUser> ues{{{490, 0}, 0}, {{510, 0}, 1}, {{10, 0}, 0}, {{990, 0}, 1}};
    const auto assoc = associate(ues, nodes, 2, radio);
    EXPECT_EQ(load_balance(ues, nodes, 2, assoc, radio), assoc);
}

TEST(LoadBalance, VarianceNeverIncreasesAndMovesStayWithinMargin)
{
    Scenario sc;
    const auto sites = hex_layout(2, 500);
    const auto cells = hex_cells(sites, 500);
    std::vector<Node> nodes;
    for (std::size_t j = 0; j < sites.size(); ++j) {
        nodes.push_back(bs(sites[j], static_cast<int>(j)));
    }
    for (int seed = 0; seed < 5; ++seed) {
        TrafficField f;
        f.asymmetry_f = 4;
        const auto ues = sample_users(f, cells, seed);
        const auto before = associate(ues, nodes, 19, sc.radio);
        const auto after = load_balance(ues, nodes, 19, before, sc.radio, 6.0);
        EXPECT_LE(variance(node_loads(after, 19)), variance(node_loads(before, 19)));
        EXPECT_LT(node_loads(after, 19)[0], node_loads(before, 19)[0]);
        for (std::size_t u = 0; u < ues.size(); ++u) {
            const double best = mean_received_power(ues[u].pos, nodes[before[u]], sc.radio);
            const double now = mean_received_power(ues[u].pos, nodes[after[u]], sc.radio);
            EXPECT_GE(10 * std::log10(now / best), -6.0 - 1e-9);
        }
    }
}

TEST(Metrics, Examples)
{
    auto m = metrics({1, 1, 1, 1});
    EXPECT_EQ(m.mean_throughput, 1.0);
    EXPECT_EQ(m.qos_5th_percentile, 1.0);
    std::vector<double> hundred(100);
    std::iota(hundred.begin(), hundred.end(), 1.0);
    std::reverse(hundred.begin(), hundred.end());
    m = metrics(hundred);
    EXPECT_EQ(m.qos_5th_percentile, 5.0);
    EXPECT_DOUBLE_EQ(m.mean_throughput, 50.5);
    m = metrics({7});
    EXPECT_EQ(m.mean_throughput, 7.0);
    EXPECT_EQ(m.qos_5th_percentile, 7.0);
    m = metrics({3, 9, 1, 4, 4});
    EXPECT_EQ(m.qos_5th_percentile, 1.0);
    EXPECT_THROW(metrics({}), std::invalid_argument);
}

TEST(UpperBound, Definition)
{
    RadioConfig radio;
    radio.rate_calibration = 1.0;
    NetworkRealization net;
    net.nodes = {bs({0, 0}, 0), bs({1000, 0}, 1)};
    net.bs_count = 2;
    net.ues = {{{10, 0}, 0}};
    net.serving = {0};
    EXPECT_DOUBLE_EQ(upper_bound(net, radio, 0).mean_throughput, 48e6);
    net.ues = {{{10, 0}, 0}, {{20, 0}, 0}, {{30, 0}, 0}, {{990, 0}, 1}};
    net.serving = {0, 0, 0, 1};
    const auto ub = upper_bound(net, radio, 0);
    EXPECT_EQ(ub.user_throughputs.size(), 3u);
    EXPECT_DOUBLE_EQ(ub.mean_throughput, 16e6);
}

TEST(Shares, PartitionPerNodeAndDonorPool)
{
    const auto sc = small_scenario();
    const auto drop = run_drop(sc, 3.0, Scheme::FixedRelays, 0);
    const auto& net = drop.network;
    const auto shares = compute_shares(net);
    std::vector<double> access(net.nodes.size(), 0.0), pool(net.bs_count, 0.0);
    for (std::size_t u = 0; u < net.ues.size(); ++u) {
        access[net.serving[u]] += shares.access[u];
        pool[net.nodes[net.serving[u]].donor] += shares.donor[u];
    }
    const auto loads = node_loads(net.serving, net.nodes.size());
    for (std::size_t n = 0; n < net.nodes.size(); ++n) {
        EXPECT_NEAR(access[n], loads[n] > 0 ? 1.0 : 0.0, 1e-12);
    }
    for (double p : pool) {
        EXPECT_NEAR(p, 1.0, 1e-12);
    }
}

TEST(RunDrop, StructureOfRelaySchemes)
{
    const auto sc = small_scenario();
    const auto cells = hex_cells(hex_layout(1, 500), 500);
    for (Scheme s : {Scheme::FixedRelays, Scheme::MobileRelays}) {
        const auto drop = run_drop(sc, 4.0, s, 2);
        const auto& net = drop.network;
        EXPECT_EQ(net.nodes.size(), 7u + 7u * 6u);
        std::vector<int> per_donor(7, 0);
        for (std::size_t n = 7; n < net.nodes.size(); ++n) {
            const auto& node = net.nodes[n];
            EXPECT_EQ(node.kind, s == Scheme::FixedRelays ? NodeKind::GroundRn : NodeKind::SuavRn);
            EXPECT_TRUE(cells[node.donor].contains(node.pos, 1e-6));
            ++per_donor[node.donor];
        }
        EXPECT_EQ(per_donor, std::vector<int>(7, 6));
        EXPECT_EQ(net.serving.size(), net.ues.size());
        for (double t : drop.all_throughputs) {
            EXPECT_GE(t, 0.0);
        }
        const auto& m = drop.metrics;
        EXPECT_GE(m.qos_5th_percentile, *std::min_element(m.user_throughputs.begin(), m.user_throughputs.end()));
        EXPECT_LE(m.qos_5th_percentile, *std::max_element(m.user_throughputs.begin(), m.user_throughputs.end()));
    }
}

TEST(RunDrop, DeterministicAndSharedUsersAcrossSchemes)
{
    const auto sc = small_scenario();
    const auto a = run_drop(sc, 2.0, Scheme::MobileRelays, 5);
    const auto b = run_drop(sc, 2.0, Scheme::MobileRelays, 5);
    EXPECT_EQ(a.all_throughputs, b.all_throughputs);
    const auto ref = run_drop(sc, 2.0, Scheme::Reference, 5);
    ASSERT_EQ(ref.network.ues.size(), a.network.ues.size());
    for (std::size_t u = 0; u < ref.network.ues.size(); ++u) {
        EXPECT_EQ(ref.network.ues[u].pos, a.network.ues[u].pos);
    }
    EXPECT_NE(run_drop(sc, 2.0, Scheme::Reference, 6).metrics.mean_throughput, ref.metrics.mean_throughput);
}

TEST(RunDrop, HotspotCellUsersOnly)
{
    const auto sc = small_scenario();
    const auto drop = run_drop(sc, 3.0, Scheme::Reference, 0);
    EXPECT_EQ(drop.metrics.user_throughputs.size(), static_cast<std::size_t>(hotspot_user_count(sc.traffic, 7) * 3));
}

TEST(RunDrop, UpperBoundDominatesEveryDrop)
{
    const auto sc = small_scenario();
    for (int d = 0; d < 5; ++d) {
        for (double f : {1.0, 3.0}) {
            const auto ub = run_drop(sc, f, Scheme::UpperBound, d).metrics;
            for (Scheme s : {Scheme::Reference, Scheme::LoadBalancing, Scheme::FixedRelays, Scheme::MobileRelays}) {
                const auto m = run_drop(sc, f, s, d).metrics;
                EXPECT_GE(ub.mean_throughput, m.mean_throughput);
                EXPECT_GE(ub.qos_5th_percentile, m.qos_5th_percentile);
            }
        }
    }
}

TEST(RunDrop, MoreUsersLessThroughput)
{
    const Scenario sc;
    double f1 = 0, f5 = 0;
    for (int d = 0; d < 20; ++d) {
        f1 += run_drop(sc, 1.0, Scheme::Reference, d).metrics.mean_throughput;
        f5 += run_drop(sc, 5.0, Scheme::Reference, d).metrics.mean_throughput;
    }
    EXPECT_LT(f5, f1);
}

TEST(RunDrop, NoFadingMeansOnes)
{
    const FadingDraw off;
    EXPECT_EQ(off.ue_link(3, 9), 1.0);
    EXPECT_EQ(off.relay_link(3, 9), 1.0);
    const FadingDraw on{true, 11};
    EXPECT_EQ(on.ue_link(3, 9), on.ue_link(3, 9));
    EXPECT_NE(on.ue_link(3, 9), on.ue_link(4, 9));
    double sum = 0;
    for (std::uint64_t u = 0; u < 100000; ++u) {
        sum += on.ue_link(u, 2);
    }
    EXPECT_NEAR(sum / 100000, 1.0, 0.02);
}

TEST(Sweep, WorkerCountInvariantAndOrdered)
{
    const auto sc = small_scenario();
    const std::vector<double> fs{1, 3};
    const std::vector<Scheme> schemes{Scheme::Reference, Scheme::MobileRelays};
    const auto a = sweep(sc, fs, schemes, 3, 1);
    const auto b = sweep(sc, fs, schemes, 3, 4);
    ASSERT_EQ(a.size(), 12u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].mean_bps, b[i].mean_bps);
        EXPECT_EQ(a[i].qos_bps, b[i].qos_bps);
        EXPECT_EQ(a[i].drop, static_cast<int>(i % 3));
    }
    EXPECT_EQ(a[5].scheme, Scheme::MobileRelays);
    EXPECT_EQ(a[6].asymmetry_f, 3.0);
}

TEST(Aggregate, MeanAndStudentInterval)
{
    std::vector<DropRow> rows;
    const double values[] = {1.0, 2.0, 4.0, 5.0};
    for (int i = 0; i < 4; ++i) {
        rows.push_back({2.0, Scheme::FixedRelays, i, values[i], 10.0 * values[i]});
    }
    rows.push_back({2.0, Scheme::Reference, 0, 3.0, 1.0});
    const auto agg = aggregate(rows);
    ASSERT_EQ(agg.size(), 2u);
    EXPECT_EQ(agg[0].drops, 4);
    EXPECT_DOUBLE_EQ(agg[0].mean_bps, 3.0);
    // sd = sqrt(10 / 3); t(0.975, 3) = 3.182446305284263 (standard tables).
    EXPECT_NEAR(agg[0].mean_ci95, 3.182446305284263 * std::sqrt(10.0 / 3.0) / 2.0, 1e-9);
    EXPECT_NEAR(agg[0].qos_ci95, 10 * agg[0].mean_ci95, 1e-9);
    EXPECT_TRUE(std::isnan(agg[1].mean_ci95));
    EXPECT_NEAR(student_t_975(19), 2.093024054408263, 1e-12);
}

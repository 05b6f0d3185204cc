#include "skyrelay/netsim.hpp"

#include <gsl/gsl_cdf.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "skyrelay/parallel.hpp"
#include "skyrelay/placement.hpp"
#include "skyrelay/seed.hpp"

namespace skyrelay::netsim {

namespace {

double unit_exponential(std::uint64_t bits)
{
    const double u = static_cast<double>(bits >> 11) * 0x1.0p-53;  // [0, 1)
    return -std::log1p(-u);
}

ChannelState access_state(const Node& n) { return link_state(access_link_kind(n.kind)); }

RelayKind relay_kind_of(NodeKind kind) { return kind == NodeKind::SuavRn ? RelayKind::SuavRn : RelayKind::GroundRn; }

std::vector<Node> base_stations(std::span<const Point> sites, const RadioConfig& radio)
{
    std::vector<Node> nodes;
    nodes.reserve(sites.size());
    for (std::size_t j = 0; j < sites.size(); ++j) {
        nodes.push_back({sites[j], NodeKind::Bs, static_cast<int>(j), radio.tx_power_bs_w, j});
    }
    return nodes;
}

void add_relays(std::vector<Node>& nodes, int donor, std::span<const Point> positions, NodeKind kind,
                int bs_count, int relays_per_bs, const RadioConfig& radio)
{
    for (std::size_t i = 0; i < positions.size(); ++i) {
        const auto key = static_cast<std::uint64_t>(bs_count) +
                         static_cast<std::uint64_t>(donor) * static_cast<std::uint64_t>(relays_per_bs) + i;
        nodes.push_back({positions[i], kind, donor, radio.tx_power_rn_w, key});
    }
}

std::vector<double> mean_and_ci(std::span<const double> values)
{
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    if (values.size() < 2) {
        return {mean, std::numeric_limits<double>::quiet_NaN()};
    }
    double ss = 0.0;
    for (double v : values) {
        ss += (v - mean) * (v - mean);
    }
    const double sd = std::sqrt(ss / (n - 1.0));
    return {mean, student_t_975(static_cast<int>(values.size()) - 1) * sd / std::sqrt(n)};
}

}  // namespace

LinkKind access_link_kind(NodeKind kind)
{
    switch (kind) {
    case NodeKind::Bs: return LinkKind::BsToUe;
    case NodeKind::GroundRn: return LinkKind::GroundRnToUe;
    case NodeKind::SuavRn: return LinkKind::SuavRnToUe;
    }
    return LinkKind::BsToUe;
}

double link_gain(double distance_sq_m2, ChannelState state, const RadioConfig& radio)
{
    const double d2 = std::max(distance_sq_m2, kNearFieldClampM * kNearFieldClampM);
    const double alpha = exponent(state, radio);
    if (alpha == 4.0) {
        return radio.pathloss_k / (d2 * d2);
    }
    if (alpha == 2.0) {
        return radio.pathloss_k / d2;
    }
    return radio.pathloss_k * std::pow(d2, -0.5 * alpha);
}

double mean_received_power(Point ue, const Node& node, const RadioConfig& radio)
{
    return node.tx_power_w * link_gain(distance_sq(ue, node.pos), access_state(node), radio);
}

int strongest_bs(Point ue, std::span<const Node> nodes, int bs_count, const RadioConfig& radio)
{
    int best = 0;
    double best_p = -1.0;
    for (int j = 0; j < bs_count; ++j) {
        const double p = mean_received_power(ue, nodes[j], radio);
        if (p > best_p) {
            best_p = p;
            best = j;
        }
    }
    return best;
}

std::vector<int> associate(std::span<const PlacedUser> ues, std::span<const Node> nodes, int bs_count,
                           const RadioConfig& radio)
{
    if (bs_count < 1 || nodes.size() < static_cast<std::size_t>(bs_count)) {
        throw std::invalid_argument("associate: at least one BS required");
    }
    std::vector<int> serving(ues.size());
    for (std::size_t u = 0; u < ues.size(); ++u) {
        const Point p = ues[u].pos;
        const int cell = strongest_bs(p, nodes, bs_count, radio);
        int best = cell;
        double best_p = mean_received_power(p, nodes[cell], radio);
        for (std::size_t n = bs_count; n < nodes.size(); ++n) {
            if (nodes[n].donor != cell) {
                continue;
            }
            const double pw = mean_received_power(p, nodes[n], radio);
            if (pw > best_p) {
                best_p = pw;
                best = static_cast<int>(n);
            }
        }
        serving[u] = best;
    }
    return serving;
}

std::vector<double> schedule(std::size_t attached)
{
    if (attached == 0) {
        return {};
    }
    return std::vector<double>(attached, 1.0 / static_cast<double>(attached));
}

std::vector<int> node_loads(std::span<const int> association, std::size_t node_count)
{
    std::vector<int> loads(node_count, 0);
    for (int n : association) {
        ++loads.at(n);
    }
    return loads;
}

ResourceShares compute_shares(const NetworkRealization& net)
{
    const auto loads = node_loads(net.serving, net.nodes.size());
    std::vector<int> pool(net.bs_count, 0);
    for (int s : net.serving) {
        ++pool[net.nodes[s].donor];
    }
    ResourceShares shares;
    shares.access.resize(net.serving.size());
    shares.donor.resize(net.serving.size());
    for (std::size_t u = 0; u < net.serving.size(); ++u) {
        const int s = net.serving[u];
        shares.access[u] = 1.0 / loads[s];
        shares.donor[u] = 1.0 / pool[net.nodes[s].donor];
    }
    return shares;
}

double spectral_efficiency(double sinr, const RadioConfig& radio)
{
    if (!(sinr > 0.0)) {
        return 0.0;
    }
    return std::min(std::log2(1.0 + sinr), radio.spectral_efficiency_cap);
}

double throughput_direct(double share, double sinr, const RadioConfig& radio)
{
    return share * radio.bandwidth_hz * spectral_efficiency(sinr, radio) * radio.rate_calibration;
}

double throughput_relayed(double backhaul_bps, double access_bps)
{
    if (backhaul_bps <= 0.0 || access_bps <= 0.0) {
        return 0.0;
    }
    return backhaul_bps * access_bps / (backhaul_bps + access_bps);
}

double FadingDraw::ue_link(std::uint64_t ue, std::uint64_t node_key) const
{
    if (!enabled) {
        return 1.0;
    }
    return unit_exponential(mix64(derive_seed(seed, "fading.ue", ue) + node_key));
}

double FadingDraw::relay_link(std::uint64_t relay_key, std::uint64_t node_key) const
{
    if (!enabled) {
        return 1.0;
    }
    return unit_exponential(mix64(derive_seed(seed, "fading.backhaul", relay_key) + node_key));
}

double ue_sinr(const NetworkRealization& net, std::size_t u, const RadioConfig& radio, const FadingDraw& fading)
{
    const Point p = net.ues[u].pos;
    const auto s = static_cast<std::size_t>(net.serving[u]);
    const std::uint64_t base = fading.enabled ? derive_seed(fading.seed, "fading.ue", u) : 0;
    auto h = [&](const Node& n) { return fading.enabled ? unit_exponential(mix64(base + n.key)) : 1.0; };

    double signal = 0.0;
    double interference = radio.noise_power_w;
    for (std::size_t n = 0; n < net.nodes.size(); ++n) {
        const Node& node = net.nodes[n];
        const double d2 = distance_sq(p, node.pos);
        if (n == s) {
            signal = node.tx_power_w * h(node) * link_gain(d2, access_state(node), radio);
        } else {
            interference += node.tx_power_w * h(node) * link_gain(d2, link_state(LinkKind::Interference), radio);
        }
    }
    return interference > 0.0 ? signal / interference : kInfiniteSinr;
}

double backhaul_sinr(const NetworkRealization& net, std::size_t r, const RadioConfig& radio,
                     const FadingDraw& fading)
{
    const Node& relay = net.nodes.at(r);
    if (!is_relay(relay)) {
        throw std::invalid_argument("backhaul_sinr: node is not a relay");
    }
    const auto d = static_cast<std::size_t>(relay.donor);
    double signal = 0.0;
    double interference = radio.noise_power_w;
    for (std::size_t n = 0; n < net.nodes.size(); ++n) {
        if (n == r) {
            continue;
        }
        const Node& node = net.nodes[n];
        const double d2 = distance_sq(relay.pos, node.pos);
        const double h = fading.relay_link(relay.key, node.key);
        if (n == d) {
            const ChannelState st = link_state(backhaul_link(relay_kind_of(relay.kind)));
            signal = node.tx_power_w * h * link_gain(d2, st, radio);
        } else {
            interference += node.tx_power_w * h * link_gain(d2, link_state(LinkKind::Interference), radio);
        }
    }
    return interference > 0.0 ? signal / interference : kInfiniteSinr;
}

std::vector<double> user_throughputs(const NetworkRealization& net, const RadioConfig& radio, const FadingDraw& fading)
{
    const ResourceShares shares = compute_shares(net);
    std::vector<double> backhaul(net.nodes.size(), 0.0);
    for (std::size_t n = net.bs_count; n < net.nodes.size(); ++n) {
        backhaul[n] = backhaul_sinr(net, n, radio, fading);
    }
    std::vector<double> rates(net.ues.size(), 0.0);
    for (std::size_t u = 0; u < net.ues.size(); ++u) {
        const auto s = static_cast<std::size_t>(net.serving[u]);
        const double gamma = ue_sinr(net, u, radio, fading);
        if (!is_relay(net.nodes[s])) {
            rates[u] = throughput_direct(shares.donor[u], gamma, radio);
        } else {
            const double cb = throughput_direct(shares.donor[u], backhaul[s], radio);
            const double ca = throughput_direct(shares.access[u], gamma, radio);
            rates[u] = throughput_relayed(cb, ca);
        }
    }
    return rates;
}

std::vector<int> load_balance(std::span<const PlacedUser> ues, std::span<const Node> nodes, int bs_count,
                              std::vector<int> association, const RadioConfig& radio, double margin_db)
{
    if (association.size() != ues.size()) {
        throw std::invalid_argument("load_balance: association size mismatch");
    }
    const double margin = std::pow(10.0, -margin_db / 10.0);
    const std::size_t n_ue = ues.size();

    // Mean received power from every BS, and each UE's best.
    std::vector<double> power(n_ue * bs_count);
    std::vector<double> best(n_ue, 0.0);
    for (std::size_t u = 0; u < n_ue; ++u) {
        for (int b = 0; b < bs_count; ++b) {
            power[u * bs_count + b] = mean_received_power(ues[u].pos, nodes[b], radio);
            best[u] = std::max(best[u], power[u * bs_count + b]);
        }
    }
    auto loads = node_loads(association, bs_count);

    for (;;) {
        std::vector<int> order(bs_count);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return loads[a] > loads[b]; });

        bool moved = false;
        for (int source : order) {
            int pick_ue = -1;
            int pick_target = -1;
            double pick_gap = 0.0;
            for (std::size_t u = 0; u < n_ue; ++u) {
                if (association[u] != source) {
                    continue;
                }
                for (int t = 0; t < bs_count; ++t) {
                    if (t == source || loads[t] > loads[source] - 2) {
                        continue;
                    }
                    const double p = power[u * bs_count + t];
                    if (p < best[u] * margin) {
                        continue;
                    }
                    const double gap = best[u] / p;
                    const bool better = pick_ue < 0 || loads[t] < loads[pick_target] ||
                                        (loads[t] == loads[pick_target] && gap < pick_gap);
                    if (better) {
                        pick_ue = static_cast<int>(u);
                        pick_target = t;
                        pick_gap = gap;
                    }
                }
            }
            if (pick_ue >= 0) {
                association[pick_ue] = pick_target;
                --loads[source];
                ++loads[pick_target];
                moved = true;
                break;
            }
        }
        if (!moved) {
            return association;
        }
    }
}

DropMetrics metrics(std::vector<double> user_throughputs)
{
    if (user_throughputs.empty()) {
        throw std::invalid_argument("metrics: no users");
    }
    DropMetrics m;
    const std::size_t n = user_throughputs.size();
    m.mean_throughput = std::accumulate(user_throughputs.begin(), user_throughputs.end(), 0.0) / static_cast<double>(n);
    std::vector<double> sorted = user_throughputs;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t rank = (n + 19) / 20;  // ceil(0.05 n), 1-based
    m.qos_5th_percentile = sorted[rank - 1];
    m.user_throughputs = std::move(user_throughputs);
    return m;
}

std::vector<double> upper_bound_throughputs(const NetworkRealization& direct_net, const RadioConfig& radio)
{
    const ResourceShares shares = compute_shares(direct_net);
    std::vector<double> rates(direct_net.ues.size());
    for (std::size_t u = 0; u < rates.size(); ++u) {
        rates[u] = shares.donor[u] * radio.bandwidth_hz * radio.spectral_efficiency_cap * radio.rate_calibration;
    }
    return rates;
}

DropMetrics upper_bound(const NetworkRealization& direct_net, const RadioConfig& radio, int hotspot_cell)
{
    const auto all = upper_bound_throughputs(direct_net, radio);
    std::vector<double> hot;
    for (std::size_t u = 0; u < all.size(); ++u) {
        if (direct_net.ues[u].cell == hotspot_cell) {
            hot.push_back(all[u]);
        }
    }
    return metrics(std::move(hot));
}

DropResult run_drop(const Scenario& scenario, double asymmetry_f, Scheme scheme, int drop_index)
{
    Scenario sc = scenario;
    sc.traffic.asymmetry_f = asymmetry_f;
    sc.deployment.variant = scheme;
    sc.validate();
    if (drop_index < 0) {
        throw std::invalid_argument("run_drop: drop index must be >= 0");
    }
    const RadioConfig& radio = sc.radio;
    const auto drop = static_cast<std::uint64_t>(drop_index);

    const auto sites = hex_layout(sc.layout.rings, sc.layout.isd_m);
    const auto cells = hex_cells(sites, sc.layout.isd_m);
    const int bs_count = static_cast<int>(sites.size());

    DropResult result;
    NetworkRealization& net = result.network;
    net.bs_count = bs_count;
    net.ues = sample_users(sc.traffic, cells, derive_seed(sc.master_seed, "users", drop));
    net.nodes = base_stations(sites, radio);

    const int k = sc.deployment.relays_per_bs;
    if (scheme == Scheme::FixedRelays) {
        for (int j = 0; j < bs_count; ++j) {
            const auto ring = placement::fixed_ring_placement(cells[j], k, sc.deployment.ring_radius_fraction);
            add_relays(net.nodes, j, ring, NodeKind::GroundRn, bs_count, k, radio);
        }
    } else if (scheme == Scheme::MobileRelays) {
        const std::uint64_t placement_seed = derive_seed(sc.master_seed, "placement", drop);
        std::vector<std::vector<Point>> cell_ues(bs_count);
        for (const auto& ue : net.ues) {
            cell_ues[strongest_bs(ue.pos, net.nodes, bs_count, radio)].push_back(ue.pos);
        }
        std::vector<std::vector<Point>> relays(bs_count);
        for (int j = 0; j < bs_count; ++j) {
            if (cell_ues[j].empty()) {
                relays[j] = placement::fixed_ring_placement(cells[j], k, sc.deployment.ring_radius_fraction);
                continue;
            }
            const std::vector<double> weights(cell_ues[j].size(), 1.0);
            auto km = placement::weighted_kmeans(cell_ues[j], weights, k, derive_seed(placement_seed, "cell", j),
                                                 sc.placement.kmeans_max_iterations, sc.placement.kmeans_tolerance_m);
            for (auto& c : km.centroids) {
                c = cells[j].clip(c);
            }
            relays[j] = std::move(km.centroids);
        }
        // Interference-aware refinement, cell by cell, against the current positions elsewhere.
        for (int j = 0; j < bs_count; ++j) {
            if (cell_ues[j].empty()) {
                continue;
            }
            placement::InterferenceContext ctx{cells[j], radio.tx_power_bs_w, RelayKind::SuavRn, radio.tx_power_rn_w,
                                               {}, radio};
            for (int b = 0; b < bs_count; ++b) {
                if (b != j) {
                    ctx.others.push_back({sites[b], radio.tx_power_bs_w});
                    for (const Point& p : relays[b]) {
                        ctx.others.push_back({p, radio.tx_power_rn_w});
                    }
                }
            }
            auto refined = placement::refine_positions(ctx, cell_ues[j], relays[j], sc.placement.refine_step_m,
                                                       sc.placement.refine_max_passes);
            relays[j] = std::move(refined.positions);
        }
        for (int j = 0; j < bs_count; ++j) {
            add_relays(net.nodes, j, relays[j], NodeKind::SuavRn, bs_count, k, radio);
        }
    }

    net.serving = associate(net.ues, net.nodes, bs_count, radio);
    if (scheme == Scheme::LoadBalancing) {
        net.serving = load_balance(net.ues, net.nodes, bs_count, std::move(net.serving), radio,
                                   sc.deployment.handover_margin_db);
    }

    if (scheme == Scheme::UpperBound) {
        result.all_throughputs = upper_bound_throughputs(net, radio);
    } else {
        const FadingDraw fading{true, derive_seed(sc.master_seed, "fading", drop)};
        result.all_throughputs = user_throughputs(net, radio, fading);
    }

    std::vector<double> hot;
    for (std::size_t u = 0; u < net.ues.size(); ++u) {
        if (net.ues[u].cell == sc.traffic.hotspot_cell) {
            hot.push_back(result.all_throughputs[u]);
        }
    }
    result.metrics = metrics(std::move(hot));
    return result;
}

std::vector<DropRow> sweep(const Scenario& scenario, std::span<const double> asymmetries,
                           std::span<const Scheme> schemes, int drops, unsigned workers)
{
    if (drops < 1) {
        throw std::invalid_argument("sweep: drops must be >= 1");
    }
    const std::size_t per_f = schemes.size() * static_cast<std::size_t>(drops);
    std::vector<DropRow> rows(asymmetries.size() * per_f);
    parallel_for(rows.size(), workers, [&](std::uint64_t i) {
        const std::size_t fi = i / per_f;
        const std::size_t si = (i % per_f) / drops;
        const int d = static_cast<int>(i % drops);
        const DropResult r = run_drop(scenario, asymmetries[fi], schemes[si], d);
        rows[i] = {asymmetries[fi], schemes[si], d, r.metrics.mean_throughput, r.metrics.qos_5th_percentile};
    });
    return rows;
}

std::vector<AggregateRow> aggregate(std::span<const DropRow> rows)
{
    struct Group {
        double f;
        Scheme scheme;
        std::vector<double> means, qos;
    };
    std::vector<Group> groups;
    for (const auto& row : rows) {
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const Group& g) { return g.f == row.asymmetry_f && g.scheme == row.scheme; });
        if (it == groups.end()) {
            groups.push_back({row.asymmetry_f, row.scheme, {}, {}});
            it = groups.end() - 1;
        }
        it->means.push_back(row.mean_bps);
        it->qos.push_back(row.qos_bps);
    }
    std::vector<AggregateRow> out;
    for (const auto& g : groups) {
        const auto m = mean_and_ci(g.means);
        const auto q = mean_and_ci(g.qos);
        out.push_back({g.f, g.scheme, static_cast<int>(g.means.size()), m[0], m[1], q[0], q[1]});
    }
    return out;
}

double student_t_975(int dof)
{
    if (dof < 1) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return gsl_cdf_tdist_Pinv(0.975, static_cast<double>(dof));
}

}  // namespace skyrelay::netsim

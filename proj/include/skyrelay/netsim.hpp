#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "skyrelay/geometry.hpp"
#include "skyrelay/propagation.hpp"
#include "skyrelay/scenario.hpp"

namespace skyrelay::netsim {

enum class NodeKind { Bs, GroundRn, SuavRn };

struct Node {
    Point pos;
    NodeKind kind = NodeKind::Bs;
    int donor = 0;           // BS index; a BS is its own donor
    double tx_power_w = 0.0;
    std::uint64_t key = 0;   // stable id for fading draws: BS j -> j, relay i of BS j -> N + j k + i
};

inline bool is_relay(const Node& n) { return n.kind != NodeKind::Bs; }

/// Link kind of a node's access link towards a UE.
LinkKind access_link_kind(NodeKind kind);

/// Nodes are BSs first (node j is BS j) then relays grouped by donor.
struct NetworkRealization {
    std::vector<Node> nodes;
    int bs_count = 0;
    std::vector<PlacedUser> ues;
    std::vector<int> serving;  // UE -> node index
};

/// Gain of a received signal with the near-field clamp, computed from squared distance.
double link_gain(double distance_sq_m2, ChannelState state, const RadioConfig& radio);

/// Mean received power P K d^-alpha over the node's access link.
double mean_received_power(Point ue, const Node& node, const RadioConfig& radio);

/// Strongest BS (fading excluded, NLoS). Lowest index wins ties.
int strongest_bs(Point ue, std::span<const Node> nodes, int bs_count, const RadioConfig& radio);

/**
 * Two-step association: each UE camps on its strongest BS, then attaches to
 * whichever of that BS and its relays delivers the highest mean received power
 * (link-state aware). Ties go to the lowest node index.
 */
std::vector<int> associate(std::span<const PlacedUser> ues, std::span<const Node> nodes, int bs_count,
                           const RadioConfig& radio);

/// Round robin: n attached UEs get 1/n each; nothing for an empty node.
std::vector<double> schedule(std::size_t attached);

/// Per-UE airtime fractions: `access` at the serving node, `donor` at the donor
/// BS, whose pool holds its direct UEs plus every UE relayed through its relays.
struct ResourceShares {
    std::vector<double> access;
    std::vector<double> donor;
};

ResourceShares compute_shares(const NetworkRealization& net);

/// min(log2(1 + sinr), cap).
double spectral_efficiency(double sinr, const RadioConfig& radio);

/// share * bandwidth * spectral_efficiency(sinr) * rate_calibration, bits/s.
double throughput_direct(double share, double sinr, const RadioConfig& radio);

/// Half-duplex decode-and-forward with the best time split: Cb Ca / (Cb + Ca).
double throughput_relayed(double backhaul_bps, double access_bps);

/// Deterministic per-link Rayleigh power gains (or all ones when disabled).
struct FadingDraw {
    bool enabled = false;
    std::uint64_t seed = 0;

    double ue_link(std::uint64_t ue, std::uint64_t node_key) const;
    double relay_link(std::uint64_t relay_key, std::uint64_t node_key) const;
};

/// SINR at UE `u` from its serving node; every other node interferes over NLoS.
double ue_sinr(const NetworkRealization& net, std::size_t u, const RadioConfig& radio, const FadingDraw& fading);

/// Backhaul SINR at relay node `r` from its donor; all other nodes but r interfere.
double backhaul_sinr(const NetworkRealization& net, std::size_t r, const RadioConfig& radio,
                     const FadingDraw& fading);

/// Per-UE throughput (bits/s), direct or two-hop, for every UE.
std::vector<double> user_throughputs(const NetworkRealization& net, const RadioConfig& radio, const FadingDraw& fading);

/**
 * Moves boundary UEs (another BS within margin_db of their best mean received
 * power) from heavily to lightly loaded BSs. Each step takes the most loaded
 * BS that has such a UE, sends it to its least loaded eligible neighbour
 * (loads must differ by at least 2, so the load variance strictly drops) and
 * repeats until no move is possible. BS-only networks.
 */
std::vector<int> load_balance(std::span<const PlacedUser> ues, std::span<const Node> nodes, int bs_count,
                              std::vector<int> association, const RadioConfig& radio, double margin_db = 6.0);

/// Per-BS attached-UE counts of an association.
std::vector<int> node_loads(std::span<const int> association, std::size_t node_count);

struct DropMetrics {
    std::vector<double> user_throughputs;
    double mean_throughput = 0.0;
    double qos_5th_percentile = 0.0;  // rate met or exceeded by >= 95% of users
};

/// Mean and the ascending order statistic of rank ceil(0.05 n). Throws on empty input.
DropMetrics metrics(std::vector<double> user_throughputs);

/// Interference-free bound: share * bandwidth * cap * calibration per UE, on the BS-only association.
std::vector<double> upper_bound_throughputs(const NetworkRealization& direct_net, const RadioConfig& radio);

/// upper_bound_throughputs() reduced over UEs whose home cell is `hotspot_cell`.
DropMetrics upper_bound(const NetworkRealization& direct_net, const RadioConfig& radio, int hotspot_cell);

struct DropResult {
    DropMetrics metrics;
    NetworkRealization network;
    std::vector<double> all_throughputs;  // every UE, network order
};

/**
 * One independent snapshot: users at asymmetry F, relays per scheme, two-step
 * association (plus load balancing where selected), round robin, per-drop
 * fading, and metrics over the hotspot cell's users. The result depends only on
 * (scenario, F, scheme, drop_index); user, fading and placement streams are
 * shared across schemes of the same drop.
 */
DropResult run_drop(const Scenario& scenario, double asymmetry_f, Scheme scheme, int drop_index);

struct DropRow {
    double asymmetry_f = 1.0;
    Scheme scheme = Scheme::Reference;
    int drop = 0;
    double mean_bps = 0.0;
    double qos_bps = 0.0;
};

struct AggregateRow {
    double asymmetry_f = 1.0;
    Scheme scheme = Scheme::Reference;
    int drops = 0;
    double mean_bps = 0.0;
    double mean_ci95 = 0.0;  // Student-t half-width; NaN for a single drop
    double qos_bps = 0.0;
    double qos_ci95 = 0.0;
};

/// Runs drops [0, drops) for every (F, scheme) pair. Rows come back in
/// (F, scheme, drop) order whatever the worker count.
std::vector<DropRow> sweep(const Scenario& scenario, std::span<const double> asymmetries,
                           std::span<const Scheme> schemes, int drops, unsigned workers = 1);

/// Means and 95% confidence half-widths per (F, scheme), in first-seen order.
std::vector<AggregateRow> aggregate(std::span<const DropRow> rows);

/// 97.5% Student-t quantile with `dof` degrees of freedom.
double student_t_975(int dof);

}  // namespace skyrelay::netsim

#include "skyrelay/placement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "skyrelay/seed.hpp"

namespace skyrelay::placement {

namespace {

double gain(double d2, ChannelState state, const RadioConfig& radio)
{
    d2 = std::max(d2, kNearFieldClampM * kNearFieldClampM);
    const double alpha = exponent(state, radio);
    if (alpha == 4.0) {
        return radio.pathloss_k / (d2 * d2);
    }
    if (alpha == 2.0) {
        return radio.pathloss_k / d2;
    }
    return radio.pathloss_k * std::pow(d2, -0.5 * alpha);
}

double rate(double share, double sinr, const RadioConfig& radio)
{
    if (!(sinr > 0.0)) {
        return 0.0;
    }
    return share * radio.bandwidth_hz * std::min(std::log2(1.0 + sinr), radio.spectral_efficiency_cap) *
           radio.rate_calibration;
}

double static_interference(const InterferenceContext& ctx, Point p)
{
    double sum = ctx.radio.noise_power_w;
    for (const auto& t : ctx.others) {
        sum += t.tx_power_w * gain(distance_sq(p, t.pos), ChannelState::NLoS, ctx.radio);
    }
    return sum;
}

/// Objective with the interference from `others` at each UE already summed.
double objective_with(const InterferenceContext& ctx, std::span<const Point> ues, std::span<const double> ue_static,
                      std::span<const Point> relays)
{
    const RadioConfig& radio = ctx.radio;
    const Point bs = ctx.cell.center();
    const std::size_t k = relays.size();
    const ChannelState access = link_state(access_link(ctx.relay_kind));
    const ChannelState backhaul = link_state(backhaul_link(ctx.relay_kind));

    // Per-UE serving node (0 = BS, i + 1 = relay i), mean signal and NLoS power of every in-cell node.
    std::vector<int> serving(ues.size(), 0);
    std::vector<double> signal(ues.size());
    std::vector<double> in_cell(ues.size());
    std::vector<int> load(k + 1, 0);
    for (std::size_t u = 0; u < ues.size(); ++u) {
        const double p_bs = ctx.bs_power_w * gain(distance_sq(ues[u], bs), ChannelState::NLoS, radio);
        double best = p_bs;
        double total = p_bs;
        double best_nlos = p_bs;
        for (std::size_t i = 0; i < k; ++i) {
            const double d2 = distance_sq(ues[u], relays[i]);
            const double p = ctx.relay_power_w * gain(d2, access, radio);
            const double p_nlos = ctx.relay_power_w * gain(d2, ChannelState::NLoS, radio);
            total += p_nlos;
            if (p > best) {
                best = p;
                best_nlos = p_nlos;
                serving[u] = static_cast<int>(i) + 1;
            }
        }
        signal[u] = best;
        in_cell[u] = total - best_nlos;
        ++load[serving[u]];
    }

    std::vector<double> backhaul_sinr(k);
    for (std::size_t i = 0; i < k; ++i) {
        double interference = static_interference(ctx, relays[i]);
        for (std::size_t j = 0; j < k; ++j) {
            if (j != i) {
                interference += ctx.relay_power_w * gain(distance_sq(relays[i], relays[j]), ChannelState::NLoS, radio);
            }
        }
        const double s = ctx.bs_power_w * gain(distance_sq(relays[i], bs), backhaul, radio);
        backhaul_sinr[i] = interference > 0.0 ? s / interference : kInfiniteSinr;
    }

    const double pool_share = ues.empty() ? 0.0 : 1.0 / static_cast<double>(ues.size());
    double total = 0.0;
    for (std::size_t u = 0; u < ues.size(); ++u) {
        const double interference = ue_static[u] + in_cell[u];
        const double sinr = interference > 0.0 ? signal[u] / interference : kInfiniteSinr;
        double r = 0.0;
        if (serving[u] == 0) {
            r = rate(pool_share, sinr, radio);
        } else {
            const int i = serving[u] - 1;
            const double cb = rate(pool_share, backhaul_sinr[i], radio);
            const double ca = rate(1.0 / load[serving[u]], sinr, radio);
            r = (cb > 0.0 && ca > 0.0) ? cb * ca / (cb + ca) : 0.0;
        }
        total += std::log1p(r * 1e-6);
    }
    return total;
}

std::vector<double> ue_static_interference(const InterferenceContext& ctx, std::span<const Point> ues)
{
    std::vector<double> out(ues.size());
    for (std::size_t u = 0; u < ues.size(); ++u) {
        out[u] = static_interference(ctx, ues[u]);
    }
    return out;
}

}  // namespace

std::vector<Point> fixed_ring_placement(const HexCell& cell, int k, double radius_fraction)
{
    if (k < 0) {
        throw std::invalid_argument("fixed_ring_placement: k must be >= 0");
    }
    std::vector<Point> out;
    out.reserve(k);
    const double radius = radius_fraction * cell.circumradius();
    for (int i = 0; i < k; ++i) {
        const double theta = 2.0 * std::numbers::pi * i / k;
        out.push_back(cell.clip(cell.center() + Point{radius * std::cos(theta), radius * std::sin(theta)}));
    }
    return out;
}

KMeansResult weighted_kmeans(std::span<const Point> points, std::span<const double> weights, int k,
                             std::uint64_t seed, int max_iterations, double tolerance_m)
{
    if (k < 1) {
        throw std::invalid_argument("weighted_kmeans: k must be >= 1");
    }
    if (points.empty()) {
        throw std::invalid_argument("weighted_kmeans: no points");
    }
    if (weights.size() != points.size()) {
        throw std::invalid_argument("weighted_kmeans: weights and points differ in length");
    }
    for (double w : weights) {
        if (!(std::isfinite(w) && w >= 0.0)) {
            throw std::invalid_argument("weighted_kmeans: weights must be finite and >= 0");
        }
    }
    const std::size_t n = points.size();

    KMeansResult res;
    Stream rng(seed);
    res.centroids.push_back(points[rng.index(n)]);
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    while (res.centroids.size() < static_cast<std::size_t>(k)) {
        std::size_t far = 0;
        for (std::size_t i = 0; i < n; ++i) {
            nearest[i] = std::min(nearest[i], distance_sq(points[i], res.centroids.back()));
            if (nearest[i] > nearest[far]) {
                far = i;
            }
        }
        res.centroids.push_back(points[far]);
    }

    res.labels.assign(n, 0);
    for (res.iterations = 0; res.iterations < max_iterations;) {
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_d = distance_sq(points[i], res.centroids[0]);
            for (int c = 1; c < k; ++c) {
                const double d = distance_sq(points[i], res.centroids[c]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            res.labels[i] = best;
        }
        std::vector<double> wsum(k, 0.0);
        std::vector<Point> acc(k);
        for (std::size_t i = 0; i < n; ++i) {
            const int c = res.labels[i];
            wsum[c] += weights[i];
            acc[c] = acc[c] + weights[i] * points[i];
        }
        double shift = 0.0;
        for (int c = 0; c < k; ++c) {
            if (wsum[c] > 0.0) {
                const Point next = (1.0 / wsum[c]) * acc[c];
                shift = std::max(shift, distance(next, res.centroids[c]));
                res.centroids[c] = next;
            }
        }
        ++res.iterations;
        if (shift < tolerance_m) {
            break;
        }
    }
    return res;
}

double placement_objective(const InterferenceContext& ctx, std::span<const Point> ues, std::span<const Point> relays)
{
    const auto ue_static = ue_static_interference(ctx, ues);
    return objective_with(ctx, ues, ue_static, relays);
}

PlacementResult refine_positions(const InterferenceContext& ctx, std::span<const Point> ues, std::vector<Point> start,
                                 double step_m, int max_passes)
{
    if (!(step_m > 0.0)) {
        throw std::invalid_argument("refine_positions: step must be > 0");
    }
    const auto ue_static = ue_static_interference(ctx, ues);
    PlacementResult res;
    res.positions = std::move(start);
    res.initial_objective = objective_with(ctx, ues, ue_static, res.positions);
    res.objective = res.initial_objective;

    for (res.passes = 0; res.passes < max_passes;) {
        ++res.passes;
        bool moved = false;
        for (std::size_t i = 0; i < res.positions.size(); ++i) {
            const Point origin = res.positions[i];
            Point best_pos = origin;
            double best_val = res.objective;
            for (int dx = -1; dx <= 1; ++dx) {
                for (int dy = -1; dy <= 1; ++dy) {
                    if (dx == 0 && dy == 0) {
                        continue;
                    }
                    const Point cand = ctx.cell.clip(origin + Point{dx * step_m, dy * step_m});
                    if (cand == origin) {
                        continue;
                    }
                    res.positions[i] = cand;
                    const double val = objective_with(ctx, ues, ue_static, res.positions);
                    if (val > best_val) {
                        best_val = val;
                        best_pos = cand;
                    }
                }
            }
            res.positions[i] = best_pos;
            if (best_val > res.objective) {
                res.objective = best_val;
                moved = true;
            }
        }
        if (!moved) {
            break;
        }
    }
    return res;
}

PlacementResult hotspot_placement(std::span<const Point> ues, int k, const InterferenceContext& ctx,
                                  std::uint64_t seed, const PlacementConfig& config)
{
    std::vector<Point> start;
    if (ues.empty()) {
        start = fixed_ring_placement(ctx.cell, k);
    } else {
        const std::vector<double> weights(ues.size(), 1.0);
        auto km = weighted_kmeans(ues, weights, k, seed, config.kmeans_max_iterations, config.kmeans_tolerance_m);
        for (auto& c : km.centroids) {
            c = ctx.cell.clip(c);
        }
        start = std::move(km.centroids);
    }
    return refine_positions(ctx, ues, std::move(start), config.refine_step_m, config.refine_max_passes);
}

}  // namespace skyrelay::placement

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "skyrelay/geometry.hpp"
#include "skyrelay/propagation.hpp"
#include "skyrelay/scenario.hpp"

namespace skyrelay::placement {

/// k points on a circle of radius fraction * R around the BS at angles 2 pi i / k, clipped to the cell.
std::vector<Point> fixed_ring_placement(const HexCell& cell, int k, double radius_fraction = 2.0 / 3.0);

struct KMeansResult {
    std::vector<Point> centroids;
    std::vector<int> labels;
    int iterations = 0;
};

/// Weighted Lloyd iterations after farthest-point seeding. The first seed is
/// drawn from `seed`; later seeds are the points farthest from the chosen
/// ones (lowest index on ties). Empty clusters keep their previous centroid.
KMeansResult weighted_kmeans(std::span<const Point> points, std::span<const double> weights, int k,
                             std::uint64_t seed, int max_iterations = 100, double tolerance_m = 0.1);

/// A transmitter whose position is fixed while one cell is being optimized.
struct Transmitter {
    Point pos;
    double tx_power_w = 0.0;
};

/// Everything the refinement objective needs about one donor cell.
struct InterferenceContext {
    HexCell cell;
    double bs_power_w = 0.0;
    RelayKind relay_kind = RelayKind::SuavRn;
    double relay_power_w = 0.0;
    std::vector<Transmitter> others;  // other BSs and relays of other cells
    RadioConfig radio;
};

/**
 * Sum over the cell's UEs of log(1 + estimated end-to-end rate in Mbit/s),
 * with every fading gain at its mean. UEs pick the strongest of the BS and the
 * candidate relays; shares, SINRs and the two-hop rate follow the netsim
 * model. Every non-serving transmitter interferes over an NLoS link.
 */
double placement_objective(const InterferenceContext& ctx, std::span<const Point> ues, std::span<const Point> relays);

struct PlacementResult {
    std::vector<Point> positions;
    double objective = 0.0;
    double initial_objective = 0.0;  // after k-means, before refinement
    int passes = 0;
};

/**
 * Greedy interference-aware refinement: every relay in turn tries the eight
 * neighbours of a 3x3 grid with spacing step_m (clipped to the cell) and keeps
 * the best strictly improving move. Stops after a pass without moves.
 */
PlacementResult refine_positions(const InterferenceContext& ctx, std::span<const Point> ues, std::vector<Point> start,
                                 double step_m = 25.0, int max_passes = 200);

/// Weighted k-means on the UEs followed by refine_positions().
PlacementResult hotspot_placement(std::span<const Point> ues, int k, const InterferenceContext& ctx,
                                  std::uint64_t seed, const PlacementConfig& config = {});

}  // namespace skyrelay::placement

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "skyrelay/propagation.hpp"

namespace skyrelay {
class Stream;
}

namespace skyrelay::montecarlo {

/// Largest allowed ratio sd(compensated tail interference) / E[serving power].
inline constexpr double kTailBoundLimit = 1e-3;

/// Samples are processed in fixed blocks so reductions never depend on the worker count.
inline constexpr std::uint64_t kBlockSize = 4096;

/**
 * Stochastic-geometry sampler for the serving-relay SIR, in the same
 * normalized units as the analytic module.
 *
 * Generative model: serving link at distance r with Exp(1) fading and exponent
 * 2 (SUAV) or 4 (ground); interferers form a PPP of density lambda on the
 * annulus (r, window_radius], each with Exp(1) fading and exponent 4. The
 * interference expected from beyond the window, pi lambda / W^2, is added as
 * a constant, leaving only its fluctuation (sd sqrt(2 pi lambda / 3) / W^3)
 * unmodelled; validate() requires that to be at most kTailBoundLimit times
 * the mean serving power r^-alpha.
 */
struct McConfig {
    RelayKind kind = RelayKind::GroundRn;
    double lambda = 1.0;
    double r = 1.0;
    std::uint64_t samples = 100000;
    double window_radius = 0.0;  // 0 selects default_window_radius()
    std::uint64_t seed = 1;

    void validate() const;
    double effective_window() const;
};

double serving_exponent(RelayKind kind);

/// Smallest window meeting the tail bound (with 5% slack), and at least 2r.
double default_window_radius(RelayKind kind, double lambda, double r);

/// sd(tail interference) / E[serving power] for a given window.
double tail_fluctuation_bound(RelayKind kind, double lambda, double r, double window_radius);

/// One SIR draw at serving distance r; kInfiniteSinr when nothing interferes.
double sample_sir_at(RelayKind kind, double lambda, double r, double window_radius, Stream& rng);

/// Draw `index` of the configuration; depends on (cfg, index) only.
double sample_sir(const McConfig& cfg, std::uint64_t index);

/// Fraction of draws strictly above each threshold. Thresholds must be ascending.
std::vector<double> empirical_ccdf(const McConfig& cfg, std::span<const double> thresholds, unsigned workers = 1);

struct Deviation {
    double max_abs = 0.0;
    double mean_abs = 0.0;
};

/// Pointwise deviation between two curves on the same thresholds.
Deviation compare(std::span<const double> empirical, std::span<const double> analytic);

struct MeanEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t samples = 0;
};

/// Sample mean of log2(1 + SIR). Requires lambda > 0.
MeanEstimate mean_log2_capacity(const McConfig& cfg, unsigned workers = 1);

/// Sample mean of 1{SIR > xi} where the serving distance is itself drawn from
/// the nearest-neighbour law of a PPP with density lambda.
MeanEstimate nearest_point_ccdf(RelayKind kind, double lambda, double xi, std::uint64_t samples, std::uint64_t seed,
                                unsigned workers = 1);

}  // namespace skyrelay::montecarlo

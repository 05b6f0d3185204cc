#pragma once

#include <variant>

#include "skyrelay/propagation.hpp"

namespace skyrelay::analytic {

/**
 * One evaluation point of the closed-form SIR CCDF. `lambda` and `r` are in
 * normalized units: the closed forms mix d^-2 and d^-4 and only hold in one
 * fixed distance unit. Netsim distances must be divided by that unit
 * (1 km by default) before being used here.
 */
struct SirQuery {
    RelayKind kind = RelayKind::GroundRn;
    double lambda = 1.0;  // interfering-relay density
    double r = 1.0;       // serving-link distance
    double xi = 1.0;      // linear SIR threshold

    void validate() const;
};

double db_to_linear(double db);
double linear_to_db(double linear);

/**
 * P(SIR > xi) at distance r from the serving relay:
 *   SUAV relay   exp(-lambda pi r sqrt(xi) atan(sqrt(xi) / r))
 *   ground relay exp(-lambda pi r^2 sqrt(xi) atan(sqrt(xi)))
 * Both assume Rayleigh fading on every link, NLoS (alpha = 4) interferers
 * forming a PPP outside the serving distance, and a serving exponent of 2
 * (SUAV, LoS) or 4 (ground, NLoS). At r = 1 the two branches coincide.
 */
double ccdf_sir(const SirQuery& q);

/// 1 - ccdf_sir(q), with q.xi the minimum usable SIR.
double outage(const SirQuery& q);

struct QuadratureOptions {
    double abs_tolerance = 1e-6;
    /// Returned (flagged) when there is no interference and the integral diverges.
    double spectral_efficiency_cap = 4.8;
};

struct CapacityResult {
    double bits_per_hz = 0.0;
    double abs_error = 0.0;  // quadrature error estimate
    bool capped = false;     // lambda == 0: value is the cap, not an integral
};

/// E[log2(1 + SIR)] = integral over t >= 0 of P(SIR > 2^t - 1).
CapacityResult ergodic_capacity(RelayKind kind, double lambda, double r, const QuadratureOptions& opts = {});

/// Serving distance to the nearest point of a PPP: f(r) = 2 pi lambda r exp(-lambda pi r^2).
struct NearestPoint {
    double lambda = 1.0;
};
/// Serving distance uniform over the area of a disk: f(r) = 2 r / R^2 on [0, R].
struct UniformDisk {
    double radius = 1.0;
};
struct FixedDistance {
    double r = 1.0;
};
using DistanceLaw = std::variant<NearestPoint, UniformDisk, FixedDistance>;

void validate(const DistanceLaw& law);

/// Density of the law at r (FixedDistance has none; returns 0).
double density(const DistanceLaw& law, double r);

enum class Metric { Ccdf, Outage, Capacity };

struct MetricSpec {
    Metric metric = Metric::Ccdf;
    double xi = 1.0;  // ignored for Capacity
};

struct AveragedResult {
    double value = 0.0;
    double abs_error = 0.0;
};

/// Integral of metric(r) f(r) dr over the law; FixedDistance is the pointwise metric.
AveragedResult mean_over_distance(const MetricSpec& metric, RelayKind kind, double lambda, const DistanceLaw& law,
                                  const QuadratureOptions& opts = {});

}  // namespace skyrelay::analytic

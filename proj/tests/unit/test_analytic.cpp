#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "skyrelay/analytic.hpp"
#include "skyrelay/montecarlo.hpp"
#include "skyrelay/seed.hpp"

using namespace skyrelay;
using namespace skyrelay::analytic;

namespace {

constexpr double kPi = std::numbers::pi;

double ground(double l, double r, double xi) { return ccdf_sir({RelayKind::GroundRn, l, r, xi}); }
double suav(double l, double r, double xi) { return ccdf_sir({RelayKind::SuavRn, l, r, xi}); }

/// Composite Simpson on [0, T] after t = u / (1 - u): an oracle independent of GSL.
double simpson_capacity(RelayKind kind, double lambda, double r)
{
    const int n = 200000;
    const double h = 1.0 / n;
    auto f = [&](double u) {
        const double t = u < 1.0 ? u / (1.0 - u) : 1e9;
        if (t > 1000.0) {
            return 0.0;  // 2^t - 1 overflows; the ccdf is zero long before
        }
        return ccdf_sir({kind, lambda, r, std::exp2(t) - 1.0}) / ((1.0 - u) * (1.0 - u));
    };
    double s = f(0.0) + f(1.0);
    for (int i = 1; i < n; ++i) {
        s += f(i * h) * (i % 2 ? 4.0 : 2.0);
    }
    return s * h / 3.0;
}

}  // namespace

// The printed four/five-digit decimals are rounded loosely (the exact values
// are 0.0848050, 0.1756775 and 0.5396415), hence the 5e-5 slack on them.
TEST(CcdfSir, HandEvaluatedValues)
{
    EXPECT_NEAR(ground(1, 1, 1), std::exp(-kPi * kPi / 4.0), 1e-15);
    EXPECT_NEAR(ground(1, 1, 1), 0.08481, 5e-5);
    EXPECT_NEAR(suav(1, 0.5, 1), std::exp(-kPi * 0.5 * std::atan(2.0)), 1e-15);
    EXPECT_NEAR(suav(1, 0.5, 1), 0.17572, 5e-5);
    EXPECT_NEAR(ground(1, 0.5, 1), std::exp(-kPi * 0.25 * kPi / 4.0), 1e-15);
    EXPECT_NEAR(ground(1, 0.5, 1), 0.53966, 5e-5);
}

TEST(CcdfSir, TrivialCases)
{
    for (auto kind : {RelayKind::SuavRn, RelayKind::GroundRn}) {
        EXPECT_EQ(ccdf_sir({kind, 1.7, 0.8, 0.0}), 1.0);
        EXPECT_EQ(ccdf_sir({kind, 0.0, 0.8, 5.0}), 1.0);
        EXPECT_EQ(outage({kind, 1.7, 0.8, 0.0}), 0.0);
        EXPECT_EQ(outage({kind, 0.0, 0.8, 3.0}), 0.0);
    }
    EXPECT_NEAR(outage({RelayKind::GroundRn, 1, 1, 1}), 1.0 - std::exp(-kPi * kPi / 4.0), 1e-15);
    EXPECT_NEAR(outage({RelayKind::GroundRn, 1, 1, 1}), 0.91519, 5e-5);
}

TEST(CcdfSir, InvalidQueries)
{
    EXPECT_THROW(ccdf_sir({RelayKind::GroundRn, -1, 1, 1}), std::invalid_argument);
    EXPECT_THROW(ccdf_sir({RelayKind::GroundRn, 1, 0, 1}), std::invalid_argument);
    EXPECT_THROW(ccdf_sir({RelayKind::GroundRn, 1, 1, -0.5}), std::invalid_argument);
    EXPECT_THROW(ccdf_sir({RelayKind::SuavRn, 1, 1, std::nan("")}), std::invalid_argument);
}

TEST(CcdfSir, CrossoverIdentityAndOrdering)
{
    Stream rng(21);
    for (int i = 0; i < 500; ++i) {
        const double l = rng.uniform(0.01, 5.0);
        const double xi = db_to_linear(rng.uniform(-20, 30));
        EXPECT_EQ(suav(l, 1.0, xi), ground(l, 1.0, xi));
        const double r_hi = rng.uniform(1.05, 3.0);
        const double r_lo = rng.uniform(0.2, 0.95);
        const double g_hi = ground(l, r_hi, xi);
        const double g_lo = ground(l, r_lo, xi);
        if (g_hi > 0.0 && g_hi < 1.0) {
            EXPECT_GT(suav(l, r_hi, xi), g_hi);
        }
        if (g_lo > 0.0 && g_lo < 1.0) {
            EXPECT_LT(suav(l, r_lo, xi), g_lo);
        }
    }
}

TEST(CcdfSir, Monotonicity)
{
    for (auto kind : {RelayKind::SuavRn, RelayKind::GroundRn}) {
        for (double r : {0.3, 1.0, 2.0}) {
            double prev = 1.0;
            for (double db = -20; db <= 20; db += 0.5) {
                const double v = ccdf_sir({kind, 1.0, r, db_to_linear(db)});
                EXPECT_LE(v, prev);
                EXPECT_GE(v, 0.0);
                prev = v;
            }
            EXPECT_GT(ccdf_sir({kind, 1.0, r, 1.0}), ccdf_sir({kind, 1.1, r, 1.0}));
        }
        double prev = 1.0;
        for (double r = 0.1; r < 3; r += 0.1) {
            const double v = ccdf_sir({kind, 0.5, r, 2.0});
            EXPECT_LE(v, prev);
            prev = v;
        }
    }
}

TEST(Db, Conversions)
{
    EXPECT_DOUBLE_EQ(db_to_linear(0), 1.0);
    EXPECT_NEAR(db_to_linear(10), 10.0, 1e-12);
    EXPECT_NEAR(db_to_linear(-10), 0.1, 1e-15);
    EXPECT_NEAR(linear_to_db(db_to_linear(7.3)), 7.3, 1e-12);
}

TEST(ErgodicCapacity, NoInterferenceIsCappedAndFlagged)
{
    const auto c = ergodic_capacity(RelayKind::GroundRn, 0.0, 1.0);
    EXPECT_TRUE(c.capped);
    EXPECT_EQ(c.bits_per_hz, 4.8);
}

TEST(ErgodicCapacity, MatchesIndependentQuadrature)
{
    for (auto kind : {RelayKind::SuavRn, RelayKind::GroundRn}) {
        for (double l : {0.5, 1.0, 2.0}) {
            for (double r : {0.5, 1.0, 2.0}) {
                const auto c = ergodic_capacity(kind, l, r);
                EXPECT_FALSE(c.capped);
                EXPECT_NEAR(c.bits_per_hz, simpson_capacity(kind, l, r), 2e-6) << l << " " << r;
                EXPECT_GE(c.bits_per_hz, 0.0);
            }
        }
    }
}

TEST(ErgodicCapacity, DecreasesWithDensity)
{
    for (auto kind : {RelayKind::SuavRn, RelayKind::GroundRn}) {
        EXPECT_LT(ergodic_capacity(kind, 2, 1).bits_per_hz, ergodic_capacity(kind, 1, 1).bits_per_hz);
    }
}

TEST(ErgodicCapacity, HalvingToleranceStaysWithinTolerance)
{
    QuadratureOptions loose, tight;
    tight.abs_tolerance = loose.abs_tolerance / 2;
    for (auto kind : {RelayKind::SuavRn, RelayKind::GroundRn}) {
        for (double r : {0.5, 1.0, 2.0}) {
            const double a = ergodic_capacity(kind, 1.0, r, loose).bits_per_hz;
            const double b = ergodic_capacity(kind, 1.0, r, tight).bits_per_hz;
            EXPECT_LT(std::abs(a - b), loose.abs_tolerance);
        }
    }
}

TEST(MeanOverDistance, FixedDistanceIsPointwise)
{
    const MetricSpec ccdf{Metric::Ccdf, 1.0};
    EXPECT_EQ(mean_over_distance(ccdf, RelayKind::GroundRn, 1.0, FixedDistance{0.5}).value, ground(1, 0.5, 1));
    const MetricSpec out{Metric::Outage, 2.0};
    EXPECT_EQ(mean_over_distance(out, RelayKind::SuavRn, 1.0, FixedDistance{2.0}).value,
              outage({RelayKind::SuavRn, 1.0, 2.0, 2.0}));
    const MetricSpec cap{Metric::Capacity, 0.0};
    EXPECT_EQ(mean_over_distance(cap, RelayKind::SuavRn, 1.0, FixedDistance{2.0}).value,
              ergodic_capacity(RelayKind::SuavRn, 1.0, 2.0).bits_per_hz);
}

TEST(MeanOverDistance, DensitiesIntegrateToOne)
{
    // Integral of f over the law with a metric identically 1 (ccdf at xi = 0).
    const MetricSpec one{Metric::Ccdf, 0.0};
    EXPECT_NEAR(mean_over_distance(one, RelayKind::GroundRn, 1.0, NearestPoint{1.3}).value, 1.0, 1e-6);
    EXPECT_NEAR(mean_over_distance(one, RelayKind::GroundRn, 1.0, UniformDisk{2.5}).value, 1.0, 1e-6);
    EXPECT_NEAR(density(NearestPoint{1.0}, 0.5), 2 * kPi * 0.5 * std::exp(-kPi * 0.25), 1e-15);
    EXPECT_NEAR(density(UniformDisk{2.0}, 1.0), 0.5, 1e-15);
    EXPECT_EQ(density(UniformDisk{2.0}, 2.5), 0.0);
    EXPECT_THROW(validate(DistanceLaw{UniformDisk{0.0}}), std::invalid_argument);
    EXPECT_THROW(validate(DistanceLaw{NearestPoint{-1.0}}), std::invalid_argument);
}

TEST(MeanOverDistance, SmallDiskTendsToOne)
{
    const MetricSpec ccdf{Metric::Ccdf, 1.0};
    for (auto kind : {RelayKind::SuavRn, RelayKind::GroundRn}) {
        EXPECT_GT(mean_over_distance(ccdf, kind, 1.0, UniformDisk{1e-6}).value, 0.9999);
    }
}

TEST(MeanOverDistance, NearestPointGroundMatchesMonteCarlo)
{
    const MetricSpec ccdf{Metric::Ccdf, 1.0};
    const double exact = mean_over_distance(ccdf, RelayKind::GroundRn, 1.0, NearestPoint{1.0}).value;
    const auto mc = montecarlo::nearest_point_ccdf(RelayKind::GroundRn, 1.0, 1.0, 1'000'000, 2024, 0);
    EXPECT_NEAR(mc.mean, exact, 2.0 * mc.std_error) << "exact " << exact << " mc " << mc.mean;
}

TEST(MeanOverDistance, NearestPointGroundClosedForm)
{
    // Ground branch with f(r) = 2 pi l r exp(-l pi r^2):
    // E[exp(-l pi r^2 c)] = 1 / (1 + c), c = sqrt(xi) atan(sqrt(xi)).
    const MetricSpec ccdf{Metric::Ccdf, 3.0};
    const double c = std::sqrt(3.0) * std::atan(std::sqrt(3.0));
    EXPECT_NEAR(mean_over_distance(ccdf, RelayKind::GroundRn, 0.7, NearestPoint{0.7}).value, 1.0 / (1.0 + c), 1e-6);
}

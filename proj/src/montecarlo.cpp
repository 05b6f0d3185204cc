#include "skyrelay/montecarlo.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "skyrelay/parallel.hpp"
#include "skyrelay/seed.hpp"

namespace skyrelay::montecarlo {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInterfererExponent = 4.0;

std::uint64_t block_count(std::uint64_t samples) { return (samples + kBlockSize - 1) / kBlockSize; }

/// Per-block partial sums of f(i), reduced in block order.
template <class PerSample>
MeanEstimate block_mean(std::uint64_t samples, unsigned workers, PerSample&& f)
{
    const std::uint64_t blocks = block_count(samples);
    std::vector<double> sum(blocks, 0.0);
    std::vector<double> sum_sq(blocks, 0.0);
    parallel_for(blocks, workers, [&](std::uint64_t b) {
        const std::uint64_t end = std::min(samples, (b + 1) * kBlockSize);
        double s = 0.0;
        double s2 = 0.0;
        for (std::uint64_t i = b * kBlockSize; i < end; ++i) {
            const double v = f(i);
            s += v;
            s2 += v * v;
        }
        sum[b] = s;
        sum_sq[b] = s2;
    });
    double total = 0.0;
    double total_sq = 0.0;
    for (std::uint64_t b = 0; b < blocks; ++b) {
        total += sum[b];
        total_sq += sum_sq[b];
    }
    const double n = static_cast<double>(samples);
    const double mean = total / n;
    const double var = samples > 1 ? std::max(0.0, (total_sq - n * mean * mean) / (n - 1.0)) : 0.0;
    return {mean, std::sqrt(var / n), samples};
}

}  // namespace

double serving_exponent(RelayKind kind) { return kind == RelayKind::SuavRn ? 2.0 : 4.0; }

double tail_fluctuation_bound(RelayKind kind, double lambda, double r, double window_radius)
{
    const double tail_sd = std::sqrt(2.0 * kPi * lambda / 3.0) / std::pow(window_radius, 3.0);
    const double signal_mean = std::pow(r, -serving_exponent(kind));
    return tail_sd / signal_mean;
}

double default_window_radius(RelayKind kind, double lambda, double r)
{
    const double needed =
        std::cbrt(std::sqrt(2.0 * kPi * lambda / 3.0) * std::pow(r, serving_exponent(kind)) / kTailBoundLimit);
    return std::max(1.05 * needed, 2.0 * r);
}

void McConfig::validate() const
{
    if (!(std::isfinite(lambda) && lambda >= 0.0)) {
        throw std::invalid_argument("McConfig.lambda must be finite and >= 0");
    }
    if (!(std::isfinite(r) && r > 0.0)) {
        throw std::invalid_argument("McConfig.r must be finite and > 0");
    }
    if (samples < 1) {
        throw std::invalid_argument("McConfig.samples must be >= 1");
    }
    const double w = effective_window();
    if (!(std::isfinite(w) && w > r)) {
        throw std::invalid_argument("McConfig.window_radius must exceed r");
    }
    if (tail_fluctuation_bound(kind, lambda, r, w) > kTailBoundLimit) {
        throw std::invalid_argument("McConfig.window_radius too small: tail interference bound exceeds 1e-3");
    }
}

double McConfig::effective_window() const
{
    return window_radius > 0.0 ? window_radius : default_window_radius(kind, lambda, r);
}

double sample_sir_at(RelayKind kind, double lambda, double r, double window_radius, Stream& rng)
{
    const double signal = rng.exponential() * std::pow(r, -serving_exponent(kind));
    if (lambda == 0.0) {
        return kInfiniteSinr;
    }
    const double r2 = r * r;
    const double w2 = window_radius * window_radius;
    const std::uint64_t n = rng.poisson(lambda * kPi * (w2 - r2));
    double interference = lambda * kPi / w2;  // mean of the field beyond the window
    for (std::uint64_t i = 0; i < n; ++i) {
        const double d2 = r2 + rng.uniform() * (w2 - r2);
        interference += rng.exponential() / (d2 * d2);
    }
    static_assert(kInterfererExponent == 4.0, "d^-4 is evaluated as 1 / (d^2)^2");
    return signal / interference;
}

double sample_sir(const McConfig& cfg, std::uint64_t index)
{
    Stream rng(derive_seed(cfg.seed, "mc.sample", index));
    return sample_sir_at(cfg.kind, cfg.lambda, cfg.r, cfg.effective_window(), rng);
}

std::vector<double> empirical_ccdf(const McConfig& cfg, std::span<const double> thresholds, unsigned workers)
{
    cfg.validate();
    for (std::size_t i = 1; i < thresholds.size(); ++i) {
        if (thresholds[i] < thresholds[i - 1]) {
            throw std::invalid_argument("empirical_ccdf: thresholds must be ascending");
        }
    }
    const std::size_t m = thresholds.size();
    const std::uint64_t blocks = block_count(cfg.samples);
    std::vector<std::vector<std::uint64_t>> counts(blocks, std::vector<std::uint64_t>(m, 0));
    const double window = cfg.effective_window();

    parallel_for(blocks, workers, [&](std::uint64_t b) {
        auto& local = counts[b];
        const std::uint64_t end = std::min(cfg.samples, (b + 1) * kBlockSize);
        for (std::uint64_t i = b * kBlockSize; i < end; ++i) {
            Stream rng(derive_seed(cfg.seed, "mc.sample", i));
            const double sir = sample_sir_at(cfg.kind, cfg.lambda, cfg.r, window, rng);
            // Ascending thresholds: every threshold below the draw counts.
            for (std::size_t k = 0; k < m && sir > thresholds[k]; ++k) {
                ++local[k];
            }
        }
    });

    std::vector<double> ccdf(m, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
        std::uint64_t total = 0;
        for (const auto& local : counts) {
            total += local[k];
        }
        ccdf[k] = static_cast<double>(total) / static_cast<double>(cfg.samples);
    }
    return ccdf;
}

Deviation compare(std::span<const double> empirical, std::span<const double> analytic)
{
    if (empirical.size() != analytic.size()) {
        throw std::invalid_argument("compare: curves differ in length");
    }
    Deviation d;
    if (empirical.empty()) {
        return d;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < empirical.size(); ++i) {
        const double dev = std::abs(empirical[i] - analytic[i]);
        d.max_abs = std::max(d.max_abs, dev);
        sum += dev;
    }
    d.mean_abs = sum / static_cast<double>(empirical.size());
    return d;
}

MeanEstimate mean_log2_capacity(const McConfig& cfg, unsigned workers)
{
    cfg.validate();
    if (cfg.lambda == 0.0) {
        throw std::invalid_argument("mean_log2_capacity: lambda = 0 gives an infinite SIR");
    }
    const double window = cfg.effective_window();
    return block_mean(cfg.samples, workers, [&](std::uint64_t i) {
        Stream rng(derive_seed(cfg.seed, "mc.sample", i));
        return std::log2(1.0 + sample_sir_at(cfg.kind, cfg.lambda, cfg.r, window, rng));
    });
}

MeanEstimate nearest_point_ccdf(RelayKind kind, double lambda, double xi, std::uint64_t samples, std::uint64_t seed,
                                unsigned workers)
{
    if (!(lambda > 0.0) || samples < 1) {
        throw std::invalid_argument("nearest_point_ccdf: lambda > 0 and samples >= 1 required");
    }
    return block_mean(samples, workers, [&](std::uint64_t i) {
        Stream rng(derive_seed(seed, "mc.nearest", i));
        // Nearest-neighbour distance: lambda pi r^2 ~ Exp(1).
        const double r = std::sqrt(rng.exponential() / (lambda * kPi));
        if (r == 0.0) {
            return 1.0;
        }
        const double sir = sample_sir_at(kind, lambda, r, default_window_radius(kind, lambda, r), rng);
        return sir > xi ? 1.0 : 0.0;
    });
}

}  // namespace skyrelay::montecarlo

#include "skyrelay/analytic.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>

namespace skyrelay::analytic {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kWorkspaceIntervals = 2000;

struct WorkspaceDeleter {
    void operator()(gsl_integration_workspace* w) const { gsl_integration_workspace_free(w); }
};
using Workspace = std::unique_ptr<gsl_integration_workspace, WorkspaceDeleter>;

Workspace make_workspace()
{
    static const bool handler_off = [] {
        gsl_set_error_handler_off();
        return true;
    }();
    (void)handler_off;
    Workspace w(gsl_integration_workspace_alloc(kWorkspaceIntervals));
    if (!w) {
        throw std::bad_alloc();
    }
    return w;
}

template <class F>
double trampoline(double x, void* params)
{
    return (*static_cast<F*>(params))(x);
}

struct Integral {
    double value;
    double abs_error;
};

void check_status(int status, const Integral& out, double tol, const char* what)
{
    // Roundoff-limited runs that still meet the tolerance are accepted.
    if (status != GSL_SUCCESS && !(out.abs_error <= tol)) {
        throw std::runtime_error(std::string(what) + ": quadrature failed (" + gsl_strerror(status) + ")");
    }
}

/// Adaptive QAGIU on [a, inf) with an absolute tolerance only.
template <class F>
Integral integrate_to_infinity(F&& f, double a, double tol)
{
    auto ws = make_workspace();
    using Fn = std::remove_reference_t<F>;
    gsl_function g{&trampoline<Fn>, &f};
    Integral out{};
    const int status = gsl_integration_qagiu(&g, a, tol, 0.0, kWorkspaceIntervals, ws.get(), &out.value, &out.abs_error);
    check_status(status, out, tol, "integrate_to_infinity");
    return out;
}

/// Adaptive QAGS on [a, b] with an absolute tolerance only.
template <class F>
Integral integrate(F&& f, double a, double b, double tol)
{
    auto ws = make_workspace();
    using Fn = std::remove_reference_t<F>;
    gsl_function g{&trampoline<Fn>, &f};
    Integral out{};
    const int status = gsl_integration_qags(&g, a, b, tol, 0.0, kWorkspaceIntervals, ws.get(), &out.value, &out.abs_error);
    check_status(status, out, tol, "integrate");
    return out;
}

double metric_at(const MetricSpec& m, RelayKind kind, double lambda, double r, const QuadratureOptions& opts)
{
    switch (m.metric) {
    case Metric::Ccdf: return ccdf_sir({kind, lambda, r, m.xi});
    case Metric::Outage: return outage({kind, lambda, r, m.xi});
    case Metric::Capacity: return ergodic_capacity(kind, lambda, r, opts).bits_per_hz;
    }
    return 0.0;
}

}  // namespace

void SirQuery::validate() const
{
    if (!(std::isfinite(lambda) && lambda >= 0.0)) {
        throw std::invalid_argument("SirQuery.lambda must be finite and >= 0");
    }
    if (!(std::isfinite(r) && r > 0.0)) {
        throw std::invalid_argument("SirQuery.r must be finite and > 0");
    }
    if (!(std::isfinite(xi) && xi >= 0.0)) {
        throw std::invalid_argument("SirQuery.xi must be finite and >= 0");
    }
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

double ccdf_sir(const SirQuery& q)
{
    q.validate();
    const double root_xi = std::sqrt(q.xi);
    double exponent = 0.0;
    if (q.kind == RelayKind::SuavRn) {
        exponent = q.lambda * kPi * q.r * root_xi * std::atan(root_xi / q.r);
    } else {
        exponent = q.lambda * kPi * (q.r * q.r) * root_xi * std::atan(root_xi);
    }
    return std::exp(-exponent);
}

double outage(const SirQuery& q) { return 1.0 - ccdf_sir(q); }

CapacityResult ergodic_capacity(RelayKind kind, double lambda, double r, const QuadratureOptions& opts)
{
    SirQuery probe{kind, lambda, r, 0.0};
    probe.validate();
    if (lambda == 0.0) {
        return {opts.spectral_efficiency_cap, 0.0, true};
    }
    auto integrand = [&](double t) {
        const double xi = std::expm1(t * std::numbers::ln2);
        if (!std::isfinite(xi)) {
            return 0.0;
        }
        return ccdf_sir({kind, lambda, r, xi});
    };
    const Integral out = integrate_to_infinity(integrand, 0.0, opts.abs_tolerance);
    return {out.value, out.abs_error, false};
}

void validate(const DistanceLaw& law)
{
    const bool ok = std::visit(
        [](const auto& l) {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, NearestPoint>) {
                return std::isfinite(l.lambda) && l.lambda > 0.0;
            } else if constexpr (std::is_same_v<T, UniformDisk>) {
                return std::isfinite(l.radius) && l.radius > 0.0;
            } else {
                return std::isfinite(l.r) && l.r > 0.0;
            }
        },
        law);
    if (!ok) {
        throw std::invalid_argument("DistanceLaw parameter must be finite and > 0");
    }
}

double density(const DistanceLaw& law, double r)
{
    if (r < 0.0) {
        return 0.0;
    }
    if (const auto* np = std::get_if<NearestPoint>(&law)) {
        return 2.0 * kPi * np->lambda * r * std::exp(-np->lambda * kPi * r * r);
    }
    if (const auto* ud = std::get_if<UniformDisk>(&law)) {
        return r <= ud->radius ? 2.0 * r / (ud->radius * ud->radius) : 0.0;
    }
    return 0.0;
}

AveragedResult mean_over_distance(const MetricSpec& metric, RelayKind kind, double lambda, const DistanceLaw& law,
                                  const QuadratureOptions& opts)
{
    validate(law);
    if (const auto* fixed = std::get_if<FixedDistance>(&law)) {
        return {metric_at(metric, kind, lambda, fixed->r, opts), 0.0};
    }

    // The inner capacity integral runs tighter so its error does not swamp the outer one.
    QuadratureOptions inner = opts;
    inner.abs_tolerance = opts.abs_tolerance / 10.0;
    auto integrand = [&](double r) {
        if (r <= 0.0) {
            return 0.0;
        }
        const double f = density(law, r);
        if (f == 0.0) {
            return 0.0;
        }
        return metric_at(metric, kind, lambda, r, inner) * f;
    };

    Integral out{};
    if (std::holds_alternative<NearestPoint>(law)) {
        out = integrate_to_infinity(integrand, 0.0, opts.abs_tolerance);
    } else {
        out = integrate(integrand, 0.0, std::get<UniformDisk>(law).radius, opts.abs_tolerance);
    }
    return {out.value, out.abs_error};
}

}  // namespace skyrelay::analytic

#include "skyrelay/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "skyrelay/seed.hpp"

namespace skyrelay {

std::string_view to_string(RelayKind kind) { return kind == RelayKind::SuavRn ? "suav" : "ground"; }

RelayKind parse_relay_kind(std::string_view name)
{
    if (name == "suav" || name == "SuavRn") {
        return RelayKind::SuavRn;
    }
    if (name == "ground" || name == "GroundRn") {
        return RelayKind::GroundRn;
    }
    throw std::invalid_argument("unknown relay kind '" + std::string(name) + "' (expected suav or ground)");
}

double exponent(ChannelState state, const RadioConfig& radio)
{
    return state == ChannelState::LoS ? radio.alpha_los : radio.alpha_nlos;
}

double pathloss(double distance_m, ChannelState state, const RadioConfig& radio)
{
    if (!(distance_m > 0.0)) {
        throw std::domain_error("pathloss: distance must be > 0");
    }
    const double d = std::max(distance_m, kNearFieldClampM);
    return radio.pathloss_k * std::pow(d, -exponent(state, radio));
}

double fading_sample(Stream& rng) { return rng.exponential(); }

double received_power(const LinkBudget& link, const RadioConfig& radio)
{
    return link.tx_power_w * link.fading * pathloss(link.distance_m, link.state, radio);
}

double sinr(const LinkBudget& signal, std::span<const LinkBudget> interferers, double noise_power_w,
            const RadioConfig& radio)
{
    const double s = received_power(signal, radio);
    double denom = noise_power_w;
    for (const auto& i : interferers) {
        denom += received_power(i, radio);
    }
    if (denom <= 0.0) {
        return kInfiniteSinr;
    }
    return s / denom;
}

}  // namespace skyrelay

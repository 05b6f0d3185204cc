#pragma once

#include <limits>
#include <span>
#include <string_view>

#include "skyrelay/scenario.hpp"

namespace skyrelay {

class Stream;

enum class ChannelState { LoS, NLoS };

enum class LinkKind { BsToUe, BsToGroundRn, GroundRnToUe, BsToSuavRn, SuavRnToUe, Interference };

/// Ground relays sit at street level; SUAV relays hover above the clutter.
enum class RelayKind { SuavRn, GroundRn };

std::string_view to_string(RelayKind kind);
RelayKind parse_relay_kind(std::string_view name);

/// Distances below this are evaluated at this distance.
inline constexpr double kNearFieldClampM = 1.0;

/// Returned by sinr() when there is neither interference nor noise.
inline constexpr double kInfiniteSinr = std::numeric_limits<double>::infinity();

/// Path exponent for a link state.
double exponent(ChannelState state, const RadioConfig& radio);

/// Linear gain K d^-alpha. Throws std::domain_error for d <= 0; d < 1 m is clamped.
double pathloss(double distance_m, ChannelState state, const RadioConfig& radio);

/**
 * Fixed LoS/NLoS assignment per link kind:
 *   BS->UE NLoS, BS->ground RN LoS, ground RN->UE NLoS,
 *   BS->SUAV RN LoS, SUAV RN->UE LoS, any interference link NLoS.
 */
constexpr ChannelState link_state(LinkKind kind)
{
    switch (kind) {
    case LinkKind::BsToGroundRn:
    case LinkKind::BsToSuavRn:
    case LinkKind::SuavRnToUe:
        return ChannelState::LoS;
    case LinkKind::BsToUe:
    case LinkKind::GroundRnToUe:
    case LinkKind::Interference:
        return ChannelState::NLoS;
    }
    return ChannelState::NLoS;
}

constexpr LinkKind backhaul_link(RelayKind kind)
{
    return kind == RelayKind::SuavRn ? LinkKind::BsToSuavRn : LinkKind::BsToGroundRn;
}

constexpr LinkKind access_link(RelayKind kind)
{
    return kind == RelayKind::SuavRn ? LinkKind::SuavRnToUe : LinkKind::GroundRnToUe;
}

/// Rayleigh fading power gain, Exp(1).
double fading_sample(Stream& rng);

struct LinkBudget {
    double tx_power_w = 1.0;
    double distance_m = 1.0;
    ChannelState state = ChannelState::NLoS;
    double fading = 1.0;
};

double received_power(const LinkBudget& link, const RadioConfig& radio);

/// (P_s h_s L(d_s)) / (sum_i P_i h_i L(d_i) + noise). kInfiniteSinr when the
/// denominator is zero.
double sinr(const LinkBudget& signal, std::span<const LinkBudget> interferers, double noise_power_w,
            const RadioConfig& radio);

}  // namespace skyrelay

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace skyrelay {

/// Malformed scenario document (not valid JSON, or a value of the wrong type).
class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A well-formed value that violates a constraint. `field()` is the dotted path.
class ValidationError : public std::invalid_argument {
  public:
    ValidationError(std::string field, const std::string& constraint)
        : std::invalid_argument(field + ": " + constraint), field_(std::move(field))
    {
    }
    const std::string& field() const noexcept { return field_; }

  private:
    std::string field_;
};

struct LayoutConfig {
    int rings = 2;
    double isd_m = 500.0;

    bool operator==(const LayoutConfig&) const = default;
};

/// Pathloss constant and exponents of K d^-alpha plus transmit/receiver constants.
struct RadioConfig {
    double pathloss_k = 1e-4;  // linear, distances in meters
    double alpha_los = 2.0;
    double alpha_nlos = 4.0;
    double tx_power_bs_w = 40.0;
    double tx_power_rn_w = 5.0;
    double noise_power_w = 0.0;
    double bandwidth_hz = 10e6;
    double spectral_efficiency_cap = 4.8;  // bits/s/Hz
    // One-time multiplier on every user rate so the reference layout lands on
    // the throughput scale of a 3G macro deployment.
    double rate_calibration = 1.77;

    bool operator==(const RadioConfig&) const = default;
};

struct TrafficField {
    int total_users = 380;
    double asymmetry_f = 1.0;
    int hotspot_cell = 0;
    double hotspot_spread_m = 50.0;
    int hotspot_centers_per_cell = 2;

    bool operator==(const TrafficField&) const = default;
};

enum class Scheme { Reference, LoadBalancing, FixedRelays, MobileRelays, UpperBound };

std::string_view to_string(Scheme scheme);
/// Accepts the canonical names and lower-case short forms (reference, lb, fixed, mobile, upper).
Scheme parse_scheme(std::string_view name);

inline bool uses_relays(Scheme s) { return s == Scheme::FixedRelays || s == Scheme::MobileRelays; }

struct DeploymentScheme {
    Scheme variant = Scheme::Reference;
    int relays_per_bs = 6;
    double ring_radius_fraction = 2.0 / 3.0;
    double handover_margin_db = 6.0;

    bool operator==(const DeploymentScheme&) const = default;
};

struct PlacementConfig {
    int kmeans_max_iterations = 100;
    double kmeans_tolerance_m = 0.1;
    double refine_step_m = 25.0;
    int refine_max_passes = 200;

    bool operator==(const PlacementConfig&) const = default;
};

struct Scenario {
    static constexpr int kSchemaVersion = 1;

    LayoutConfig layout;
    RadioConfig radio;
    TrafficField traffic;
    DeploymentScheme deployment;
    PlacementConfig placement;
    int drops = 20;
    std::uint64_t master_seed = 0;

    bool operator==(const Scenario&) const = default;

    int cell_count() const { return 1 + 3 * layout.rings * (layout.rings + 1); }

    /// Throws ValidationError naming the first offending field.
    void validate() const;
};

void validate(const RadioConfig& radio);
void validate(const TrafficField& field, int cell_count);

/// Parses a JSON scenario document. Missing keys take their defaults, unknown
/// keys are rejected, and the result is validated.
Scenario load_scenario(std::string_view text);
Scenario load_scenario_file(const std::string& path);

/// Canonical JSON text with every field spelled out.
std::string serialize(const Scenario& scenario);

/// Hex content hash of the canonical serialization.
std::string scenario_digest(const Scenario& scenario);

/// Applies SKYRELAY_MASTER_SEED if set. Returns true when an override happened.
bool apply_env_overrides(Scenario& scenario);

}  // namespace skyrelay

#include "skyrelay/scenario.hpp"

#include <cerrno>
#include <climits>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "skyrelay/seed.hpp"

namespace skyrelay {

using nlohmann::json;

namespace {

/// Reads one JSON object, tracking which keys were consumed.
class ObjectReader {
  public:
    ObjectReader(const json& node, std::string path) : node_(node), path_(std::move(path))
    {
        if (!node_.is_object()) {
            throw ParseError(where("") + "expected an object");
        }
    }

    void number(const char* key, double& out)
    {
        if (const json* v = take(key)) {
            if (!v->is_number()) {
                throw ParseError(where(key) + "expected a number");
            }
            out = v->get<double>();
        }
    }

    void integer(const char* key, int& out)
    {
        if (const json* v = take(key)) {
            if (!v->is_number_integer()) {
                throw ParseError(where(key) + "expected an integer");
            }
            const auto wide = v->get<std::int64_t>();
            if (wide < INT32_MIN || wide > INT32_MAX) {
                throw ValidationError(field(key), "out of 32-bit range");
            }
            out = static_cast<int>(wide);
        }
    }

    void unsigned64(const char* key, std::uint64_t& out)
    {
        if (const json* v = take(key)) {
            if (!v->is_number_unsigned()) {
                throw ParseError(where(key) + "expected a non-negative integer");
            }
            out = v->get<std::uint64_t>();
        }
    }

    void text(const char* key, std::string& out)
    {
        if (const json* v = take(key)) {
            if (!v->is_string()) {
                throw ParseError(where(key) + "expected a string");
            }
            out = v->get<std::string>();
        }
    }

    const json* object(const char* key) { return take(key); }

    std::string field(std::string_view key) const
    {
        return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
    }

    /// Rejects keys never asked for.
    void finish() const
    {
        for (const auto& [key, value] : node_.items()) {
            if (!seen_.count(key)) {
                throw ValidationError(field(key), "unknown key");
            }
        }
    }

  private:
    const json* take(const char* key)
    {
        seen_.insert(key);
        auto it = node_.find(key);
        return it == node_.end() ? nullptr : &*it;
    }

    std::string where(std::string_view key) const { return field(key) + ": "; }

    const json& node_;
    std::string path_;
    std::set<std::string> seen_;
};

void require(bool ok, const std::string& field, const char* constraint)
{
    if (!ok) {
        throw ValidationError(field, constraint);
    }
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

std::string_view to_string(Scheme scheme)
{
    switch (scheme) {
    case Scheme::Reference: return "Reference";
    case Scheme::LoadBalancing: return "LoadBalancing";
    case Scheme::FixedRelays: return "FixedRelays";
    case Scheme::MobileRelays: return "MobileRelays";
    case Scheme::UpperBound: return "UpperBound";
    }
    return "?";
}

Scheme parse_scheme(std::string_view name)
{
    struct Alias {
        std::string_view a, b;
        Scheme s;
    };
    static constexpr Alias kAliases[] = {
        {"Reference", "reference", Scheme::Reference},
        {"LoadBalancing", "lb", Scheme::LoadBalancing},
        {"FixedRelays", "fixed", Scheme::FixedRelays},
        {"MobileRelays", "mobile", Scheme::MobileRelays},
        {"UpperBound", "upper", Scheme::UpperBound},
    };
    for (const auto& alias : kAliases) {
        if (name == alias.a || name == alias.b) {
            return alias.s;
        }
    }
    throw ValidationError("deployment.scheme", "unknown scheme '" + std::string(name) + "'");
}

void validate(const RadioConfig& radio)
{
    require(finite_positive(radio.pathloss_k), "radio.K", "must be > 0");
    require(finite_positive(radio.alpha_los), "radio.alpha_los", "must be > 0");
    require(finite_positive(radio.alpha_nlos), "radio.alpha_nlos", "must be > 0");
    require(radio.alpha_los < radio.alpha_nlos, "radio.alpha_los", "must be < alpha_nlos");
    require(std::isfinite(radio.tx_power_bs_w) && radio.tx_power_bs_w >= 0.0, "radio.tx_power_bs_w", "must be >= 0");
    require(std::isfinite(radio.tx_power_rn_w) && radio.tx_power_rn_w >= 0.0, "radio.tx_power_rn_w", "must be >= 0");
    require(std::isfinite(radio.noise_power_w) && radio.noise_power_w >= 0.0, "radio.noise_power_w", "must be >= 0");
    require(finite_positive(radio.bandwidth_hz), "radio.bandwidth_hz", "must be > 0");
    require(finite_positive(radio.spectral_efficiency_cap), "radio.spectral_efficiency_cap", "must be > 0");
    require(finite_positive(radio.rate_calibration), "radio.rate_calibration", "must be > 0");
}

void validate(const TrafficField& field, int cell_count)
{
    require(field.total_users > 0, "traffic.total_users", "must be > 0");
    require(field.total_users >= cell_count, "traffic.total_users", "must be >= number of cells");
    require(std::isfinite(field.asymmetry_f) && field.asymmetry_f >= 1.0, "traffic.asymmetry_f", "must be >= 1");
    require(field.asymmetry_f <= cell_count, "traffic.asymmetry_f", "must be <= number of cells");
    require(field.hotspot_cell >= 0 && field.hotspot_cell < cell_count, "traffic.hotspot_cell",
            "must index an existing cell");
    require(std::isfinite(field.hotspot_spread_m) && field.hotspot_spread_m >= 0.0, "traffic.hotspot_spread_m",
            "must be >= 0");
    require(field.hotspot_centers_per_cell >= 1, "traffic.hotspot_centers_per_cell", "must be >= 1");
}

void Scenario::validate() const
{
    require(layout.rings >= 0, "layout.rings", "must be >= 0");
    require(finite_positive(layout.isd_m), "layout.isd_m", "must be > 0");
    require(drops >= 1, "drops", "must be >= 1");
    skyrelay::validate(radio);
    skyrelay::validate(traffic, cell_count());
    if (deployment.variant == Scheme::FixedRelays || deployment.variant == Scheme::MobileRelays) {
        require(deployment.relays_per_bs >= 1, "deployment.relays_per_bs", "must be >= 1 for relay schemes");
    } else {
        require(deployment.relays_per_bs >= 0, "deployment.relays_per_bs", "must be >= 0");
    }
    require(deployment.ring_radius_fraction > 0.0 && deployment.ring_radius_fraction <= 1.0,
            "deployment.ring_radius_fraction", "must be in (0, 1]");
    require(std::isfinite(deployment.handover_margin_db) && deployment.handover_margin_db >= 0.0,
            "deployment.handover_margin_db", "must be >= 0");
    require(placement.kmeans_max_iterations >= 1, "placement.kmeans_max_iterations", "must be >= 1");
    require(finite_positive(placement.kmeans_tolerance_m), "placement.kmeans_tolerance_m", "must be > 0");
    require(finite_positive(placement.refine_step_m), "placement.refine_step_m", "must be > 0");
    require(placement.refine_max_passes >= 0, "placement.refine_max_passes", "must be >= 0");
}

Scenario load_scenario(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed scenario document: ") + e.what());
    }

    Scenario s;
    ObjectReader top(doc, "");
    int version = Scenario::kSchemaVersion;
    top.integer("version", version);
    require(version == Scenario::kSchemaVersion, "version", "unsupported schema version");
    top.unsigned64("master_seed", s.master_seed);
    top.integer("drops", s.drops);

    if (const json* node = top.object("layout")) {
        ObjectReader r(*node, "layout");
        r.integer("rings", s.layout.rings);
        r.number("isd_m", s.layout.isd_m);
        r.finish();
    }
    if (const json* node = top.object("radio")) {
        ObjectReader r(*node, "radio");
        r.number("K", s.radio.pathloss_k);
        r.number("alpha_los", s.radio.alpha_los);
        r.number("alpha_nlos", s.radio.alpha_nlos);
        r.number("tx_power_bs_w", s.radio.tx_power_bs_w);
        r.number("tx_power_rn_w", s.radio.tx_power_rn_w);
        r.number("noise_power_w", s.radio.noise_power_w);
        r.number("bandwidth_hz", s.radio.bandwidth_hz);
        r.number("spectral_efficiency_cap", s.radio.spectral_efficiency_cap);
        r.number("rate_calibration", s.radio.rate_calibration);
        r.finish();
    }
    if (const json* node = top.object("traffic")) {
        ObjectReader r(*node, "traffic");
        r.integer("total_users", s.traffic.total_users);
        r.number("asymmetry_f", s.traffic.asymmetry_f);
        r.integer("hotspot_cell", s.traffic.hotspot_cell);
        r.number("hotspot_spread_m", s.traffic.hotspot_spread_m);
        r.integer("hotspot_centers_per_cell", s.traffic.hotspot_centers_per_cell);
        r.finish();
    }
    if (const json* node = top.object("deployment")) {
        ObjectReader r(*node, "deployment");
        std::string scheme(to_string(s.deployment.variant));
        r.text("scheme", scheme);
        s.deployment.variant = parse_scheme(scheme);
        r.integer("relays_per_bs", s.deployment.relays_per_bs);
        r.number("ring_radius_fraction", s.deployment.ring_radius_fraction);
        r.number("handover_margin_db", s.deployment.handover_margin_db);
        r.finish();
    }
    if (const json* node = top.object("placement")) {
        ObjectReader r(*node, "placement");
        r.integer("kmeans_max_iterations", s.placement.kmeans_max_iterations);
        r.number("kmeans_tolerance_m", s.placement.kmeans_tolerance_m);
        r.number("refine_step_m", s.placement.refine_step_m);
        r.integer("refine_max_passes", s.placement.refine_max_passes);
        r.finish();
    }
    top.finish();

    s.validate();
    return s;
}

Scenario load_scenario_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open scenario file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_scenario(buf.str());
}

std::string serialize(const Scenario& s)
{
    json doc = {
        {"version", Scenario::kSchemaVersion},
        {"master_seed", s.master_seed},
        {"drops", s.drops},
        {"layout", {{"rings", s.layout.rings}, {"isd_m", s.layout.isd_m}}},
        {"radio",
         {{"K", s.radio.pathloss_k},
          {"alpha_los", s.radio.alpha_los},
          {"alpha_nlos", s.radio.alpha_nlos},
          {"tx_power_bs_w", s.radio.tx_power_bs_w},
          {"tx_power_rn_w", s.radio.tx_power_rn_w},
          {"noise_power_w", s.radio.noise_power_w},
          {"bandwidth_hz", s.radio.bandwidth_hz},
          {"spectral_efficiency_cap", s.radio.spectral_efficiency_cap},
          {"rate_calibration", s.radio.rate_calibration}}},
        {"traffic",
         {{"total_users", s.traffic.total_users},
          {"asymmetry_f", s.traffic.asymmetry_f},
          {"hotspot_cell", s.traffic.hotspot_cell},
          {"hotspot_spread_m", s.traffic.hotspot_spread_m},
          {"hotspot_centers_per_cell", s.traffic.hotspot_centers_per_cell}}},
        {"deployment",
         {{"scheme", std::string(to_string(s.deployment.variant))},
          {"relays_per_bs", s.deployment.relays_per_bs},
          {"ring_radius_fraction", s.deployment.ring_radius_fraction},
          {"handover_margin_db", s.deployment.handover_margin_db}}},
        {"placement",
         {{"kmeans_max_iterations", s.placement.kmeans_max_iterations},
          {"kmeans_tolerance_m", s.placement.kmeans_tolerance_m},
          {"refine_step_m", s.placement.refine_step_m},
          {"refine_max_passes", s.placement.refine_max_passes}}},
    };
    return doc.dump(2);
}

std::string scenario_digest(const Scenario& scenario)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(serialize(scenario))));
    return buf;
}

bool apply_env_overrides(Scenario& scenario)
{
    const char* raw = std::getenv("SKYRELAY_MASTER_SEED");
    if (raw == nullptr || *raw == '\0') {
        return false;
    }
    char* end = nullptr;
    errno = 0;
    const unsigned long long value = std::strtoull(raw, &end, 10);
    if (errno != 0 || end == raw || *end != '\0' || *raw == '-') {
        throw ValidationError("SKYRELAY_MASTER_SEED", "must be an unsigned 64-bit integer");
    }
    scenario.master_seed = value;
    return true;
}

}  // namespace skyrelay

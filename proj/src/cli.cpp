#include "skyrelay/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "skyrelay/analytic.hpp"
#include "skyrelay/montecarlo.hpp"
#include "skyrelay/netsim.hpp"
#include "skyrelay/scenario.hpp"
#include "skyrelay/seed.hpp"

namespace skyrelay::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Failure to read or write an output file.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string hex_digest(const std::string& text)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(text)));
    return buf;
}

std::vector<double> default_xi_grid()
{
    std::vector<double> grid;
    for (int db = -10; db <= 30; db += 5) {
        grid.push_back(db);
    }
    return grid;
}

std::vector<double> parse_grid(const std::vector<std::string>& raw)
{
    if (raw.empty()) {
        return default_xi_grid();
    }
    std::vector<double> grid;
    for (const auto& s : raw) {
        try {
            grid.push_back(parse_db(s));
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    return grid;
}

std::string join_numbers(const std::vector<double>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += (i ? ";" : "") + format_number(v[i]);
    }
    return s;
}

/// Writes to the named file, or to `fallback` when the name is empty or "-".
class Sink {
  public:
    Sink(const std::string& path, std::ostream& fallback) : path_(path)
    {
        if (path.empty() || path == "-") {
            stream_ = &fallback;
            return;
        }
        file_.open(path, std::ios::binary);
        if (!file_) {
            throw IoError("cannot open " + path + " for writing");
        }
        stream_ = &file_;
    }
    std::ostream& operator*() { return *stream_; }
    void finish()
    {
        stream_->flush();
        if (!*stream_) {
            throw IoError("write failed: " + (path_.empty() ? std::string("stdout") : path_));
        }
    }

  private:
    std::string path_;
    std::ofstream file_;
    std::ostream* stream_ = nullptr;
};

// ---------------------------------------------------------------- analytic

struct AnalyticArgs {
    std::string kind = "both";
    double lambda = 1.0;
    double r = 1.0;
    std::vector<std::string> xi_db;
    std::string law = "fixed";
    double disk_radius = 1.0;
    std::string metric = "ccdf";
    std::string output;
};

int cmd_analytic(const AnalyticArgs& a, std::ostream& out, std::ostream& err)
{
    const auto grid = parse_grid(a.xi_db);
    std::vector<RelayKind> kinds;
    if (a.kind == "both") {
        kinds = {RelayKind::SuavRn, RelayKind::GroundRn};
    } else {
        kinds = {parse_relay_kind(a.kind)};
    }

    analytic::DistanceLaw law = analytic::FixedDistance{a.r};
    if (a.law == "nearest") {
        law = analytic::NearestPoint{a.lambda};
    } else if (a.law == "disk") {
        law = analytic::UniformDisk{a.disk_radius};
    }
    analytic::validate(law);
    const analytic::Metric metric = a.metric == "outage" ? analytic::Metric::Outage : analytic::Metric::Ccdf;

    std::ostringstream canon;
    canon << "analytic kind=" << a.kind << " lambda=" << format_number(a.lambda) << " r=" << format_number(a.r)
          << " law=" << a.law << " disk_radius=" << format_number(a.disk_radius) << " metric=" << a.metric
          << " xi_db=" << join_numbers(grid);

    std::ostringstream body;
    body << "# digest=" << hex_digest(canon.str()) << "\n";
    body << "xi_db";
    const std::string col = a.metric;
    if (kinds.size() == 1) {
        body << "," << col << "\n";
    } else {
        body << "," << col << "_suav," << col << "_ground\n";
    }
    for (double db : grid) {
        body << format_number(db);
        for (RelayKind kind : kinds) {
            const analytic::MetricSpec spec{metric, analytic::db_to_linear(db)};
            const auto res = analytic::mean_over_distance(spec, kind, a.lambda, law);
            body << "," << format_number(res.value);
        }
        body << "\n";
    }
    Sink sink(a.output, out);
    *sink << body.str();
    sink.finish();
    (void)err;
    return kOk;
}

// ------------------------------------------------------------- mc-validate

struct McArgs {
    std::string kind = "ground";
    double lambda = 1.0;
    double r = 1.0;
    std::uint64_t samples = 100000;
    std::uint64_t seed = 1;
    double window = 0.0;
    double bound = 0.01;
    std::vector<std::string> xi_db;
    unsigned workers = 0;
    std::string output;
};

int cmd_mc_validate(const McArgs& a, std::ostream& out, std::ostream& err)
{
    const auto grid = parse_grid(a.xi_db);
    if (!(a.bound >= 0.0)) {
        throw UsageError("--bound must be >= 0");
    }
    montecarlo::McConfig cfg;
    cfg.kind = parse_relay_kind(a.kind);
    cfg.lambda = a.lambda;
    cfg.r = a.r;
    cfg.samples = a.samples;
    cfg.window_radius = a.window;
    cfg.seed = a.seed;
    cfg.validate();

    std::vector<double> thresholds;
    for (double db : grid) {
        thresholds.push_back(analytic::db_to_linear(db));
    }
    // The sampler wants ascending thresholds; report rows in the order given.
    std::vector<std::size_t> idx(grid.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        idx[i] = i;
    }
    std::stable_sort(idx.begin(), idx.end(), [&](auto x, auto y) { return thresholds[x] < thresholds[y]; });
    std::vector<double> sorted;
    for (auto i : idx) {
        sorted.push_back(thresholds[i]);
    }
    const auto emp_sorted = montecarlo::empirical_ccdf(cfg, sorted, a.workers);
    std::vector<double> empirical(grid.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
        empirical[idx[k]] = emp_sorted[k];
    }

    std::ostringstream canon;
    canon << "mc-validate kind=" << a.kind << " lambda=" << format_number(a.lambda) << " r=" << format_number(a.r)
          << " samples=" << a.samples << " seed=" << a.seed << " window=" << format_number(cfg.effective_window())
          << " bound=" << format_number(a.bound) << " xi_db=" << join_numbers(grid);

    std::ostringstream body;
    body << "# digest=" << hex_digest(canon.str()) << "\n";
    body << "xi_db,empirical,analytic,abs_dev\n";
    double max_dev = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double exact = analytic::ccdf_sir({cfg.kind, cfg.lambda, cfg.r, thresholds[i]});
        const double dev = std::abs(empirical[i] - exact);
        max_dev = std::max(max_dev, dev);
        body << format_number(grid[i]) << "," << format_number(empirical[i]) << "," << format_number(exact) << ","
             << format_number(dev) << "\n";
    }
    Sink sink(a.output, out);
    *sink << body.str();
    sink.finish();

    const bool pass = max_dev <= a.bound;
    err << "max_abs_dev=" << format_number(max_dev) << " bound=" << format_number(a.bound) << " "
        << (pass ? "PASS" : "FAIL") << "\n";
    return pass ? kOk : kBoundFailure;
}

// ------------------------------------------------------- simulate / sweep

struct NetArgs {
    std::string scenario_path;
    std::vector<double> f_values;
    std::vector<std::string> schemes;
    int drops = 0;  // 0: the scenario's value
    std::optional<std::uint64_t> seed;
    unsigned workers = 0;
    std::string out_dir;
    std::string positions;
    int positions_drop = 0;
};

Scenario load_for(const NetArgs& a)
{
    Scenario sc = a.scenario_path.empty() ? Scenario{} : load_scenario_file(a.scenario_path);
    apply_env_overrides(sc);
    if (a.seed) {
        sc.master_seed = *a.seed;
    }
    if (a.drops != 0) {
        sc.drops = a.drops;
    }
    sc.validate();
    return sc;
}

std::string per_drop_csv(const std::string& digest, std::span<const netsim::DropRow> rows)
{
    std::ostringstream s;
    s << "# digest=" << digest << "\n";
    s << "F,scheme,drop,mean_bps,qos_bps\n";
    for (const auto& r : rows) {
        s << format_number(r.asymmetry_f) << "," << to_string(r.scheme) << "," << r.drop << ","
          << format_number(r.mean_bps) << "," << format_number(r.qos_bps) << "\n";
    }
    return s.str();
}

std::string aggregate_csv(const std::string& digest, std::span<const netsim::AggregateRow> rows)
{
    std::ostringstream s;
    s << "# digest=" << digest << "\n";
    s << "F,scheme,drops,mean_bps,mean_ci95,qos_bps,qos_ci95\n";
    for (const auto& r : rows) {
        s << format_number(r.asymmetry_f) << "," << to_string(r.scheme) << "," << r.drops << ","
          << format_number(r.mean_bps) << "," << format_number(r.mean_ci95) << "," << format_number(r.qos_bps) << ","
          << format_number(r.qos_ci95) << "\n";
    }
    return s.str();
}

std::string positions_csv(const std::string& digest, const netsim::NetworkRealization& net)
{
    std::ostringstream s;
    s << "# digest=" << digest << "\n";
    s << "node,kind,donor,x,y\n";
    for (std::size_t n = 0; n < net.nodes.size(); ++n) {
        const auto& node = net.nodes[n];
        const char* kind = node.kind == netsim::NodeKind::Bs         ? "bs"
                           : node.kind == netsim::NodeKind::GroundRn ? "ground_rn"
                                                                     : "suav_rn";
        s << n << "," << kind << "," << node.donor << "," << format_number(node.pos.x) << ","
          << format_number(node.pos.y) << "\n";
    }
    return s.str();
}

void write_file(const fs::path& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    f << text;
    f.flush();
    if (!f) {
        throw IoError("cannot write " + path.string());
    }
}

int cmd_network(const std::string& name, const NetArgs& a, std::ostream& out, std::ostream& err)
{
    const auto t0 = std::chrono::steady_clock::now();
    const Scenario sc = load_for(a);
    for (double f : a.f_values) {
        if (!(std::isfinite(f) && f >= 1.0)) {
            throw UsageError("F values must be finite and >= 1");
        }
    }
    std::vector<Scheme> schemes;
    for (const auto& s : a.schemes) {
        try {
            schemes.push_back(parse_scheme(s));
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }

    // The digest covers the scenario and the sweep axes.
    std::string canon = serialize(sc) + "\nF=" + join_numbers(a.f_values) + "\nschemes=";
    for (Scheme s : schemes) {
        canon += std::string(to_string(s)) + ";";
    }
    const std::string digest = hex_digest(canon);

    const auto rows = netsim::sweep(sc, a.f_values, schemes, sc.drops, a.workers);
    const auto agg = netsim::aggregate(rows);

    std::vector<std::string> outputs;
    if (!a.positions.empty()) {
        if (a.positions_drop < 0) {
            throw UsageError("--positions-drop must be >= 0");
        }
        const auto drop = netsim::run_drop(sc, a.f_values.front(), schemes.front(), a.positions_drop);
        write_file(a.positions, positions_csv(digest, drop.network));
        outputs.push_back(a.positions);
    }

    if (a.out_dir.empty()) {
        out << per_drop_csv(digest, rows);
        out.flush();
        if (!out) {
            throw IoError("write failed: stdout");
        }
    } else {
        const fs::path dir(a.out_dir);
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) {
            throw IoError("cannot create " + dir.string() + ": " + ec.message());
        }
        write_file(dir / "per_drop.csv", per_drop_csv(digest, rows));
        write_file(dir / "aggregate.csv", aggregate_csv(digest, agg));
        outputs.push_back((dir / "per_drop.csv").string());
        outputs.push_back((dir / "aggregate.csv").string());

        ordered_json manifest;
        manifest["digest"] = digest;
        manifest["scenario_digest"] = scenario_digest(sc);
        manifest["tool_version"] = kToolVersion;
        manifest["subcommand"] = name;
        ordered_json params;
        params["scenario"] = nlohmann::json::parse(serialize(sc));
        params["F"] = a.f_values;
        std::vector<std::string> names;
        for (Scheme s : schemes) {
            names.emplace_back(to_string(s));
        }
        params["schemes"] = names;
        params["drops"] = sc.drops;
        params["workers"] = a.workers;
        manifest["parameters"] = params;
        manifest["wall_clock_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        outputs.push_back((dir / "manifest.json").string());
        manifest["outputs"] = outputs;
        write_file(dir / "manifest.json", manifest.dump(2) + "\n");
        err << "wrote " << outputs.size() << " files to " << dir.string() << "\n";
    }
    return kOk;
}

}  // namespace

std::string format_number(double v)
{
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

double parse_db(const std::string& text)
{
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (first != last && *first == '+') {
        ++first;
    }
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last || !std::isfinite(v)) {
        throw std::invalid_argument("not a finite dB value: '" + text + "'");
    }
    return v;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"UAV and ground relay cellular toolkit"};
    app.name("skyrelay");
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    AnalyticArgs an;
    auto* analytic_cmd = app.add_subcommand("analytic", "Closed-form SIR CCDF over a dB threshold grid");
    analytic_cmd->add_option("--kind", an.kind, "suav, ground or both")
        ->check(CLI::IsMember({"suav", "ground", "both"}))
        ->capture_default_str();
    analytic_cmd->add_option("--lambda", an.lambda, "Interfering relay density (normalized)")->capture_default_str();
    analytic_cmd->add_option("--r", an.r, "Serving distance (normalized), for --law fixed")->capture_default_str();
    analytic_cmd->add_option("--xi-db", an.xi_db, "Thresholds in dB (default -10,-5,...,30)")->delimiter(',');
    analytic_cmd->add_option("--law", an.law, "Serving-distance law: fixed, nearest or disk")
        ->check(CLI::IsMember({"fixed", "nearest", "disk"}))
        ->capture_default_str();
    analytic_cmd->add_option("--disk-radius", an.disk_radius, "Radius for --law disk")->capture_default_str();
    analytic_cmd->add_option("--metric", an.metric, "ccdf or outage")
        ->check(CLI::IsMember({"ccdf", "outage"}))
        ->capture_default_str();
    analytic_cmd->add_option("-o,--output", an.output, "Output CSV (default stdout)");

    McArgs mc;
    auto* mc_cmd = app.add_subcommand("mc-validate", "Monte Carlo CCDF against the closed form");
    mc_cmd->add_option("--kind", mc.kind, "suav or ground")
        ->check(CLI::IsMember({"suav", "ground"}))
        ->capture_default_str();
    mc_cmd->add_option("--lambda", mc.lambda, "Interfering relay density (normalized)")->capture_default_str();
    mc_cmd->add_option("--r", mc.r, "Serving distance (normalized)")->capture_default_str();
    mc_cmd->add_option("--samples", mc.samples, "Monte Carlo samples")->capture_default_str();
    mc_cmd->add_option("--seed", mc.seed, "Master seed")->capture_default_str();
    mc_cmd->add_option("--window", mc.window, "Window radius; 0 picks one meeting the tail bound")
        ->capture_default_str();
    mc_cmd->add_option("--bound", mc.bound, "Largest accepted absolute deviation")->capture_default_str();
    mc_cmd->add_option("--xi-db", mc.xi_db, "Thresholds in dB (default -10,-5,...,30)")->delimiter(',');
    mc_cmd->add_option("--workers", mc.workers, "Threads; 0 uses every core")->capture_default_str();
    mc_cmd->add_option("-o,--output", mc.output, "Output CSV (default stdout)");

    NetArgs sim;
    sim.f_values = {1.0};
    sim.schemes = {"reference"};
    double sim_f = 1.0;
    std::string sim_scheme = "reference";
    std::uint64_t sim_seed = 0;
    auto* sim_cmd = app.add_subcommand("simulate", "Drops of one asymmetry factor and one scheme");
    sim_cmd->add_option("--scenario", sim.scenario_path, "Scenario JSON (default: built-in defaults)");
    sim_cmd->add_option("--f", sim_f, "Asymmetry factor F >= 1")->capture_default_str();
    sim_cmd->add_option("--scheme", sim_scheme, "reference, lb, fixed, mobile or upper")->capture_default_str();
    sim_cmd->add_option("--drops", sim.drops, "Drop count (default: scenario value)");
    auto* sim_seed_opt = sim_cmd->add_option("--seed", sim_seed, "Master seed (overrides scenario and environment)");
    sim_cmd->add_option("--workers", sim.workers, "Threads; 0 uses every core")->capture_default_str();
    sim_cmd->add_option("--out-dir", sim.out_dir, "Write per_drop.csv, aggregate.csv and manifest.json here");
    sim_cmd->add_option("--positions", sim.positions, "Also write node positions of one drop to this CSV");
    sim_cmd->add_option("--positions-drop", sim.positions_drop, "Drop index for --positions")->capture_default_str();

    NetArgs sw;
    sw.f_values = {1, 2, 3, 4, 5};
    sw.schemes = {"reference", "lb", "fixed", "mobile"};
    sw.out_dir = "sweep_out";
    std::uint64_t sw_seed = 0;
    auto* sweep_cmd = app.add_subcommand("sweep", "Drops over a list of asymmetry factors and schemes");
    sweep_cmd->add_option("--scenario", sw.scenario_path, "Scenario JSON (default: built-in defaults)");
    sweep_cmd->add_option("--f", sw.f_values, "Asymmetry factors")->delimiter(',')->capture_default_str();
    sweep_cmd->add_option("--schemes", sw.schemes, "Schemes")->delimiter(',')->capture_default_str();
    sweep_cmd->add_option("--drops", sw.drops, "Drop count (default: scenario value)");
    auto* sw_seed_opt = sweep_cmd->add_option("--seed", sw_seed, "Master seed (overrides scenario and environment)");
    sweep_cmd->add_option("--workers", sw.workers, "Threads; 0 uses every core")->capture_default_str();
    sweep_cmd->add_option("--out-dir", sw.out_dir, "Output directory")->capture_default_str();
    sweep_cmd->add_option("--positions", sw.positions, "Also write node positions of one drop to this CSV");
    sweep_cmd->add_option("--positions-drop", sw.positions_drop, "Drop index for --positions")->capture_default_str();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (analytic_cmd->parsed()) {
            try {
                return cmd_analytic(an, out, err);
            } catch (const IoError&) {
                throw;
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
        }
        if (mc_cmd->parsed()) {
            return cmd_mc_validate(mc, out, err);
        }
        if (sim_cmd->parsed()) {
            sim.f_values = {sim_f};
            sim.schemes = {sim_scheme};
            if (*sim_seed_opt) {
                sim.seed = sim_seed;
            }
            return cmd_network("simulate", sim, out, err);
        }
        if (*sw_seed_opt) {
            sw.seed = sw_seed;
        }
        if (sw.f_values.empty() || sw.schemes.empty()) {
            throw UsageError("sweep needs at least one F and one scheme");
        }
        return cmd_network("sweep", sw, out, err);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    } catch (const ValidationError& e) {
        err << "validation error: " << e.what() << "\n";
        return kValidation;
    } catch (const ParseError& e) {
        err << "scenario error: " << e.what() << "\n";
        return kValidation;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << "\n";
        return kValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kValidation;
    }
}

}  // namespace skyrelay::cli

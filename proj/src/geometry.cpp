#include "skyrelay/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "skyrelay/seed.hpp"

namespace skyrelay {

namespace {

constexpr double kSqrt3 = std::numbers::sqrt3;

// Edge normals of a pointy-top hexagon (edges face 0, 60 and 120 degrees).
constexpr std::array<Point, 3> kEdgeNormals = {{{1.0, 0.0}, {0.5, kSqrt3 / 2.0}, {-0.5, kSqrt3 / 2.0}}};

double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }

Point nearest_on_segment(Point p, Point a, Point b)
{
    const Point ab = b - a;
    const double len2 = dot(ab, ab);
    double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return a + t * ab;
}

}  // namespace

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

double distance_sq(Point a, Point b)
{
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

double Annulus::area() const { return std::numbers::pi * (r_max * r_max - r_min * r_min); }

std::vector<Point> sample_ppp(double density, const Annulus& region, std::uint64_t seed)
{
    if (!(region.r_min >= 0.0) || !(region.r_min < region.r_max) || !std::isfinite(region.r_max)) {
        throw std::invalid_argument("sample_ppp: region needs 0 <= r_min < r_max < inf");
    }
    if (!(density >= 0.0) || !std::isfinite(density)) {
        throw std::invalid_argument("sample_ppp: density must be finite and >= 0");
    }
    Stream rng(seed);
    const std::uint64_t n = rng.poisson(density * region.area());
    std::vector<Point> points;
    points.reserve(n);
    const double a2 = region.r_min * region.r_min;
    const double b2 = region.r_max * region.r_max;
    for (std::uint64_t i = 0; i < n; ++i) {
        // Radius by inverting the area CDF of the annulus.
        const double rho = std::sqrt(a2 + rng.uniform() * (b2 - a2));
        const double theta = 2.0 * std::numbers::pi * rng.uniform();
        points.push_back({region.center.x + rho * std::cos(theta), region.center.y + rho * std::sin(theta)});
    }
    return points;
}

std::vector<Point> hex_layout(int rings, double isd_m)
{
    if (rings < 0 || !(isd_m > 0.0)) {
        throw std::invalid_argument("hex_layout: rings >= 0 and isd > 0 required");
    }
    // Axial lattice coordinates; directions walk a ring counter-clockwise.
    constexpr std::array<std::array<int, 2>, 6> kDirs = {{{1, 0}, {1, -1}, {0, -1}, {-1, 0}, {-1, 1}, {0, 1}}};
    auto to_point = [isd_m](int q, int r) {
        return Point{isd_m * (q + 0.5 * r), isd_m * (kSqrt3 / 2.0) * r};
    };

    std::vector<Point> sites;
    sites.reserve(hex_site_count(rings));
    sites.push_back({0.0, 0.0});
    for (int k = 1; k <= rings; ++k) {
        int q = kDirs[4][0] * k;
        int r = kDirs[4][1] * k;
        for (int side = 0; side < 6; ++side) {
            for (int step = 0; step < k; ++step) {
                sites.push_back(to_point(q, r));
                q += kDirs[side][0];
                r += kDirs[side][1];
            }
        }
    }
    return sites;
}

HexCell::HexCell(Point center, double circumradius) : center_(center), radius_(circumradius)
{
    if (!(circumradius > 0.0)) {
        throw std::invalid_argument("HexCell: circumradius must be > 0");
    }
}

double HexCell::inradius() const { return radius_ * kSqrt3 / 2.0; }

double HexCell::area() const { return 1.5 * kSqrt3 * radius_ * radius_; }

bool HexCell::contains(Point p, double slack_m) const
{
    const Point d = p - center_;
    const double limit = inradius() + slack_m;
    for (const Point& n : kEdgeNormals) {
        if (std::abs(dot(d, n)) > limit) {
            return false;
        }
    }
    return true;
}

Point HexCell::clip(Point p) const
{
    if (contains(p, 0.0)) {
        return p;
    }
    std::array<Point, 6> vertices;
    for (int k = 0; k < 6; ++k) {
        const double angle = std::numbers::pi / 6.0 + k * std::numbers::pi / 3.0;
        vertices[k] = {center_.x + radius_ * std::cos(angle), center_.y + radius_ * std::sin(angle)};
    }
    Point best = vertices[0];
    double best_d2 = distance_sq(p, best);
    for (int k = 0; k < 6; ++k) {
        const Point q = nearest_on_segment(p, vertices[k], vertices[(k + 1) % 6]);
        const double d2 = distance_sq(p, q);
        if (d2 < best_d2) {
            best_d2 = d2;
            best = q;
        }
    }
    return best;
}

Point HexCell::sample_uniform(Stream& rng) const
{
    const double half_w = inradius();
    for (;;) {
        const Point p{center_.x + rng.uniform(-half_w, half_w), center_.y + rng.uniform(-radius_, radius_)};
        if (contains(p, 0.0)) {
            return p;
        }
    }
}

std::vector<HexCell> hex_cells(std::span<const Point> sites, double isd_m)
{
    std::vector<HexCell> cells;
    cells.reserve(sites.size());
    for (const Point& s : sites) {
        cells.emplace_back(s, isd_m / kSqrt3);
    }
    return cells;
}

int hotspot_user_count(const TrafficField& field, int cell_count)
{
    const double share = field.asymmetry_f * field.total_users / cell_count;
    return std::min(field.total_users, static_cast<int>(std::lround(share)));
}

std::vector<PlacedUser> sample_users(const TrafficField& field, std::span<const HexCell> cells, std::uint64_t seed)
{
    const int n_cells = static_cast<int>(cells.size());
    if (n_cells == 0) {
        throw std::invalid_argument("sample_users: no cells");
    }
    validate(field, n_cells);

    const int hot = field.hotspot_cell;
    const int n_hot = hotspot_user_count(field, n_cells);
    const int n_base = std::min(n_hot, static_cast<int>(std::lround(static_cast<double>(field.total_users) / n_cells)));
    const int n_surplus = n_hot - n_base;
    const HexCell& hot_cell = cells[hot];

    std::vector<PlacedUser> users;
    users.reserve(field.total_users);

    Stream base_rng(derive_seed(seed, "users.baseline", 0));
    for (int i = 0; i < n_base; ++i) {
        users.push_back({hot_cell.sample_uniform(base_rng), hot});
    }

    if (n_surplus > 0) {
        Stream center_rng(derive_seed(seed, "users.centers", 0));
        std::vector<Point> centers;
        for (int c = 0; c < field.hotspot_centers_per_cell; ++c) {
            centers.push_back(hot_cell.sample_uniform(center_rng));
        }
        Stream cluster_rng(derive_seed(seed, "users.surplus", 0));
        for (int i = 0; i < n_surplus; ++i) {
            const Point c = centers[i % centers.size()];
            Point p = c;
            if (field.hotspot_spread_m > 0.0) {
                do {
                    p = {cluster_rng.normal(c.x, field.hotspot_spread_m), cluster_rng.normal(c.y, field.hotspot_spread_m)};
                } while (!hot_cell.contains(p, 0.0));
            }
            users.push_back({p, hot});
        }
    }

    const int n_rest = field.total_users - n_hot;
    if (n_rest > 0 && n_cells > 1) {
        Stream rest_rng(derive_seed(seed, "users.rest", 0));
        for (int i = 0; i < n_rest; ++i) {
            int c = static_cast<int>(rest_rng.index(n_cells - 1));
            if (c >= hot) {
                ++c;
            }
            users.push_back({cells[c].sample_uniform(rest_rng), c});
        }
    }
    return users;
}

void write_points_csv(std::ostream& out, std::span<const PlacedUser> users)
{
    out << "x,y,cell\n";
    char buf[96];
    for (const auto& u : users) {
        std::snprintf(buf, sizeof buf, "%.6f,%.6f,%d\n", u.pos.x, u.pos.y, u.cell);
        out << buf;
    }
}

}  // namespace skyrelay

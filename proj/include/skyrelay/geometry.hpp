#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "skyrelay/scenario.hpp"

namespace skyrelay {

class Stream;

/// Planar position in meters. Altitude lives in the channel state, not here.
struct Point {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point&) const = default;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point p) { return {s * p.x, s * p.y}; }

double distance(Point a, Point b);
double distance_sq(Point a, Point b);

/// Disk (r_min = 0) or annulus centred on `center`.
struct Annulus {
    Point center;
    double r_min = 0.0;
    double r_max = 1.0;

    double area() const;
};

/// Homogeneous PPP restricted to `region`: Poisson(density * area) points,
/// independently uniform. Throws std::invalid_argument for a bad region or
/// negative density.
std::vector<Point> sample_ppp(double density, const Annulus& region, std::uint64_t seed);

/// Hexagonal lattice sites ring by ring; site 0 at the origin.
std::vector<Point> hex_layout(int rings, double isd_m);

/// Site count of a hex layout with `rings` rings.
constexpr int hex_site_count(int rings) { return 1 + 3 * rings * (rings + 1); }

/**
 * Pointy-top regular hexagon: the Voronoi cell of a site in a hexagonal
 * lattice of spacing `isd`, i.e. circumradius isd / sqrt(3). The union of the
 * cells of a finite layout is the layout outline, so these are exactly the
 * finite-layout Voronoi cells clipped to that outline.
 */
class HexCell {
  public:
    HexCell(Point center, double circumradius);

    Point center() const { return center_; }
    double circumradius() const { return radius_; }
    double inradius() const;
    double area() const;

    bool contains(Point p, double slack_m = 1e-9) const;
    /// Nearest point of the (closed) cell.
    Point clip(Point p) const;
    Point sample_uniform(Stream& rng) const;

  private:
    Point center_;
    double radius_;
};

std::vector<HexCell> hex_cells(std::span<const Point> sites, double isd_m);

struct PlacedUser {
    Point pos;
    int cell = 0;  // home cell (BS index)
};

/// Hotspot-cell population: round(F * U / N).
int hotspot_user_count(const TrafficField& field, int cell_count);

/**
 * Draws the users of one drop.
 *
 * The hotspot cell receives round(F U / N) users: its uniform baseline share
 * round(U / N) plus a surplus scattered as Gaussian clusters (sd
 * hotspot_spread_m, resampled until inside the cell) around
 * hotspot_centers_per_cell centres drawn uniformly in the cell. The remaining
 * users pick one of the other cells uniformly and a uniform position inside it.
 * F = 1 therefore gives uniform traffic everywhere. The baseline, centres and
 * surplus use separate streams, so raising F only appends cluster users.
 *
 * Output order: hotspot users first (baseline then surplus), then the rest.
 */
std::vector<PlacedUser> sample_users(const TrafficField& field, std::span<const HexCell> cells, std::uint64_t seed);

/// x,y,cell CSV with a header row.
void write_points_csv(std::ostream& out, std::span<const PlacedUser> users);

}  // namespace skyrelay

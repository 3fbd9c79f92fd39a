#pragma once

// Discrete 1+1 dimensional Minkowski spacetime: a rectangular grid of n_t time
// slices and n_x spatial sites, point-set regions, and the causal predicates
// (causal future/past, complement, hull, convexity, ordering of zones).
//
// The light cone is the unit-speed cone in index space: q lies in J+(p) iff
// q.t >= p.t and dist(p.x, q.x) <= q.t - p.t, with dist wrapping around the
// circle for periodic boundaries. This is exactly the domain of influence of
// the leapfrog stencil in field.hpp, and equals the continuum cone when dt == dx.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qftm {

enum class Boundary { periodic, reflecting };

std::string to_string(Boundary b);
Boundary boundary_from_string(const std::string& name);

struct LatticeSpec {
  int n_t = 64;
  int n_x = 64;
  double dx = 0.25;
  double dt = 0.25;
  Boundary boundary = Boundary::periodic;

  /// Throws DomainError unless n_t, n_x >= 2, dx, dt > 0 and dt <= dx.
  void validate() const;

  std::size_t size() const { return static_cast<std::size_t>(n_t) * static_cast<std::size_t>(n_x); }
  std::size_t index(int t, int x) const {
    return static_cast<std::size_t>(t) * static_cast<std::size_t>(n_x) + static_cast<std::size_t>(x);
  }
  double dvol() const { return dt * dx; }

  /// Spatial distance in sites, wrapping for periodic boundaries.
  int spatial_distance(int x1, int x2) const;

  friend bool operator==(const LatticeSpec&, const LatticeSpec&) = default;
};

struct LatticePoint {
  int t = 0;
  int x = 0;

  friend auto operator<=>(const LatticePoint&, const LatticePoint&) = default;
};

/// True iff q lies in the causal future of p (p itself included).
bool causally_precedes(const LatticeSpec& spec, LatticePoint p, LatticePoint q);

/// Finite set of lattice points. Stored as an occupancy mask over the grid, so
/// the set is always deduplicated and set operations are linear in grid size.
class Region {
 public:
  explicit Region(const LatticeSpec& spec);

  static Region from_points(const LatticeSpec& spec, std::span<const LatticePoint> points);
  /// Closed index rectangle [t0, t1] x [x0, x1]. Throws DomainError if empty or out of range.
  static Region rectangle(const LatticeSpec& spec, int t0, int t1, int x0, int x1);
  static Region time_slice(const LatticeSpec& spec, int t);
  static Region everything(const LatticeSpec& spec);

  const LatticeSpec& spec() const { return spec_; }

  void insert(LatticePoint p);
  bool contains(LatticePoint p) const;
  bool contains_index(std::size_t i) const { return mask_[i] != 0; }
  void insert_index(std::size_t i) { mask_[i] = 1; }

  std::size_t size() const;
  bool empty() const;
  /// Points ordered by (t, x).
  std::vector<LatticePoint> points() const;
  int min_t() const;
  int max_t() const;

  bool subset_of(const Region& other) const;
  bool intersects(const Region& other) const;

  Region operator|(const Region& other) const;
  Region operator&(const Region& other) const;
  Region operator-(const Region& other) const;
  /// Complement with respect to the whole lattice.
  Region operator~() const;

  friend bool operator==(const Region& a, const Region& b) { return a.spec_ == b.spec_ && a.mask_ == b.mask_; }

 private:
  void check_point(LatticePoint p) const;
  void check_same_lattice(const Region& other) const;

  LatticeSpec spec_;
  std::vector<std::uint8_t> mask_;
};

/// Compact region in which a system and a probe interact.
class CouplingZone {
 public:
  /// Throws DomainError for an empty region.
  explicit CouplingZone(Region region);
  const Region& region() const { return region_; }

 private:
  Region region_;
};

/// J+(S): every point reachable from S along a causal curve, S included.
Region causal_future(const Region& s);
/// J-(S), the time reflection of causal_future.
Region causal_past(const Region& s);
/// K^perp = M \ (J+(K) u J-(K)). Throws DomainError for empty K.
Region causal_complement(const Region& k);
/// J+(S) n J-(S); the smallest causally convex superset. Throws DomainError for empty S.
Region causal_hull(const Region& s);
bool is_causally_convex(const Region& o);

/// K1 may be ordered before K2: J-(K1) and J+(K2) do not intersect.
bool precedes(const CouplingZone& k1, const CouplingZone& k2);

/// All permutations (as index lists into `zones`) in which every earlier zone
/// precedes every later one. Empty result: the zones are not causally orderable.
std::vector<std::vector<std::size_t>> enumerate_causal_orders(std::span<const CouplingZone> zones);

/// True iff periodic wrap-around does not change the causal relation between
/// any two points drawn from the given regions, i.e. the regions are small
/// enough that cones do not meet themselves around the circle. Always true for
/// reflecting boundaries.
bool wraparound_free(std::span<const Region> regions);

}  // namespace qftm

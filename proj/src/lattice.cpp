#include "qftm/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

#include "qftm/errors.hpp"

namespace qftm {

std::string to_string(Boundary b) { return b == Boundary::periodic ? "periodic" : "reflecting"; }

Boundary boundary_from_string(const std::string& name) {
  if (name == "periodic") return Boundary::periodic;
  if (name == "reflecting") return Boundary::reflecting;
  throw DomainError("unknown boundary '" + name + "' (expected periodic or reflecting)");
}

void LatticeSpec::validate() const {
  if (n_t < 2 || n_x < 2) throw DomainError("lattice needs n_t >= 2 and n_x >= 2");
  if (!(dx > 0.0) || !(dt > 0.0)) throw DomainError("lattice spacings must be positive");
  if (dt > dx) throw DomainError("CFL bound violated: dt must not exceed dx");
}

int LatticeSpec::spatial_distance(int x1, int x2) const {
  const int d = std::abs(x1 - x2);
  return boundary == Boundary::periodic ? std::min(d, n_x - d) : d;
}

bool causally_precedes(const LatticeSpec& spec, LatticePoint p, LatticePoint q) {
  const int dt = q.t - p.t;
  return dt >= 0 && spec.spatial_distance(p.x, q.x) <= dt;
}

Region::Region(const LatticeSpec& spec) : spec_(spec), mask_(spec.size(), 0) {}

Region Region::from_points(const LatticeSpec& spec, std::span<const LatticePoint> points) {
  Region r(spec);
  for (const auto& p : points) r.insert(p);
  return r;
}

Region Region::rectangle(const LatticeSpec& spec, int t0, int t1, int x0, int x1) {
  if (t1 < t0 || x1 < x0) throw DomainError("empty rectangle: need t0 <= t1 and x0 <= x1");
  if (t0 < 0 || x0 < 0 || t1 >= spec.n_t || x1 >= spec.n_x) throw DomainError("rectangle exceeds lattice bounds");
  Region r(spec);
  for (int t = t0; t <= t1; ++t)
    for (int x = x0; x <= x1; ++x) r.mask_[spec.index(t, x)] = 1;
  return r;
}

Region Region::time_slice(const LatticeSpec& spec, int t) { return rectangle(spec, t, t, 0, spec.n_x - 1); }

Region Region::everything(const LatticeSpec& spec) {
  Region r(spec);
  std::fill(r.mask_.begin(), r.mask_.end(), 1);
  return r;
}

void Region::check_point(LatticePoint p) const {
  if (p.t < 0 || p.t >= spec_.n_t || p.x < 0 || p.x >= spec_.n_x)
    throw DomainError("lattice point (" + std::to_string(p.t) + ", " + std::to_string(p.x) + ") out of bounds");
}

void Region::check_same_lattice(const Region& other) const {
  if (!(spec_ == other.spec_)) throw DomainError("regions live on different lattices");
}

void Region::insert(LatticePoint p) {
  check_point(p);
  mask_[spec_.index(p.t, p.x)] = 1;
}

bool Region::contains(LatticePoint p) const {
  check_point(p);
  return mask_[spec_.index(p.t, p.x)] != 0;
}

std::size_t Region::size() const { return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), 1)); }

bool Region::empty() const { return std::find(mask_.begin(), mask_.end(), 1) == mask_.end(); }

std::vector<LatticePoint> Region::points() const {
  std::vector<LatticePoint> out;
  for (int t = 0; t < spec_.n_t; ++t)
    for (int x = 0; x < spec_.n_x; ++x)
      if (mask_[spec_.index(t, x)]) out.push_back({t, x});
  return out;
}

int Region::min_t() const {
  for (int t = 0; t < spec_.n_t; ++t)
    for (int x = 0; x < spec_.n_x; ++x)
      if (mask_[spec_.index(t, x)]) return t;
  throw DomainError("min_t of empty region");
}

int Region::max_t() const {
  for (int t = spec_.n_t - 1; t >= 0; --t)
    for (int x = 0; x < spec_.n_x; ++x)
      if (mask_[spec_.index(t, x)]) return t;
  throw DomainError("max_t of empty region");
}

bool Region::subset_of(const Region& other) const {
  check_same_lattice(other);
  for (std::size_t i = 0; i < mask_.size(); ++i)
    if (mask_[i] && !other.mask_[i]) return false;
  return true;
}

bool Region::intersects(const Region& other) const {
  check_same_lattice(other);
  for (std::size_t i = 0; i < mask_.size(); ++i)
    if (mask_[i] && other.mask_[i]) return true;
  return false;
}

Region Region::operator|(const Region& other) const {
  check_same_lattice(other);
  Region r(spec_);
  for (std::size_t i = 0; i < mask_.size(); ++i) r.mask_[i] = mask_[i] | other.mask_[i];
  return r;
}

Region Region::operator&(const Region& other) const {
  check_same_lattice(other);
  Region r(spec_);
  for (std::size_t i = 0; i < mask_.size(); ++i) r.mask_[i] = mask_[i] & other.mask_[i];
  return r;
}

Region Region::operator-(const Region& other) const {
  check_same_lattice(other);
  Region r(spec_);
  for (std::size_t i = 0; i < mask_.size(); ++i) r.mask_[i] = mask_[i] & !other.mask_[i];
  return r;
}

Region Region::operator~() const {
  Region r(spec_);
  for (std::size_t i = 0; i < mask_.size(); ++i) r.mask_[i] = !mask_[i];
  return r;
}

CouplingZone::CouplingZone(Region region) : region_(std::move(region)) {
  if (region_.empty()) throw DomainError("coupling zone must be nonempty");
}

namespace {

// One-step cone sweep. Each slice of the result is the unit dilation of the
// previous result slice, united with the source slice. Because the index cone
// grows by exactly one site per step, this is exact.
Region sweep(const Region& s, int direction) {
  const LatticeSpec& spec = s.spec();
  Region out(spec);
  std::vector<std::uint8_t> prev(spec.n_x, 0), cur(spec.n_x, 0);
  const int start = direction > 0 ? 0 : spec.n_t - 1;
  bool first = true;
  for (int t = start; t >= 0 && t < spec.n_t; t += direction) {
    for (int x = 0; x < spec.n_x; ++x) {
      std::uint8_t v = s.contains_index(spec.index(t, x)) ? 1 : 0;
      if (!first) {
        v |= prev[x];
        if (x > 0) v |= prev[x - 1];
        else if (spec.boundary == Boundary::periodic) v |= prev[spec.n_x - 1];
        if (x + 1 < spec.n_x) v |= prev[x + 1];
        else if (spec.boundary == Boundary::periodic) v |= prev[0];
      }
      cur[x] = v;
      if (v) out.insert_index(spec.index(t, x));
    }
    std::swap(prev, cur);
    first = false;
  }
  return out;
}

}  // namespace

Region causal_future(const Region& s) { return sweep(s, +1); }

Region causal_past(const Region& s) { return sweep(s, -1); }

Region causal_complement(const Region& k) {
  if (k.empty()) throw DomainError("causal complement of an empty region");
  return ~(causal_future(k) | causal_past(k));
}

Region causal_hull(const Region& s) {
  if (s.empty()) throw DomainError("causal hull of an empty region");
  return causal_future(s) & causal_past(s);
}

bool is_causally_convex(const Region& o) {
  // For every p, q in O, J+(p) n J-(q) is contained in O iff J+(O) n J-(O) is.
  if (o.empty()) return true;
  return causal_hull(o).subset_of(o);
}

bool precedes(const CouplingZone& k1, const CouplingZone& k2) {
  return !causal_past(k1.region()).intersects(causal_future(k2.region()));
}

std::vector<std::vector<std::size_t>> enumerate_causal_orders(std::span<const CouplingZone> zones) {
  const std::size_t n = zones.size();
  std::vector<std::vector<char>> ok(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) ok[i][j] = precedes(zones[i], zones[j]) ? 1 : 0;

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::vector<std::size_t>> orders;
  do {
    bool admissible = true;
    for (std::size_t a = 0; a < n && admissible; ++a)
      for (std::size_t b = a + 1; b < n && admissible; ++b) admissible = ok[perm[a]][perm[b]];
    if (admissible) orders.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return orders;
}

bool wraparound_free(std::span<const Region> regions) {
  if (regions.empty()) return true;
  const LatticeSpec& spec = regions.front().spec();
  if (spec.boundary != Boundary::periodic) return true;
  std::vector<LatticePoint> pts;
  for (const auto& r : regions) {
    auto p = r.points();
    pts.insert(pts.end(), p.begin(), p.end());
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const int dt = std::abs(pts[i].t - pts[j].t);
      const bool open_line = std::abs(pts[i].x - pts[j].x) <= dt;
      const bool circle = spec.spatial_distance(pts[i].x, pts[j].x) <= dt;
      if (open_line != circle) return false;
    }
  }
  return true;
}

}  // namespace qftm

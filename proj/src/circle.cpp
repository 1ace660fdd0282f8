#include "rpe/circle.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace rpe {

namespace {

double reduce(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  // fmod of a tiny negative value can round up to exactly 2π.
  if (r >= kTwoPi) r = 0.0;
  return r;
}

}  // namespace

Angle::Angle(double radians) {
  if (!std::isfinite(radians)) {
    throw std::invalid_argument("angle must be finite");
  }
  value_ = reduce(radians);
}

Angle wrap(double x) { return Angle(x); }

double dist(Angle a, Angle b) {
  double d = std::fabs(a.radians() - b.radians());
  return std::min(d, kTwoPi - d);
}

double signed_delta(Angle from, Angle to) {
  double d = to.radians() - from.radians();
  if (d > kPi) d -= kTwoPi;
  if (d <= -kPi) d += kTwoPi;
  return d;
}

Arc Arc::proper(Angle start, double length) {
  if (!(length >= 0.0)) throw std::invalid_argument("arc length must be >= 0");
  if (length >= kTwoPi) return full();
  return Arc(Kind::Proper, start, length);
}

Arc Arc::centered(Angle center, double radius) {
  if (!(radius >= 0.0)) throw std::invalid_argument("arc radius must be >= 0");
  if (radius >= kPi) return full();
  return proper(Angle(center.radians() - radius), 2.0 * radius);
}

Angle Arc::end() const { return Angle(start_.radians() + length_); }

bool arc_contains(const Arc& arc, Angle a, double tol) {
  switch (arc.kind()) {
    case Arc::Kind::Empty:
      return false;
    case Arc::Kind::Full:
      return true;
    case Arc::Kind::Proper:
      break;
  }
  double offset = reduce(a.radians() - arc.start().radians());
  return offset <= arc.length() + tol || offset >= kTwoPi - tol;
}

Arc arc_intersect(const Arc& a, const Arc& b, double tol) {
  if (a.is_empty() || b.is_empty()) return Arc::empty();
  if (a.is_full()) return b;
  if (b.is_full()) return a;

  // Work in a's frame: a covers [0, la]; b covers [o, o + lb] mod 2π.
  const double la = a.length();
  const double lb = b.length();
  const double o = reduce(b.start().radians() - a.start().radians());

  struct Piece {
    double lo, hi;
  };
  std::vector<Piece> pieces;
  pieces.reserve(2);
  if (double lo = o, hi = std::min(la, o + lb); hi - lo >= tol) {
    pieces.push_back({lo, hi});
  }
  if (o + lb > kTwoPi) {
    double hi = std::min(la, o + lb - kTwoPi);
    if (hi >= tol) pieces.push_back({0.0, hi});
  }

  if (pieces.empty()) return Arc::empty();
  if (pieces.size() == 2) {
    throw NonIntervalIntersection("arc intersection is two disjoint arcs");
  }
  const Piece& p = pieces.front();
  return Arc::proper(Angle(a.start().radians() + p.lo), p.hi - p.lo);
}

Arc smallest_arc_containing(Angle a, Angle b, double tol) {
  double d = signed_delta(a, b);
  if (std::fabs(d) >= kPi - tol) {
    throw std::domain_error("antipodal points have no unique smallest arc");
  }
  return d >= 0.0 ? Arc::proper(a, d) : Arc::proper(b, -d);
}

Arc expand(const Arc& arc, double d) {
  if (!(d >= 0.0)) throw std::invalid_argument("expansion must be >= 0");
  if (arc.kind() != Arc::Kind::Proper) return arc;
  if (arc.length() + 2.0 * d >= kTwoPi) return Arc::full();
  return Arc::proper(Angle(arc.start().radians() - d), arc.length() + 2.0 * d);
}

}  // namespace rpe

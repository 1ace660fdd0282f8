// Angles and arcs on the circle [0, 2π).
//
// Every consistency criterion reduces to operations on open circular
// intervals. Arcs are stored as (start, length) so wraparound never needs a
// special case, and membership is closed up to a caller-supplied tolerance.
#pragma once

#include <numbers>
#include <stdexcept>

namespace rpe {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Default membership/emptiness tolerance, in radians at unit scale.
inline constexpr double kAngleTolerance = 1e-12;

/// Raised when the intersection of two arcs is not a single arc.
class NonIntervalIntersection : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A point on the circle, canonically reduced to [0, 2π).
class Angle {
 public:
  constexpr Angle() = default;

  /// Reduces `radians` modulo 2π. Throws std::invalid_argument if not finite.
  explicit Angle(double radians);

  constexpr double radians() const { return value_; }

  friend constexpr bool operator==(Angle, Angle) = default;

 private:
  double value_ = 0.0;
};

/// x mod 2π in [0, 2π).
Angle wrap(double x);

/// Branch-cut independent distance min_n |a - b + 2πn|, in [0, π].
double dist(Angle a, Angle b);

/// Signed displacement from `from` to `to`, in (-π, π].
double signed_delta(Angle from, Angle to);

/// Open circular interval (start, start + length).
///
/// A Proper arc has length in [0, 2π); length zero is the degenerate arc that
/// contains only its start point (within tolerance).
class Arc {
 public:
  enum class Kind { Empty, Full, Proper };

  static Arc empty() { return Arc(Kind::Empty, Angle(), 0.0); }
  static Arc full() { return Arc(Kind::Full, Angle(), kTwoPi); }
  /// Lengths >= 2π give Full; negative lengths are rejected.
  static Arc proper(Angle start, double length);
  /// The arc of half-width `radius` centred on `center`. radius >= π is Full.
  static Arc centered(Angle center, double radius);

  Kind kind() const { return kind_; }
  bool is_empty() const { return kind_ == Kind::Empty; }
  bool is_full() const { return kind_ == Kind::Full; }

  Angle start() const { return start_; }
  Angle end() const;
  /// 0 for Empty, 2π for Full.
  double length() const { return length_; }

  friend bool operator==(const Arc&, const Arc&) = default;

 private:
  Arc(Kind kind, Angle start, double length)
      : kind_(kind), start_(start), length_(length) {}

  Kind kind_;
  Angle start_;
  double length_;
};

bool arc_contains(const Arc& arc, Angle a, double tol = kAngleTolerance);

/// Set intersection as a single arc. Pieces shorter than `tol` are dropped,
/// so an intersection that shrinks below tolerance is Empty. Throws
/// NonIntervalIntersection when two disjoint pieces remain.
Arc arc_intersect(const Arc& a, const Arc& b, double tol = kAngleTolerance);

/// The shorter arc joining a and b. Throws std::domain_error when the two
/// points are antipodal (within tolerance) and the choice is ambiguous.
Arc smallest_arc_containing(Angle a, Angle b, double tol = kAngleTolerance);

/// Grows an arc by `d` on both ends, saturating at Full.
Arc expand(const Arc& arc, double d);

}  // namespace rpe

// Quad-precision scalar support.
//
// Long products of transfer matrices (N up to 2^45) amplify rounding in the
// rotation angle by roughly N, so the simulator evaluates matrix powers in
// __float128 and rounds the final probabilities back to double.
#pragma once

#include <cmath>
#include <cstdint>

#include <quadmath.h>

#include <Eigen/Core>

namespace rpe {

using quad = __float128;

/// Overload set used by scalar-templated code: `using namespace rpe::scalar_math`.
namespace scalar_math {

using std::cos;
using std::sin;
using std::sqrt;
using std::fabs;

inline quad cos(quad x) { return cosq(x); }
inline quad sin(quad x) { return sinq(x); }
inline quad sqrt(quad x) { return sqrtq(x); }
inline quad fabs(quad x) { return fabsq(x); }

}  // namespace scalar_math

inline const quad kQuadTwoPi = 2 * M_PIq;

/// N·theta reduced to [0, 2π), accurate to well below double resolution for
/// any 64-bit N.
inline double scaled_phase(std::uint64_t n, double theta) {
  quad x = static_cast<quad>(n) * static_cast<quad>(theta);
  x = fmodq(x, kQuadTwoPi);
  if (x < 0) x += kQuadTwoPi;
  double r = static_cast<double>(x);
  if (r >= 2 * M_PI) r = 0.0;
  return r;
}

}  // namespace rpe

namespace Eigen {

template <>
struct NumTraits<rpe::quad> : GenericNumTraits<rpe::quad> {
  using Real = rpe::quad;
  using NonInteger = rpe::quad;
  using Nested = rpe::quad;
  using Literal = rpe::quad;

  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 0,
    ReadCost = 1,
    AddCost = 4,
    MulCost = 8
  };

  static inline Real epsilon() { return FLT128_EPSILON; }
  static inline Real dummy_precision() { return 1e-28Q; }
  static inline Real highest() { return FLT128_MAX; }
  static inline Real lowest() { return -FLT128_MAX; }
  static inline int digits10() { return FLT128_DIG; }
};

}  // namespace Eigen

#pragma once

#include <string>
#include <stdexcept>

namespace quasifit {

enum class Curvature { Quasiconvex, Quasiconcave };
enum class Monotonicity { Decreasing, Increasing, None };

// Requested shape of the regression function. The solver works on the
// canonical forms (quasiconvex, decreasing) and (quasiconvex, none); every
// other combination reduces to one of those by negating Y and/or X.
struct ShapeSpec {
  Curvature curvature = Curvature::Quasiconvex;
  Monotonicity monotonicity = Monotonicity::Decreasing;

  bool operator==(const ShapeSpec&) const = default;
};

// Sign flips that turn a shape into canonical form: fit on
// (flip_x ? -X : X, flip_y ? -Y : Y), then negate fitted values if flip_y.
struct CanonicalMap {
  bool flip_x = false;
  bool flip_y = false;
  Monotonicity canonical_monotonicity = Monotonicity::Decreasing;
};

inline CanonicalMap canonical_map(const ShapeSpec& shape) {
  CanonicalMap m;
  m.flip_y = (shape.curvature == Curvature::Quasiconcave);
  // Negating Y swaps the monotone direction; negating X swaps it again.
  Monotonicity mono = shape.monotonicity;
  if (m.flip_y && mono != Monotonicity::None)
    mono = (mono == Monotonicity::Increasing) ? Monotonicity::Decreasing
                                              : Monotonicity::Increasing;
  if (mono == Monotonicity::Increasing) {
    m.flip_x = true;
    mono = Monotonicity::Decreasing;
  }
  m.canonical_monotonicity = mono;  // Decreasing or None
  return m;
}

inline std::string to_string(Curvature c) {
  return c == Curvature::Quasiconvex ? "quasiconvex" : "quasiconcave";
}

inline std::string to_string(Monotonicity m) {
  switch (m) {
    case Monotonicity::Decreasing: return "decreasing";
    case Monotonicity::Increasing: return "increasing";
    default: return "none";
  }
}

inline Curvature curvature_from_string(const std::string& s) {
  if (s == "quasiconvex") return Curvature::Quasiconvex;
  if (s == "quasiconcave") return Curvature::Quasiconcave;
  throw std::invalid_argument("unknown curvature: " + s);
}

inline Monotonicity monotonicity_from_string(const std::string& s) {
  if (s == "decreasing") return Monotonicity::Decreasing;
  if (s == "increasing") return Monotonicity::Increasing;
  if (s == "none") return Monotonicity::None;
  throw std::invalid_argument("unknown monotonicity: " + s);
}

}  // namespace quasifit

#pragma once

// Equivariant spectra of invariant positive first-order operators on the
// circle, the flat 2-torus and the round 2-sphere:
//
//   circle  D = sqrt(Laplacian),          lambda_k = k,        dim 2
//   torus   D = sqrt(Laplacian),          lambda = |k|, k in Z^2
//   sphere  D = sqrt(Laplacian + 1/4),    lambda_l = l + 1/2,  dim 2l+1
//
// Characters are stored per conjugacy class. Each spectrum also knows how to
// produce, per class, the exact series sum_i chi_i(g) lambda_i^{-z} beyond the
// stored truncation, which the zeta engine needs for small-t heat traces.

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "eqres/group.hpp"
#include "eqres/quadrature.hpp"
#include "eqres/series.hpp"

namespace eqres {

enum class ModelKind { circle, torus, sphere };

inline std::string to_string(ModelKind m) {
  switch (m) {
    case ModelKind::circle: return "circle";
    case ModelKind::torus: return "torus";
    case ModelKind::sphere: return "sphere";
  }
  return "?";
}

/// Fixed-point data of one conjugacy class. k_g = -1 encodes an empty fixed set.
struct ClassFixedSet {
  int k_g = -1;
  bool cosphere_fixed_nonempty = false;
  std::optional<double> atiyah_bott;  // sum over isolated fixed points of 1/|det(1 - dg)|

  bool empty() const { return k_g < 0; }
  /// k_g used in the pole exponent d = k_g + order(A); an empty set counts as 0.
  int pole_dim() const { return std::max(k_g, 0); }
};

struct FixedSetInfo {
  int manifold_dim = 0;
  std::vector<ClassFixedSet> classes;
};

struct Level {
  double lambda;
  long dim;
  ClassFunction chi;
};

struct ZeroModes {
  long dim = 0;
  ClassFunction chi;
};

struct EquivariantSpectrum {
  ModelKind model;
  GroupPtr group;
  std::string action;
  int manifold_dim = 1;
  double operator_order = 1;
  long truncation = 0;
  std::vector<Level> levels;
  ZeroModes kernel;
  FixedSetInfo fixed;
  std::function<SpectralSeries(std::size_t cls)> class_series;

  std::size_t class_count() const { return group->class_count(); }

  /// Exact series of the twisted zeta function for a class (A = Id).
  SpectralSeries series(std::size_t cls) const {
    require(cls < class_count(), ErrorKind::invalid_parameter, "class index out of range");
    return class_series(cls);
  }

  /// The same series cut at the stored truncation, built from the stored levels only.
  SpectralSeries truncated_series(std::size_t cls) const {
    require(cls < class_count(), ErrorKind::invalid_parameter, "class index out of range");
    SpectralSeries full = class_series(cls);
    SpectralSeries s;
    const auto* lv = &levels;
    s.enumerate = [lv, cls](double Lambda, const TermVisitor& visit) {
      for (const auto& l : *lv) {
        if (l.lambda > Lambda) break;
        if (l.chi[cls] != cplx(0)) visit(l.lambda, l.chi[cls]);
      }
    };
    s.lambda_cap = levels.empty() ? 0.0 : levels.back().lambda;
    s.kernel = kernel.dim > 0 ? kernel.chi[cls] : cplx(0);
    s.density = full.density;
    return s;
  }
};

inline const FixedSetInfo& fixed_set_info(const EquivariantSpectrum& spec) { return spec.fixed; }

namespace detail {

inline std::vector<Level> merge_levels(std::vector<Level> raw, double rel_tol = 1e-12) {
  std::sort(raw.begin(), raw.end(), [](const Level& a, const Level& b) { return a.lambda < b.lambda; });
  std::vector<Level> out;
  for (auto& l : raw) {
    if (!out.empty() && std::abs(l.lambda - out.back().lambda) <= rel_tol * l.lambda) {
      out.back().dim += l.dim;
      for (std::size_t c = 0; c < l.chi.size(); ++c) out.back().chi[c] += l.chi[c];
    } else {
      out.push_back(std::move(l));
    }
  }
  return out;
}

inline ClassFunction constant_class_function(std::size_t n, cplx v) { return ClassFunction{std::vector<cplx>(n, v)}; }

inline long reduced_period(long num, long den) {
  den = std::abs(den);
  const long g = std::gcd(((num % den) + den) % den, den);
  return g == 0 ? 1 : den / g;
}

}  // namespace detail

// ---------------------------------------------------------------- circle

/// theta -> s*theta + 2*pi*num/den with s = -1 for reflections.
struct CircleIsometry {
  long num = 0;
  long den = 1;
  bool reflect = false;

  bool is_identity() const { return !reflect && num % den == 0; }
  double angle() const { return 2 * std::numbers::pi * double(num) / double(den); }
};

struct CircleAction {
  GroupPtr group;
  std::vector<CircleIsometry> elements;
  std::string name;
};

/// Z/N acting by rotations r^k -> 2*pi*step*k/N. step = 0 gives the trivial (non-faithful) action.
inline CircleAction circle_rotation_action(int N, int step = 1) {
  CircleAction a{make_cyclic(N), {}, "rotation:" + std::to_string(N) + (step == 1 ? "" : "x" + std::to_string(step))};
  for (int k = 0; k < N; ++k) a.elements.push_back({long(step) * k % N, N, false});
  return a;
}

/// D_N with r a rotation by 2*pi/N and s the reflection theta -> -theta.
inline CircleAction circle_dihedral_action(int N) {
  CircleAction a{make_dihedral(N), {}, "dihedral:" + std::to_string(N)};
  for (int k = 0; k < N; ++k) a.elements.push_back({k, N, false});
  // s r^k : theta -> -(theta + 2 pi k/N)
  for (int k = 0; k < N; ++k) a.elements.push_back({(N - k) % N, N, true});
  return a;
}

/// Z/2 acting by the reflection theta -> -theta (the group D_1).
inline CircleAction circle_reflection_action() {
  CircleAction a{make_cyclic(2), {{0, 1, false}, {0, 1, true}}, "reflection"};
  return a;
}

inline EquivariantSpectrum circle_spectrum(const CircleAction& act, long K_max) {
  require(K_max >= 8, ErrorKind::invalid_parameter, "circle truncation K_max must be >= 8");
  require(act.elements.size() == act.group->order(), ErrorKind::invalid_parameter,
          "circle action must assign an isometry to every group element");
  const auto& G = *act.group;
  const std::size_t nc = G.class_count();
  std::vector<CircleIsometry> reps;
  for (const auto& c : G.classes()) reps.push_back(act.elements[c.representative]);

  EquivariantSpectrum s;
  s.model = ModelKind::circle;
  s.group = act.group;
  s.action = act.name;
  s.manifold_dim = 1;
  s.truncation = K_max;
  s.kernel = {1, detail::constant_class_function(nc, 1.0)};
  std::vector<Level> raw;
  for (long k = 1; k <= K_max; ++k) {
    ClassFunction chi;
    for (const auto& g : reps) chi.values.push_back(g.reflect ? 0.0 : 2 * std::cos(double(k % g.den) * g.angle()));
    raw.push_back({double(k), 2, std::move(chi)});
  }
  s.levels = detail::merge_levels(std::move(raw));

  s.fixed.manifold_dim = 1;
  for (const auto& g : reps) {
    if (g.is_identity())
      s.fixed.classes.push_back({1, true, std::nullopt});
    else if (g.reflect)
      s.fixed.classes.push_back({0, false, 1.0});  // two fixed points, dg = -1
    else
      s.fixed.classes.push_back({-1, false, std::nullopt});
  }

  s.class_series = [reps](std::size_t cls) {
    const CircleIsometry g = reps[cls];
    SpectralSeries ser;
    ser.kernel = 1.0;
    Progression p;
    p.first = 1;
    if (g.reflect) {
      ser.enumerate = [](double, const TermVisitor&) {};
    } else {
      p.period = detail::reduced_period(g.num, g.den);
      Progression::Term t;
      for (long r = 0; r < p.period; ++r) t.coeff.push_back(2 * std::cos(double(r) * g.angle()));
      p.terms.push_back(t);
      ser.density = {0, 0, 2};
      ser.enumerate = [g](double Lambda, const TermVisitor& visit) {
        const auto K = static_cast<long>(std::floor(Lambda));
        for (long k = 1; k <= K; ++k) visit(double(k), 2 * std::cos(double(k % g.den) * g.angle()));
      };
    }
    ser.progression = p;
    return ser;
  };
  return s;
}

// ---------------------------------------------------------------- torus

/// Integer 2x2 matrix [[a, b], [c, d]] acting on (R/2piZ)^2 by x -> A x.
struct IntMatrix2 {
  long a = 1, b = 0, c = 0, d = 1;

  IntMatrix2 operator*(const IntMatrix2& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
  }
  bool operator==(const IntMatrix2&) const = default;
  long det() const { return a * d - b * c; }
  IntMatrix2 transpose() const { return {a, c, b, d}; }
  bool is_identity() const { return a == 1 && b == 0 && c == 0 && d == 1; }
  /// dimension of ker(A - I) over R
  int fixed_rank() const {
    const IntMatrix2 m{a - 1, b, c, d - 1};
    if (m.a == 0 && m.b == 0 && m.c == 0 && m.d == 0) return 2;
    return m.det() == 0 ? 1 : 0;
  }
};

struct TorusAction {
  GroupPtr group;
  std::vector<IntMatrix2> elements;
  std::string name;
};

/// Cyclic group generated by a finite-order element of GL(2, Z).
inline TorusAction torus_action(const IntMatrix2& A, const std::string& name = "matrix") {
  require(std::abs(A.det()) == 1, ErrorKind::invalid_parameter, "torus action matrix must be invertible over Z");
  IntMatrix2 P = A;
  int order = 1;
  while (!P.is_identity()) {
    P = P * A;
    ++order;
    require(order <= 12, ErrorKind::invalid_parameter, "torus action matrix must have finite order <= 12");
  }
  TorusAction t{make_cyclic(order), {}, name};
  IntMatrix2 Q{};
  for (int k = 0; k < order; ++k) {
    t.elements.push_back(Q);
    Q = Q * A;
  }
  return t;
}

inline TorusAction torus_named_action(const std::string& name) {
  if (name == "swap") return torus_action({0, 1, 1, 0}, name);
  if (name == "negation") return torus_action({-1, 0, 0, -1}, name);
  if (name == "identity") return torus_action({1, 0, 0, 1}, name);
  if (name == "flip") return torus_action({1, 0, 0, -1}, name);
  if (name == "quarter-turn") return torus_action({0, -1, 1, 0}, name);
  if (name == "hex-rotation") return torus_action({0, -1, 1, 1}, name);
  fail(ErrorKind::invalid_parameter, "unknown torus action '" + name + "'");
}

namespace detail {

/// Primitive generator of ker(M) for a singular nonzero integer 2x2 matrix.
inline std::pair<long, long> primitive_kernel(const IntMatrix2& m) {
  long x, y;
  if (m.a != 0 || m.b != 0) {
    x = -m.b;
    y = m.a;
  } else {
    x = -m.d;
    y = m.c;
  }
  const long g = std::gcd(std::abs(x), std::abs(y));
  return {x / g, y / g};
}

/// Number of lattice points per squared norm n <= R^2, for n = 0..R^2.
inline std::vector<long> lattice_norm_counts(long R) {
  std::vector<long> counts(static_cast<std::size_t>(R * R + 1), 0);
  for (long x = -R; x <= R; ++x) {
    const long ymax = static_cast<long>(std::floor(std::sqrt(double(R * R - x * x))));
    for (long y = -ymax; y <= ymax; ++y) {
      const long n = x * x + y * y;
      if (n <= R * R) ++counts[static_cast<std::size_t>(n)];
    }
  }
  return counts;
}

}  // namespace detail

/// Cap on |k| for full-lattice (rank-2) heat traces.
inline constexpr long torus_full_lattice_cap = 2000;

inline EquivariantSpectrum torus_spectrum(const TorusAction& act, long K_max) {
  require(K_max >= 8, ErrorKind::invalid_parameter, "torus truncation K_max must be >= 8");
  const auto& G = *act.group;
  const std::size_t nc = G.class_count();
  std::vector<IntMatrix2> reps;
  for (const auto& c : G.classes()) reps.push_back(act.elements[c.representative]);

  EquivariantSpectrum s;
  s.model = ModelKind::torus;
  s.group = act.group;
  s.action = act.name;
  s.manifold_dim = 2;
  s.truncation = K_max;
  s.kernel = {1, detail::constant_class_function(nc, 1.0)};

  // e^{ik.x} -> e^{i (A^{-T} k).x}; trace counts frequencies with A^T k = k.
  const long R2 = K_max * K_max;
  std::vector<long> dims(static_cast<std::size_t>(R2 + 1), 0);
  std::vector<std::vector<long>> fixed_counts(nc, std::vector<long>(static_cast<std::size_t>(R2 + 1), 0));
  for (long x = -K_max; x <= K_max; ++x)
    for (long y = -K_max; y <= K_max; ++y) {
      const long n = x * x + y * y;
      if (n == 0 || n > R2) continue;
      ++dims[static_cast<std::size_t>(n)];
      for (std::size_t c = 0; c < nc; ++c) {
        const IntMatrix2 t = reps[c].transpose();
        if (t.a * x + t.b * y == x && t.c * x + t.d * y == y) ++fixed_counts[c][static_cast<std::size_t>(n)];
      }
    }
  for (long n = 1; n <= R2; ++n) {
    if (dims[static_cast<std::size_t>(n)] == 0) continue;
    ClassFunction chi;
    for (std::size_t c = 0; c < nc; ++c) chi.values.push_back(double(fixed_counts[c][static_cast<std::size_t>(n)]));
    s.levels.push_back({std::sqrt(double(n)), dims[static_cast<std::size_t>(n)], std::move(chi)});
  }

  s.fixed.manifold_dim = 2;
  for (const auto& B : reps) {
    const int r = B.fixed_rank();
    // For isolated fixed points there are |det(1-B)| of them, each weighted 1/|det(1-B)|.
    s.fixed.classes.push_back({r, r > 0, r == 0 ? std::optional<double>(1.0) : std::nullopt});
  }

  s.class_series = [reps, K_max](std::size_t cls) {
    const IntMatrix2 B = reps[cls];
    const IntMatrix2 M{B.a - 1, B.c, B.b, B.d - 1};  // B^T - I
    SpectralSeries ser;
    ser.kernel = 1.0;
    const int rank = B.fixed_rank();
    if (rank == 2) {
      const long cap = std::max(K_max, torus_full_lattice_cap);
      ser.lambda_cap = double(cap);
      ser.density = {2 * std::numbers::pi * 1.2, 1, 40.0};
      ser.mean_count = SpectralSeries::MeanCount{std::numbers::pi, 2.0};
      ser.enumerate = [cap](double Lambda, const TermVisitor& visit) {
        const long R = std::min(cap, static_cast<long>(std::floor(Lambda)));
        const auto counts = detail::lattice_norm_counts(R);
        for (std::size_t n = 1; n < counts.size(); ++n)
          if (counts[n] != 0) visit(std::sqrt(double(n)), double(counts[n]));
      };
    } else if (rank == 1) {
      const auto [wx, wy] = detail::primitive_kernel(M);
      const double len = std::hypot(double(wx), double(wy));
      Progression p;
      p.scale = len;
      p.terms.push_back({0.0, {2.0}});
      ser.progression = p;
      ser.density = {0, 0, 2.0 / len};
      ser.enumerate = [len](double Lambda, const TermVisitor& visit) {
        const auto J = static_cast<long>(std::floor(Lambda / len));
        for (long j = 1; j <= J; ++j) visit(double(j) * len, 2.0);
      };
    } else {
      ser.progression = Progression{};
      ser.enumerate = [](double, const TermVisitor&) {};
    }
    return ser;
  };
  return s;
}

// ---------------------------------------------------------------- sphere

/// Rotation by 2*pi*num/den about the z-axis, or the reflection z -> -z.
struct SphereIsometry {
  long num = 0;
  long den = 1;
  bool reflect = false;

  bool is_identity() const { return !reflect && num % den == 0; }
  double angle() const { return 2 * std::numbers::pi * double(num) / double(den); }
};

struct SphereAction {
  GroupPtr group;
  std::vector<SphereIsometry> elements;
  std::string name;
};

/// Z/N generated by the rotation by 2*pi*j/N.
inline SphereAction sphere_rotation_action(int N, int j = 1) {
  require(N >= 1, ErrorKind::invalid_parameter, "rotation order must be >= 1");
  require(N == 1 || j % N != 0, ErrorKind::invalid_parameter, "rotation angle is 0 for a nontrivial generator");
  SphereAction a{make_cyclic(N), {}, "rotation:" + std::to_string(N) + (j == 1 ? "" : "x" + std::to_string(j))};
  for (int k = 0; k < N; ++k) a.elements.push_back({long(j) * k % N, N, false});
  return a;
}

inline SphereAction sphere_reflection_action() {
  return SphereAction{make_cyclic(2), {{0, 1, false}, {0, 1, true}}, "reflection"};
}

/// Characters of a plane reflection on the degree-l harmonics, l = 0..L.
///
/// The trace of the induced map on the l-th eigenspace is the integral over
/// the sphere of its reproducing kernel (2l+1)/(4 pi) P_l(x . Rx). For the
/// reflection z -> -z, x . Rx = 1 - 2 z^2, and the integrand depends on z only;
/// Gauss-Legendre with L+1 nodes integrates every degree exactly.
inline std::vector<double> sphere_reflection_characters(long L) {
  const auto rule = gauss_legendre(static_cast<std::size_t>(L + 1));
  std::vector<double> chi(static_cast<std::size_t>(L + 1), 0.0);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double z = rule.nodes[i];
    const double x = 1 - 2 * z * z;
    double p0 = 1, p1 = x;
    for (long l = 0; l <= L; ++l) {
      const double pl = l == 0 ? p0 : p1;
      // (1/4pi) * 2pi * int dz  ->  1/2 int dz
      chi[static_cast<std::size_t>(l)] += 0.5 * rule.weights[i] * double(2 * l + 1) * pl;
      if (l >= 1) {
        const double p2 = ((2.0 * double(l) + 1) * x * p1 - double(l) * p0) / double(l + 1);
        p0 = p1;
        p1 = p2;
      }
    }
  }
  return chi;
}

inline double sphere_rotation_character(long l, double alpha) {
  return std::sin((double(l) + 0.5) * alpha) / std::sin(0.5 * alpha);
}

inline EquivariantSpectrum sphere_spectrum(const SphereAction& act, long L_max) {
  require(L_max >= 8, ErrorKind::invalid_parameter, "sphere truncation L_max must be >= 8");
  const auto& G = *act.group;
  const std::size_t nc = G.class_count();
  std::vector<SphereIsometry> reps;
  for (const auto& c : G.classes()) reps.push_back(act.elements[c.representative]);
  const bool has_reflection = std::any_of(reps.begin(), reps.end(), [](const auto& g) { return g.reflect; });
  const std::vector<double> refl = has_reflection ? sphere_reflection_characters(L_max) : std::vector<double>{};

  EquivariantSpectrum s;
  s.model = ModelKind::sphere;
  s.group = act.group;
  s.action = act.name;
  s.manifold_dim = 2;
  s.truncation = L_max;
  s.kernel = {0, detail::constant_class_function(nc, 0.0)};
  std::vector<Level> raw;
  for (long l = 0; l <= L_max; ++l) {
    ClassFunction chi;
    for (const auto& g : reps) {
      if (g.reflect)
        chi.values.push_back(refl[static_cast<std::size_t>(l)]);
      else if (g.is_identity())
        chi.values.push_back(double(2 * l + 1));
      else
        chi.values.push_back(sphere_rotation_character(l, g.angle()));
    }
    raw.push_back({double(l) + 0.5, 2 * l + 1, std::move(chi)});
  }
  s.levels = detail::merge_levels(std::move(raw));

  s.fixed.manifold_dim = 2;
  for (const auto& g : reps) {
    if (g.is_identity())
      s.fixed.classes.push_back({2, true, std::nullopt});
    else if (g.reflect)
      s.fixed.classes.push_back({1, true, std::nullopt});  // fixed great circle
    else {
      const double sh = std::sin(0.5 * g.angle());
      s.fixed.classes.push_back({0, false, 2.0 / (4 * sh * sh)});  // two poles
    }
  }

  // Periodicity of the numeric reflection characters, used to extend beyond L_max.
  std::optional<long> refl_period;
  if (has_reflection) {
    for (long p : {1L, 2L}) {
      bool ok = true;
      for (long l = p; l <= L_max && ok; ++l)
        ok = std::abs(refl[static_cast<std::size_t>(l)] - refl[static_cast<std::size_t>(l - p)]) < 1e-9;
      if (ok) {
        refl_period = p;
        break;
      }
    }
  }

  s.class_series = [reps, refl, refl_period, L_max](std::size_t cls) {
    const SphereIsometry g = reps[cls];
    SpectralSeries ser;
    Progression p;
    p.shift = 0.5;
    p.first = 0;
    if (g.is_identity()) {
      p.terms = {{1.0, {2.0}}, {0.0, {1.0}}};
      ser.density = {2, 1, 1};
      ser.enumerate = [](double Lambda, const TermVisitor& visit) {
        for (long l = 0; double(l) + 0.5 <= Lambda; ++l) visit(double(l) + 0.5, double(2 * l + 1));
      };
      ser.progression = p;
    } else if (g.reflect) {
      if (refl_period) {
        p.period = *refl_period;
        Progression::Term t;
        for (long r = 0; r < p.period; ++r) t.coeff.push_back(std::round(refl[static_cast<std::size_t>(r)]));
        p.terms.push_back(t);
        ser.progression = p;
        ser.enumerate = [p](double Lambda, const TermVisitor& visit) {
          for (long l = 0; double(l) + 0.5 <= Lambda; ++l) visit(double(l) + 0.5, p.weight(l));
        };
      } else {
        ser.lambda_cap = double(L_max) + 0.5;
        ser.enumerate = [refl, L_max](double Lambda, const TermVisitor& visit) {
          for (long l = 0; l <= L_max && double(l) + 0.5 <= Lambda; ++l)
            visit(double(l) + 0.5, refl[static_cast<std::size_t>(l)]);
        };
      }
      double mx = 0;
      for (double v : refl) mx = std::max(mx, std::abs(v));
      ser.density = {0, 0, mx};
    } else {
      p.period = detail::reduced_period(g.num, g.den);
      Progression::Term t;
      double mx = 0;
      for (long r = 0; r < p.period; ++r) {
        t.coeff.push_back(sphere_rotation_character(r, g.angle()));
        mx = std::max(mx, std::abs(t.coeff.back().real()));
      }
      p.terms.push_back(t);
      ser.progression = p;
      ser.density = {0, 0, mx};
      ser.enumerate = [p](double Lambda, const TermVisitor& visit) {
        for (long l = 0; double(l) + 0.5 <= Lambda; ++l) visit(double(l) + 0.5, p.weight(l));
      };
    }
    return ser;
  };
  return s;
}

}  // namespace eqres

#pragma once

// Residue traces tau_g on the circle cross-product algebra and on diagonal torus
// operators, class traces, tau_pi, and the local formula W.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "eqres/error.hpp"
#include "eqres/group.hpp"
#include "eqres/spectral.hpp"
#include "eqres/stationary_phase.hpp"
#include "eqres/zeta.hpp"

namespace eqres {

/// Finite trigonometric polynomial sum_m c_m e^{i m theta}.
struct FourierPoly {
  std::map<long, cplx> coeff;

  static FourierPoly constant(cplx c) {
    FourierPoly p;
    if (c != cplx(0)) p.coeff[0] = c;
    return p;
  }

  cplx operator()(double theta) const {
    cplx s = 0;
    for (const auto& [m, c] : coeff) s += c * std::exp(cplx(0, double(m) * theta));
    return s;
  }
  cplx at(long m) const {
    auto it = coeff.find(m);
    return it == coeff.end() ? cplx(0) : it->second;
  }
  long degree() const {
    long d = 0;
    for (const auto& [m, c] : coeff)
      if (c != cplx(0)) d = std::max(d, std::abs(m));
    return d;
  }
  /// theta -> theta + c.
  FourierPoly shifted(double c) const {
    FourierPoly p;
    for (const auto& [m, v] : coeff) p.coeff[m] = v * std::exp(cplx(0, double(m) * c));
    return p;
  }
};

/// a(theta, k) ~ sum_j a_j^{sign k}(theta) |k|^{order - j}.
struct CircleSymbol {
  int order = 0;
  /// components[j][0] is the k > 0 branch, components[j][1] the k < 0 branch.
  std::vector<std::array<FourierPoly, 2>> components;

  static CircleSymbol identity() { return power(0); }
  /// |k|^s on both branches.
  static CircleSymbol power(int s) {
    CircleSymbol a;
    a.order = s;
    a.components.push_back({FourierPoly::constant(1), FourierPoly::constant(1)});
    return a;
  }
  static CircleSymbol multiplier(const FourierPoly& m) {
    CircleSymbol a;
    a.components.push_back({m, m});
    return a;
  }

  long fmax() const {
    long d = 0;
    for (const auto& c : components) d = std::max({d, c[0].degree(), c[1].degree()});
    return d;
  }
  CircleSymbol shifted(double c) const {
    CircleSymbol a = *this;
    for (auto& comp : a.components)
      for (auto& br : comp) br = br.shifted(c);
    return a;
  }
  /// The component homogeneous of degree `degree`, or zero.
  std::array<FourierPoly, 2> homogeneous(int degree) const {
    const int j = order - degree;
    if (j < 0 || j >= static_cast<int>(components.size())) return {};
    return components[static_cast<std::size_t>(j)];
  }
};

/// Banded matrix on span{e^{ik theta} : |k| <= K}. Entries (k', k) with |k|, |k'| <= valid
/// coincide with the untruncated operator.
class QuantizedOperator {
 public:
  QuantizedOperator() = default;
  QuantizedOperator(long K, long band, int order)
      : K_(K), band_(band), order_(order), valid_(K),
        data_(static_cast<std::size_t>((2 * K + 1) * (2 * band + 1)), cplx(0)) {
    require(K >= 1 && band >= 0, ErrorKind::invalid_parameter, "bad operator shape");
  }

  long truncation() const { return K_; }
  long band() const { return band_; }
  int order() const { return order_; }
  long valid() const { return valid_; }
  /// Bound on the entries before cancellation; entries far below it are roundoff.
  double magnitude() const { return mag_; }
  bool numerically_zero() const { return max_abs() <= 1e3 * std::numeric_limits<double>::epsilon() * mag_; }

  cplx at(long kp, long k) const {
    if (std::abs(k) > K_ || std::abs(kp) > K_ || std::abs(kp - k) > band_) return 0;
    return data_[idx(kp, k)];
  }
  void set(long kp, long k, cplx v) {
    require(std::abs(k) <= K_ && std::abs(kp) <= K_ && std::abs(kp - k) <= band_, ErrorKind::invalid_parameter,
            "entry outside the band");
    data_[idx(kp, k)] = v;
    mag_ = std::max(mag_, std::abs(v));
  }
  void add(long kp, long k, cplx v) { set(kp, k, at(kp, k) + v); }

  double max_abs() const {
    double m = 0;
    for (auto v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  friend QuantizedOperator operator+(const QuantizedOperator& A, const QuantizedOperator& B) {
    require(A.K_ == B.K_, ErrorKind::invalid_parameter, "truncation mismatch");
    QuantizedOperator C(A.K_, std::max(A.band_, B.band_), std::max(A.order_, B.order_));
    C.valid_ = std::min(A.valid_, B.valid_);
    C.mag_ = std::max(A.mag_, B.mag_);
    for (long k = -A.K_; k <= A.K_; ++k)
      for (long kp = k - C.band_; kp <= k + C.band_; ++kp)
        if (std::abs(kp) <= A.K_) C.data_[C.idx(kp, k)] = A.at(kp, k) + B.at(kp, k);
    return C;
  }
  friend QuantizedOperator operator*(cplx s, QuantizedOperator A) {
    for (auto& v : A.data_) v *= s;
    A.mag_ *= std::abs(s);
    return A;
  }
  friend QuantizedOperator operator-(const QuantizedOperator& A, const QuantizedOperator& B) { return A + (-1.0) * B; }

  friend QuantizedOperator operator*(const QuantizedOperator& A, const QuantizedOperator& B) {
    require(A.K_ == B.K_, ErrorKind::invalid_parameter, "truncation mismatch");
    const long K = A.K_;
    QuantizedOperator C(K, std::min(A.band_ + B.band_, 2 * K), A.order_ + B.order_);
    C.valid_ = std::max(0L, std::min(A.valid_, B.valid_) - std::min(A.band_, B.band_));
    C.mag_ = A.mag_ * B.mag_ * double(2 * std::min(A.band_, B.band_) + 1);
    for (long k = -K; k <= K; ++k)
      for (long m = std::max(-K, k - B.band_); m <= std::min(K, k + B.band_); ++m) {
        const cplx b = B.at(m, k);
        if (b == cplx(0)) continue;
        for (long kp = std::max(-K, m - A.band_); kp <= std::min(K, m + A.band_); ++kp) {
          const cplx a = A.at(kp, m);
          if (a != cplx(0)) C.data_[C.idx(kp, k)] += a * b;
        }
      }
    return C;
  }

  /// U_g A U_g^{-1} with (U_g f)(theta) = f(g^{-1} theta).
  QuantizedOperator conjugated(const CircleIsometry& g) const {
    QuantizedOperator C = *this;
    const double beta = g.angle();
    const long s = g.reflect ? -1 : 1;
    for (long k = -K_; k <= K_; ++k)
      for (long kp = k - band_; kp <= k + band_; ++kp)
        if (std::abs(kp) <= K_)
          C.data_[idx(kp, k)] = at(s * kp, s * k) * std::exp(cplx(0, double(k - kp) * beta));
    return C;
  }

 private:
  std::size_t idx(long kp, long k) const {
    return static_cast<std::size_t>((k + K_) * (2 * band_ + 1) + (kp - k + band_));
  }

  long K_ = 0;
  long band_ = 0;
  int order_ = 0;
  long valid_ = 0;
  double mag_ = 0;
  std::vector<cplx> data_;
};

/// Left quantization: entry (k + m, k) = m-th Fourier coefficient of a(., k). At k = 0 the + branch with
/// every |k|-power set to 1.
inline QuantizedOperator quantize(const CircleSymbol& sym, long K) {
  const long F = sym.fmax();
  require(K >= 4 * F && K >= 1, ErrorKind::truncation_too_small,
          "truncation K = " + std::to_string(K) + " below 4 * F_max = " + std::to_string(4 * F));
  QuantizedOperator A(K, F, sym.order);
  for (long k = -K; k <= K; ++k) {
    const int br = k < 0 ? 1 : 0;
    for (std::size_t j = 0; j < sym.components.size(); ++j) {
      const double pw = k == 0 ? 1.0 : std::pow(double(std::abs(k)), double(sym.order) - double(j));
      for (const auto& [m, c] : sym.components[j][static_cast<std::size_t>(br)].coeff)
        if (std::abs(k + m) <= K && c != cplx(0)) A.add(k + m, k, c * pw);
    }
  }
  return A;
}

/// U_g e_k = e^{-i s k beta} e_{s k} for g(theta) = s theta + beta.
inline std::pair<long, cplx> circle_unitary(const CircleIsometry& g, long k) {
  const long s = g.reflect ? -1 : 1;
  return {s * k, std::exp(cplx(0, -double(s * k) * g.angle()))};
}

/// sum_g A_g g in the cross product of circle operators with a finite group.
struct CrossProductElement {
  CircleAction action;
  std::map<std::size_t, QuantizedOperator> parts;

  CrossProductElement() = default;
  explicit CrossProductElement(CircleAction act) : action(std::move(act)) {}

  static CrossProductElement single(const CircleAction& act, std::size_t g, QuantizedOperator A) {
    require(g < act.elements.size(), ErrorKind::invalid_parameter, "group element out of range");
    CrossProductElement e(act);
    e.parts.emplace(g, std::move(A));
    return e;
  }

  void accumulate(std::size_t g, const QuantizedOperator& A) {
    auto it = parts.find(g);
    if (it == parts.end())
      parts.emplace(g, A);
    else
      it->second = it->second + A;
  }
  int order() const {
    int o = std::numeric_limits<int>::min();
    for (const auto& [g, A] : parts) o = std::max(o, A.order());
    return parts.empty() ? 0 : o;
  }
  double max_abs() const {
    double m = 0;
    for (const auto& [g, A] : parts) m = std::max(m, A.max_abs());
    return m;
  }

  friend CrossProductElement operator+(const CrossProductElement& X, const CrossProductElement& Y) {
    CrossProductElement Z = X;
    for (const auto& [g, A] : Y.parts) Z.accumulate(g, A);
    return Z;
  }
  friend CrossProductElement operator*(cplx s, CrossProductElement X) {
    for (auto& [g, A] : X.parts) A = s * A;
    return X;
  }
  friend CrossProductElement operator-(const CrossProductElement& X, const CrossProductElement& Y) {
    return X + (-1.0) * Y;
  }
  /// A_g g . B_h h = A_g g(B_h) gh.
  friend CrossProductElement operator*(const CrossProductElement& X, const CrossProductElement& Y) {
    require(X.action.group == Y.action.group, ErrorKind::invalid_parameter, "cross products over different groups");
    const auto& G = *X.action.group;
    CrossProductElement Z(X.action);
    for (const auto& [g, A] : X.parts)
      for (const auto& [h, B] : Y.parts) Z.accumulate(G.mul(g, h), A * B.conjugated(X.action.elements[g]));
    return Z;
  }
};

inline CrossProductElement commutator(const CrossProductElement& X, const CrossProductElement& Y) {
  return X * Y - Y * X;
}

/// Coefficients uniform in the unit square, damped by 1/(1+j) in component j.
inline CircleSymbol random_symbol(std::mt19937& rng, int order, long F, int components = 3) {
  std::uniform_real_distribution<double> u(-1, 1);
  CircleSymbol a;
  a.order = order;
  for (int j = 0; j < components; ++j) {
    std::array<FourierPoly, 2> comp;
    for (auto& br : comp)
      for (long m = -F; m <= F; ++m) br.coeff[m] = cplx(u(rng), u(rng)) / double(1 + j);
    a.components.push_back(comp);
  }
  return a;
}

/// l1 norm of all symbol coefficients; the scale for relative trace tolerances.
inline double coefficient_scale(const CircleSymbol& a) {
  double s = 0;
  for (const auto& c : a.components)
    for (const auto& br : c)
      for (const auto& [m, v] : br.coeff) s += std::abs(v);
  return s;
}

/// Each group element gets a random symbol of order -1..1 and degree <= 3 with probability 1/2.
inline CrossProductElement random_element(std::mt19937& rng, const CircleAction& act, long K, double& scale) {
  std::uniform_int_distribution<int> ord(-1, 1);
  std::uniform_int_distribution<long> fdeg(0, 3);
  CrossProductElement X(act);
  scale = 0;
  for (std::size_t g = 0; g < act.elements.size(); ++g) {
    if (rng() % 2) continue;
    const auto sym = random_symbol(rng, ord(rng), fdeg(rng));
    scale += coefficient_scale(sym);
    X.parts.emplace(g, quantize(sym, K));
  }
  return X;
}

enum class DChoice { standard, perturbed };

struct ResidueValue {
  cplx value = 0;
  int d = 0;
  double fit_residual = 0;
  double condition = 0;
  double t_min = 0;
  long levels = 0;
  double tail_residual = 0;
};

namespace detail {

/// Lower-order symbol terms (and D + D^{-1}) put t^k log t terms in the heat trace; three columns past s = 0 cover them.
inline ContinuationOptions residue_options(int d, ContinuationOptions opt) {
  if (opt.depth < 0) opt.depth = std::max(d, 0) + 3;
  return opt;
}

inline ResidueValue residue_from_series(const SpectralSeries& series, int d, DChoice D, const ContinuationOptions& opt) {
  const SpectralSeries s = D == DChoice::perturbed ? series.perturbed(1.0) : series;
  const auto mz = meromorphic_continue_checked(s, d, residue_options(d, opt));
  ResidueValue r;
  r.value = mz.residue_at(0.0);
  r.d = d;
  r.fit_residual = mz.fit.residual;
  r.condition = mz.fit.condition;
  r.t_min = mz.fit.t_min;
  return r;
}

/// dim S*M^g on the circle, as used in d = k_g + order: 1 for the identity, 0 otherwise.
inline int circle_pole_dim(const CircleIsometry& g) { return g.is_identity() ? 1 : 0; }

}  // namespace detail

/// Per-level traces Tr(P_k A U_g), k = 0..A.valid(); P_k projects on span{e_k, e_{-k}}.
inline std::vector<cplx> level_traces(const QuantizedOperator& A, const CircleIsometry& g) {
  std::vector<cplx> w(static_cast<std::size_t>(A.valid() + 1), cplx(0));
  for (long k = 0; k <= A.valid(); ++k)
    for (long m : {k, -k}) {
      const auto [sm, ph] = circle_unitary(g, m);
      w[static_cast<std::size_t>(k)] += A.at(m, sm) * ph;
      if (k == 0) break;
    }
  return w;
}

/// Per-level traces of A U_g: exact on the retained levels, continued beyond them by the
/// classical expansion of the diagonal entries A_{+-k, +-k} ~ sum_j c_j k^{order - j}.
struct LevelSeries {
  SpectralSeries series;
  long exact_levels = 0;
  int effective_order = 0;   // order minus the number of leading expansion coefficients that vanish
  double tail_residual = 0;  // relative misfit of the diagonal expansions on the fit window
  /// With subtraction the terms k^e, e >= 0, of the expansion are removed from `series`. Their Dirichlet
  /// series are zeta_R(z - e) (identity) or periodic zeta functions (rotations): no pole at 0.
  bool subtracted = false;
  bool zero = false;  // every retained trace is at roundoff level
};

namespace detail {

inline constexpr int diagonal_terms = 8;

/// Least-squares c_j for vals[i] ~ sum_j c_j (k_i / k0)^{order - j}, with c_j = 0 for j < skip; rows are
/// weighted by (k_i / k0)^{-order}. Returns the relative residual.
inline double fit_diagonal(const std::vector<long>& ks, const std::vector<cplx>& vals, int order, long k0,
                           std::vector<cplx>& c, int skip = 0) {
  const auto n = static_cast<Eigen::Index>(ks.size());
  const int cols = diagonal_terms - skip;
  Eigen::MatrixXd B(n, cols);
  Eigen::MatrixXd y(n, 2);
  double scale = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = double(ks[static_cast<std::size_t>(i)]) / double(k0);
    const double wt = std::pow(x, -double(order));
    for (int j = 0; j < cols; ++j) B(i, j) = std::pow(x, double(-skip - j));
    y(i, 0) = wt * vals[static_cast<std::size_t>(i)].real();
    y(i, 1) = wt * vals[static_cast<std::size_t>(i)].imag();
    scale = std::max(scale, wt * std::abs(vals[static_cast<std::size_t>(i)]));
  }
  const Eigen::MatrixXd sol = B.colPivHouseholderQr().solve(y);
  c.assign(diagonal_terms, cplx(0));
  for (int j = 0; j < cols; ++j) c[static_cast<std::size_t>(j + skip)] = cplx(sol(j, 0), sol(j, 1));
  if (scale == 0) return 0;
  return (B * sol - y).cwiseAbs().maxCoeff() / scale;
}

}  // namespace detail

inline LevelSeries level_series(const QuantizedOperator& A, const CircleIsometry& g, bool subtract = false) {
  const long v = A.valid();
  const int order = A.order();
  require(2 * v > A.band() && v >= 4 * detail::diagonal_terms + A.band(), ErrorKind::truncation_too_small,
          "too few exact levels (" + std::to_string(v) + ") for band " + std::to_string(A.band()));
  require(order < detail::diagonal_terms, ErrorKind::invalid_parameter, "operator order too high for the level expansion");
  auto w = std::make_shared<std::vector<cplx>>(level_traces(A, g));
  const double eps = std::numeric_limits<double>::epsilon();

  LevelSeries out;
  out.exact_levels = v;
  out.effective_order = order;
  SpectralSeries& s = out.series;
  s.kernel = (*w)[0];
  double wmax = 0;
  for (long k = 1; k <= v; ++k) wmax = std::max(wmax, std::abs((*w)[static_cast<std::size_t>(k)]));
  if (wmax <= 1e3 * eps * A.magnitude()) {
    out.zero = true;
    s.enumerate = [](double, const TermVisitor&) {};
    return out;
  }

  auto cp = std::make_shared<std::vector<cplx>>(), cm = std::make_shared<std::vector<cplx>>();
  const bool tail = !g.reflect;  // reflections: A_{k,-k} = 0 once 2k exceeds the band
  // the expansion in 1/k converges like (band / k)^j; start the window well past the band
  const long k0 = std::max(A.band() + 1, std::min(v / 2, 16 * (A.band() + 1)));
  const double beta = g.angle();
  if (tail) {
    std::vector<long> ks;
    std::vector<cplx> dp, dm;
    for (long k = k0; k <= v; ++k) {
      ks.push_back(k);
      dp.push_back(A.at(k, k));
      dm.push_back(A.at(-k, -k));
    }
    // on the identity both diagonals enter with phase 1, so fit their sum
    const bool merged = g.is_identity();
    if (merged)
      for (std::size_t i = 0; i < dp.size(); ++i) dp[i] += dm[i];
    auto fit = [&](int skip) {
      double r = detail::fit_diagonal(ks, dp, order, k0, *cp, skip);
      if (merged)
        cm->assign(cp->size(), cplx(0));
      else
        r = std::max(r, detail::fit_diagonal(ks, dm, order, k0, *cm, skip));
      return r;
    };
    out.tail_residual = fit(0);
    // leading coefficients at fit-noise level are cancellations; pin them to zero and refit
    std::vector<double> lead;
    for (std::size_t j = 0; j < cp->size(); ++j) lead.push_back(std::max(std::abs((*cp)[j]), std::abs((*cm)[j])));
    const double top = *std::max_element(lead.begin(), lead.end());
    std::size_t j0 = 0;
    while (top > 0 && j0 + 1 < lead.size() && lead[j0] <= 1e-8 * top) ++j0;
    if (j0 > 0) out.tail_residual = fit(static_cast<int>(j0));
    out.effective_order = order - static_cast<int>(j0);

    if (subtract) {
      out.subtracted = true;
      const int jmax = order;  // exponents order - j >= 0
      for (long k = 1; k <= v; ++k) {
        const double x = double(k) / double(k0);
        cplx p = 0, m = 0;
        for (int j = 0; j <= jmax; ++j) {
          const double pw = std::pow(x, double(order - j));
          p += (*cp)[static_cast<std::size_t>(j)] * pw;
          m += (*cm)[static_cast<std::size_t>(j)] * pw;
        }
        (*w)[static_cast<std::size_t>(k)] -= p * std::exp(cplx(0, -double(k) * beta)) + m * std::exp(cplx(0, double(k) * beta));
      }
      for (int j = 0; j <= jmax; ++j) (*cp)[static_cast<std::size_t>(j)] = (*cm)[static_cast<std::size_t>(j)] = 0;
      // the fitted coefficients are individually noisy; judge the tail by its values past v
      double rmax = 0;
      for (long k = 1; k <= v; ++k) rmax = std::max(rmax, std::abs((*w)[static_cast<std::size_t>(k)]));
      for (long k = 2 * v; k <= 64 * v; k *= 2) {
        const double x = double(k) / double(k0);
        cplx p = 0, m = 0;
        for (std::size_t j = 0; j < cp->size(); ++j) {
          const double pw = std::pow(x, double(order) - double(j));
          p += (*cp)[j] * pw;
          m += (*cm)[j] * pw;
        }
        rmax = std::max(rmax, (std::abs(p) + std::abs(m)) * std::pow(double(v) / double(k), double(order)));
      }
      if (rmax <= 1e3 * eps * wmax) {
        out.zero = true;
        s.enumerate = [](double, const TermVisitor&) {};
        return out;
      }
    }
  }

  double ratio = 0, tail_mag = 0;
  for (long k = 1; k <= v; ++k)
    ratio = std::max(ratio, std::abs((*w)[static_cast<std::size_t>(k)]) / std::pow(double(k), std::max(order, 0)));
  // past v: |p(k)| / k^order <= sum_j |c_j| k0^{j - order} v^{-j}
  for (std::size_t j = 0; j < cp->size(); ++j)
    tail_mag += (std::abs((*cp)[j]) + std::abs((*cm)[j])) * std::pow(double(k0), double(j) - order) * std::pow(double(v), -double(j));
  ratio = std::max(ratio, tail_mag * std::pow(double(v), double(order - std::max(order, 0))));
  // reflections: every retained level past band/2 is exactly zero, so the sum is complete
  s.density = tail ? DensityBound{2 * ratio, std::max(order, 0), 0} : DensityBound{};
  s.enumerate = [w, cp, cm, v, k0, order, tail, beta](double L, const TermVisitor& vis) {
    const long top = static_cast<long>(std::floor(L));
    for (long k = 1; k <= std::min(top, v); ++k) vis(double(k), (*w)[static_cast<std::size_t>(k)]);
    if (!tail) return;
    for (long k = v + 1; k <= top; ++k) {
      const double x = double(k) / double(k0);
      cplx p = 0, m = 0;
      double pw = std::pow(x, double(order));
      for (std::size_t j = 0; j < cp->size(); ++j, pw /= x) {
        p += (*cp)[j] * pw;
        m += (*cm)[j] * pw;
      }
      vis(double(k), p * std::exp(cplx(0, -double(k) * beta)) + m * std::exp(cplx(0, double(k) * beta)));
    }
  };
  return out;
}

/// subtract_singular: drop the k^{e >= 0} part of the trace expansion (it has no residue at 0) and continue
/// the remainder; the plain route continues the full heat trace.
struct TauOptions {
  ContinuationOptions fit;
  bool subtract_singular = true;
};

/// res_{z=0} Tr(D^{-z} A U_g) from the per-level traces.
inline ResidueValue tau_g(const CircleAction& act, std::size_t g, const QuantizedOperator& A,
                          DChoice D = DChoice::standard, const TauOptions& opt = {}) {
  require(g < act.elements.size(), ErrorKind::invalid_parameter, "group element out of range");
  const auto& iso = act.elements[g];
  const auto ls = level_series(A, iso, opt.subtract_singular);
  const int d = detail::circle_pole_dim(iso) + ls.effective_order;
  ResidueValue r;
  if (!ls.zero) r = detail::residue_from_series(ls.series, d, D, opt.fit);
  // under D + D^{-1} the dropped part becomes sum_m binom(-z, m) zeta_R(z + 2m - e): still no residue at 0
  r.d = d;
  r.levels = ls.exact_levels;
  r.tail_residual = ls.tail_residual;
  return r;
}

/// tau_g of a symbol, refusing when doubling K moves the value by more than `tol`.
inline ResidueValue tau_g_converged(const CircleAction& act, std::size_t g,
                                    const std::function<QuantizedOperator(long)>& build, long K,
                                    DChoice D = DChoice::standard, double tol = 1e-5) {
  const auto a = tau_g(act, g, build(K), D);
  const auto b = tau_g(act, g, build(2 * K), D);
  if (std::abs(a.value - b.value) > tol)
    fail(ErrorKind::truncation_insufficient,
         "tau_g moved by " + detail::sci(std::abs(a.value - b.value)) + " when K doubled");
  return b;
}

/// tau_g(D^power) for the model spectra; A = Id is power 0.
inline ResidueValue tau_g(const EquivariantSpectrum& spec, std::size_t cls, int power = 0,
                          DChoice D = DChoice::standard, const ContinuationOptions& opt = {}) {
  require(cls < spec.class_count(), ErrorKind::invalid_parameter, "class out of range");
  const int d = spec.fixed.classes[cls].pole_dim() + power;
  auto r = detail::residue_from_series(spec.series(cls).times_power(power), d, D, opt);
  r.levels = static_cast<long>(spec.levels.size());
  return r;
}

// ---------------------------------------------------------------- torus operators

/// sum_i M_{m_i} D^{s_i}: multiplication by a trigonometric polynomial after a power of D.
/// The full symbol is exactly sum_i m_i(x) |xi|^{s_i}.
struct TorusOperator {
  struct Term {
    int power = 0;
    std::map<std::pair<long, long>, cplx> multiplier;
  };
  std::vector<Term> terms;

  static TorusOperator power(int s) { return {{{s, {{{0, 0}, 1.0}}}}}; }
  int order() const {
    int o = std::numeric_limits<int>::min();
    for (const auto& t : terms) o = std::max(o, t.power);
    return terms.empty() ? 0 : o;
  }
  /// x -> x + c.
  TorusOperator shifted(double cx, double cy) const {
    TorusOperator r = *this;
    for (auto& t : r.terms)
      for (auto& [v, c] : t.multiplier) c *= std::exp(cplx(0, double(v.first) * cx + double(v.second) * cy));
    return r;
  }
  long fmax() const {
    long f = 0;
    for (const auto& t : terms)
      for (const auto& [v, c] : t.multiplier) f = std::max({f, std::abs(v.first), std::abs(v.second)});
    return f;
  }
};

namespace detail {

/// A^{-T} for det A = +-1.
inline IntMatrix2 inverse_transpose(const IntMatrix2& A) {
  const long det = A.det();
  return {A.d * det, -A.c * det, -A.b * det, A.a * det};
}

inline int int_rank(const IntMatrix2& M) {
  if (M.det() != 0) return 2;
  return (M.a == 0 && M.b == 0 && M.c == 0 && M.d == 0) ? 0 : 1;
}

}  // namespace detail

/// Dirichlet series of Tr(D^{-z} A U_g) on the torus: sum over k with k - Bk in supp m, B = A_g^{-T}.
inline SpectralSeries torus_operator_series(const TorusAction& act, std::size_t g, const TorusOperator& op) {
  require(g < act.elements.size(), ErrorKind::invalid_parameter, "group element out of range");
  const IntMatrix2 B = detail::inverse_transpose(act.elements[g]);
  const IntMatrix2 M{1 - B.a, -B.b, -B.c, 1 - B.d};
  const int rank = detail::int_rank(M);

  struct Line {
    std::pair<long, long> k0, w;  // w = (0, 0) for a single point
    cplx c;
    int power;
  };
  std::vector<Line> lines;
  cplx full_lattice = 0;
  int full_power = 0;
  bool has_full = false;
  cplx kernel = 0;
  double density_const = 0, density_coeff = 0;
  int density_power = 0;

  for (const auto& t : op.terms)
    for (const auto& [v, c] : t.multiplier) {
      if (c == cplx(0)) continue;
      if (v == std::pair<long, long>{0, 0}) kernel += c;  // k = 0 with |0|^s read as 1
      if (rank == 0) {
        if (v.first != 0 || v.second != 0) continue;
        require(!has_full || t.power == full_power, ErrorKind::invalid_parameter,
                "identity class supports a single power of D");
        has_full = true;
        full_lattice += c;
        full_power = t.power;
        continue;
      }
      // particular solution of M k = v
      std::optional<std::pair<long, long>> k0;
      const long L = 64 + 4 * std::max(std::abs(v.first), std::abs(v.second));
      for (long x = -L; x <= L && !k0; ++x)
        for (long y = -L; y <= L && !k0; ++y)
          if (M.a * x + M.b * y == v.first && M.c * x + M.d * y == v.second) k0 = std::pair{x, y};
      if (!k0) continue;
      std::pair<long, long> w{0, 0};
      if (rank == 1) {
        w = detail::primitive_kernel(M);
        density_const += 4 * std::abs(c);
      } else {
        density_const += std::abs(c);
      }
      if (t.power > 0) {
        density_coeff += 4 * std::abs(c);
        density_power = std::max(density_power, t.power);
      }
      lines.push_back({*k0, w, c, t.power});
    }

  SpectralSeries s;
  s.kernel = kernel;
  if (has_full) {
    s.lambda_cap = double(torus_full_lattice_cap);
    density_coeff += 2 * std::numbers::pi * std::abs(full_lattice) + 8;
    density_power = std::max(density_power, full_power + 1);
  }
  s.density = {density_coeff, density_power, density_const};
  s.enumerate = [lines, has_full, full_lattice, full_power](double Lam, const TermVisitor& vis) {
    for (const auto& ln : lines) {
      auto emit = [&](long x, long y) {
        if (x == 0 && y == 0) return;
        const double r = std::hypot(double(x), double(y));
        if (r <= Lam) vis(r, ln.c * std::pow(r, double(ln.power)));
      };
      if (ln.w == std::pair<long, long>{0, 0}) {
        emit(ln.k0.first, ln.k0.second);
        continue;
      }
      // |k0 + j w|^2 <= Lam^2
      const double ww = double(ln.w.first * ln.w.first + ln.w.second * ln.w.second);
      const double kw = double(ln.k0.first * ln.w.first + ln.k0.second * ln.w.second);
      const double kk = double(ln.k0.first * ln.k0.first + ln.k0.second * ln.k0.second);
      const double disc = kw * kw - ww * (kk - Lam * Lam);
      if (disc < 0) continue;
      const long jlo = static_cast<long>(std::floor((-kw - std::sqrt(disc)) / ww)) - 1;
      const long jhi = static_cast<long>(std::ceil((-kw + std::sqrt(disc)) / ww)) + 1;
      for (long j = jlo; j <= jhi; ++j) emit(ln.k0.first + j * ln.w.first, ln.k0.second + j * ln.w.second);
    }
    if (has_full) {
      const long R = static_cast<long>(std::floor(Lam));
      for (long x = -R; x <= R; ++x)
        for (long y = -R; y <= R; ++y) {
          if (x == 0 && y == 0) continue;
          const double r = std::hypot(double(x), double(y));
          if (r <= Lam) vis(r, full_lattice * std::pow(r, double(full_power)));
        }
    }
  };
  return s;
}

/// res_{z=0} Tr(D^{-z} A U_g) for a torus operator A.
inline ResidueValue tau_g(const TorusAction& act, std::size_t g, const TorusOperator& op,
                          DChoice D = DChoice::standard, const ContinuationOptions& opt = {}) {
  const IntMatrix2 B = detail::inverse_transpose(act.elements[g]);
  const int k_g = 2 - detail::int_rank({1 - B.a, -B.b, -B.c, 1 - B.d});
  const int d = k_g + op.order();
  return detail::residue_from_series(torus_operator_series(act, g, op), d, D, opt);
}

/// sum_g A_g g with torus operators A_g.
struct TorusCrossElement {
  TorusAction action;
  std::map<std::size_t, TorusOperator> parts;
};

/// Tr_R over a conjugacy class: sum of tau_g(A_g) for g in the class.
template <class Element>
inline cplx trace_on_class(const Element& X, std::size_t cls, DChoice D = DChoice::standard) {
  const auto& G = *X.action.group;
  require(cls < G.class_count(), ErrorKind::invalid_parameter, "class out of range");
  cplx s = 0;
  for (auto g : G.classes()[cls].elements) {
    auto it = X.parts.find(g);
    if (it != X.parts.end()) s += tau_g(X.action, g, it->second, D).value;
  }
  return s;
}

/// (1/|G|) sum_g conj(chi_pi(g)) tau_g(A_g), as a class-weighted sum of class traces.
template <class Element>
inline cplx tau_pi(const Element& X, const ClassFunction& chi, DChoice D = DChoice::standard) {
  const auto& G = *X.action.group;
  require(chi.values.size() == G.class_count(), ErrorKind::character_inconsistency, "character has wrong length");
  cplx s = 0;
  for (std::size_t c = 0; c < G.class_count(); ++c) {
    if (chi.values[c] == cplx(0)) continue;
    bool any = false;
    for (auto g : G.classes()[c].elements) any = any || X.parts.count(g);
    if (any) s += std::conj(chi.values[c]) * trace_on_class(X, c, D);
  }
  return s / double(G.order());
}

// ---------------------------------------------------------------- local formula

enum class LocalModel { circle_identity, torus_swap };

/// The constant in W, fixed once on torus-swap with A = D^{-1} against the closed-form residue sqrt 2.
struct Calibration {
  double C = 1;
  cplx raw = 0;        // W with C = 1
  cplx reference = 0;  // closed-form spectral residue
  cplx spectral = 0;   // heat-fit residue for the same pair
};

struct LocalResidue {
  cplx value = 0;
  std::vector<cplx> by_depth;  // contribution of each j before calibration
};

namespace detail {

/// Periodic trapezoid rule, exact for trigonometric polynomials of degree < N.
inline cplx periodic_mean(const std::function<cplx(double)>& f, double period, int N) {
  cplx s = 0;
  for (int i = 0; i < N; ++i) s += f(period * double(i) / double(N));
  return s / double(N);
}

}  // namespace detail

/// W on S*S^1 for the identity class: (2 pi)^{-1} sum over both branches of the integral of a_{-1}.
inline LocalResidue local_residue_W(const CircleSymbol& sym, int depth = 0, double C = 1.0) {
  require(depth >= 0, ErrorKind::invalid_parameter, "negative depth");
  using std::numbers::pi;
  LocalResidue out;
  const auto a = sym.homogeneous(-1);
  const int N = static_cast<int>(2 * sym.fmax() + 8);
  cplx raw = 0;
  for (const auto& br : a) raw += 2 * pi * detail::periodic_mean([&](double th) { return br(th); }, 2 * pi, N);
  // no normal directions: the j >= 1 terms vanish identically
  out.by_depth.assign(static_cast<std::size_t>(depth + 1), cplx(0));
  out.by_depth[0] = raw / (2 * pi);
  out.value = C * out.by_depth[0];
  return out;
}

/// W on S*M^g for the swap (x, y) -> (y, x): M^g the diagonal, normal coordinates (x2, eta2) with phase 2 x2 eta2.
inline LocalResidue local_residue_W(const TorusOperator& op, int depth = 0, double C = 1.0) {
  require(depth >= 0 && depth <= 3, ErrorKind::invalid_parameter, "depth must be in [0, 3]");
  using std::numbers::pi;
  const double r2 = std::numbers::sqrt2;
  const int k_g = 1;
  const double length = 2 * pi * r2;
  const int N = static_cast<int>(4 * op.fmax() + 16);
  LocalResidue out;
  for (int j = 0; j <= depth; ++j) {
    std::vector<const TorusOperator::Term*> comp;
    for (const auto& t : op.terms)
      if (t.power == -k_g + j) comp.push_back(&t);
    cplx total = 0;
    if (!comp.empty()) {
      for (int sigma : {1, -1}) {
        auto at_x1 = [&](double x1) {
          PhaseProblem p;
          p.n = 2;
          p.f = [](const Point& q) { return cplx(2 * q[0] * q[1]); };
          p.f_jet = [](int order) {
            TaylorPoly t(2, std::max(order, 2));
            t(1, 1) = 2;
            return t;
          };
          p.u = [&, x1, sigma](const Point& q) {
            const double x = (x1 + q[0]) / r2, y = (x1 - q[0]) / r2;
            const double xi = (sigma + q[1]) / r2, eta = (sigma - q[1]) / r2;
            const double nrm = std::hypot(xi, eta);
            cplx s = 0;
            for (const auto* t : comp) {
              cplx m = 0;
              for (const auto& [v, c] : t->multiplier) m += c * std::exp(cplx(0, double(v.first) * x + double(v.second) * y));
              s += m * std::pow(nrm, double(t->power));
            }
            return s;
          };
          p.fd_scale = 0.1;
          return lj_apply(p, j);
        };
        total += length * detail::periodic_mean(at_x1, length, N);
      }
    }
    out.by_depth.push_back(total / (4 * pi * pi));
  }
  for (auto v : out.by_depth) out.value += C * v;
  return out;
}

/// Calibrates C on torus-swap with A = D^{-1}.
inline Calibration calibrate_local_residue() {
  Calibration cal;
  cal.raw = local_residue_W(TorusOperator::power(-1)).value;
  cal.reference = std::numbers::sqrt2;
  require(std::abs(cal.raw) > 0, ErrorKind::numeric_precision, "local formula vanishes on the calibration pair");
  cal.C = (cal.reference / cal.raw).real();
  const auto swap = torus_named_action("swap");
  cal.spectral = tau_g(swap, 1, TorusOperator::power(-1)).value;
  return cal;
}

}  // namespace eqres

#pragma once

// Weighted spectral sums  sum_i w_i lambda_i^{-z}  as consumed by the zeta engine.
//
// A series is described by an enumerator over its positive eigenvalues, a
// zero-mode constant, a density bound for certified tails, and optionally an
// exact arithmetic-progression description of its terms beyond some point.

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "eqres/group.hpp"
#include "eqres/special.hpp"

namespace eqres {

using TermVisitor = std::function<void(double lambda, cplx weight)>;

/// Terms lambda_l = scale*l + shift (l >= first) with weight sum_t coeff_t[l mod period] * l^power_t.
struct Progression {
  struct Term {
    double power = 0;
    std::vector<cplx> coeff;  // one entry per residue class mod period
  };
  double scale = 1;
  double shift = 0;
  long first = 1;
  long period = 1;
  std::vector<Term> terms;

  double lambda(long l) const { return scale * double(l) + shift; }

  cplx weight(long l) const {
    cplx w = 0;
    for (const auto& t : terms) w += t.coeff[static_cast<std::size_t>(l % period)] * std::pow(double(l), t.power);
    return w;
  }

  /// Smallest index whose eigenvalue exceeds Lambda.
  long first_beyond(double Lambda) const {
    long l = std::max(first, static_cast<long>(std::floor((Lambda - shift) / scale)) - 1);
    while (lambda(l) <= Lambda) ++l;
    return l;
  }

  /// sum_{l >= l0} w_l * lambda_l^{-z}, exact up to Hurwitz-zeta evaluation.
  /// Valid where the Dirichlet series converges or is continued; expands
  /// (scale*l + shift)^{-z} binomially in shift/(scale*l).
  cplx tail(long l0, cplx z) const {
    cplx total = 0;
    const double ratio = shift / scale;
    for (long r = 0; r < period; ++r) {
      // first l >= l0 with l = r mod period
      long l = l0 + ((r - l0 % period) % period + period) % period;
      const double q = double(l) / double(period);
      for (const auto& t : terms) {
        const cplx c = t.coeff[static_cast<std::size_t>(r)];
        if (c == cplx(0)) continue;
        // l^power (scale l)^{-z} (1 + ratio/l)^{-z}
        cplx binom = 1;
        for (int m = 0; m < 60; ++m) {
          if (m > 0) binom *= (-z - double(m - 1)) / double(m);
          const cplx s = z + double(m) - t.power;
          const cplx piece = binom * std::pow(ratio, m) * scaled_hurwitz(s, q, double(period));
          total += c * std::pow(scale, -z) * piece;
          if (ratio == 0.0 || std::abs(piece) < 1e-18) break;
        }
      }
    }
    return total;
  }
};

/// |weight density| <= coeff * lambda^power + constant, used for tail bounds.
struct DensityBound {
  double coeff = 0;
  int power = 0;
  double constant = 0;

  /// Bound on  sum_{lambda_i > Lambda} |w_i| e^{-t lambda_i}  via  int_Lambda^inf rho(l) e^{-t l} dl.
  double heat_tail(double Lambda, double t) const {
    // int_L^inf l^p e^{-tl} dl = e^{-tL} sum_{k=0}^p p!/k! L^k / t^{p-k+1}
    double poly = 0, fact_ratio = 1;
    for (int k = power; k >= 0; --k) {
      poly += fact_ratio * std::pow(Lambda, k) / std::pow(t, power - k + 1);
      fact_ratio *= k;  // p!/(k-1)!
    }
    // include one extra level to cover the discrete step at Lambda
    const double step = coeff * std::pow(Lambda + 1.0, power) + constant;
    return std::exp(-t * Lambda) * (coeff * poly + constant / t + step);
  }
};

struct SpectralSeries {
  /// Visits every term with 0 < lambda <= Lambda (any order, duplicates allowed).
  std::function<void(double Lambda, const TermVisitor&)> enumerate;
  /// Largest Lambda the enumerator supports.
  double lambda_cap = std::numeric_limits<double>::infinity();
  /// Zero-mode contribution: enters heat traces as a constant, never residues.
  cplx kernel = 0;
  DensityBound density;
  /// Mean weighted counting function N(lambda) ~ coeff * lambda^power, for tails without a progression.
  struct MeanCount {
    double coeff;
    double power;
  };
  std::optional<MeanCount> mean_count;
  /// Exact description of the terms with index >= progression->first.
  std::optional<Progression> progression;
  /// Multiplies every weight by lambda^power (the operator D^power).
  double lambda_power = 0;
  /// Uses lambda + perturbation/lambda in place of lambda in exponents.
  double inverse_perturbation = 0;

  double effective(double lambda) const {
    return inverse_perturbation == 0 ? lambda : lambda + inverse_perturbation / lambda;
  }
  cplx weight(double lambda, cplx w) const {
    return lambda_power == 0 ? w : w * std::pow(lambda, lambda_power);
  }

  /// Returns the series for D^power A in place of A.
  SpectralSeries times_power(double power) const {
    SpectralSeries s = *this;
    s.lambda_power += power;
    if (power > 0) s.density.power += static_cast<int>(std::ceil(power));
    return s;
  }

  /// Replaces D by D + c D^{-1} in the exponent.
  SpectralSeries perturbed(double c) const {
    SpectralSeries s = *this;
    s.inverse_perturbation += c;
    s.progression.reset();
    s.mean_count.reset();
    return s;
  }
};

}  // namespace eqres

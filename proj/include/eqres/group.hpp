#pragma once

// Finite groups given by multiplication tables, their conjugacy classes,
// and closed-form character tables for the cyclic and dihedral families.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <cstddef>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "eqres/error.hpp"

namespace eqres {

using cplx = std::complex<double>;

/// Rounding tolerance for multiplicities and characters expected to be integers.
inline constexpr double integrality_tol = 1e-9;

enum class GroupFamily { cyclic, dihedral, other };

struct ConjugacyClass {
  std::vector<std::size_t> elements;  // sorted
  std::size_t representative = 0;     // smallest element index
  std::size_t size() const { return elements.size(); }
};

class FiniteGroup {
 public:
  FiniteGroup(std::vector<std::vector<std::size_t>> table, std::vector<std::string> labels,
              GroupFamily family = GroupFamily::other, int family_param = 0)
      : mul_(std::move(table)), labels_(std::move(labels)), family_(family), param_(family_param) {
    const std::size_t n = mul_.size();
    require(n >= 1, ErrorKind::invalid_parameter, "group must be nonempty");
    require(labels_.size() == n, ErrorKind::invalid_parameter, "one label per element");
    for (const auto& row : mul_) {
      require(row.size() == n, ErrorKind::invalid_parameter, "multiplication table must be square");
      for (auto v : row) require(v < n, ErrorKind::invalid_parameter, "table entry out of range");
    }
    find_identity_and_inverses();
    build_classes();
  }

  std::size_t order() const { return mul_.size(); }
  std::size_t mul(std::size_t a, std::size_t b) const { return mul_[a][b]; }
  std::size_t identity() const { return identity_; }
  std::size_t inverse(std::size_t a) const { return inverse_[a]; }
  const std::string& label(std::size_t a) const { return labels_[a]; }
  const std::vector<std::string>& labels() const { return labels_; }
  GroupFamily family() const { return family_; }
  int family_param() const { return param_; }

  const std::vector<ConjugacyClass>& classes() const { return classes_; }
  std::size_t class_count() const { return classes_.size(); }
  std::size_t class_of(std::size_t a) const { return class_of_[a]; }
  std::size_t identity_class() const { return class_of_[identity_]; }

  std::string name() const {
    switch (family_) {
      case GroupFamily::cyclic: return "cyclic:" + std::to_string(param_);
      case GroupFamily::dihedral: return "dihedral:" + std::to_string(param_);
      case GroupFamily::other: break;
    }
    return "order-" + std::to_string(order());
  }

  /// Exhaustive associativity check over all triples.
  bool is_associative() const {
    const std::size_t n = order();
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        for (std::size_t c = 0; c < n; ++c)
          if (mul(mul(a, b), c) != mul(a, mul(b, c))) return false;
    return true;
  }

 private:
  void find_identity_and_inverses() {
    const std::size_t n = order();
    std::optional<std::size_t> id;
    for (std::size_t e = 0; e < n && !id; ++e) {
      bool ok = true;
      for (std::size_t a = 0; a < n && ok; ++a) ok = mul(e, a) == a && mul(a, e) == a;
      if (ok) id = e;
    }
    require(id.has_value(), ErrorKind::invalid_parameter, "table has no two-sided identity");
    identity_ = *id;
    inverse_.assign(n, n);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        if (mul(a, b) == identity_ && mul(b, a) == identity_) {
          inverse_[a] = b;
          break;
        }
    for (auto v : inverse_) require(v < n, ErrorKind::invalid_parameter, "element without inverse");
  }

  void build_classes() {
    const std::size_t n = order();
    class_of_.assign(n, n);
    for (std::size_t a = 0; a < n; ++a) {
      if (class_of_[a] < n) continue;
      ConjugacyClass c;
      for (std::size_t h = 0; h < n; ++h) c.elements.push_back(mul(mul(h, a), inverse_[h]));
      std::sort(c.elements.begin(), c.elements.end());
      c.elements.erase(std::unique(c.elements.begin(), c.elements.end()), c.elements.end());
      c.representative = c.elements.front();
      for (auto e : c.elements) class_of_[e] = classes_.size();
      classes_.push_back(std::move(c));
    }
  }

  std::vector<std::vector<std::size_t>> mul_;
  std::vector<std::string> labels_;
  GroupFamily family_;
  int param_;
  std::size_t identity_ = 0;
  std::vector<std::size_t> inverse_;
  std::vector<ConjugacyClass> classes_;
  std::vector<std::size_t> class_of_;
};

using GroupPtr = std::shared_ptr<const FiniteGroup>;

/// Z/N with element k standing for rotation r^k.
inline GroupPtr make_cyclic(int N) {
  require(N >= 1, ErrorKind::invalid_parameter, "cyclic group needs N >= 1");
  const auto n = static_cast<std::size_t>(N);
  std::vector<std::vector<std::size_t>> t(n, std::vector<std::size_t>(n));
  std::vector<std::string> labels(n);
  for (std::size_t a = 0; a < n; ++a) {
    labels[a] = a == 0 ? "e" : "r^" + std::to_string(a);
    for (std::size_t b = 0; b < n; ++b) t[a][b] = (a + b) % n;
  }
  return std::make_shared<const FiniteGroup>(std::move(t), std::move(labels), GroupFamily::cyclic, N);
}

/// D_N of order 2N. Index k < N is r^k, index N + k is s r^k, with s r s = r^{-1}.
inline GroupPtr make_dihedral(int N) {
  require(N >= 2, ErrorKind::invalid_parameter, "dihedral group needs N >= 2");
  const auto n = static_cast<std::size_t>(N);
  auto decode = [n](std::size_t x) { return std::pair{x >= n, x % n}; };
  std::vector<std::vector<std::size_t>> t(2 * n, std::vector<std::size_t>(2 * n));
  std::vector<std::string> labels(2 * n);
  for (std::size_t a = 0; a < 2 * n; ++a) {
    auto [sa, ka] = decode(a);
    labels[a] = sa ? (ka == 0 ? "s" : "sr^" + std::to_string(ka)) : (ka == 0 ? "e" : "r^" + std::to_string(ka));
    for (std::size_t b = 0; b < 2 * n; ++b) {
      auto [sb, kb] = decode(b);
      // s^sa r^ka s^sb r^kb = s^{sa+sb} r^{(sb ? -ka : ka) + kb}
      const std::size_t k = ((sb ? n - ka : ka) + kb) % n;
      t[a][b] = ((sa != sb) ? n : 0) + k;
    }
  }
  return std::make_shared<const FiniteGroup>(std::move(t), std::move(labels), GroupFamily::dihedral, N);
}

/// A complex value per conjugacy class.
struct ClassFunction {
  std::vector<cplx> values;

  std::size_t size() const { return values.size(); }
  cplx operator[](std::size_t c) const { return values[c]; }
  cplx& operator[](std::size_t c) { return values[c]; }
};

struct CharacterTable {
  GroupPtr group;
  std::vector<ClassFunction> irreps;
  std::vector<int> dims;
  std::vector<std::string> names;

  std::size_t size() const { return irreps.size(); }

  std::size_t find(const std::string& irrep_name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == irrep_name) return i;
    fail(ErrorKind::invalid_parameter, "unknown irrep '" + irrep_name + "' for " + group->name());
  }
};

namespace detail {

inline CharacterTable tabulate(const GroupPtr& g, const std::vector<std::string>& names,
                               const std::vector<std::function<cplx(std::size_t)>>& chars) {
  CharacterTable t;
  t.group = g;
  t.names = names;
  for (const auto& chi : chars) {
    ClassFunction row;
    for (const auto& c : g->classes()) row.values.push_back(chi(c.representative));
    t.dims.push_back(static_cast<int>(std::lround(row[g->identity_class()].real())));
    t.irreps.push_back(std::move(row));
  }
  return t;
}

}  // namespace detail

/// Closed-form character table. Only the cyclic and dihedral families are supported.
inline CharacterTable character_table(const GroupPtr& g) {
  using std::numbers::pi;
  const int N = g->family_param();
  std::vector<std::string> names;
  std::vector<std::function<cplx(std::size_t)>> chars;
  if (g->family() == GroupFamily::cyclic) {
    for (int j = 0; j < N; ++j) {
      names.push_back(j == 0 ? "trivial" : (N == 2 ? "sign" : "chi" + std::to_string(j)));
      chars.push_back([j, N](std::size_t k) {
        return std::polar(1.0, 2 * pi * double((static_cast<long>(j) * static_cast<long>(k)) % N) / N);
      });
    }
  } else if (g->family() == GroupFamily::dihedral) {
    const auto n = static_cast<std::size_t>(N);
    auto refl = [n](std::size_t x) { return x >= n; };
    auto rot = [n](std::size_t x) { return static_cast<long>(x % n); };
    names = {"trivial", "sign"};
    chars.push_back([](std::size_t) { return cplx(1.0); });
    chars.push_back([refl](std::size_t x) { return cplx(refl(x) ? -1.0 : 1.0); });
    if (N % 2 == 0) {
      names.push_back("alt_r");
      chars.push_back([rot](std::size_t x) { return cplx(rot(x) % 2 ? -1.0 : 1.0); });
      names.push_back("alt_rs");
      chars.push_back([rot, refl](std::size_t x) { return cplx(((rot(x) % 2) != 0) != refl(x) ? -1.0 : 1.0); });
    }
    for (int h = 1; 2 * h < N; ++h) {
      names.push_back("rho" + std::to_string(h));
      chars.push_back([h, N, refl, rot](std::size_t x) {
        return refl(x) ? cplx(0.0) : cplx(2 * std::cos(2 * pi * double((h * rot(x)) % N) / N));
      });
    }
  } else {
    fail(ErrorKind::unsupported_group, "no closed-form character table for " + g->name());
  }
  return detail::tabulate(g, names, chars);
}

/// <chi, pi> = (1/|G|) sum_g conj(pi(g)) chi(g), summed class by class.
inline cplx multiplicity(const ClassFunction& chi, const ClassFunction& pi, const FiniteGroup& g) {
  require(chi.size() == g.class_count() && pi.size() == g.class_count(), ErrorKind::invalid_parameter,
          "class function does not match the group's class list");
  cplx acc = 0;
  for (std::size_t c = 0; c < g.class_count(); ++c)
    acc += double(g.classes()[c].size()) * std::conj(pi[c]) * chi[c];
  return acc / double(g.order());
}

/// Integer value of a multiplicity, or nullopt when it is not within tolerance of one.
inline std::optional<long> round_multiplicity(cplx m, double tol = integrality_tol) {
  const double r = std::round(m.real());
  if (std::abs(m.imag()) > tol || std::abs(m.real() - r) > tol) return std::nullopt;
  return static_cast<long>(r);
}

/// Largest deviation from row and column orthogonality of a character table.
inline double orthogonality_error(const CharacterTable& t) {
  const auto& g = *t.group;
  double err = 0;
  for (std::size_t a = 0; a < t.size(); ++a)
    for (std::size_t b = 0; b < t.size(); ++b) {
      const cplx ip = multiplicity(t.irreps[a], t.irreps[b], g);
      err = std::max(err, std::abs(ip - cplx(a == b ? 1.0 : 0.0)));
    }
  // Columns: sum_pi chi_pi(c) conj(chi_pi(c')) = delta_{cc'} |G|/|c|
  for (std::size_t c = 0; c < g.class_count(); ++c)
    for (std::size_t d = 0; d < g.class_count(); ++d) {
      cplx s = 0;
      for (const auto& row : t.irreps) s += row[c] * std::conj(row[d]);
      const double expect = c == d ? double(g.order()) / double(g.classes()[c].size()) : 0.0;
      err = std::max(err, std::abs(s - expect));
    }
  return err;
}

}  // namespace eqres

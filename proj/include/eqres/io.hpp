#pragma once

// Serialization: floats with 17 significant digits in CSV, JSON records for
// the result types, the spectrum export, and the structured-text symbol file
//
//   [symbol]
//   order = -1
//   [component.0]
//   plus  = 0:1             # m:value tokens, value re | re+imj | imj
//   minus = 0:1 1:0.5-0.25j

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "eqres/asymptotics.hpp"
#include "eqres/residue.hpp"
#include "eqres/stationary_phase.hpp"
#include "eqres/zeta.hpp"

namespace eqres {

using json = nlohmann::json;

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// re+imj
inline std::string fmt_complex(cplx z) {
  std::string im = fmt17(z.imag());
  if (im[0] != '-') im = "+" + im;
  return fmt17(z.real()) + im + "j";
}

inline cplx parse_complex(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  require(!s.empty(), ErrorKind::invalid_parameter, "empty complex literal");
  try {
    if (s.back() != 'j' && s.back() != 'i') return std::stod(s);
    s.pop_back();
    // split at the last sign that is not an exponent sign
    std::size_t cut = std::string::npos;
    for (std::size_t i = s.size(); i-- > 1;)
      if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
        cut = i;
        break;
      }
    if (cut == std::string::npos) {
      const bool bare = s.empty() || s == "+" || s == "-";
      return {0.0, bare ? (s == "-" ? -1.0 : 1.0) : std::stod(s)};
    }
    const std::string re = s.substr(0, cut), im = s.substr(cut);
    const double imv = (im == "+" || im == "-") ? (im == "-" ? -1.0 : 1.0) : std::stod(im);
    return {std::stod(re), imv};
  } catch (const std::logic_error&) {
    fail(ErrorKind::invalid_parameter, "bad complex literal '" + text + "'");
  }
}

// ---------------------------------------------------------------- CSV

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add(const std::vector<double>& values) {
    std::vector<std::string> r;
    for (double v : values) r.push_back(fmt17(v));
    add_text(std::move(r));
  }
  void add_text(std::vector<std::string> cells) {
    require(cells.size() == header_.size(), ErrorKind::invalid_parameter, "CSV row width does not match the header");
    rows_.push_back(std::move(cells));
  }
  std::size_t rows() const { return rows_.size(); }

  void write(std::ostream& os) const {
    write_row(os, header_);
    for (const auto& r : rows_) write_row(os, r);
  }
  void save(const std::string& path) const {
    std::ofstream f(path);
    require(f.good(), ErrorKind::invalid_parameter, "cannot write " + path);
    write(f);
  }

 private:
  static void write_row(std::ostream& os, const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
    os << '\n';
  }
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

inline void save_json(const json& j, const std::string& path) {
  std::ofstream f(path);
  require(f.good(), ErrorKind::invalid_parameter, "cannot write " + path);
  f << j.dump(2) << '\n';
}

// ---------------------------------------------------------------- JSON records

inline json to_json(cplx z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

inline json to_json(const FixedSetInfo& f, const FiniteGroup& G) {
  json classes = json::array();
  for (std::size_t c = 0; c < f.classes.size(); ++c) {
    const auto& k = f.classes[c];
    json e{{"class", c},
           {"representative", G.labels()[G.classes()[c].representative]},
           {"k_g", k.empty() ? json("empty") : json(k.k_g)},
           {"cosphere_fixed_nonempty", k.cosphere_fixed_nonempty}};
    e["atiyah_bott"] = k.atiyah_bott ? json(*k.atiyah_bott) : json(nullptr);
    classes.push_back(e);
  }
  return json{{"manifold_dim", f.manifold_dim}, {"classes", classes}};
}

inline json spectrum_metadata(const EquivariantSpectrum& s) {
  return json{{"model", to_string(s.model)},
              {"group", s.group->name()},
              {"action", s.action},
              {"truncation", s.truncation},
              {"levels", s.levels.size()},
              {"kernel_dim", s.kernel.dim},
              {"fixed_sets", to_json(s.fixed, *s.group)}};
}

/// lambda,dim,class_0,...,class_{c-1}; the kernel is the row at lambda = 0.
inline CsvTable spectrum_table(const EquivariantSpectrum& s) {
  std::vector<std::string> h{"lambda", "dim"};
  for (std::size_t c = 0; c < s.class_count(); ++c) h.push_back("class_" + std::to_string(c));
  CsvTable t(h);
  auto row = [&](double l, long d, const ClassFunction& chi) {
    std::vector<std::string> r{fmt17(l), std::to_string(d)};
    for (std::size_t c = 0; c < chi.size(); ++c) r.push_back(fmt_complex(chi[c]));
    t.add_text(std::move(r));
  };
  if (s.kernel.dim > 0) row(0.0, s.kernel.dim, s.kernel.chi);
  for (const auto& l : s.levels) row(l.lambda, l.dim, l.chi);
  return t;
}

inline json to_json(const FitReport& f) {
  json cols = json::array();
  for (std::size_t i = 0; i < f.columns.size(); ++i)
    cols.push_back({{"term", f.columns[i].label()}, {"coefficient", to_json(f.coefficients[i])}});
  json j{{"residual", f.residual}, {"condition", f.condition}, {"t_min", f.t_min}, {"t_max", f.t_max},
         {"points", f.points},     {"reliable", f.reliable},   {"columns", cols}};
  if (f.bogus_coefficient) j["bogus_coefficient"] = to_json(*f.bogus_coefficient);
  return j;
}

inline json to_json(const MeromorphicZeta& mz) {
  json poles = json::array();
  for (const auto& p : mz.poles) poles.push_back({{"s", p.s}, {"residue_re", p.residue.real()}, {"residue_im", p.residue.imag()}});
  return json{{"d", mz.d}, {"depth", mz.depth}, {"poles", poles}, {"fit_report", to_json(mz.fit)}};
}

inline json to_json(const ResidueValue& r) {
  return json{{"value", to_json(r.value)}, {"d", r.d},         {"fit_residual", r.fit_residual}, {"condition", r.condition},
              {"t_min", r.t_min},         {"levels", r.levels}, {"tail_residual", r.tail_residual}};
}

inline json to_json(const Calibration& c) {
  return json{{"C", c.C}, {"raw", to_json(c.raw)}, {"reference", to_json(c.reference)}, {"spectral", to_json(c.spectral)},
              {"case", "torus swap, D^-1"}};
}

inline json to_json(const AsymptoticFit& f) {
  json j{{"exponent", f.exponent},
         {"constant", f.constant},
         {"per_dimension", f.per_dimension},
         {"window", {f.window.first, f.window.second}},
         {"spread", f.spread}};
  j["loglog_slope"] = f.loglog_slope ? json(*f.loglog_slope) : json(nullptr);
  return j;
}

inline json to_json(const TauberianReport& r) {
  return json{{"s0", r.s0},
              {"residue", to_json(r.residue)},
              {"expected_slope", r.expected_slope},
              {"slope", r.slope},
              {"deviation", r.deviation},
              {"monotone", r.monotone},
              {"vanishes_below_one", r.vanishes_below_one}};
}

inline json to_json(const DixmierResult& d) {
  return json{{"terms", d.terms}, {"limit", d.limit}, {"spread", d.spread}};
}

// ---------------------------------------------------------------- symbol files

inline CircleSymbol parse_symbol(std::istream& in) {
  CLI::ConfigINI ini;
  std::vector<CLI::ConfigItem> items;
  try {
    items = ini.from_config(in);
  } catch (const CLI::Error& e) {
    fail(ErrorKind::invalid_parameter, std::string("symbol file: ") + e.what());
  }
  CircleSymbol sym;
  bool have_order = false;
  for (const auto& it : items) {
    if (it.name == "++" || it.name == "--") continue;
    const std::string where = (it.parents.empty() ? std::string() : it.parents.front()) + "." + it.name;
    if (it.parents.size() == 1 && it.parents[0] == "symbol" && it.name == "order") {
      require(it.inputs.size() == 1, ErrorKind::invalid_parameter, "symbol.order needs one value");
      try {
        sym.order = std::stoi(it.inputs[0]);
      } catch (const std::logic_error&) {
        fail(ErrorKind::invalid_parameter, "symbol.order must be an integer");
      }
      have_order = true;
      continue;
    }
    require(it.parents.size() == 2 && it.parents[0] == "component" && (it.name == "plus" || it.name == "minus"),
            ErrorKind::invalid_parameter, "unknown key '" + where + "' in symbol file");
    std::size_t j = 0;
    try {
      j = std::stoul(it.parents[1]);
    } catch (const std::logic_error&) {
      fail(ErrorKind::invalid_parameter, "component index must be a nonnegative integer");
    }
    require(j < 64, ErrorKind::invalid_parameter, "component index too large");
    if (sym.components.size() <= j) sym.components.resize(j + 1);
    FourierPoly& P = sym.components[j][it.name == "plus" ? 0 : 1];
    for (const auto& tok : it.inputs) {
      std::stringstream ss(tok);
      std::string piece;
      while (std::getline(ss, piece, ',')) {
        if (piece.find_first_not_of(" \t") == std::string::npos) continue;
        const auto colon = piece.find(':');
        require(colon != std::string::npos, ErrorKind::invalid_parameter, "coefficient '" + piece + "' is not m:value");
        long m = 0;
        try {
          m = std::stol(piece.substr(0, colon));
        } catch (const std::logic_error&) {
          fail(ErrorKind::invalid_parameter, "bad frequency in '" + piece + "'");
        }
        P.coeff[m] += parse_complex(piece.substr(colon + 1));
      }
    }
  }
  require(have_order, ErrorKind::invalid_parameter, "symbol file lacks [symbol] order");
  require(!sym.components.empty(), ErrorKind::invalid_parameter, "symbol file has no components");
  return sym;
}

inline CircleSymbol read_symbol_file(const std::string& path) {
  std::ifstream f(path);
  require(f.good(), ErrorKind::invalid_parameter, "cannot read symbol file " + path);
  return parse_symbol(f);
}

inline json to_json(const CircleSymbol& s) {
  json comps = json::array();
  for (const auto& c : s.components) {
    json e;
    for (int b = 0; b < 2; ++b) {
      json list = json::array();
      for (const auto& [m, v] : c[static_cast<std::size_t>(b)].coeff) list.push_back({{"m", m}, {"value", to_json(v)}});
      e[b == 0 ? "plus" : "minus"] = list;
    }
    comps.push_back(e);
  }
  return json{{"order", s.order}, {"components", comps}};
}

}  // namespace eqres

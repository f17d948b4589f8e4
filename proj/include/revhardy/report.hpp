#pragma once

// JSON and CSV views of the verification reports.
//
// Keys keep insertion order. Non-finite reals are written as the strings
// "nan", "inf" and "-inf" so every report stays valid JSON and reads back
// to the same value.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "revhardy/bilinear.hpp"
#include "revhardy/estimate.hpp"
#include "revhardy/hardy.hpp"
#include "revhardy/verdict.hpp"

namespace revhardy {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

inline Json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline double number_from(const Json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  fail(ErrorKind::ConfigError, "not a number: '" + s + "'");
}

inline Json numbers(const std::vector<double>& vs) {
  Json out = Json::array();
  for (double v : vs) out.push_back(number(v));
  return out;
}

/// FNV-1a over the bytes of s, as 16 hex digits.
inline std::string fnv1a_hex(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline Json to_json(const MCEstimate& e) {
  return Json{{"mean", number(e.mean)},
              {"std_error", number(e.std_error)},
              {"n_samples", e.n_samples},
              {"seed", e.seed}};
}

inline Json to_json(const ExponentPair& e) {
  return Json{{"p", number(e.p)}, {"q", number(e.q)}, {"p_conj", number(e.p_conj)}, {"q_conj", number(e.q_conj)}};
}

inline Json to_json(const DProfile& prof) {
  return Json{{"kind", prof.conjugate ? "D2" : "D1"},
              {"radii", numbers(prof.radii)},
              {"values", numbers(prof.values)},
              {"infimum", number(prof.infimum)},
              {"argmin", prof.radii.empty() ? number(std::numeric_limits<double>::quiet_NaN()) : number(prof.radii[prof.argmin])},
              {"monotone", std::string(to_string(prof.monotone))},
              {"constant", prof.constant},
              {"spread", number(prof.spread())}};
}

inline Json to_json(const HardyReport& r) {
  Json ratios = Json::array();
  for (const auto& x : r.ratios) {
    Json j{{"f", x.descriptor}, {"ratio", number(x.value)}};
    if (!x.error.empty()) j["error"] = x.error;
    ratios.push_back(j);
  }
  Json extremal = Json::array();
  for (const auto& x : r.extremal) {
    Json j{{"A", number(x.amplitude)}, {"t", number(x.t)}, {"ratio", number(x.value)}};
    if (!x.error.empty()) j["error"] = x.error;
    extremal.push_back(j);
  }
  return Json{{"inequality", r.conjugate ? "conjugate_hardy" : "hardy"},
              {"exponents", to_json(r.exps)},
              {"u", r.u},
              {"v", r.v},
              {"D", number(r.D)},
              {"bounds", {{"c_lower", number(r.c_lower)}, {"c_upper", number(r.c_upper)}, {"factor", number(r.factor)}}},
              {"profile", to_json(r.profile)},
              {"min_ratio", number(r.min_ratio)},
              {"min_extremal", number(r.min_extremal)},
              {"margin", number(r.margin)},
              {"ratios", ratios},
              {"extremal", extremal},
              {"diagnostics", r.diagnostics}};
}

inline Json to_json(const IdentityReport& r) {
  Json rows = Json::array();
  for (const auto& x : r.rows) {
    rows.push_back(Json{{"t", number(x.t)},
                        {"W", number(x.W)},
                        {"h", number(x.h)},
                        {"H1", number(x.H1)},
                        {"expected", number(x.expected)},
                        {"rel_error", number(x.rel_error)},
                        {"holds", x.holds}});
  }
  return Json{{"rows", rows}, {"max_rel_error", number(r.max_rel_error)}, {"holds", r.holds}};
}

inline Json to_json(const FormResult& f) {
  Json j;
  if (f.divergent) {
    j["divergent"] = true;
    j["reason"] = f.reason;
  } else {
    j["estimate"] = to_json(f.estimate);
  }
  j["truncated"] = f.truncated;
  j["truncation_radius"] = number(f.truncation_radius);
  j["failed_conditions"] = f.failed_conditions;
  return j;
}

inline Json to_json(const ChainStep& s) {
  return Json{{"step", s.name}, {"holds", s.holds}, {"skipped", s.skipped}, {"detail", s.detail}};
}

inline Json to_json(const SWParams& sp) {
  return Json{{"space", sp.space.name()},
              {"Q", number(sp.Q())},
              {"exponents", to_json(sp.exps)},
              {"alpha", number(sp.alpha)},
              {"beta", number(sp.beta)},
              {"lambda", number(sp.lambda)},
              {"hls", sp.hls},
              {"case_a", sp.case_a},
              {"case_b", sp.case_b},
              {"diagonal_divergent", sp.diagonal_divergent()},
              {"balance_residual", number(sp.balance_residual)}};
}

inline Json to_json(const BilinearReport& r) {
  Json pairs = Json::array();
  for (const auto& p : r.pairs) {
    Json forms = Json::array();
    for (const auto& f : p.forms) forms.push_back(to_json(f));
    Json passes = Json::array();
    for (bool b : p.passes) passes.push_back(b);
    Json chain = Json::array();
    for (const auto& s : p.chain) chain.push_back(to_json(s));
    Json j{{"f", p.f}, {"h", p.h}, {"rhs", number(p.rhs)}, {"forms", forms}, {"ratios", numbers(p.ratios)},
           {"passes", passes}, {"chain", chain}};
    if (!p.error.empty()) j["error"] = p.error;
    pairs.push_back(j);
  }
  Json divergence = Json::array();
  for (const auto& d : r.divergence) {
    Json levels = Json::array();
    for (const auto& l : d.levels) levels.push_back(Json{{"excision", number(l.excision)}, {"estimate", to_json(l.estimate)}});
    divergence.push_back(Json{{"f", d.f}, {"h", d.h}, {"levels", levels}, {"increasing", d.increasing}});
  }
  Json lower = nullptr;
  if (r.lower_case) {
    lower = Json{{"case", std::string(to_string(*r.lower_case))},
                 {"value", number(r.constructive_lower)},
                 {"D", number(r.lower_detail.D)},
                 {"kernel_factor", number(r.lower_detail.kernel_factor)},
                 {"hardy_factor", number(r.lower_detail.hardy_factor)}};
  }
  return Json{{"inequality", r.params.hls ? "hls" : "stein_weiss"},
              {"params", to_json(r.params)},
              {"constructive_lower", lower},
              {"truncated", r.truncated},
              {"truncation_radius", number(r.truncation_radius)},
              {"min_ratio", number(r.min_ratio)},
              {"pairs", pairs},
              {"divergence", divergence},
              {"diagnostics", r.diagnostics}};
}

// ---------------------------------------------------------------------------
// CSV

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string to_csv(const Table& t) {
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      os << csv_field(cells[i]);
    }
    os << "\r\n";
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  return os.str();
}

inline std::string to_text(const Table& t) {
  std::vector<std::size_t> width(t.header.size(), 0);
  auto measure = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size() && i < width.size(); ++i) width[i] = std::max(width[i], cells[i].size());
  };
  measure(t.header);
  for (const auto& r : t.rows) measure(r);
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      os << cells[i];
      if (i + 1 < cells.size()) os << std::string(width[i] - cells[i].size() + 2, ' ');
    }
    os << '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
  return os.str();
}

inline Table hardy_table(const HardyReport& r) {
  Table t{{"kind", "f", "A", "t", "ratio", "error"}, {}};
  for (const auto& x : r.ratios) t.rows.push_back({"family", x.descriptor, "", "", format_real(x.value), x.error});
  for (const auto& x : r.extremal) {
    t.rows.push_back({"extremal", "", format_real(x.amplitude), format_real(x.t), format_real(x.value), x.error});
  }
  return t;
}

inline Table bilinear_table(const BilinearReport& r) {
  Table t{{"f", "h", "seed", "estimate", "std_error", "rhs", "ratio", "pass"}, {}};
  for (const auto& p : r.pairs) {
    for (std::size_t k = 0; k < p.forms.size(); ++k) {
      const auto& f = p.forms[k];
      t.rows.push_back({p.f, p.h, std::to_string(f.estimate.seed), format_real(f.value()),
                        format_real(f.estimate.std_error), format_real(p.rhs),
                        k < p.ratios.size() ? format_real(p.ratios[k]) : "",
                        k < p.passes.size() ? (p.passes[k] ? "true" : "false") : ""});
    }
  }
  for (const auto& d : r.divergence) {
    for (const auto& l : d.levels) {
      t.rows.push_back({d.f, d.h, std::to_string(l.estimate.seed), format_real(l.estimate.mean),
                        format_real(l.estimate.std_error), "", "", "excision=" + format_real(l.excision)});
    }
  }
  return t;
}

}  // namespace revhardy

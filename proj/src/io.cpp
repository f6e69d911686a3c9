#include "rankone/io.hpp"

#include <fstream>
#include <sstream>
#include <unistd.h>

namespace rankone {

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw SchemaError(path + ": " + what);
}

const Json& field(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) bad(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) bad(path, "missing field '" + key + "'");
  return *it;
}

const Json* optional_field(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) bad(path, "expected an object");
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

std::int64_t as_int(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) bad(path, "expected an integer");
  return j.get<std::int64_t>();
}

double as_double(const Json& j, const std::string& path) {
  if (!j.is_number()) bad(path, "expected a number");
  return j.get<double>();
}

std::string as_string(const Json& j, const std::string& path) {
  if (!j.is_string()) bad(path, "expected a string");
  return j.get<std::string>();
}

const Json& as_array(const Json& j, const std::string& path) {
  if (!j.is_array()) bad(path, "expected an array");
  return j;
}

std::string at(const std::string& path, const std::string& key) { return path + "." + key; }
std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

std::int64_t int_key(const std::string& key, const std::string& path) {
  try {
    std::size_t used = 0;
    const auto v = std::stoll(key, &used);
    if (used == key.size()) return v;
  } catch (const std::exception&) {
  }
  bad(path, "key '" + key + "' is not an integer");
}

}  // namespace

Json rational_json(const Rational& q) { return to_string(q); }

Rational rational_from(const Json& j, const std::string& path) {
  if (j.is_number_integer()) return Rational{j.get<std::int64_t>()};
  if (!j.is_string()) bad(path, "expected a rational \"num/den\"");
  try {
    return parse_rational(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    bad(path, e.what());
  }
}

Json to_json(const Interval& iv) {
  if (iv.is_empty()) return Json::array();
  return Json::array({iv.lo, iv.hi});
}

Interval interval_from(const Json& j, const std::string& path) {
  as_array(j, path);
  if (j.empty()) return Interval::empty();
  if (j.size() != 2) bad(path, "expected [lo, hi] or []");
  Interval iv{as_int(j[0], at(path, 0)), as_int(j[1], at(path, 1))};
  if (iv.is_empty()) bad(path, "lo > hi; write [] for an empty interval");
  return iv;
}

Json to_json(const RankOneSpec& spec) {
  Json stages = Json::array();
  for (const auto& st : spec.stages) stages.push_back({{"cuts", st.cuts}, {"spacers", st.spacers}});
  return {{"base_height", spec.base_height}, {"stages", stages}};
}

RankOneSpec spec_from(const Json& j, const std::string& path) {
  RankOneSpec spec;
  if (auto b = optional_field(j, "base_height", path)) spec.base_height = as_int(*b, at(path, "base_height"));
  const auto sp = at(path, "stages");
  const auto& stages = as_array(field(j, "stages", path), sp);
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const auto p = at(sp, i);
    StageSpec st;
    st.cuts = as_int(field(stages[i], "cuts", p), at(p, "cuts"));
    const auto spp = at(p, "spacers");
    const auto& spacers = as_array(field(stages[i], "spacers", p), spp);
    for (std::size_t k = 0; k < spacers.size(); ++k) st.spacers.push_back(as_int(spacers[k], at(spp, k)));
    spec.stages.push_back(std::move(st));
  }
  return spec;
}

Json to_json(const IntervalSchedule& s) {
  Json blocks = Json::array();
  for (const auto& b : s.blocks) {
    blocks.push_back({{"I", to_json(b.i)}, {"I_tilde", to_json(b.i_tilde)}, {"J", to_json(b.j)},
                      {"J_tilde", to_json(b.j_tilde)}});
  }
  return {{"horizon", s.horizon}, {"blocks", blocks}};
}

IntervalSchedule schedule_from(const Json& j, const std::string& path) {
  IntervalSchedule s;
  s.horizon = as_int(field(j, "horizon", path), at(path, "horizon"));
  const auto bp = at(path, "blocks");
  const auto& blocks = as_array(field(j, "blocks", path), bp);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto p = at(bp, i);
    const auto& b = blocks[i];
    s.blocks.push_back({interval_from(field(b, "I", p), at(p, "I")),
                        interval_from(field(b, "I_tilde", p), at(p, "I_tilde")),
                        interval_from(field(b, "J", p), at(p, "J")),
                        interval_from(field(b, "J_tilde", p), at(p, "J_tilde"))});
  }
  return s;
}

Json to_json(const LevelFunction& f) {
  Json coeffs = Json::object();
  for (const auto& [lvl, c] : f.coefficients) coeffs[std::to_string(lvl)] = rational_json(c);
  return {{"stage", f.stage}, {"coefficients", coeffs}};
}

LevelFunction level_function_from(const Json& j, const std::string& path) {
  LevelFunction f;
  const auto stage = as_int(field(j, "stage", path), at(path, "stage"));
  if (stage < 1) bad(at(path, "stage"), "stage must be >= 1");
  f.stage = static_cast<std::size_t>(stage);
  const auto cp = at(path, "coefficients");
  const auto& coeffs = field(j, "coefficients", path);
  if (!coeffs.is_object()) bad(cp, "expected an object of level -> rational");
  for (const auto& [key, value] : coeffs.items()) {
    f.coefficients[int_key(key, cp)] = rational_from(value, at(cp, key));
  }
  return f;
}

Json to_json(const PolynomialSpec& p) {
  Json out = Json::object();
  for (const auto& [z, a] : p.coefficients) out[std::to_string(z)] = rational_json(a);
  return out;
}

PolynomialSpec polynomial_from(const Json& j, const std::string& path) {
  if (!j.is_object()) bad(path, "expected an object of power -> rational");
  PolynomialSpec p;
  for (const auto& [key, value] : j.items()) p.coefficients[int_key(key, path)] = rational_from(value, at(path, key));
  return p;
}

Json to_json(const PairPolicy& p) {
  Json polys = Json::array();
  for (const auto& q : p.generic_polys) polys.push_back(to_json(q));
  return {{"blocking_cuts", p.blocking_cuts},   {"generic_cuts", p.generic_cuts},
          {"generic_polys", polys},             {"max_generic_per_window", p.max_generic_per_window},
          {"base_height", p.base_height},       {"tracked_stage", p.tracked_stage}};
}

PairPolicy policy_from(const Json& j, const std::string& path) {
  PairPolicy p;
  if (auto v = optional_field(j, "blocking_cuts", path)) p.blocking_cuts = as_int(*v, at(path, "blocking_cuts"));
  if (auto v = optional_field(j, "generic_cuts", path)) {
    p.generic_cuts.clear();
    const auto gp = at(path, "generic_cuts");
    for (std::size_t i = 0; i < as_array(*v, gp).size(); ++i) p.generic_cuts.push_back(as_int((*v)[i], at(gp, i)));
  }
  if (auto v = optional_field(j, "generic_polys", path)) {
    p.generic_polys.clear();
    const auto gp = at(path, "generic_polys");
    for (std::size_t i = 0; i < as_array(*v, gp).size(); ++i) p.generic_polys.push_back(polynomial_from((*v)[i], at(gp, i)));
  }
  if (auto v = optional_field(j, "max_generic_per_window", path)) {
    p.max_generic_per_window = as_int(*v, at(path, "max_generic_per_window"));
  }
  if (auto v = optional_field(j, "base_height", path)) p.base_height = as_int(*v, at(path, "base_height"));
  if (auto v = optional_field(j, "tracked_stage", path)) {
    p.tracked_stage = static_cast<std::size_t>(as_int(*v, at(path, "tracked_stage")));
  }
  return p;
}

Json to_json(const ConstructionCertificate& c) {
  Json zeros = Json::array(), rigid = Json::array(), polys = Json::array(), ledger = Json::array();
  for (const auto& z : c.zero_intervals) {
    Json e = {{"interval", to_json(z.interval)}, {"verdict", z.exact_zero ? "exact-zero" : "violated"}};
    if (z.first_violation) e["first_violation"] = *z.first_violation;
    zeros.push_back(e);
  }
  for (const auto& r : c.rigidity_times) {
    rigid.push_back({{"stage", r.stage}, {"time", r.time}, {"cuts", r.cuts},
                     {"correlation", rational_json(r.correlation)}, {"target", rational_json(r.target)},
                     {"in_window", r.in_window}});
  }
  for (const auto& p : c.polynomial_claims) {
    polys.push_back({{"stage", p.stage}, {"time", p.time}, {"cuts", p.cuts}, {"poly", to_json(p.poly)},
                     {"deviation_bound", rational_json(p.deviation_bound)}, {"slack", rational_json(p.slack)}});
  }
  for (const auto& l : c.min_distance_ledger) {
    ledger.push_back({{"stage", l.stage}, {"kind", to_string(l.kind)}, {"height_before", l.height_before},
                      {"min_new_distance", l.min_new_distance}, {"max_distance", l.max_distance}});
  }
  return {{"factor", c.factor},           {"tracked", to_json(c.tracked)},
          {"horizon", c.horizon},         {"zero_intervals", zeros},
          {"rigidity_times", rigid},      {"polynomial_claims", polys},
          {"min_distance_ledger", ledger}, {"unverified", c.unverified}};
}

ConstructionCertificate certificate_from(const Json& j, const std::string& path) {
  ConstructionCertificate c;
  c.factor = as_string(field(j, "factor", path), at(path, "factor"));
  c.tracked = level_function_from(field(j, "tracked", path), at(path, "tracked"));
  c.horizon = as_int(field(j, "horizon", path), at(path, "horizon"));
  auto each = [&](const char* key, auto&& fn) {
    const auto p = at(path, key);
    const auto& arr = as_array(field(j, key, path), p);
    for (std::size_t i = 0; i < arr.size(); ++i) fn(arr[i], at(p, i));
  };
  auto size_field = [](const Json& e, const char* key, const std::string& p) {
    const auto v = as_int(field(e, key, p), at(p, key));
    if (v < 0) bad(at(p, key), "must be >= 0");
    return static_cast<std::size_t>(v);
  };
  each("zero_intervals", [&](const Json& e, const std::string& p) {
    ZeroClaim z;
    z.interval = interval_from(field(e, "interval", p), at(p, "interval"));
    const auto verdict = as_string(field(e, "verdict", p), at(p, "verdict"));
    if (verdict != "exact-zero" && verdict != "violated") bad(at(p, "verdict"), "expected exact-zero or violated");
    z.exact_zero = verdict == "exact-zero";
    if (auto v = optional_field(e, "first_violation", p)) z.first_violation = as_int(*v, at(p, "first_violation"));
    c.zero_intervals.push_back(z);
  });
  each("rigidity_times", [&](const Json& e, const std::string& p) {
    RigidityClaim r;
    r.stage = size_field(e, "stage", p);
    r.time = as_int(field(e, "time", p), at(p, "time"));
    r.cuts = as_int(field(e, "cuts", p), at(p, "cuts"));
    r.correlation = rational_from(field(e, "correlation", p), at(p, "correlation"));
    r.target = rational_from(field(e, "target", p), at(p, "target"));
    const auto& w = field(e, "in_window", p);
    if (!w.is_boolean()) bad(at(p, "in_window"), "expected a boolean");
    r.in_window = w.get<bool>();
    c.rigidity_times.push_back(r);
  });
  each("polynomial_claims", [&](const Json& e, const std::string& p) {
    PolynomialClaim q;
    q.stage = size_field(e, "stage", p);
    q.time = as_int(field(e, "time", p), at(p, "time"));
    q.cuts = as_int(field(e, "cuts", p), at(p, "cuts"));
    q.poly = polynomial_from(field(e, "poly", p), at(p, "poly"));
    q.deviation_bound = rational_from(field(e, "deviation_bound", p), at(p, "deviation_bound"));
    q.slack = rational_from(field(e, "slack", p), at(p, "slack"));
    c.polynomial_claims.push_back(q);
  });
  each("min_distance_ledger", [&](const Json& e, const std::string& p) {
    StageLedgerEntry l;
    l.stage = size_field(e, "stage", p);
    try {
      l.kind = parse_stage_kind(as_string(field(e, "kind", p), at(p, "kind")));
    } catch (const std::invalid_argument& err) {
      bad(at(p, "kind"), err.what());
    }
    l.height_before = as_int(field(e, "height_before", p), at(p, "height_before"));
    l.min_new_distance = as_int(field(e, "min_new_distance", p), at(p, "min_new_distance"));
    l.max_distance = as_int(field(e, "max_distance", p), at(p, "max_distance"));
    c.min_distance_ledger.push_back(l);
  });
  each("unverified", [&](const Json& e, const std::string& p) { c.unverified.push_back(as_string(e, p)); });
  return c;
}

Json to_json(const CertificateCheck& c) {
  Json out = {{"ok", c.ok}, {"message", c.message}};
  out["first_violated_n"] = c.first_violated_n ? Json(*c.first_violated_n) : Json(nullptr);
  return out;
}

Json to_json(const WalshPolynomial& p) {
  Json out = Json::array();
  for (const auto& [set, c] : p.terms()) {
    out.push_back({{"set", set}, {"num", c.get_num().get_str()}, {"den", c.get_den().get_str()}});
  }
  return out;
}

WalshPolynomial walsh_from(const Json& j, const std::string& path) {
  WalshPolynomial p;
  as_array(j, path);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto rp = at(path, i);
    const auto sp = at(rp, "set");
    const auto& set = as_array(field(j[i], "set", rp), sp);
    IndexSet s;
    for (std::size_t k = 0; k < set.size(); ++k) s.push_back(as_int(set[k], at(sp, k)));
    auto big = [&](const char* key) {
      const auto& v = field(j[i], key, rp);
      if (v.is_number_integer()) return BigInt{std::to_string(v.get<std::int64_t>())};
      const auto text = as_string(v, at(rp, key));
      BigInt b;
      if (text.empty() || b.set_str(text, 10) != 0) bad(at(rp, key), "expected an integer string");
      return b;
    };
    const BigInt num = big("num"), den = big("den");
    if (den == 0) bad(at(rp, "den"), "zero denominator");
    Rational c{num, den};
    c.canonicalize();
    try {
      p.add(s, c);
    } catch (const std::invalid_argument& e) {
      bad(sp, e.what());
    }
  }
  return p;
}

Json to_json(const SummabilityReport& r) {
  Json l1 = {{"lower", rational_json(r.l1.lower)}, {"upper", rational_json(r.l1.upper)}};
  Json l2 = {{"lower", rational_json(r.l2.lower)}, {"upper", rational_json(r.l2.upper)}};
  return {{"range", to_json(r.range)}, {"l1", l1}, {"l2", l2}, {"support", r.support}};
}

Json to_json(const CovarianceEstimate& e) {
  return {{"estimate", e.estimate}, {"ci_low", e.ci_low}, {"ci_high", e.ci_high}, {"samples", e.samples},
          {"escape_fraction", e.escape_fraction}};
}

Json to_json(const SimulationConfig& c) {
  return {{"sample_count", c.sample_count}, {"seed", c.seed},         {"lag_max", c.lag_max},
          {"intensity", c.intensity},       {"confidence", c.confidence}, {"escape_cap", c.escape_cap}};
}

SimulationConfig simulation_config_from(const Json& j, const std::string& path) {
  SimulationConfig c;
  if (auto v = optional_field(j, "sample_count", path)) c.sample_count = as_int(*v, at(path, "sample_count"));
  if (auto v = optional_field(j, "seed", path)) {
    if (!v->is_number_unsigned()) bad(at(path, "seed"), "expected a non-negative integer");
    c.seed = v->get<std::uint64_t>();
  }
  if (auto v = optional_field(j, "lag_max", path)) c.lag_max = as_int(*v, at(path, "lag_max"));
  if (auto v = optional_field(j, "intensity", path)) c.intensity = as_double(*v, at(path, "intensity"));
  if (auto v = optional_field(j, "confidence", path)) c.confidence = as_double(*v, at(path, "confidence"));
  if (auto v = optional_field(j, "escape_cap", path)) c.escape_cap = as_double(*v, at(path, "escape_cap"));
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    bad(path, e.what());
  }
  return c;
}

std::string read_text_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json_file(const std::filesystem::path& file) {
  const auto text = read_text_file(file);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    // byte offset -> line/column
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw SchemaError(file.string() + ":" + std::to_string(line) + ":" + std::to_string(col) +
                      ": invalid JSON");
  }
}

void write_file_atomic(const std::filesystem::path& file, const std::string& content) {
  const auto dir = file.has_parent_path() ? file.parent_path() : std::filesystem::path{"."};
  std::filesystem::create_directories(dir);
  auto tmp = dir / ("." + file.filename().string() + ".tmp" + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, file);
}

CorrelationSequence parse_table(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  CorrelationSequence seq;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (!header) {
      if (line != "n\tlower\tupper") throw SchemaError("line 1: expected header 'n<TAB>lower<TAB>upper'");
      header = true;
      continue;
    }
    std::istringstream row(line);
    std::string n, lo, hi, extra;
    if (!std::getline(row, n, '\t') || !std::getline(row, lo, '\t') || !std::getline(row, hi, '\t') ||
        std::getline(row, extra, '\t')) {
      throw SchemaError("line " + std::to_string(lineno) + ": expected 3 tab-separated fields");
    }
    try {
      const std::int64_t idx = std::stoll(n);
      if (seq.entries.empty()) {
        seq.first = idx;
      } else if (idx != seq.last() + 1) {
        throw SchemaError("line " + std::to_string(lineno) + ": rows must be consecutive in n");
      }
      seq.entries.push_back({parse_rational(lo), parse_rational(hi)});
    } catch (const SchemaError&) {
      throw;
    } catch (const std::exception& e) {
      throw SchemaError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!header) throw SchemaError("line 1: empty table");
  if (seq.covers(0)) seq.norm_sq = seq.at(0).lower;
  return seq;
}

}  // namespace rankone

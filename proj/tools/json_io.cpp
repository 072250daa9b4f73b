#include "json_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace riccati::io {

namespace {

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorKind::ParseError, what); }

void emit(const Json& j, int indent, int depth, std::string& out) {
  const std::string pad = indent > 0 ? std::string(static_cast<size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close_pad = indent > 0 ? std::string(static_cast<size_t>(indent * depth), ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad;
        out += Json(it.key()).dump();
        out += indent > 0 ? ": " : ":";
        emit(it.value(), indent, depth + 1, out);
      }
      out += nl;
      out += close_pad;
      out += "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
      out += "[";
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat || indent == 0 ? (indent > 0 ? ", " : ",") : ",";
        if (!flat) {
          out += nl;
          out += pad;
        }
        first = false;
        emit(e, indent, depth + 1, out);
      }
      if (!flat) {
        out += nl;
        out += close_pad;
      }
      out += "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
      std::string s = buf;
      // Keep the value a JSON float on re-read.
      if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
      out += s;
      return;
    }
    default: out += j.dump();
  }
}

Complex number_pair(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    parse_fail("complex number must be [re, im] or a real number");
  return {j[0].get<double>(), j[1].get<double>()};
}

const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) parse_fail(std::string("missing field '") + key + "'");
  return j.at(key);
}

}  // namespace

std::string dump(const Json& j, int indent) {
  std::string out;
  emit(j, indent, 0, out);
  out += "\n";
  return out;
}

Complex complex_from_json(const Json& j) { return number_pair(j); }

Matrix3c matrix_from_json(const Json& j) {
  const Json& rows = j.is_object() ? require(j, "matrix") : j;
  if (!rows.is_array() || rows.size() != 3) parse_fail("matrix must be a 3x3 nested array");
  Matrix3c m;
  for (int i = 0; i < 3; ++i) {
    if (!rows[i].is_array() || rows[i].size() != 3) parse_fail("matrix must be a 3x3 nested array");
    for (int k = 0; k < 3; ++k) m(i, k) = number_pair(rows[i][k]);
  }
  if (!all_finite(m)) parse_fail("matrix has non-finite entries");
  return m;
}

MultiPoly poly_from_json(const Json& j) {
  const Json& vars = require(j, "vars");
  const Json& terms = require(j, "terms");
  if (!vars.is_array() || !terms.is_array()) parse_fail("polynomial needs arrays 'vars' and 'terms'");
  std::vector<std::string> names;
  for (const auto& v : vars) {
    if (!v.is_string()) parse_fail("variable names must be strings");
    names.push_back(v.get<std::string>());
  }
  MultiPoly p(names);
  for (const auto& t : terms) {
    const Json& e = require(t, "exp");
    if (!e.is_array() || e.size() != names.size()) parse_fail("exponent length must match 'vars'");
    Exponent exp;
    for (const auto& k : e) {
      if (!k.is_number_integer() || k.get<int>() < 0) parse_fail("exponents must be non-negative integers");
      exp.push_back(k.get<int>());
    }
    p.add_term(exp, number_pair(require(t, "coef")));
  }
  return p;
}

PolyVectorField field_from_json(const Json& j) {
  const Json& comps = require(j, "components");
  if (!comps.is_array() || comps.empty()) parse_fail("'components' must be a non-empty array");
  std::vector<MultiPoly> ps;
  for (const auto& c : comps) {
    if (j.contains("vars") && c.is_object() && !c.contains("vars")) {
      Json copy = c;
      copy["vars"] = j.at("vars");
      ps.push_back(poly_from_json(copy));
    } else {
      ps.push_back(poly_from_json(c));
    }
  }
  try {
    return make_field(j.value("chart", std::string("xyz")), ps);
  } catch (const Error& e) {
    parse_fail(e.what());
  }
}

LoopPath loop_from_json(const Json& j) {
  LoopPath loop;
  loop.base_point = number_pair(require(j, "base_point"));
  const Json& segs = require(j, "segments");
  if (!segs.is_array()) parse_fail("'segments' must be an array");
  for (const auto& s : segs) {
    const std::string kind = require(s, "kind").get<std::string>();
    if (kind == "segment") {
      loop.segments.push_back(PathSegment::line(number_pair(require(s, "from")), number_pair(require(s, "to"))));
    } else if (kind == "arc") {
      const double r = require(s, "radius").get<double>();
      if (!(r > 0.0)) parse_fail("arc radius must be positive");
      double th0 = require(s, "theta0").get<double>(), th1 = require(s, "theta1").get<double>();
      loop.segments.push_back(PathSegment::arc(number_pair(require(s, "center")), r, th0, th1));
    } else {
      parse_fail("segment kind must be 'segment' or 'arc'");
    }
  }
  if (!loop.is_closed(1e-12)) parse_fail("loop is not closed at its base point");
  return loop;
}

Complex parse_complex_text(const std::string& text) {
  std::istringstream in(text);
  double re = 0.0, im = 0.0;
  char comma = 0;
  if (!(in >> re)) parse_fail("cannot parse complex number '" + text + "'");
  if (in >> comma) {
    if (comma != ',' || !(in >> im)) parse_fail("complex number must be 're,im'");
  }
  return {re, im};
}

Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const Matrix3c& m) {
  Json rows = Json::array();
  for (int i = 0; i < 3; ++i) {
    Json row = Json::array();
    for (int k = 0; k < 3; ++k) row.push_back(to_json(m(i, k)));
    rows.push_back(row);
  }
  return rows;
}

Json to_json(const Vector3c& v) { return Json::array({to_json(v(0)), to_json(v(1)), to_json(v(2))}); }

Json to_json(const MultiPoly& p) {
  Json terms = Json::array();
  for (const auto& [e, c] : p.terms()) terms.push_back({{"exp", e}, {"coef", to_json(c)}});
  return {{"vars", p.vars()}, {"terms", terms}};
}

Json to_json(const PolyVectorField& f) {
  Json comps = Json::array();
  for (const auto& c : f.components) comps.push_back(to_json(c));
  return {{"chart", f.chart}, {"components", comps}};
}

Json to_json(const LoopPath& loop) {
  Json segs = Json::array();
  for (const auto& s : loop.segments) {
    if (s.kind == PathSegment::Kind::Line)
      segs.push_back({{"kind", "segment"}, {"from", to_json(s.from)}, {"to", to_json(s.to)}});
    else
      segs.push_back({{"kind", "arc"},
                      {"center", to_json(s.center)},
                      {"radius", s.radius},
                      {"theta0", s.theta0},
                      {"theta1", s.theta1}});
  }
  return {{"base_point", to_json(loop.base_point)}, {"segments", segs}};
}

Json to_json(const Rejection& r) {
  return {{"constraint", r.constraint},
          {"violation", r.violation},
          {"possibility", r.possibility},
          {"component", r.component},
          {"witness_monomial", r.witness_monomial}};
}

Json to_json(const FiberSet& f) {
  Json finite = Json::array(), mult = Json::array();
  for (const auto& c : f.finite_fibers) {
    finite.push_back(to_json(c.value));
    mult.push_back(c.multiplicity);
  }
  return {{"finite", finite}, {"multiplicities", mult}, {"infinity", f.infinity_invariant}, {"all", f.all_invariant}};
}

Json to_json(const HolonomyResult& h) {
  return {{"matrix", to_json(h.map.normalized())},
          {"residual", h.residual},
          {"n_samples", h.n_samples},
          {"stats", {{"steps", h.stats.steps}, {"rejected", h.stats.rejected}, {"chart_switches", h.stats.chart_switches}}}};
}

Json to_json(const LocalModel& m) {
  Json j = {{"case", to_string(m.case_tag)}, {"center", to_json(m.center)}};
  switch (m.case_tag) {
    case ModelCase::C: j["alpha1"] = to_json(m.alpha1); j["alpha2"] = to_json(m.alpha2); break;
    case ModelCase::D: j["alpha2"] = to_json(m.alpha2); break;
    case ModelCase::E: j["nu"] = to_json(m.nu); break;
    case ModelCase::B:
      j["lambda"] = to_json(m.lambda);
      j["nu"] = to_json(m.nu);
      j["mu"] = to_json(m.mu);
      break;
    case ModelCase::A: j["mu"] = to_json(m.mu); break;
  }
  return j;
}

Json classification_report(const AutClassification& c) {
  Json points = Json::array(), lines = Json::array();
  for (const auto& p : c.fixed_locus.points) points.push_back(to_json(p));
  for (const auto& l : c.fixed_locus.lines) lines.push_back(to_json(l));
  return {{"schema_version", kSchemaVersion},
          {"kind", "classification"},
          {"jordan_case", to_string(c.jordan_case)},
          {"paper_type", to_string(c.paper_type)},
          {"fixed_points", points},
          {"fixed_lines", lines},
          {"is_all", c.fixed_locus.is_all},
          {"normal_form", to_json(c.normal_form.matrix())},
          {"conjugator", to_json(c.conjugator)},
          {"near_threshold", c.near_threshold}};
}

Json cp2_report(const PolyVectorField& X, const CheckResult<RiccatiCp2Form>& r) {
  Json j = {{"schema_version", kSchemaVersion}, {"kind", "normal_form"}, {"target", "cp2"}, {"accepted", r.accepted()}};
  if (r.accepted()) {
    const auto& f = *r.form;
    j["form"] = {{"p", to_json(f.p)}, {"a", to_json(f.a)}, {"b", to_json(f.b)}, {"c", to_json(f.c)},
                 {"A", to_json(f.A)}, {"B", to_json(f.B)}, {"C", to_json(f.C)}, {"D", to_json(f.D)},
                 {"E", to_json(f.E)}};
    j["rejection"] = nullptr;
    j["fibers"] = to_json(invariant_fibers(f, X));
  } else {
    j["form"] = nullptr;
    j["rejection"] = to_json(*r.rejection);
    j["fibers"] = nullptr;
  }
  return j;
}

Json cn_report(const PolyVectorField& X, int n, const CheckResult<RiccatiCnForm>& r) {
  Json j = {{"schema_version", kSchemaVersion}, {"kind", "normal_form"}, {"target", "cn"}, {"n", n},
            {"accepted", r.accepted()}};
  if (r.accepted()) {
    const auto& f = *r.form;
    Json q = Json::array();
    for (const auto& row : f.q) q.push_back(Json::array({to_json(row[0]), to_json(row[1]), to_json(row[2])}));
    j["form"] = {{"p", to_json(f.p)}, {"q", q}};
    j["rejection"] = nullptr;
    j["fibers"] = to_json(invariant_fibers(f, X));
  } else {
    j["form"] = nullptr;
    j["rejection"] = to_json(*r.rejection);
    j["fibers"] = nullptr;
  }
  return j;
}

Json holonomy_report(const HolonomyResult& h) {
  Json j = {{"schema_version", kSchemaVersion}, {"kind", "holonomy"}};
  const Json body = to_json(h);
  for (auto& [k, v] : body.items()) j[k] = v;
  return j;
}

Json generators_report(Complex base, const std::vector<GeneratorResult>& gens) {
  Json list = Json::array();
  for (const auto& g : gens) {
    Json e = {{"at_infinity", g.at_infinity}, {"fiber", g.at_infinity ? Json(nullptr) : to_json(g.fiber)}};
    const Json body = to_json(g.holonomy);
    for (auto& [k, v] : body.items()) e[k] = v;
    e["loop"] = to_json(g.loop);
    list.push_back(e);
  }
  return {{"schema_version", kSchemaVersion},
          {"kind", "holonomy_generators"},
          {"base_point", to_json(base)},
          {"generators", list},
          {"product_defect", product_relation_defect(gens)}};
}

Json synthesis_report(const SynthesisReport& r) {
  Json list = Json::array();
  for (const auto& g : r.generators) {
    list.push_back({{"index", g.index},
                    {"input", to_json(g.input.matrix())},
                    {"jordan_case", to_string(g.classification.jordan_case)},
                    {"paper_type", to_string(g.classification.paper_type)},
                    {"normal_form", to_json(g.classification.normal_form.matrix())},
                    {"conjugator", to_json(g.classification.conjugator)},
                    {"model", to_json(g.model)},
                    {"analytic_holonomy", to_json(g.analytic.embed())},
                    {"analytic_vs_normal_form", g.analytic_vs_normal_form},
                    {"numeric_vs_analytic", g.numeric_vs_analytic},
                    {"numeric_residual", g.numeric_residual},
                    {"reconstruction", g.reconstruction},
                    {"passed", g.passed}});
  }
  return {{"schema_version", kSchemaVersion},
          {"kind", "synthesis"},
          {"passed", r.passed},
          {"product_defect", r.product_defect},
          {"reconstructed_product_defect", r.reconstructed_product_defect},
          {"generators", list}};
}

Json error_report(const std::string& command, ErrorKind kind, const std::string& message) {
  return {{"schema_version", kSchemaVersion},
          {"kind", "error"},
          {"command", command},
          {"error", {{"kind", to_string(kind)}, {"message", message}}}};
}

}  // namespace riccati::io

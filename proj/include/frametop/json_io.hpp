#pragma once

// JSON forms of targets, frames, projections, verdicts, certificates and
// polygons, plus the decimal/fraction vector syntax used on the command line.

#include "frametop/certificates.hpp"
#include "frametop/core.hpp"
#include "frametop/fiber.hpp"
#include "frametop/frame_path.hpp"
#include "frametop/grassmann.hpp"
#include "frametop/hypersimplex.hpp"
#include "frametop/polygon.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <string>
#include <string_view>
#include <vector>

namespace frametop {

using json = nlohmann::json;

/// Parses "p/q", an integer or a decimal. Fractions are divided once, in
/// double precision, from exact integer numerator and denominator.
inline double parse_number(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  if (text.empty()) fail(ErrorCode::ParseError, "empty number");
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const std::string_view num = trim(text.substr(0, slash)), den = trim(text.substr(slash + 1));
    long long p = 0, q = 0;
    const auto r1 = std::from_chars(num.data(), num.data() + num.size(), p);
    const auto r2 = std::from_chars(den.data(), den.data() + den.size(), q);
    if (r1.ec != std::errc{} || r1.ptr != num.data() + num.size() || r2.ec != std::errc{} ||
        r2.ptr != den.data() + den.size() || q == 0) {
      fail(ErrorCode::ParseError, "malformed fraction '" + std::string(text) + "'");
    }
    return static_cast<double>(p) / static_cast<double>(q);
  }
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    fail(ErrorCode::ParseError, "malformed number '" + std::string(text) + "'");
  }
  return v;
}

/// Comma-separated list of numbers or fractions.
inline Vector parse_vector(std::string_view text) {
  std::vector<double> vals;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    vals.push_back(parse_number(text.substr(start, comma == std::string_view::npos ? text.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return Eigen::Map<const Vector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline double number_from_json(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_number(j.get<std::string>());
  fail(ErrorCode::ParseError, "expected a number or a fraction string");
}

inline Vector vector_from_json(const json& j) {
  if (!j.is_array()) fail(ErrorCode::ParseError, "expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number_from_json(j[i]);
  return v;
}

inline Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) fail(ErrorCode::ParseError, "expected a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size()), cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) fail(ErrorCode::ParseError, "ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = number_from_json(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorCode::ParseError, std::string("missing field '") + key + "'");
  return j.at(key);
}

inline json to_json(const DiagonalTarget& t) { return {{"n", t.n()}, {"k", t.k}, {"d", vector_to_json(t.d)}}; }

inline DiagonalTarget target_from_json(const json& j) {
  const json& kj = field(j, "k");
  if (!kj.is_number_integer()) fail(ErrorCode::ParseError, "'k' must be an integer");
  DiagonalTarget t(vector_from_json(field(j, "d")), kj.get<int>());
  if (j.contains("n") && (!j["n"].is_number_integer() || j["n"].get<int>() != t.n())) {
    fail(ErrorCode::ParseError, "'n' does not match the length of 'd'");
  }
  return t;
}

inline json to_json(const Frame& f) {
  return {{"k", f.k()}, {"n", f.n()}, {"rows", matrix_to_json(f.rows)}};
}

inline Frame frame_from_json(const json& j) {
  Frame f(matrix_from_json(field(j, "rows")));
  if (j.contains("k") && j["k"] != f.k()) fail(ErrorCode::ParseError, "'k' does not match the rows");
  if (j.contains("n") && j["n"] != f.n()) fail(ErrorCode::ParseError, "'n' does not match the columns");
  return f;
}

inline json to_json(const ProjectionPoint& p) { return {{"size", p.size()}, {"rows", matrix_to_json(p.entries)}}; }

inline json to_json(const AdmissibilityVerdict& v) {
  json w = json::object();
  if (v.witness.p) w["p"] = *v.witness.p;
  if (v.witness.q) w["q"] = *v.witness.q;
  if (v.witness.alpha) w["alpha"] = *v.witness.alpha;
  if (v.witness.beta) w["beta"] = *v.witness.beta;
  if (v.witness.interval) w["interval"] = {v.witness.interval->first, v.witness.interval->second};
  if (!v.witness.permutation.empty()) w["permutation"] = v.witness.permutation;
  if (!v.witness.indices.empty()) w["indices"] = v.witness.indices;
  return {{"status", std::string(to_string(v.status))}, {"rule", v.rule}, {"witness", w}};
}

inline json to_json(const VerificationReport& r) {
  return {{"passed", r.passed},
          {"max_stiefel_residual", r.max_stiefel_residual},
          {"max_norm_residual", r.max_norm_residual},
          {"max_step", r.max_step},
          {"start_residual", r.start_residual},
          {"end_residual", r.end_residual},
          {"det_D", r.det_d},
          {"D_orthogonality", r.d_orthogonality},
          {"grid_size", r.grid_size},
          {"worst_index", r.worst_index},
          {"tol", r.tol},
          {"step_max", r.step_max},
          {"failure", r.failure}};
}

// The stored report is informational; verification always recomputes it.
inline VerificationReport report_from_json(const json& j) {
  VerificationReport r;
  r.passed = j.value("passed", false);
  r.max_stiefel_residual = j.value("max_stiefel_residual", 0.0);
  r.max_norm_residual = j.value("max_norm_residual", 0.0);
  r.max_step = j.value("max_step", 0.0);
  r.start_residual = j.value("start_residual", 0.0);
  r.end_residual = j.value("end_residual", 0.0);
  r.det_d = j.value("det_D", 0.0);
  r.d_orthogonality = j.value("D_orthogonality", 0.0);
  r.grid_size = j.value("grid_size", std::size_t{0});
  r.worst_index = j.value("worst_index", -1L);
  r.tol = j.value("tol", tol::path);
  r.step_max = j.value("step_max", tol::step_max);
  r.failure = j.value("failure", std::string{});
  return r;
}

inline json to_json(const PathSegment& s) {
  json j{{"kind", std::string(to_string(s.kind))},
         {"columns", s.columns},
         {"note", s.note},
         {"t_begin", s.t_begin},
         {"t_end", s.t_end},
         {"first", s.first},
         {"last", s.last}};
  if (s.generator.size() > 0) j["generator"] = matrix_to_json(s.generator);
  return j;
}

inline PathSegment segment_from_json(const json& j) {
  PathSegment s;
  const std::string kind = field(j, "kind").get<std::string>();
  if (kind == "BlockRotation") s.kind = SegmentKind::BlockRotation;
  else if (kind == "Step1Rotation") s.kind = SegmentKind::Step1Rotation;
  else if (kind == "Reparametrized") s.kind = SegmentKind::Reparametrized;
  else fail(ErrorCode::ParseError, "unknown segment kind '" + kind + "'");
  s.columns = j.value("columns", std::vector<int>{});
  s.note = j.value("note", std::string{});
  s.t_begin = j.value("t_begin", 0.0);
  s.t_end = j.value("t_end", 1.0);
  s.first = j.value("first", std::size_t{0});
  s.last = j.value("last", std::size_t{0});
  if (j.contains("generator")) s.generator = matrix_from_json(j["generator"]);
  return s;
}

inline json to_json(const ConnectivityCertificate& c, bool with_grid = true) {
  json segs = json::array();
  for (const auto& s : c.path.segments) segs.push_back(to_json(s));
  json j{{"d", vector_to_json(c.d.d)},
         {"k", c.d.k},
         {"frame", to_json(c.frame)},
         {"D", matrix_to_json(c.reflection)},
         {"route", c.route},
         {"permutation", c.permutation},
         {"segments", segs},
         {"report", to_json(c.report)}};
  if (with_grid) {
    json grid = json::array();
    for (const auto& f : c.path.grid) grid.push_back(matrix_to_json(f));
    j["grid"] = std::move(grid);
  }
  return j;
}

inline ConnectivityCertificate certificate_from_json(const json& j) {
  ConnectivityCertificate c;
  const json& kj = field(j, "k");
  if (!kj.is_number_integer()) fail(ErrorCode::ParseError, "'k' must be an integer");
  c.d = DiagonalTarget(vector_from_json(field(j, "d")), kj.get<int>());
  c.frame = frame_from_json(field(j, "frame"));
  c.reflection = matrix_from_json(field(j, "D"));
  c.route = j.value("route", std::string{});
  c.permutation = j.value("permutation", std::vector<int>{});
  for (const auto& s : j.value("segments", json::array())) c.path.segments.push_back(segment_from_json(s));
  if (j.contains("grid")) {
    for (const auto& f : j["grid"]) c.path.grid.push_back(matrix_from_json(f));
  }
  if (j.contains("report") && j["report"].is_object()) c.report = report_from_json(j["report"]);
  c.path.d = c.d;
  c.path.start = c.frame;
  c.path.end = Frame(c.reflection * c.frame.rows);
  return c;
}

inline json to_json(const Polygon& p) {
  json edges = json::array();
  for (const auto& e : p.edges) edges.push_back({e[0], e[1]});
  return {{"edges", edges}, {"r", p.r}};
}

inline json to_json(const ComponentEstimate& e) {
  json reps = json::array();
  for (const auto& p : e.representatives) reps.push_back(to_json(p));
  return {{"count", e.count}, {"representatives", reps}, {"converged", e.converged}, {"seeds", e.seeds}};
}

}  // namespace frametop

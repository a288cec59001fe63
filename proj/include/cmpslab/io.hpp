#pragma once

// JSON and CSV formats.
//
//   cMPS:       {"D": int, "l": float,
//                "segments": [{"from": a, "to": b, "K": [[re,im],...], "R": [[re,im],...]}, ...],
//                "left": "trace" | [[re,im],...], "right": [[re,im],...]}
//               with K and R flattened row-major (D*D entries).
//   FieldGrid:  {"l": float, "n": int, "values": [[re,im],...]}
//   Evolution:  {"potential": [v,...], "w": float, "T": float, "dt": float, "initial": FieldGrid}

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "cmpslab/cmps_core.hpp"
#include "cmpslab/dynamics.hpp"
#include "cmpslab/errors.hpp"
#include "cmpslab/field_types.hpp"

namespace cmpslab::io {

using nlohmann::json;

namespace detail {

[[noreturn]] inline void fail(const std::string& field, const std::string& what) {
  throw ParseError("field '" + field + "': " + what);
}

inline const json& member(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) fail(where.empty() ? key : where + "." + key, "missing");
  return *it;
}

inline double number(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(field, "not finite");
  return v;
}

inline std::size_t count(const json& j, const std::string& field) {
  if (!j.is_number_integer() || j.get<long long>() < 0) fail(field, "expected a non-negative integer");
  return j.get<std::size_t>();
}

inline Complex complex_value(const json& j, const std::string& field) {
  if (j.is_number()) return number(j, field);
  if (!j.is_array() || j.size() != 2) fail(field, "expected [re, im]");
  return {number(j[0], field + "[0]"), number(j[1], field + "[1]")};
}

inline std::vector<Complex> complex_list(const json& j, const std::string& field, std::size_t expected) {
  if (!j.is_array()) fail(field, "expected an array of [re, im] pairs");
  if (j.size() != expected) {
    fail(field, "expected " + std::to_string(expected) + " entries, got " + std::to_string(j.size()));
  }
  std::vector<Complex> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(complex_value(j[k], field + "[" + std::to_string(k) + "]"));
  return out;
}

inline ComplexMatrix square_matrix(const json& j, const std::string& field, Eigen::Index d) {
  const auto v = complex_list(j, field, static_cast<std::size_t>(d * d));
  ComplexMatrix m(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) m(r, c) = v[static_cast<std::size_t>(r * d + c)];
  }
  return m;
}

inline json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

template <class Vec>
json complex_array(const Vec& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(complex_json(v(k)));
  return out;
}

inline json matrix_json(const ComplexMatrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(complex_json(m(r, c)));
  }
  return out;
}

}  // namespace detail

inline json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str());
}

inline Cmps cmps_from_json(const json& j) {
  using namespace detail;
  const std::size_t D = count(member(j, "D", ""), "D");
  if (D == 0) fail("D", "must be positive");
  const double l = number(member(j, "l", ""), "l");
  const auto d = static_cast<Eigen::Index>(D);
  const json& segs = member(j, "segments", "");
  if (!segs.is_array() || segs.empty()) fail("segments", "expected a non-empty array");
  std::vector<Segment> out;
  for (std::size_t k = 0; k < segs.size(); ++k) {
    const std::string where = "segments[" + std::to_string(k) + "]";
    out.push_back({number(member(segs[k], "from", where), where + ".from"),
                   number(member(segs[k], "to", where), where + ".to"),
                   square_matrix(member(segs[k], "K", where), where + ".K", d),
                   square_matrix(member(segs[k], "R", where), where + ".R", d)});
  }
  const json& left_j = member(j, "left", "");
  LeftBoundary left = TraceBoundary{};
  if (left_j.is_string()) {
    if (left_j.get<std::string>() != "trace") fail("left", "expected \"trace\" or a vector");
  } else {
    const auto v = complex_list(left_j, "left", D);
    left = ComplexRowVector(Eigen::Map<const ComplexRowVector>(v.data(), d));
  }
  const auto r = complex_list(member(j, "right", ""), "right", D);
  return Cmps(l, std::move(out), std::move(left), Eigen::Map<const ComplexVector>(r.data(), d));
}

inline json cmps_to_json(const Cmps& c) {
  using namespace detail;
  json segs = json::array();
  for (const auto& s : c.segments()) {
    segs.push_back({{"from", s.from}, {"to", s.to}, {"K", matrix_json(s.K)}, {"R", matrix_json(s.R)}});
  }
  json left = c.has_trace_left() ? json("trace") : complex_array(c.left_vector());
  return {{"D", c.bond_dim()}, {"l", c.length()}, {"segments", segs}, {"left", left}, {"right", complex_array(c.right())}};
}

inline FieldGrid field_grid_from_json(const json& j, const std::string& where = "") {
  using namespace detail;
  const auto prefix = [&](const char* f) { return where.empty() ? std::string(f) : where + "." + f; };
  FieldGrid g;
  g.length = number(member(j, "l", where), prefix("l"));
  const std::size_t n = count(member(j, "n", where), prefix("n"));
  if (n == 0) fail(prefix("n"), "must be positive");
  g.values = complex_list(member(j, "values", where), prefix("values"), n);
  g.validate();
  return g;
}

inline json field_grid_to_json(const FieldGrid& g) {
  json values = json::array();
  for (const auto& v : g.values) values.push_back(detail::complex_json(v));
  return {{"l", g.length}, {"n", g.size()}, {"values", values}};
}

struct EvolutionInput {
  EvolutionConfig config;
  FieldGrid initial;
};

inline EvolutionInput evolution_from_json(const json& j) {
  using namespace detail;
  EvolutionInput in;
  in.initial = field_grid_from_json(member(j, "initial", ""), "initial");
  if (j.contains("potential")) {
    const json& p = j["potential"];
    if (!p.is_array()) fail("potential", "expected an array of numbers");
    for (std::size_t k = 0; k < p.size(); ++k) in.config.potential.push_back(number(p[k], "potential[" + std::to_string(k) + "]"));
    if (!in.config.potential.empty() && in.config.potential.size() != in.initial.size()) {
      fail("potential", "expected " + std::to_string(in.initial.size()) + " samples");
    }
  }
  in.config.interaction_w = j.contains("w") ? number(j["w"], "w") : 0.0;
  in.config.total_time = number(member(j, "T", ""), "T");
  in.config.time_step = number(member(j, "dt", ""), "dt");
  in.config.step_count();
  return in;
}

// ---------------------------------------------------------------------------
// CSV

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_csv_row(std::ostream& out, const std::vector<std::string>& cells) {
  for (std::size_t k = 0; k < cells.size(); ++k) out << (k ? "," : "") << cells[k];
  out << '\n';
}

/// index,re,im for each occupation string.
inline void write_fock_csv(std::ostream& out, const TruncatedFock& s) {
  write_csv_row(out, {"index", "re", "im"});
  for (Eigen::Index k = 0; k < s.amplitudes.size(); ++k) {
    write_csv_row(out, {std::to_string(k), fmt(s.amplitudes(k).real()), fmt(s.amplitudes(k).imag())});
  }
}

/// t,x,re,im,abs2 for every snapshot and grid point.
inline void write_evolution_csv(std::ostream& out, const std::vector<std::pair<double, FieldGrid>>& history) {
  write_csv_row(out, {"t", "x", "re", "im", "abs2"});
  for (const auto& [t, g] : history) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Complex v = g.values[i];
      write_csv_row(out, {fmt(t), fmt(g.position(i)), fmt(v.real()), fmt(v.imag()), fmt(std::norm(v))});
    }
  }
}

}  // namespace cmpslab::io

#pragma once

// Command-line front end. Every subcommand validates its inputs, computes, and
// writes CSV or a JSON report to --output (stdout by default). The exit code
// is 0 when every check passes, 1 when a check fails, 2 on invalid input and
// 3 when a resource guard trips.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cmpslab/cmps_core.hpp"
#include "cmpslab/coherent_path.hpp"
#include "cmpslab/dynamics.hpp"
#include "cmpslab/errors.hpp"
#include "cmpslab/field_states.hpp"
#include "cmpslab/io.hpp"
#include "cmpslab/lattice_mps.hpp"
#include "cmpslab/random.hpp"

namespace cmpslab::cli {

inline constexpr std::uint64_t kDefaultSeed = 20240611;

struct Options {
  std::string input;
  std::string output;
  std::string cmps_output;
  std::string eps_list;
  std::string points;
  std::string observable = "norm";
  double eps = 0.0;
  std::size_t quad_order = 24;
  std::size_t fock_cutoff = 0;
  std::uint64_t seed = kDefaultSeed;
  double tolerance = -1.0;
  std::size_t n = 3;
  std::size_t D = 2;
  std::size_t d = 2;
  std::size_t instances = 10;
  std::size_t record_every = 0;
};

/// Accepts plain decimals and ratios such as "1/16".
inline double parse_number(const std::string& text) {
  const auto slash = text.find('/');
  try {
    std::size_t used = 0;
    if (slash == std::string::npos) {
      const double v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return v;
    }
    const double num = parse_number(text.substr(0, slash));
    const double den = parse_number(text.substr(slash + 1));
    if (den == 0.0) throw std::invalid_argument(text);
    return num / den;
  } catch (const std::logic_error&) {
    throw InputError("cannot read '" + text + "' as a number");
  }
}

inline std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  for (const auto& s : split(text, ',')) out.push_back(parse_number(s));
  if (out.empty()) throw InputError(std::string(what) + ": expected a comma-separated list");
  return out;
}

inline std::vector<std::pair<double, double>> parse_pairs(const std::string& text) {
  std::vector<std::pair<double, double>> out;
  for (const auto& s : split(text, ',')) {
    const auto parts = split(s, ':');
    if (parts.size() != 2) throw InputError("--points: expected x:y pairs, got '" + s + "'");
    out.emplace_back(parse_number(parts[0]), parse_number(parts[1]));
  }
  if (out.empty()) throw InputError("--points: expected at least one x:y pair");
  return out;
}

inline Observable parse_observable(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() == 1 && parts[0] == "norm") return Observable::norm();
  if (parts.size() == 2 && parts[0] == "density") return Observable::density(parse_number(parts[1]));
  if (parts.size() == 3 && parts[0] == "twopoint") {
    return Observable::two_point(parse_number(parts[1]), parse_number(parts[2]));
  }
  throw InputError("--observable: expected norm, density:x or twopoint:x:y");
}

/// Collects named checks and renders the JSON report.
class Report {
 public:
  void check(const std::string& name, double observed, double tolerance, bool pass) {
    checks_.push_back({{"name", name}, {"observed", observed}, {"tolerance", tolerance}, {"pass", pass}});
    all_pass_ = all_pass_ && pass;
  }
  void upper(const std::string& name, double observed, double tolerance) {
    check(name, observed, tolerance, observed <= tolerance);
  }
  void lower(const std::string& name, double observed, double tolerance) {
    check(name, observed, tolerance, observed >= tolerance);
  }
  void info(const std::string& key, io::json value) { extra_[key] = std::move(value); }
  bool pass() const { return all_pass_; }

  io::json to_json(const std::string& command) const {
    io::json j = {{"command", command}, {"checks", checks_}, {"pass", all_pass_}};
    for (const auto& [k, v] : extra_.items()) j[k] = v;
    return j;
  }

 private:
  io::json checks_ = io::json::array();
  io::json extra_ = io::json::object();
  bool all_pass_ = true;
};

class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw InputError("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : fallback_; }

 private:
  std::ofstream file_;
  std::ostream& fallback_;
};

inline Cmps load_cmps(const Options& o) {
  if (o.input.empty()) throw InputError("--input is required");
  return io::cmps_from_json(io::read_json_file(o.input));
}

// ---------------------------------------------------------------------------
// Subcommands

inline int cmd_norm(const Options& o, std::ostream& out) {
  const Cmps c = load_cmps(o);
  Sink sink(o.output, out);
  sink.stream() << io::fmt(norm_squared(c)) << '\n';
  return 0;
}

inline int cmd_density(const Options& o, std::ostream& out) {
  const Cmps c = load_cmps(o);
  const auto xs = parse_list(o.points, "--points");
  const auto values = density_profile(c, xs);
  Sink sink(o.output, out);
  io::write_csv_row(sink.stream(), {"x", "density"});
  for (std::size_t k = 0; k < xs.size(); ++k) io::write_csv_row(sink.stream(), {io::fmt(xs[k]), io::fmt(values[k])});
  return 0;
}

inline int cmd_twopoint(const Options& o, std::ostream& out) {
  const Cmps c = load_cmps(o);
  const auto pairs = parse_pairs(o.points);
  std::vector<Complex> values;
  for (const auto& [x, y] : pairs) {
    if (x < y) {
      values.push_back(two_point(c, x, y));
    } else if (x > y) {
      values.push_back(std::conj(two_point(c, y, x)));
    } else {
      throw InputError("twopoint: x and y must differ (use density for coincident points)");
    }
  }
  Sink sink(o.output, out);
  io::write_csv_row(sink.stream(), {"x", "y", "re", "im"});
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    io::write_csv_row(sink.stream(), {io::fmt(pairs[k].first), io::fmt(pairs[k].second), io::fmt(values[k].real()),
                                      io::fmt(values[k].imag())});
  }
  return 0;
}

inline int cmd_converge(const Options& o, std::ostream& out) {
  const Cmps c = load_cmps(o);
  const auto eps = parse_list(o.eps_list, "--eps-list");
  const auto table = convergence_study(c, parse_observable(o.observable), eps);
  Sink sink(o.output, out);
  io::write_csv_row(sink.stream(), {"eps", "re", "im", "error", "order"});
  for (const auto& r : table.rows) {
    io::write_csv_row(sink.stream(), {io::fmt(r.eps), io::fmt(r.value.real()), io::fmt(r.value.imag()),
                                      io::fmt(r.error), r.order ? io::fmt(*r.order) : std::string()});
  }
  return 0;
}

inline int cmd_pathsum_verify(const Options& o, std::ostream& out) {
  if (o.n == 0 || o.D == 0 || o.d == 0) throw InputError("pathsum-verify: --n, --D and --d must be positive");
  const double tol = o.tolerance > 0.0 ? o.tolerance : 1e-11;
  InstanceGenerator gen(o.seed);
  double worst = 0.0;
  for (std::size_t inst = 0; inst < o.instances; ++inst) {
    const Mps m = gen.mps(o.n, o.D, o.d);
    const ComplexVector dense = state_vector(m);
    const double scale = std::max(1.0, dense.cwiseAbs().maxCoeff());
    for (Eigen::Index idx = 0; idx < dense.size(); ++idx) {
      const auto j = index_to_string(static_cast<std::size_t>(idx), o.d, o.n);
      const Complex a = amplitude(m, j);
      const Complex p = path_sum_amplitude(m, j);
      worst = std::max({worst, std::abs(a - p) / scale, std::abs(a - dense(idx)) / scale, std::abs(p - dense(idx)) / scale});
    }
  }
  Report report;
  report.info("seed", o.seed);
  report.info("instances", o.instances);
  report.upper("max_pairwise_deviation", worst, tol);
  Sink sink(o.output, out);
  sink.stream() << report.to_json("pathsum-verify").dump(2) << '\n';
  return report.pass() ? 0 : 1;
}

namespace detail {

/// Product coherent state of `modes` modes, each truncated at `cutoff`, mode 0 most significant.
inline ComplexVector truncated_coherent(const ComplexVector& phi, std::size_t cutoff) {
  ComplexVector v = ComplexVector::Ones(1);
  for (Eigen::Index k = 0; k < phi.size(); ++k) {
    ComplexVector mode(static_cast<Eigen::Index>(cutoff + 1));
    Complex p = std::exp(-0.5 * std::norm(phi(k)));
    for (std::size_t n = 0; n <= cutoff; ++n) {
      mode(static_cast<Eigen::Index>(n)) = p;
      p *= phi(k) / std::sqrt(static_cast<double>(n + 1));
    }
    v = kron(v, mode);
  }
  return v;
}

inline Cmps path_integral_instance(double K, double R) {
  return make_uniform_cmps(0.1, ComplexMatrix::Constant(1, 1, K), ComplexMatrix::Constant(1, 1, R),
                           ComplexRowVector::Ones(1), ComplexVector::Ones(1));
}

}  // namespace detail

inline int cmd_coherent_verify(const Options& o, std::ostream& out) {
  const double tol_overlap = 1e-9;
  InstanceGenerator gen(o.seed);
  Report report;

  double overlap_err = 0.0;
  for (Eigen::Index modes = 1; modes <= 2; ++modes) {
    for (int rep = 0; rep < 5; ++rep) {
      const ComplexVector a = gen.matrix(modes, 1, 0.7);
      const ComplexVector b = gen.matrix(modes, 1, 0.7);
      const Complex fock = detail::truncated_coherent(a, 12).dot(detail::truncated_coherent(b, 12));
      overlap_err = std::max(overlap_err, std::abs(fock - coherent_overlap({a}, {b})));
    }
  }
  report.upper("overlap_formula", overlap_err, tol_overlap);

  const std::size_t res_cutoff = o.fock_cutoff > 0 ? o.fock_cutoff : 3;
  report.upper("identity_resolution", identity_resolution_check(1, res_cutoff, 20), 1e-8);

  double comm = 0.0;
  for (int rep = 0; rep < 3; ++rep) {
    const ComplexMatrix F = embed_generator(gen.hermitian(2), gen.matrix(2, 2), 2, 1, 0.25);
    const ComplexMatrix N = aux_number_operator(2, 2, 1);
    comm = std::max(comm, (F * N - N * F).cwiseAbs().maxCoeff());
  }
  report.upper("generator_conserves_aux_number", comm, 1e-13);

  const double fid_tol = o.tolerance > 0.0 ? o.tolerance : 1e-4;
  for (const auto& [label, K] : {std::pair<const char*, double>{"path_integral_fidelity_K0", 0.0},
                                 std::pair<const char*, double>{"path_integral_fidelity_K1", 1.0}}) {
    const Cmps c = detail::path_integral_instance(K, 0.3);
    const auto pi = path_integral_state(c, 2, o.quad_order, 1);
    const auto exact = exact_state_from_cmps(c, c.length() / 2.0, 1);
    report.lower(label, fidelity(pi, exact), 1.0 - fid_tol);
  }
  report.info("seed", o.seed);
  report.info("quad_order", o.quad_order);
  Sink sink(o.output, out);
  sink.stream() << report.to_json("coherent-verify").dump(2) << '\n';
  return report.pass() ? 0 : 1;
}

/// Normalised f(x) proportional to sin(pi x / l) on n cells.
inline FieldGrid demo_wavefunction(double length, std::size_t n) {
  FieldGrid f{length, std::vector<Complex>(n)};
  for (std::size_t i = 0; i < n; ++i) f.values[i] = std::sin(std::numbers::pi * f.position(i) / length);
  const double norm = std::sqrt(f.norm_squared());
  for (auto& v : f.values) v /= norm;
  return f;
}

inline int cmd_complete_demo(const Options& o, std::ostream& out) {
  const std::size_t cutoff = o.fock_cutoff > 0 ? o.fock_cutoff : 3;
  const FieldGrid f = demo_wavefunction(1.0, 4);
  const auto ref = one_particle_state(f, f.spacing(), cutoff);
  const std::vector<double> alphas{0.2, 0.1, 0.05};
  std::vector<double> infid;
  for (double alpha : alphas) {
    const auto approx = exact_state_from_cmps(approximate_one_particle(f, alpha), f.spacing(), cutoff);
    infid.push_back(raw_overlap_infidelity(ref, approx));
  }
  Sink sink(o.output, out);
  io::write_csv_row(sink.stream(), {"alpha", "infidelity", "ratio"});
  bool pass = true;
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    std::string ratio;
    if (k > 0) {
      const double r = infid[k - 1] / infid[k];
      pass = pass && r >= 3.5 && r <= 4.5;
      ratio = io::fmt(r);
    }
    io::write_csv_row(sink.stream(), {io::fmt(alphas[k]), io::fmt(infid[k]), ratio});
  }
  return pass ? 0 : 1;
}

inline int cmd_evolve(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.input.empty()) throw InputError("--input is required");
  const auto in = io::evolution_from_json(io::read_json_file(o.input));
  const std::size_t steps = in.config.step_count();
  const std::size_t every = o.record_every > 0 ? o.record_every : std::max<std::size_t>(steps, 1);
  const auto history = evolve_history(in.config, in.initial, every);
  const FieldGrid& last = history.back().second;
  {
    Sink sink(o.output, out);
    io::write_evolution_csv(sink.stream(), history);
  }
  if (!o.cmps_output.empty()) {
    std::ofstream file(o.cmps_output);
    if (!file) throw InputError("cannot write '" + o.cmps_output + "'");
    file << io::cmps_to_json(cmps_from_coherent(last)).dump(2) << '\n';
  }
  const double n0 = in.initial.norm_squared();
  const double drift = std::abs(last.norm_squared() - n0) / std::max(n0, 1e-300);
  const double tol = (o.tolerance > 0.0 ? o.tolerance : 1e-10) * std::max(1.0, static_cast<double>(steps) / 1000.0);
  err << "norm drift " << io::fmt(drift) << " (tolerance " << io::fmt(tol) << ")\n";
  return drift <= tol ? 0 : 1;
}

// ---------------------------------------------------------------------------

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"cmpslab: continuous matrix product state laboratory"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--output", o.output, "Output file (default stdout)");
  };
  auto with_input = [&](CLI::App* sub) {
    sub->add_option("--input", o.input, "Input JSON file")->required();
    common(sub);
  };

  auto* norm = app.add_subcommand("norm", "Norm of a cMPS");
  with_input(norm);
  auto* density = app.add_subcommand("density", "Density profile at points");
  with_input(density);
  density->add_option("--points", o.points, "Comma-separated positions")->required();
  auto* twopoint = app.add_subcommand("twopoint", "Two-point function at x:y pairs");
  with_input(twopoint);
  twopoint->add_option("--points", o.points, "Comma-separated x:y pairs")->required();
  auto* converge = app.add_subcommand("converge", "Lattice convergence table");
  with_input(converge);
  converge->add_option("--eps-list", o.eps_list, "Decreasing eps values, e.g. 1/16,1/32,1/64")->required();
  converge->add_option("--observable", o.observable, "norm, density:x or twopoint:x:y");
  auto* pathsum = app.add_subcommand("pathsum-verify", "Random lattice MPS three-way agreement");
  common(pathsum);
  pathsum->add_option("--seed", o.seed);
  pathsum->add_option("--n", o.n, "Sites");
  pathsum->add_option("--D", o.D, "Maximum bond dimension");
  pathsum->add_option("--d", o.d, "Physical dimension");
  pathsum->add_option("--instances", o.instances);
  pathsum->add_option("--tolerance", o.tolerance);
  auto* coherent = app.add_subcommand("coherent-verify", "Coherent-state and path-integral checks");
  common(coherent);
  coherent->add_option("--seed", o.seed);
  coherent->add_option("--quad-order", o.quad_order, "Gauss-Hermite order for the path integral");
  coherent->add_option("--fock-cutoff", o.fock_cutoff, "Cutoff for the identity-resolution check");
  coherent->add_option("--tolerance", o.tolerance, "Allowed path-integral infidelity");
  auto* complete = app.add_subcommand("complete-demo", "One-particle approximation by coherent cMPS");
  common(complete);
  complete->add_option("--fock-cutoff", o.fock_cutoff);
  auto* evolve = app.add_subcommand("evolve", "Free evolution of a coherent state");
  with_input(evolve);
  evolve->add_option("--cmps-output", o.cmps_output, "Write the final state as cMPS JSON");
  evolve->add_option("--record-every", o.record_every, "Snapshot interval in steps");
  evolve->add_option("--tolerance", o.tolerance, "Allowed norm drift per 1000 steps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (*norm) return cmd_norm(o, out);
    if (*density) return cmd_density(o, out);
    if (*twopoint) return cmd_twopoint(o, out);
    if (*converge) return cmd_converge(o, out);
    if (*pathsum) return cmd_pathsum_verify(o, out);
    if (*coherent) return cmd_coherent_verify(o, out);
    if (*complete) return cmd_complete_demo(o, out);
    if (*evolve) return cmd_evolve(o, out, err);
  } catch (const ResourceError& e) {
    err << "resource error: " << e.what() << '\n';
    return 3;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

}  // namespace cmpslab::cli

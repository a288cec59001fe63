#pragma once

// Continuous matrix product states on [0, l] with piecewise-constant K(s), R(s):
//
//   |chi> = <wL| P exp[-i int_0^l K (x) 1 + i R (x) psi^dag(s) - i R^dag (x) psi(s) ds] |wR> |Omega>
//
// The path-ordered propagator is U(l,0) = U(l,l-eps) ... U(eps,0), so the
// auxiliary system starts in |wR> at s = 0 and is projected on <wL| at s = l.
// Observables come from the auxiliary density matrix rho(s), which obeys
//
//   d rho / ds = -i[K, rho] + R rho R^dag - 1/2 {R^dag R, rho},   rho(0) = |wR><wR|.
//
// The left boundary is either a bra <wL| or the trace (a mixed left boundary).

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Eigenvalues>

#include "cmpslab/errors.hpp"
#include "cmpslab/lattice_mps.hpp"
#include "cmpslab/linalg.hpp"

namespace cmpslab {

struct Segment {
  double from = 0.0;
  double to = 0.0;
  ComplexMatrix K;
  ComplexMatrix R;

  double length() const { return to - from; }
};

struct TraceBoundary {
  bool operator==(const TraceBoundary&) const = default;
};

/// Bra components of <wL| (no conjugation is applied), or the trace marker.
using LeftBoundary = std::variant<TraceBoundary, ComplexRowVector>;

class Cmps {
 public:
  /// Validates the tiling and Hermiticity and brings the right boundary to unit
  /// norm. With a vector left boundary the removed scale is moved into <wL|,
  /// so every amplitude is unchanged; with the trace boundary the overall scale
  /// of the mixed state is dropped.
  Cmps(double length, std::vector<Segment> segments, LeftBoundary left, ComplexVector right)
      : length_(length), segments_(std::move(segments)), left_(std::move(left)), right_(std::move(right)) {
    validate();
    const double scale = right_.norm();
    right_ /= scale;
    if (auto* bra = std::get_if<ComplexRowVector>(&left_)) *bra *= scale;
  }

  Eigen::Index bond_dim() const { return segments_.front().K.rows(); }
  double length() const { return length_; }
  const std::vector<Segment>& segments() const { return segments_; }
  const LeftBoundary& left() const { return left_; }
  const ComplexVector& right() const { return right_; }
  bool has_trace_left() const { return std::holds_alternative<TraceBoundary>(left_); }

  const ComplexRowVector& left_vector() const {
    if (has_trace_left()) throw UnsupportedError("cMPS has a trace left boundary, not a vector");
    return std::get<ComplexRowVector>(left_);
  }

  /// Segment containing s; segments are right-open except the last.
  std::size_t segment_index(double s) const {
    if (!(s >= 0.0 && s <= length_)) {
      throw InputError("position " + std::to_string(s) + " outside [0, " + std::to_string(length_) + "]");
    }
    for (std::size_t k = 0; k < segments_.size(); ++k) {
      if (s < segments_[k].to) return k;
    }
    return segments_.size() - 1;
  }

  const Segment& segment_at(double s) const { return segments_[segment_index(s)]; }

  /// <wL|^dagger <wL| for a vector boundary, identity for the trace.
  ComplexMatrix left_environment() const {
    if (has_trace_left()) return identity(bond_dim());
    const auto& bra = std::get<ComplexRowVector>(left_);
    return bra.adjoint() * bra;
  }

 private:
  void validate() const {
    if (!(length_ > 0.0) || !std::isfinite(length_)) throw InputError("cMPS: interval length must be positive");
    if (segments_.empty()) throw InputError("cMPS: at least one segment is required");
    const Eigen::Index d = segments_.front().K.rows();
    if (d == 0) throw InputError("cMPS: bond dimension must be positive");
    const double tol = 1e-12 * std::max(1.0, length_);
    double cursor = 0.0;
    for (std::size_t k = 0; k < segments_.size(); ++k) {
      const auto& seg = segments_[k];
      const std::string where = "cMPS segment " + std::to_string(k);
      if (std::abs(seg.from - cursor) > tol) throw InputError(where + ": segments must tile [0, l] without gaps");
      if (!(seg.to > seg.from)) throw InputError(where + ": empty or reversed sub-interval");
      if (seg.K.rows() != d || seg.K.cols() != d || seg.R.rows() != d || seg.R.cols() != d) {
        throw DimensionError(where + ": K and R must be " + std::to_string(d) + "x" + std::to_string(d));
      }
      if (!seg.K.allFinite() || !seg.R.allFinite()) throw InputError(where + ": non-finite matrix entry");
      if (!is_hermitian(seg.K)) throw InputError(where + ": K is not Hermitian");
      cursor = seg.to;
    }
    if (std::abs(cursor - length_) > tol) throw InputError("cMPS: segments must end at l");
    if (right_.size() != d) throw DimensionError("cMPS: right boundary has the wrong dimension");
    if (!right_.allFinite() || right_.norm() == 0.0) throw InputError("cMPS: right boundary must be finite and nonzero");
    if (const auto* bra = std::get_if<ComplexRowVector>(&left_)) {
      if (bra->size() != d) throw DimensionError("cMPS: left boundary has the wrong dimension");
      if (!bra->allFinite()) throw InputError("cMPS: left boundary must be finite");
    }
  }

  double length_;
  std::vector<Segment> segments_;
  LeftBoundary left_;
  ComplexVector right_;
};

/// Single-segment convenience constructor.
inline Cmps make_uniform_cmps(double length, ComplexMatrix K, ComplexMatrix R, LeftBoundary left, ComplexVector right) {
  return Cmps(length, {Segment{0.0, length, std::move(K), std::move(R)}}, std::move(left), std::move(right));
}

struct DensityMatrix {
  ComplexMatrix rho;

  double trace() const { return rho.trace().real(); }
  double hermiticity_defect() const { return (rho - rho.adjoint()).cwiseAbs().maxCoeff(); }
  double min_eigenvalue() const {
    const ComplexMatrix h = 0.5 * (rho + rho.adjoint());
    return Eigen::SelfAdjointEigenSolver<ComplexMatrix>(h, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  }
};

// ---------------------------------------------------------------------------
// Transfer evolution

/// Generator L on column-stacked vec(rho):
/// -i[K, rho] + R rho R^dag - 1/2 {R^dag R, rho}.
inline ComplexMatrix transfer_generator(const ComplexMatrix& K, const ComplexMatrix& R) {
  require_square(K, "transfer_generator");
  if (R.rows() != K.rows() || R.cols() != K.cols()) throw DimensionError("transfer_generator: K and R differ in size");
  if (!is_hermitian(K)) throw InputError("transfer_generator: K is not Hermitian");
  const Eigen::Index d = K.rows();
  const ComplexMatrix id = identity(d);
  const ComplexMatrix rdr = R.adjoint() * R;
  return -kI * (kron(id, K) - kron(K.transpose(), id)) + kron(R.conjugate(), R) -
         0.5 * (kron(id, rdr) + kron(rdr.transpose(), id));
}

namespace detail {

/// vec(rho) carried from s = from to s = to (from <= to) through the segments.
inline ComplexVector propagate_forward(const Cmps& c, ComplexVector v, double from, double to) {
  for (const auto& seg : c.segments()) {
    const double a = std::max(from, seg.from);
    const double b = std::min(to, seg.to);
    if (b <= a) continue;
    v = matrix_exponential(transfer_generator(seg.K, seg.R) * (b - a)) * v;
  }
  return v;
}

/// vec(sigma) carried backwards from s = from to s = to (to <= from) under the
/// adjoint generator, so that <sigma(to), rho(to)> = <sigma(from), rho(from)>.
inline ComplexVector propagate_backward(const Cmps& c, ComplexVector v, double from, double to) {
  for (auto it = c.segments().rbegin(); it != c.segments().rend(); ++it) {
    const double a = std::max(to, it->from);
    const double b = std::min(from, it->to);
    if (b <= a) continue;
    v = matrix_exponential(transfer_generator(it->K, it->R).adjoint() * (b - a)) * v;
  }
  return v;
}

inline ComplexVector initial_rho(const Cmps& c) { return vectorize(c.right() * c.right().adjoint()); }

inline Complex hs_inner(const ComplexVector& sigma, const ComplexVector& x) { return sigma.dot(x); }

}  // namespace detail

/// rho(s) from rho(0) = |wR><wR|.
inline DensityMatrix density_matrix_at(const Cmps& c, double s) {
  c.segment_index(s);
  return {unvectorize(detail::propagate_forward(c, detail::initial_rho(c), 0.0, s), c.bond_dim())};
}

/// rho at each of the given increasing positions, propagated incrementally.
inline std::vector<DensityMatrix> density_matrix_trajectory(const Cmps& c, const std::vector<double>& points) {
  std::vector<DensityMatrix> out;
  out.reserve(points.size());
  ComplexVector v = detail::initial_rho(c);
  double s = 0.0;
  for (double p : points) {
    c.segment_index(p);
    if (p < s) throw InputError("density_matrix_trajectory: points must be increasing");
    v = detail::propagate_forward(c, std::move(v), s, p);
    s = p;
    out.push_back({unvectorize(v, c.bond_dim())});
  }
  return out;
}

/// <chi|chi> = <wL| rho(l) |wL>, or Tr rho(l) for the trace boundary.
inline double norm_squared(const Cmps& c) {
  const ComplexVector rho = detail::propagate_forward(c, detail::initial_rho(c), 0.0, c.length());
  return detail::hs_inner(vectorize(c.left_environment()), rho).real();
}

/// <psi^dag(x) psi(x)> / <chi|chi> at each point.
inline std::vector<double> density_profile(const Cmps& c, const std::vector<double>& points) {
  for (double x : points) c.segment_index(x);
  const double norm = norm_squared(c);
  if (!(norm > 0.0)) throw UndefinedValueError("density_profile: state has zero norm");
  const Eigen::Index d = c.bond_dim();
  const ComplexVector rho0 = detail::initial_rho(c);
  const ComplexVector sigma_l = vectorize(c.left_environment());
  std::vector<double> out;
  out.reserve(points.size());
  for (double x : points) {
    const ComplexMatrix& R = c.segment_at(x).R;
    const ComplexMatrix rho = unvectorize(detail::propagate_forward(c, rho0, 0.0, x), d);
    const ComplexVector sigma = detail::propagate_backward(c, sigma_l, c.length(), x);
    out.push_back(detail::hs_inner(sigma, vectorize(R * rho * R.adjoint())).real() / norm);
  }
  return out;
}

/// <psi^dag(x) psi(y)> / <chi|chi> for x < y.
inline Complex two_point(const Cmps& c, double x, double y) {
  c.segment_index(x);
  c.segment_index(y);
  if (!(x < y)) throw InputError("two_point: requires x < y (swap the arguments and conjugate)");
  const double norm = norm_squared(c);
  if (!(norm > 0.0)) throw UndefinedValueError("two_point: state has zero norm");
  const Eigen::Index d = c.bond_dim();
  const ComplexMatrix rho_x = unvectorize(detail::propagate_forward(c, detail::initial_rho(c), 0.0, x), d);
  // The bra copy absorbs psi(x), the ket copy psi(y).
  const ComplexVector opened = vectorize(rho_x * c.segment_at(x).R.adjoint());
  const ComplexMatrix carried = unvectorize(detail::propagate_forward(c, opened, x, y), d);
  const ComplexVector closed = vectorize(c.segment_at(y).R * carried);
  const ComplexVector sigma = detail::propagate_backward(c, vectorize(c.left_environment()), c.length(), y);
  return detail::hs_inner(sigma, closed) / norm;
}

// ---------------------------------------------------------------------------
// Lattice discretisation

/// first_order: A^0 = 1 - i eps K - eps/2 R^dag R, A^1 = sqrt(eps) R.
/// exact_propagator: A^j = <j| exp(-i eps G) |0> with G the one-cell generator
/// K (x) 1 + i R (x) a^dag / sqrt(eps) - i R^dag (x) a / sqrt(eps) on a cell mode
/// truncated at `cell_cutoff` bosons.
enum class CellScheme { first_order, exact_propagator };

/// Cell matrices in auxiliary orientation (acting on the ket of the auxiliary system).
inline SiteTensor cell_operators(const ComplexMatrix& K, const ComplexMatrix& R, double eps, CellScheme scheme,
                                 std::size_t cell_cutoff = 1) {
  const Eigen::Index d = K.rows();
  if (scheme == CellScheme::first_order) {
    if (cell_cutoff != 1) throw UnsupportedError("first-order cell tensors keep at most one boson per cell");
    return {identity(d) - kI * eps * K - 0.5 * eps * (R.adjoint() * R), std::sqrt(eps) * R};
  }
  const ComplexMatrix a = lowering_operator(cell_cutoff);
  const auto m = a.rows();
  const ComplexMatrix generator =
      kron(K, identity(m)) + (kI / std::sqrt(eps)) * kron(R, a.adjoint()) - (kI / std::sqrt(eps)) * kron(R.adjoint(), a);
  const ComplexMatrix prop = matrix_exponential(-kI * eps * generator);
  SiteTensor out(static_cast<std::size_t>(m), ComplexMatrix(d, d));
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index r = 0; r < d; ++r) {
      for (Eigen::Index col = 0; col < d; ++col) out[static_cast<std::size_t>(j)](r, col) = prop(r * m + j, col * m);
    }
  }
  return out;
}

/// Number of cells of width eps; every segment length must be a multiple of eps.
inline std::size_t cell_count(const Cmps& c, double eps) {
  if (!(eps > 0.0) || !std::isfinite(eps)) throw InputError("discretize: eps must be positive");
  std::size_t total = 0;
  for (const auto& seg : c.segments()) {
    const double ratio = seg.length() / eps;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
      throw InputError("discretize: eps = " + std::to_string(eps) + " does not divide segment [" +
                       std::to_string(seg.from) + ", " + std::to_string(seg.to) + "]");
    }
    total += static_cast<std::size_t>(rounded);
  }
  if (total > 10000) throw ResourceError("discretize: more than 1e4 cells");
  return total;
}

namespace detail {

/// Site k of the chain is cell k = [k eps, (k+1) eps]. Since the auxiliary
/// propagator acts as B_n ... B_1 |wR>, the chain stores transposes:
///   amplitude = wR^T B_1^T ... B_n^T <wL|^T.
inline Mps chain_from_cells(const Cmps& c, double eps, CellScheme scheme, std::size_t cell_cutoff,
                            const ComplexVector& bra_transposed) {
  const std::size_t n = cell_count(c, eps);
  std::vector<SiteTensor> sites;
  sites.reserve(n);
  for (const auto& seg : c.segments()) {
    SiteTensor cell = cell_operators(seg.K, seg.R, eps, scheme, cell_cutoff);
    for (auto& a : cell) a.transposeInPlace();
    const auto cells = static_cast<std::size_t>(std::round(seg.length() / eps));
    for (std::size_t k = 0; k < cells; ++k) sites.push_back(cell);
  }
  return Mps(std::move(sites), c.right().transpose(), bra_transposed);
}

}  // namespace detail

/// Lattice MPS of a cMPS with a vector left boundary.
inline Mps discretize(const Cmps& c, double eps, CellScheme scheme = CellScheme::first_order,
                      std::size_t cell_cutoff = 1) {
  if (c.has_trace_left()) {
    throw UnsupportedError("discretize: trace left boundary describes a mixture; use discretize_ensemble");
  }
  return detail::chain_from_cells(c, eps, scheme, cell_cutoff, c.left_vector().transpose());
}

/// One chain for a vector left boundary; for the trace boundary one chain per
/// auxiliary basis bra <a|, whose incoherent sum is the mixed state.
inline std::vector<Mps> discretize_ensemble(const Cmps& c, double eps, CellScheme scheme = CellScheme::first_order,
                                            std::size_t cell_cutoff = 1) {
  if (!c.has_trace_left()) return {discretize(c, eps, scheme, cell_cutoff)};
  std::vector<Mps> out;
  for (Eigen::Index a = 0; a < c.bond_dim(); ++a) {
    out.push_back(detail::chain_from_cells(c, eps, scheme, cell_cutoff, ComplexVector::Unit(c.bond_dim(), a)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Observables on the continuum and on the lattice

struct Observable {
  enum class Kind { norm, density, two_point };
  Kind kind = Kind::norm;
  double x = 0.0;
  double y = 0.0;

  static Observable norm() { return {Kind::norm, 0.0, 0.0}; }
  static Observable density(double x) { return {Kind::density, x, 0.0}; }
  static Observable two_point(double x, double y) { return {Kind::two_point, x, y}; }

  std::string label() const {
    switch (kind) {
      case Kind::norm: return "norm";
      case Kind::density: return "density(" + std::to_string(x) + ")";
      case Kind::two_point: return "two_point(" + std::to_string(x) + "," + std::to_string(y) + ")";
    }
    return "?";
  }
};

inline Complex continuum_value(const Cmps& c, const Observable& obs) {
  switch (obs.kind) {
    case Observable::Kind::norm: return norm_squared(c);
    case Observable::Kind::density: return density_profile(c, {obs.x}).front();
    case Observable::Kind::two_point: return two_point(c, obs.x, obs.y);
  }
  return {};
}

/// Index of the cell [k eps, (k+1) eps) containing x; x = l maps to the last cell.
inline std::size_t cell_of(double x, double eps, std::size_t cells) {
  const auto k = static_cast<std::size_t>(std::floor(x / eps + 1e-9));
  return std::min(k, cells - 1);
}

/// sum over the ensemble of <m| O |m>.
inline Complex ensemble_expectation(const std::vector<Mps>& ensemble, const std::map<std::size_t, ComplexMatrix>& ops) {
  Complex total{};
  for (const auto& m : ensemble) total += matrix_element(m, ops, m);
  return total;
}

/// Observable on the discretised state: norm, <n_k>/eps, <a_i^dag a_j>/eps,
/// the last two normalised by the lattice norm.
inline Complex lattice_value(const Cmps& c, double eps, const Observable& obs, CellScheme scheme = CellScheme::first_order,
                             std::size_t cell_cutoff = 1) {
  const auto ensemble = discretize_ensemble(c, eps, scheme, cell_cutoff);
  const double norm = ensemble_expectation(ensemble, {}).real();
  if (obs.kind == Observable::Kind::norm) return norm;
  if (!(norm > 0.0)) throw UndefinedValueError("lattice_value: state has zero norm");
  const std::size_t cells = ensemble.front().site_count();
  const ComplexMatrix a = lowering_operator(ensemble.front().phys_dim() - 1);
  if (obs.kind == Observable::Kind::density) {
    c.segment_index(obs.x);
    const std::size_t k = cell_of(obs.x, eps, cells);
    return ensemble_expectation(ensemble, {{k, a.adjoint() * a}}) / (eps * norm);
  }
  c.segment_index(obs.x);
  c.segment_index(obs.y);
  const std::size_t i = cell_of(obs.x, eps, cells);
  const std::size_t j = cell_of(obs.y, eps, cells);
  if (i == j) return ensemble_expectation(ensemble, {{i, a.adjoint() * a}}) / (eps * norm);
  return ensemble_expectation(ensemble, {{i, a.adjoint()}, {j, a}}) / (eps * norm);
}

// ---------------------------------------------------------------------------
// Convergence in eps

struct ConvergenceRow {
  double eps = 0.0;
  Complex value;
  double error = 0.0;
  std::optional<double> order;  ///< from this row and the previous one
};

struct ConvergenceTable {
  Observable observable;
  Complex reference;  ///< continuum value from exact transfer evolution
  std::vector<ConvergenceRow> rows;
  bool exact = false;  ///< every lattice value already equals the reference

  bool orders_within(double lo, double hi) const {
    if (exact) return true;
    bool any = false;
    for (const auto& r : rows) {
      if (!r.order) continue;
      any = true;
      if (*r.order < lo || *r.order > hi) return false;
    }
    return any;
  }
};

/// Evaluates `obs` on discretize(c, eps) for each eps and measures the error
/// against the continuum value; the order between consecutive rows is
/// log(err_prev / err) / log(eps_prev / eps).
inline ConvergenceTable convergence_study(const Cmps& c, const Observable& obs, const std::vector<double>& eps_list) {
  if (eps_list.size() < 3) throw InputError("convergence_study: at least three eps values are required");
  for (std::size_t k = 1; k < eps_list.size(); ++k) {
    if (!(eps_list[k] < eps_list[k - 1])) throw InputError("convergence_study: eps values must strictly decrease");
  }
  for (double eps : eps_list) cell_count(c, eps);

  ConvergenceTable table;
  table.observable = obs;
  table.reference = continuum_value(c, obs);
  const double floor = 1e-13 * std::max(1.0, std::abs(table.reference));
  bool exact = true;
  for (std::size_t k = 0; k < eps_list.size(); ++k) {
    ConvergenceRow row;
    row.eps = eps_list[k];
    row.value = lattice_value(c, row.eps, obs);
    row.error = std::abs(row.value - table.reference);
    if (row.error > floor) exact = false;
    if (k > 0) {
      const auto& prev = table.rows.back();
      if (prev.error > floor && row.error > floor) {
        row.order = std::log(prev.error / row.error) / std::log(prev.eps / row.eps);
      }
    }
    table.rows.push_back(row);
  }
  table.exact = exact;
  return table;
}

// ---------------------------------------------------------------------------
// Transformations

/// K -> G K G^dag, R -> G R G^dag, |wR> -> G|wR>, <wL| -> <wL|G^dag, G unitary.
inline Cmps gauge_transform(const Cmps& c, const ComplexMatrix& G) {
  if (G.rows() != c.bond_dim() || G.cols() != c.bond_dim()) throw DimensionError("gauge_transform: G has the wrong size");
  if ((G.adjoint() * G - identity(G.rows())).cwiseAbs().maxCoeff() > 1e-10) {
    throw InputError("gauge_transform: G is not unitary");
  }
  std::vector<Segment> segs;
  for (const auto& s : c.segments()) {
    ComplexMatrix K = G * s.K * G.adjoint();
    K = 0.5 * (K + K.adjoint());
    segs.push_back({s.from, s.to, std::move(K), G * s.R * G.adjoint()});
  }
  LeftBoundary left = c.left();
  if (auto* bra = std::get_if<ComplexRowVector>(&left)) *bra = *bra * G.adjoint();
  return Cmps(c.length(), std::move(segs), std::move(left), G * c.right());
}

/// Same state with segments additionally split at the given interior points.
inline Cmps refine(const Cmps& c, std::vector<double> cuts) {
  std::sort(cuts.begin(), cuts.end());
  const double tol = 1e-12 * std::max(1.0, c.length());
  std::vector<Segment> out;
  for (const auto& seg : c.segments()) {
    double start = seg.from;
    for (double cut : cuts) {
      if (cut > start + tol && cut < seg.to - tol) {
        out.push_back({start, cut, seg.K, seg.R});
        start = cut;
      }
    }
    out.push_back({start, seg.to, seg.K, seg.R});
  }
  return Cmps(c.length(), std::move(out), c.left(), c.right());
}

}  // namespace cmpslab

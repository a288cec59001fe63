#pragma once

// Real-time evolution of a coherent field state under
//
//   H = int dpsi^dag/dx dpsi/dx + V(x) psi^dag psi + w/2 int psi^dag psi^dag psi psi.
//
// For w = 0 a coherent state stays coherent and its label obeys
// i dPhi/dt = -d^2 Phi/dx^2 + V Phi, so the evolved state is a D = 1 cMPS.
// Fields live on the cell-centred FieldGrid with Dirichlet zero ghost values
// just outside [0, l].

#include <cmath>
#include <cstddef>
#include <vector>

#include "cmpslab/cmps_core.hpp"
#include "cmpslab/errors.hpp"
#include "cmpslab/field_states.hpp"
#include "cmpslab/field_types.hpp"
#include "cmpslab/linalg.hpp"

namespace cmpslab {

struct EvolutionConfig {
  std::vector<double> potential;  ///< V at the grid points; empty means V = 0
  double interaction_w = 0.0;
  double total_time = 0.0;
  double time_step = 0.0;

  /// Number of steps; T must be a non-negative multiple of dt.
  std::size_t step_count() const {
    if (!(time_step > 0.0) || !std::isfinite(time_step)) throw InputError("EvolutionConfig: dt must be positive");
    if (!(total_time >= 0.0) || !std::isfinite(total_time)) throw InputError("EvolutionConfig: T must be non-negative");
    const double ratio = total_time / time_step;
    const double rounded = std::round(ratio);
    if (std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
      throw InputError("EvolutionConfig: T is not a multiple of dt");
    }
    return static_cast<std::size_t>(rounded);
  }
};

namespace detail {

inline std::vector<double> potential_on(const FieldGrid& phi, const std::vector<double>& V) {
  if (V.empty()) return std::vector<double>(phi.size(), 0.0);
  if (V.size() != phi.size()) throw InputError("potential has " + std::to_string(V.size()) + " samples, grid has " +
                                               std::to_string(phi.size()));
  for (double v : V) {
    if (!std::isfinite(v)) throw InputError("potential: non-finite sample");
  }
  return V;
}

inline Complex ghost_at(const std::vector<Complex>& v, std::ptrdiff_t i) {
  if (i < 0 || i >= static_cast<std::ptrdiff_t>(v.size())) return {};
  return v[static_cast<std::size_t>(i)];
}

/// Solves (diag_i x_i + off (x_{i-1} + x_{i+1})) = rhs_i with zero ends.
inline std::vector<Complex> solve_tridiagonal(const std::vector<Complex>& diag, Complex off, std::vector<Complex> rhs) {
  const std::size_t n = diag.size();
  std::vector<Complex> c(n);
  Complex denom = diag[0];
  c[0] = off / denom;
  rhs[0] /= denom;
  for (std::size_t i = 1; i < n; ++i) {
    denom = diag[i] - off * c[i - 1];
    c[i] = off / denom;
    rhs[i] = (rhs[i] - off * rhs[i - 1]) / denom;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
  return rhs;
}

}  // namespace detail

/// Discrete H Phi = -(Phi_{i+1} - 2 Phi_i + Phi_{i-1}) / h^2 + V_i Phi_i.
inline std::vector<Complex> apply_hamiltonian(const FieldGrid& phi, const std::vector<double>& V) {
  const auto pot = detail::potential_on(phi, V);
  const double h2 = phi.spacing() * phi.spacing();
  std::vector<Complex> out(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const auto ii = static_cast<std::ptrdiff_t>(i);
    const Complex lap = detail::ghost_at(phi.values, ii + 1) - 2.0 * phi.values[i] + detail::ghost_at(phi.values, ii - 1);
    out[i] = -lap / h2 + pot[i] * phi.values[i];
  }
  return out;
}

/// Pointwise |dPhi/dx|^2 + V |Phi|^2 + w |Phi|^4, derivative by centred differences.
inline std::vector<double> hamiltonian_density(const FieldGrid& phi, const std::vector<double>& V, double w) {
  phi.validate();
  const auto pot = detail::potential_on(phi, V);
  const double h = phi.spacing();
  std::vector<double> out(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const auto ii = static_cast<std::ptrdiff_t>(i);
    const Complex grad = (detail::ghost_at(phi.values, ii + 1) - detail::ghost_at(phi.values, ii - 1)) / (2.0 * h);
    const double n = std::norm(phi.values[i]);
    out[i] = std::norm(grad) + pot[i] * n + w * n * n;
  }
  return out;
}

/// h sum_i [ |Phi_{i+1} - Phi_i|^2 / h^2 + V_i |Phi_i|^2 ] over all links,
/// including those to the zero ghosts; this equals h <Phi, H Phi> and is
/// conserved exactly by the Crank-Nicolson step.
inline double discrete_energy(const FieldGrid& phi, const std::vector<double>& V) {
  const auto pot = detail::potential_on(phi, V);
  const double h = phi.spacing();
  double total = 0.0;
  const auto n = static_cast<std::ptrdiff_t>(phi.size());
  for (std::ptrdiff_t i = -1; i < n; ++i) {
    total += std::norm(detail::ghost_at(phi.values, i + 1) - detail::ghost_at(phi.values, i)) / (h * h);
  }
  for (std::size_t i = 0; i < phi.size(); ++i) total += pot[i] * std::norm(phi.values[i]);
  return total * h;
}

/// S = sum_t dt sum_x' [ i Phi_t^* (Phi_{t+1} - Phi_t) / dt - H(Phi_t) ], with
/// sum_x' the trapezoid rule over the grid points.
inline Complex action_realtime(const std::vector<FieldGrid>& history, double dt, const std::vector<double>& V, double w) {
  if (history.size() < 2) throw InputError("action_realtime: at least two time slices are required");
  if (!(dt > 0.0)) throw InputError("action_realtime: dt must be positive");
  const std::size_t n = history.front().size();
  for (const auto& g : history) {
    g.validate();
    if (g.size() != n || g.length != history.front().length) throw InputError("action_realtime: slices use different grids");
  }
  const double h = history.front().spacing();
  auto trapezoid_weight = [&](std::size_t i) { return (n > 1 && (i == 0 || i + 1 == n)) ? 0.5 * h : h; };
  Complex s{};
  for (std::size_t t = 0; t + 1 < history.size(); ++t) {
    const auto& cur = history[t].values;
    const auto& next = history[t + 1].values;
    const auto dens = hamiltonian_density(history[t], V, w);
    for (std::size_t i = 0; i < n; ++i) {
      s += trapezoid_weight(i) * (kI * std::conj(cur[i]) * (next[i] - cur[i]) - dt * dens[i]);
    }
  }
  return s;
}

/// `steps` Crank-Nicolson steps (1 + i dt/2 H) Phi' = (1 - i dt/2 H) Phi with
/// signed dt; a negative dt runs time backwards.
inline FieldGrid crank_nicolson(FieldGrid phi, const std::vector<double>& V, double dt, std::size_t steps) {
  phi.validate();
  if (!std::isfinite(dt) || dt == 0.0) throw InputError("crank_nicolson: dt must be finite and nonzero");
  const auto pot = detail::potential_on(phi, V);
  const double h2 = phi.spacing() * phi.spacing();
  const Complex tau = kI * (0.5 * dt);
  std::vector<Complex> diag(phi.size());
  for (std::size_t i = 0; i < phi.size(); ++i) diag[i] = 1.0 + tau * (2.0 / h2 + pot[i]);
  const Complex off = -tau / h2;
  for (std::size_t step = 0; step < steps; ++step) {
    const auto hphi = apply_hamiltonian(phi, pot);
    std::vector<Complex> rhs(phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) rhs[i] = phi.values[i] - tau * hphi[i];
    phi.values = detail::solve_tridiagonal(diag, off, std::move(rhs));
  }
  return phi;
}

inline void require_quadratic(const EvolutionConfig& cfg) {
  if (cfg.interaction_w != 0.0) {
    throw UnsupportedError("evolve_coherent: w != 0 leaves the coherent manifold and is not supported");
  }
}

/// Phi(., T) for a coherent initial state and w = 0.
inline FieldGrid evolve_coherent(const EvolutionConfig& cfg, const FieldGrid& phi0) {
  require_quadratic(cfg);
  return crank_nicolson(phi0, cfg.potential, cfg.time_step, cfg.step_count());
}

/// Snapshots (t, Phi(t)) every `record_every` steps, including t = 0 and t = T.
inline std::vector<std::pair<double, FieldGrid>> evolve_history(const EvolutionConfig& cfg, const FieldGrid& phi0,
                                                                std::size_t record_every) {
  require_quadratic(cfg);
  if (record_every == 0) throw InputError("evolve_history: record interval must be positive");
  const std::size_t steps = cfg.step_count();
  std::vector<std::pair<double, FieldGrid>> out{{0.0, phi0}};
  FieldGrid phi = phi0;
  std::size_t done = 0;
  while (done < steps) {
    const std::size_t chunk = std::min(record_every, steps - done);
    phi = crank_nicolson(std::move(phi), cfg.potential, cfg.time_step, chunk);
    done += chunk;
    out.emplace_back(static_cast<double>(done) * cfg.time_step, phi);
  }
  return out;
}

/// The evolved coherent state as a D = 1 cMPS with R piecewise constant on the grid cells.
inline Cmps evolved_state_as_cmps(const EvolutionConfig& cfg, const FieldGrid& phi0) {
  return cmps_from_coherent(evolve_coherent(cfg, phi0));
}

}  // namespace cmpslab

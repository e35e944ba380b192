#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "core/density.hpp"
#include "core/model.hpp"

namespace erdiff {

enum class PdeScheme {
  UpwindExplicit,
  UpwindSemiImplicit,  ///< diffusion implicit, advection explicit
};

struct PdeConfig {
  std::size_t m = 512;
  double dt = 1e-4;
  double T = 1.0;
  PdeScheme scheme = PdeScheme::UpwindExplicit;
  /// Keep every k-th step as a snapshot (0: initial and final only).
  std::size_t snapshot_every = 0;
};

struct PdeSolution {
  std::vector<DensityGrid> snapshots;  ///< starts with mu0, ends at T
  double max_mass_error = 0.0;
  double max_boundary_mass = 0.0;      ///< line box only: largest end-cell mass seen
  std::size_t clip_events = 0;         ///< steps where tiny negatives were clipped
  std::size_t steps = 0;

  const DensityGrid& final() const { return snapshots.back(); }
};

/// Conservative finite-volume solver of the nonlinear Fokker-Planck equation
/// with the nonlocal drift frozen per step, upwind advection and central
/// diffusion of sigma^2 mu / 2. Periodic on the circle, zero flux on a line box.
PdeSolution solve_mckean_vlasov(const ModelSpec& model, const DensityGrid& mu0, const PdeConfig& cfg);

/// Deterministic inverse-CDF sampling at the quantiles (k - 1/2)/n.
std::vector<double> sample_from_density(const DensityGrid& dens, std::size_t n);

/// Sum of fine cells into the coarse cells they tile (factor must divide).
DensityGrid project_to_coarse(const DensityGrid& fine, std::size_t factor);

/// W1 at T between the solution on m cells and the one on m * refine_factor
/// cells projected back onto the coarse grid. The initial density is
/// discretized from pdf at both resolutions.
double grid_refinement_error(const ModelSpec& model, Geometry geometry, double lo, double hi,
                             const std::function<double(double)>& pdf, const PdeConfig& cfg,
                             std::size_t refine_factor);

}  // namespace erdiff

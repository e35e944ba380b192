#include "core/pde.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "core/errors.hpp"
#include "core/measure.hpp"
#include "core/parallel.hpp"
#include "core/sde.hpp"

namespace erdiff {
namespace {

constexpr double kCfl = 0.9;
constexpr double kNegativeTolerance = 1e-14;
constexpr double kMassTolerance = 1e-8;
constexpr std::size_t kCachedKernelMax = 2048;
constexpr std::size_t kGrain = 4096;

// Evaluates b_k = F(x_k) + sum_l Gamma(x_k, x_l) v_l dx on the fixed centers.
class NonlocalDrift {
 public:
  NonlocalDrift(const ModelSpec& model, const DensityGrid& grid) : model_(model), m_(grid.cells()) {
    centers_.resize(m_);
    for (std::size_t k = 0; k < m_; ++k) centers_[k] = grid.center(k);
    dx_ = grid.dx();
    base_.resize(m_);
    for (std::size_t k = 0; k < m_; ++k) base_[k] = model.drift ? model.drift(centers_[k]) : 0.0;
    if (model.separable) {
      rank_ = model.separable->rank;
      left_.resize(m_ * rank_);
      right_.resize(m_ * rank_);
      for (std::size_t k = 0; k < m_ && rank_ > 0; ++k) {
        model.separable->left(centers_[k], {left_.data() + k * rank_, rank_});
        model.separable->right(centers_[k], {right_.data() + k * rank_, rank_});
      }
    } else if (m_ <= kCachedKernelMax) {
      kernel_.resize(m_ * m_);
      parallel::for_each_index(
          m_,
          [&](std::size_t k) {
            for (std::size_t l = 0; l < m_; ++l)
              kernel_[k * m_ + l] = model.interaction(centers_[k], centers_[l]);
          },
          16);
    }
  }

  void evaluate(const std::vector<double>& v, std::vector<double>& b) const {
    if (model_.separable) {
      std::vector<double> moments(rank_, 0.0);
      for (std::size_t l = 0; l < m_; ++l)
        for (std::size_t r = 0; r < rank_; ++r) moments[r] += right_[l * rank_ + r] * v[l];
      for (double& mr : moments) mr *= dx_;
      for (std::size_t k = 0; k < m_; ++k) {
        double acc = 0.0;
        for (std::size_t r = 0; r < rank_; ++r) acc += left_[k * rank_ + r] * moments[r];
        b[k] = base_[k] + acc;
      }
      return;
    }
    parallel::for_each_index(
        m_,
        [&](std::size_t k) {
          double acc = 0.0;
          if (!kernel_.empty()) {
            const double* row = kernel_.data() + k * m_;
            for (std::size_t l = 0; l < m_; ++l) acc += row[l] * v[l];
          } else {
            for (std::size_t l = 0; l < m_; ++l) acc += model_.interaction(centers_[k], centers_[l]) * v[l];
          }
          b[k] = base_[k] + acc * dx_;
        },
        64);
  }

 private:
  const ModelSpec& model_;
  std::size_t m_;
  double dx_ = 0.0;
  std::size_t rank_ = 0;
  std::vector<double> centers_;
  std::vector<double> base_;
  std::vector<double> left_;
  std::vector<double> right_;
  std::vector<double> kernel_;
};

// Solves the tridiagonal system lower[k] x[k-1] + diag[k] x[k] + upper[k] x[k+1] = rhs[k].
void thomas(const std::vector<double>& lower, const std::vector<double>& diag,
            const std::vector<double>& upper, std::vector<double>& x) {
  const std::size_t m = diag.size();
  std::vector<double> c(m), d(m);
  c[0] = upper[0] / diag[0];
  d[0] = x[0] / diag[0];
  for (std::size_t k = 1; k < m; ++k) {
    const double denom = diag[k] - lower[k] * c[k - 1];
    c[k] = upper[k] / denom;
    d[k] = (x[k] - lower[k] * d[k - 1]) / denom;
  }
  x[m - 1] = d[m - 1];
  for (std::size_t k = m - 1; k-- > 0;) x[k] = d[k] - c[k] * x[k + 1];
}

// Cyclic tridiagonal solve: corner entries lower[0] (row 0, col m-1) and
// upper[m-1] (row m-1, col 0), by Sherman-Morrison on the Thomas solver.
void cyclic_thomas(const std::vector<double>& lower, const std::vector<double>& diag,
                   const std::vector<double>& upper, std::vector<double>& x) {
  const std::size_t m = diag.size();
  const double alpha = upper[m - 1];
  const double beta = lower[0];
  const double gamma = -diag[0];
  std::vector<double> d2 = diag;
  d2[0] -= gamma;
  d2[m - 1] -= alpha * beta / gamma;
  std::vector<double> lo = lower, up = upper;
  lo[0] = 0.0;
  up[m - 1] = 0.0;
  thomas(lo, d2, up, x);
  std::vector<double> u(m, 0.0);
  u[0] = gamma;
  u[m - 1] = alpha;
  thomas(lo, d2, up, u);
  const double fact = (x[0] + beta * x[m - 1] / gamma) / (1.0 + u[0] + beta * u[m - 1] / gamma);
  for (std::size_t k = 0; k < m; ++k) x[k] -= fact * u[k];
}

std::string admissible_dt_message(double dt, double admissible, const char* what) {
  std::ostringstream os;
  os.precision(6);
  os << "CFL condition violated (" << what << "): dt = " << dt << " exceeds the admissible dt = "
     << admissible;
  return os.str();
}

}  // namespace

PdeSolution solve_mckean_vlasov(const ModelSpec& model, const DensityGrid& mu0, const PdeConfig& cfg) {
  const std::size_t m = mu0.cells();
  if (m < 2) throw ConfigError("pde needs at least two cells", "/pde/m");
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw ConfigError("pde dt must be positive", "/pde/dt");
  if (!(cfg.T > 0.0) || !std::isfinite(cfg.T)) throw ConfigError("pde T must be positive", "/pde/T");
  if (!(model.geometry == mu0.geometry))
    throw ConfigError("model geometry does not match the density grid", "/pde");
  if (std::fabs(mu0.mass() - 1.0) > 1e-10) throw DomainError("initial density is not normalized");

  const bool periodic = mu0.geometry.is_circle();
  const double dx = mu0.dx();
  const auto steps = time_steps(cfg.dt, cfg.T);

  std::vector<double> a(m);  // sigma^2 / 2 at centers
  double sigma2_max = model.sigma_upper * model.sigma_upper;
  for (std::size_t k = 0; k < m; ++k) {
    const double s = model.diffusion(mu0.center(k));
    a[k] = 0.5 * s * s;
    sigma2_max = std::max(sigma2_max, s * s);
  }
  const std::size_t faces = periodic ? m : m - 1;  // face k sits between cell k and k+1

  NonlocalDrift drift(model, mu0);
  std::vector<double> v = mu0.values;
  std::vector<double> b(m), flux(faces), next(m);
  std::vector<double> lower, diag, upper;

  PdeSolution sol;
  sol.steps = steps.size();
  DensityGrid snap = mu0;
  snap.time = 0.0;
  sol.snapshots.push_back(snap);

  double t = 0.0;
  for (std::size_t step = 0; step < steps.size(); ++step) {
    const double h = steps[step];
    drift.evaluate(v, b);

    double bmax = 0.0;
    for (std::size_t f = 0; f < faces; ++f) {
      const std::size_t r = (f + 1) % m;
      bmax = std::max(bmax, std::fabs(0.5 * (b[f] + b[r])));
    }
    if (cfg.scheme == PdeScheme::UpwindExplicit) {
      const double cfl = bmax * h / dx + sigma2_max * h / (dx * dx);
      if (cfl > kCfl) {
        const double admissible = kCfl / (bmax / dx + sigma2_max / (dx * dx));
        throw ConfigError(admissible_dt_message(h, admissible, "explicit"), "/pde/dt");
      }
    } else if (bmax * h / dx > kCfl) {
      throw ConfigError(admissible_dt_message(h, kCfl * dx / bmax, "advective"), "/pde/dt");
    }

    const bool explicit_diffusion = cfg.scheme == PdeScheme::UpwindExplicit;
    parallel::for_each_index(
        faces,
        [&](std::size_t f) {
          const std::size_t r = (f + 1) % m;
          const double bf = 0.5 * (b[f] + b[r]);
          double F = bf > 0.0 ? bf * v[f] : bf * v[r];
          if (explicit_diffusion) F -= (a[r] * v[r] - a[f] * v[f]) / dx;
          flux[f] = F;
        },
        kGrain);
    const double ratio = h / dx;
    parallel::for_each_index(
        m,
        [&](std::size_t k) {
          double out = 0.0, in = 0.0;
          if (periodic) {
            out = flux[k];
            in = flux[(k + m - 1) % m];
          } else {
            out = k + 1 < m ? flux[k] : 0.0;
            in = k > 0 ? flux[k - 1] : 0.0;
          }
          next[k] = v[k] - ratio * (out - in);
        },
        kGrain);

    if (!explicit_diffusion) {
      // (I - h D) v = next with D the conservative second difference of a v.
      const double r = h / (dx * dx);
      lower.assign(m, 0.0);
      diag.assign(m, 1.0);
      upper.assign(m, 0.0);
      for (std::size_t k = 0; k < m; ++k) {
        const bool has_left = periodic || k > 0;
        const bool has_right = periodic || k + 1 < m;
        const std::size_t kl = (k + m - 1) % m, kr = (k + 1) % m;
        if (has_left) {
          diag[k] += r * a[k];
          lower[k] = -r * a[kl];
        }
        if (has_right) {
          diag[k] += r * a[k];
          upper[k] = -r * a[kr];
        }
      }
      if (periodic) {
        cyclic_thomas(lower, diag, upper, next);
      } else {
        thomas(lower, diag, upper, next);
      }
    }

    bool clipped = false;
    for (std::size_t k = 0; k < m; ++k) {
      const double value = next[k];
      if (!std::isfinite(value))
        throw IntegrationError("pde produced a non-finite value", step + 1, k);
      if (value < -kNegativeTolerance)
        throw IntegrationError("pde produced a negative value below -1e-14", step + 1, k);
      if (value < 0.0) {
        next[k] = 0.0;
        clipped = true;
      }
    }
    v.swap(next);
    double mass = 0.0;
    for (const double value : v) mass += value;
    mass *= dx;
    if (clipped) {
      ++sol.clip_events;
      for (double& value : v) value /= mass;
      mass = 1.0;
    }
    const double mass_error = std::fabs(mass - 1.0);
    sol.max_mass_error = std::max(sol.max_mass_error, mass_error);
    if (mass_error > kMassTolerance)
      throw IntegrationError("pde mass drifted beyond 1e-8", step + 1, 0);
    if (!periodic) sol.max_boundary_mass = std::max(sol.max_boundary_mass, std::max(v[0], v[m - 1]) * dx);

    t = step + 1 == steps.size() ? cfg.T : t + h;
    const bool last = step + 1 == steps.size();
    if (last || (cfg.snapshot_every > 0 && (step + 1) % cfg.snapshot_every == 0)) {
      snap.values = v;
      snap.time = t;
      sol.snapshots.push_back(snap);
    }
  }
  return sol;
}

std::vector<double> sample_from_density(const DensityGrid& dens, std::size_t n) {
  std::vector<double> out(n);
  if (n == 0) return out;
  const auto cdf = dens.node_cdf();
  const double total = cdf.back();
  if (!(total > 0.0)) throw DomainError("density has no mass");
  const double dx = dens.dx();
  const std::size_t m = dens.cells();
  std::size_t k = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const double q = total * (static_cast<double>(j) + 0.5) / static_cast<double>(n);
    while (k + 1 < m && cdf[k + 1] < q) ++k;
    // Skip empty cells so the sample lands where the mass is.
    while (k + 1 < m && dens.values[k] <= 0.0) ++k;
    const double cell_mass = cdf[k + 1] - cdf[k];
    double frac = cell_mass > 0.0 ? (q - cdf[k]) / cell_mass : 0.5;
    frac = std::clamp(frac, 0.0, 1.0);
    out[j] = dens.lo + (static_cast<double>(k) + frac) * dx;
  }
  return out;
}

DensityGrid project_to_coarse(const DensityGrid& fine, std::size_t factor) {
  if (factor == 0 || fine.cells() % factor != 0)
    throw DomainError("refinement factor must divide the fine cell count");
  DensityGrid coarse = fine;
  const std::size_t m = fine.cells() / factor;
  coarse.values.assign(m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j < factor; ++j) acc += fine.values[k * factor + j];
    coarse.values[k] = acc / static_cast<double>(factor);
  }
  return coarse;
}

double grid_refinement_error(const ModelSpec& model, Geometry geometry, double lo, double hi,
                             const std::function<double(double)>& pdf, const PdeConfig& cfg,
                             std::size_t refine_factor) {
  if (refine_factor < 2) throw ConfigError("refine_factor must be at least 2", "/pde/refine_factor");
  const auto coarse0 = discretize_density(geometry, lo, hi, cfg.m, pdf);
  const auto fine0 = discretize_density(geometry, lo, hi, cfg.m * refine_factor, pdf);
  PdeConfig fine_cfg = cfg;
  fine_cfg.m = cfg.m * refine_factor;
  fine_cfg.snapshot_every = 0;
  PdeConfig coarse_cfg = cfg;
  coarse_cfg.snapshot_every = 0;
  const auto coarse = solve_mckean_vlasov(model, coarse0, coarse_cfg);
  const auto fine = solve_mckean_vlasov(model, fine0, fine_cfg);
  return w1_between_densities(coarse.final(), project_to_coarse(fine.final(), refine_factor));
}

}  // namespace erdiff

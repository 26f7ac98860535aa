#include "csc/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "csc/error.hpp"
#include "csc/linsolve.hpp"
#include "csc/prox.hpp"
#include "csc/signal.hpp"

namespace csc {

std::string to_string(PenaltyKind k) {
  switch (k) {
    case PenaltyKind::L1: return "l1";
    case PenaltyKind::L1Inf: return "l1inf";
    case PenaltyKind::L12: return "l12";
  }
  return "?";
}

PenaltyKind parse_penalty_kind(const std::string& s) {
  if (s == "l1") return PenaltyKind::L1;
  if (s == "l1inf") return PenaltyKind::L1Inf;
  if (s == "l12") return PenaltyKind::L12;
  throw InvalidArgument("unknown penalty '" + s + "' (expected l1, l1inf or l12)");
}

std::string to_string(MixedAlgorithm a) {
  return a == MixedAlgorithm::Nested ? "nested" : "nonneg";
}

MixedAlgorithm parse_mixed_algorithm(const std::string& s) {
  if (s == "nested") return MixedAlgorithm::Nested;
  if (s == "nonneg") return MixedAlgorithm::Nonneg;
  throw InvalidArgument("unknown algorithm '" + s + "' (expected nested or nonneg)");
}

AdmmConfig AdmmConfig::defaults(PenaltyKind kind, double lambda) {
  // Penalties proportional to lambda need a floor for lambda == 0.
  constexpr double kMinRho = 1e-3;
  AdmmConfig c;
  switch (kind) {
    case PenaltyKind::L1:
      c.rho = 50.0 * lambda + 1.0;
      c.residual_balancing = true;
      c.max_iter = 250;
      break;
    case PenaltyKind::L1Inf:
      c.rho = std::max(0.05 * lambda, kMinRho);
      c.alpha0 = 0.06;
      c.alpha1 = 1.0 / c.alpha0;
      c.max_iter = 350;
      break;
    case PenaltyKind::L12:
      c.rho = std::max(3.0 * lambda, kMinRho);
      c.alpha0 = 0.03;
      c.alpha1 = 1.0 / c.alpha0;
      c.max_iter = 350;
      break;
  }
  return c;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void fft_maps(const Fft2d& fft, std::span<const double> maps, std::size_t count,
              std::span<cplx> out) {
  const std::size_t n = fft.shape().size();
  const std::size_t nk = fft.spectrum_size();
  for (std::size_t m = 0; m < count; ++m) {
    fft.forward(maps.subspan(m * n, n), out.subspan(m * nk, nk));
  }
}

void ifft_maps(const Fft2d& fft, std::span<const cplx> spectra, std::size_t count,
               std::span<double> out) {
  const std::size_t n = fft.shape().size();
  const std::size_t nk = fft.spectrum_size();
  for (std::size_t m = 0; m < count; ++m) {
    fft.inverse(spectra.subspan(m * nk, nk), out.subspan(m * n, n));
  }
}

double sq_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

// sum_m t_m(k) * x_m(k) for every k, then back to the spatial domain.
std::vector<double> combine_inverse(const Fft2d& fft, std::span<const cplx> table,
                                    std::size_t width, std::span<const cplx> spectra) {
  const std::size_t nk = fft.spectrum_size();
  std::vector<cplx> acc(nk);
  for (std::size_t k = 0; k < nk; ++k) {
    cplx s{};
    for (std::size_t m = 0; m < width; ++m) s += table[k * width + m] * spectra[m * nk + k];
    acc[k] = s;
  }
  return fft.inverse(acc);
}

// Spectra of the adjoint: conj(t_m(k)) * v(k) for each map m.
void adjoint_spectra(std::span<const cplx> table, std::size_t width, std::span<const cplx> vh,
                     std::span<cplx> out) {
  const std::size_t nk = vh.size();
  for (std::size_t k = 0; k < nk; ++k) {
    for (std::size_t m = 0; m < width; ++m) out[m * nk + k] = std::conj(table[k * width + m]) * vh[k];
  }
}

std::vector<cplx> table_of(const SpectralDictionary& sd) {
  std::vector<cplx> t(sd.num_frequencies() * sd.num_filters());
  for (std::size_t k = 0; k < sd.num_frequencies(); ++k) {
    const auto a = sd.at(k);
    std::copy(a.begin(), a.end(), t.begin() + std::ptrdiff_t(k * sd.num_filters()));
  }
  return t;
}

std::vector<cplx> table_of(const GroupOperator& g) {
  const std::size_t nk = g.fft().spectrum_size();
  std::vector<cplx> t(nk * g.num_filters());
  for (std::size_t k = 0; k < nk; ++k) {
    const auto a = g.at(k);
    std::copy(a.begin(), a.end(), t.begin() + std::ptrdiff_t(k * g.num_filters()));
  }
  return t;
}

void validate_config(const AdmmConfig& c, bool mixed) {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(c.rho)) throw InvalidArgument("ADMM rho must be positive");
  if (c.max_iter <= 0) throw InvalidArgument("ADMM max_iter must be positive");
  if (c.eps_abs < 0.0 || c.eps_rel < 0.0) throw InvalidArgument("ADMM tolerances must be >= 0");
  if (c.residual_balancing && (!(c.rb_mu > 1.0) || !(c.rb_tau > 1.0))) {
    throw InvalidArgument("residual balancing needs mu > 1 and tau > 1");
  }
  if (mixed) {
    if (!positive(c.alpha0) || !positive(c.alpha1)) {
      throw InvalidArgument("alpha0 and alpha1 must be positive");
    }
    if (c.inner.max_iter <= 0 || !positive(c.inner.rho) || c.inner.rel_tol < 0.0) {
      throw InvalidArgument("invalid inner solver configuration");
    }
  }
}

void validate_problem(const Dictionary& d, const Image& s, const PenaltySpec& p) {
  if (d.filter_height() > s.height() || d.filter_width() > s.width()) {
    throw DimensionError("filter support " + to_string(d.filter_shape()) + " exceeds image " +
                         to_string(s.shape()));
  }
  if (!(p.lambda >= 0.0) || !std::isfinite(p.lambda)) {
    throw InvalidArgument("lambda must be finite and >= 0");
  }
  const std::size_t ncoef = d.num_filters() * s.size();
  if (p.kind == PenaltyKind::L1) {
    if (!p.l1_weights.empty()) {
      if (p.l1_weights.size() != ncoef) {
        throw DimensionError("l1 weights: " + std::to_string(p.l1_weights.size()) +
                             " values for " + std::to_string(ncoef) + " coefficients");
      }
      for (double w : p.l1_weights) {
        if (!std::isfinite(w) || w < 0.0) throw InvalidArgument("l1 weights must be >= 0");
      }
    }
    return;
  }
  if (!p.group_weights.empty()) {
    if (p.group_weights.size() != s.size()) {
      throw DimensionError("group weights: " + std::to_string(p.group_weights.size()) +
                           " values for " + std::to_string(s.size()) + " groups");
    }
    for (double w : p.group_weights) {
      if (!std::isfinite(w) || !(w > 0.0)) throw InvalidArgument("group weights must be > 0");
    }
  }
  if (p.inner_kernels) {
    if (p.inner_kernels->shape != d.filter_shape() ||
        p.inner_kernels->num_filters != d.num_filters()) {
      throw DimensionError("inner kernels must match the dictionary filter layout");
    }
  }
}

GroupOperator make_group_operator(const Dictionary& d, const PenaltySpec& p, Shape shape) {
  return GroupOperator(p.inner_kernels ? *p.inner_kernels
                                       : GroupKernels::unit(d.filter_shape(), d.num_filters()),
                       shape);
}

OuterNorm outer_of(PenaltyKind k) { return k == PenaltyKind::L1Inf ? OuterNorm::Max : OuterNorm::L2; }

double outer_value(OuterNorm outer, std::span<const double> sums, std::span<const double> w) {
  return outer == OuterNorm::Max ? outer_max(sums, w) : outer_l2(sums, w);
}

std::vector<double> outer_prox(OuterNorm outer, std::span<const double> v, double tau,
                               std::span<const double> w) {
  return outer == OuterNorm::Max ? prox_max(v, tau, w) : prox_l2(v, tau, w);
}

double l1_penalty(std::span<const double> x, std::span<const double> w) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (w.empty() ? 1.0 : w[i]) * std::abs(x[i]);
  return s;
}

double data_term(std::span<const double> dx, const Image& s) {
  return 0.5 * sq_dist(dx, s.values());
}

// Shared x-update machinery for the l1 and nested solvers:
// (D^T D + rho I) x = D^T s + rho (y - u).
class RidgeStep {
public:
  RidgeStep(const Dictionary& d, const Image& s)
      : sd_(d, s.shape()), table_(table_of(sd_)), m_(d.num_filters()) {
    const auto sh = sd_.fft().forward(s.values());
    dts_.resize(sd_.num_frequencies() * m_);
    adjoint_spectra(table_, m_, sh, dts_);
  }

  const SpectralDictionary& dictionary() const { return sd_; }
  const std::vector<cplx>& table() const { return table_; }

  void set_rho(double rho) {
    if (rho != rho_) {
      factors_.emplace(table_, table_, m_, rho, 1.0, 0.0);
      rho_ = rho;
    }
  }

  // target = y - u (spatial).  Writes x (spatial) and its spectra.
  void solve(std::span<const double> target, std::vector<cplx>& xh, std::vector<double>& x) {
    const Fft2d& fft = sd_.fft();
    const std::size_t nk = fft.spectrum_size();
    std::vector<cplx> th(nk * m_);
    fft_maps(fft, target, m_, th);
    xh.resize(nk * m_);
    std::vector<cplx> rhs(m_), sol(m_);
    for (std::size_t k = 0; k < nk; ++k) {
      for (std::size_t m = 0; m < m_; ++m) rhs[m] = dts_[m * nk + k] + rho_ * th[m * nk + k];
      factors_->solve(k, rhs, sol);
      for (std::size_t m = 0; m < m_; ++m) xh[m * nk + k] = sol[m];
    }
    x.resize(m_ * fft.shape().size());
    ifft_maps(fft, xh, m_, x);
  }

  std::vector<double> reconstruct(std::span<const cplx> xh) const {
    return combine_inverse(sd_.fft(), table_, m_, xh);
  }

private:
  SpectralDictionary sd_;
  std::vector<cplx> table_;
  std::size_t m_;
  std::vector<cplx> dts_;
  double rho_ = -1.0;
  std::optional<Rank2Factors> factors_;
};

struct Residuals {
  double primal = 0.0;
  double dual = 0.0;
  double eps_primal = 0.0;
  double eps_dual = 0.0;
};

// Scaled-form test for the x = y constraint.
Residuals consensus_residuals(std::span<const double> x, std::span<const double> y,
                              std::span<const double> y_prev, std::span<const double> u,
                              double rho, const AdmmConfig& c) {
  Residuals r;
  r.primal = std::sqrt(sq_dist(x, y));
  r.dual = rho * std::sqrt(sq_dist(y, y_prev));
  const double rootn = std::sqrt(double(x.size()));
  r.eps_primal = rootn * c.eps_abs + c.eps_rel * std::max(std::sqrt(sq_norm(x)), std::sqrt(sq_norm(y)));
  r.eps_dual = rootn * c.eps_abs + c.eps_rel * rho * std::sqrt(sq_norm(u));
  return r;
}

bool converged(const Residuals& r) { return r.primal <= r.eps_primal && r.dual <= r.eps_dual; }

// Boyd et al. residual balancing; u is the scaled dual and is rescaled in place.
// rho stays within six decades of its initial value.
bool balance_rho(const Residuals& r, const AdmmConfig& c, double& rho, std::span<double> u) {
  double factor = 1.0;
  if (r.primal > c.rb_mu * r.dual && rho * c.rb_tau <= c.rho * 1e6) {
    factor = c.rb_tau;
  } else if (r.dual > c.rb_mu * r.primal && rho / c.rb_tau >= c.rho * 1e-6) {
    factor = 1.0 / c.rb_tau;
  }
  if (factor == 1.0) return false;
  rho *= factor;
  for (double& v : u) v /= factor;
  return true;
}

void record(SolveResult& out, double f, const Residuals& r, double rho) {
  out.functional.push_back(f);
  out.primal_residual.push_back(r.primal);
  out.dual_residual.push_back(r.dual);
  out.rho.push_back(rho);
}

}  // namespace

double csc_functional(const Dictionary& d, const Image& s, const PenaltySpec& p,
                      const CoefficientMaps& x) {
  validate_problem(d, s, p);
  const Image dx = apply_dictionary(d, x);
  const double fit = data_term(dx.values(), s);
  if (p.lambda == 0.0) return fit;
  if (p.kind == PenaltyKind::L1) return fit + p.lambda * l1_penalty(x.values(), p.l1_weights);
  const GroupOperator g = make_group_operator(d, p, s.shape());
  const double pen = p.kind == PenaltyKind::L1Inf ? norm_l1inf(g, x, p.group_weights)
                                                  : norm_l12(g, x, p.group_weights);
  return fit + p.lambda * pen;
}

SolveResult solve_csc_l1(const Dictionary& d, const Image& s, const PenaltySpec& p,
                         const AdmmConfig& c) {
  if (p.kind != PenaltyKind::L1) throw InvalidArgument("solve_csc_l1 requires an l1 penalty");
  validate_problem(d, s, p);
  validate_config(c, false);
  const auto t0 = Clock::now();
  const std::size_t nm = d.num_filters();
  const std::size_t ncoef = nm * s.size();

  RidgeStep ridge(d, s);
  double rho = c.rho;
  ridge.set_rho(rho);

  std::vector<double> x(ncoef, 0.0), y(ncoef, 0.0), u(ncoef, 0.0), y_prev, target(ncoef), v(ncoef);
  std::vector<cplx> xh;
  SolveResult out;
  for (int it = 0; it < c.max_iter; ++it) {
    for (std::size_t i = 0; i < ncoef; ++i) target[i] = y[i] - u[i];
    ridge.solve(target, xh, x);

    y_prev = y;
    for (std::size_t i = 0; i < ncoef; ++i) v[i] = x[i] + u[i];
    prox_weighted_l1(v, p.lambda / rho, p.l1_weights, y);
    for (std::size_t i = 0; i < ncoef; ++i) u[i] += x[i] - y[i];

    const auto dx = ridge.reconstruct(xh);
    const double f = data_term(dx, s) + p.lambda * l1_penalty(x, p.l1_weights);
    const Residuals r = consensus_residuals(x, y, y_prev, u, rho, c);
    record(out, f, r, rho);
    out.iterations = it + 1;
    if (!c.fixed_iterations && converged(r)) {
      out.converged = true;
      break;
    }
    if (c.residual_balancing && it + 1 < c.max_iter && balance_rho(r, c, rho, u)) {
      ridge.set_rho(rho);
    }
  }
  out.x = CoefficientMaps(nm, s.height(), s.width(), std::move(y));
  out.final_functional = csc_functional(d, s, p, out.x);
  out.wall_seconds = seconds_since(t0);
  return out;
}

ProxGroupsResult prox_max_groups(const GroupOperator& g, const CoefficientMaps& v, double tau,
                                 OuterNorm outer, std::span<const double> group_weights,
                                 const AdmmConfig& c, InnerState* warm) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw InvalidArgument("prox_max_groups: tau must be >= 0");
  require_same_shape(v.shape(), g.image_shape(), "prox_max_groups");
  if (v.num_maps() != g.num_filters()) throw DimensionError("prox_max_groups: map count mismatch");
  if (!group_weights.empty() && group_weights.size() != g.num_groups()) {
    throw DimensionError("prox_max_groups: group weight count mismatch");
  }
  validate_config(c, true);

  ProxGroupsResult out;
  if (tau == 0.0) {
    out.x = v;
    out.converged = true;
    return out;
  }

  const Fft2d& fft = g.fft();
  const std::size_t nm = g.num_filters();
  const std::size_t n = fft.shape().size();
  const std::size_t nk = fft.spectrum_size();
  const std::size_t ncoef = nm * n;
  const double a0 = c.alpha0;
  const double a1 = c.alpha1;
  const double rho = c.inner.scale_with_tau ? c.inner.rho * tau : c.inner.rho;

  // The problem depends on v only through |v|; solve there, then re-sign.
  std::vector<double> av(ncoef);
  for (std::size_t i = 0; i < ncoef; ++i) av[i] = std::abs(v.values()[i]);
  std::vector<cplx> avh(nk * nm);
  fft_maps(fft, av, nm, avh);

  const auto gt = table_of(g);
  // (I + rho a0^2 G^T G + rho a1^2 I) z = |v| + rho a0 G^T (a0 y0 - u0) + rho a1 (a1 y1 - u1)
  const Rank2Factors factors(gt, gt, nm, 1.0 + rho * a1 * a1, 0.0, rho * a0 * a0);

  std::vector<double> y0(n, 0.0), u0(n, 0.0), y1(ncoef, 0.0), u1(ncoef, 0.0);
  if (warm != nullptr && warm->valid && c.inner.warm_start &&
      warm->y1.size() == ncoef && warm->y0.size() == n) {
    std::copy(warm->y0.values().begin(), warm->y0.values().end(), y0.begin());
    std::copy(warm->u0.values().begin(), warm->u0.values().end(), u0.begin());
    std::copy(warm->y1.values().begin(), warm->y1.values().end(), y1.begin());
    std::copy(warm->u1.values().begin(), warm->u1.values().end(), u1.begin());
  }

  std::vector<double> t1(ncoef), t0(n), z(ncoef), w0(n);
  std::vector<cplx> t1h(nk * nm), zh(nk * nm), rhs(nm), sol(nm);
  const double prox_scale = tau / (rho * a0 * a0);
  double f_prev = std::numeric_limits<double>::quiet_NaN();
  for (int it = 0; it < c.inner.max_iter; ++it) {
    for (std::size_t i = 0; i < ncoef; ++i) t1[i] = a1 * y1[i] - u1[i];
    for (std::size_t i = 0; i < n; ++i) t0[i] = a0 * y0[i] - u0[i];
    fft_maps(fft, t1, nm, t1h);
    const auto t0h = fft.forward(t0);
    for (std::size_t k = 0; k < nk; ++k) {
      for (std::size_t m = 0; m < nm; ++m) {
        rhs[m] = avh[m * nk + k] + rho * a0 * std::conj(gt[k * nm + m]) * t0h[k] +
                 rho * a1 * t1h[m * nk + k];
      }
      factors.solve(k, rhs, sol);
      for (std::size_t m = 0; m < nm; ++m) zh[m * nk + k] = sol[m];
    }
    ifft_maps(fft, zh, nm, z);
    const auto gz = combine_inverse(fft, gt, nm, zh);

    for (std::size_t i = 0; i < n; ++i) w0[i] = gz[i] + u0[i] / a0;
    y0 = outer_prox(outer, w0, prox_scale, group_weights);
    for (std::size_t i = 0; i < ncoef; ++i) y1[i] = std::max(z[i] + u1[i] / a1, 0.0);
    for (std::size_t i = 0; i < n; ++i) u0[i] += a0 * (gz[i] - y0[i]);
    for (std::size_t i = 0; i < ncoef; ++i) u1[i] += a1 * (z[i] - y1[i]);

    const double f = tau * outer_value(outer, gz, group_weights) + 0.5 * sq_dist(z, av);
    out.iterations = it + 1;
    out.functional = f;
    if (it > 0 && std::abs(f - f_prev) <= c.inner.rel_tol * std::max(std::abs(f_prev), 1e-300)) {
      out.converged = true;
      break;
    }
    f_prev = f;
  }

  if (warm != nullptr) {
    const Shape shape = fft.shape();
    warm->y0 = Image(shape.height, shape.width, y0);
    warm->u0 = Image(shape.height, shape.width, u0);
    warm->y1 = CoefficientMaps(nm, shape.height, shape.width, y1);
    warm->u1 = CoefficientMaps(nm, shape.height, shape.width, u1);
    warm->valid = true;
  }

  std::vector<double> signed_x(ncoef);
  for (std::size_t i = 0; i < ncoef; ++i) {
    const double vi = v.values()[i];
    signed_x[i] = vi > 0.0 ? y1[i] : (vi < 0.0 ? -y1[i] : 0.0);
  }
  out.x = CoefficientMaps(nm, v.height(), v.width(), std::move(signed_x));
  return out;
}

SolveResult solve_csc_mixed_nested(const Dictionary& d, const Image& s, const PenaltySpec& p,
                                   const AdmmConfig& c) {
  if (p.kind == PenaltyKind::L1) throw InvalidArgument("nested solver requires a mixed-norm penalty");
  validate_problem(d, s, p);
  validate_config(c, true);
  const auto t0 = Clock::now();
  const std::size_t nm = d.num_filters();
  const std::size_t ncoef = nm * s.size();
  const OuterNorm outer = outer_of(p.kind);
  const GroupOperator g = make_group_operator(d, p, s.shape());

  RidgeStep ridge(d, s);
  double rho = c.rho;
  ridge.set_rho(rho);

  std::vector<double> x(ncoef, 0.0), y(ncoef, 0.0), u(ncoef, 0.0), y_prev, target(ncoef);
  CoefficientMaps v(nm, s.height(), s.width());
  std::vector<cplx> xh;
  InnerState inner;
  SolveResult out;
  for (int it = 0; it < c.max_iter; ++it) {
    for (std::size_t i = 0; i < ncoef; ++i) target[i] = y[i] - u[i];
    ridge.solve(target, xh, x);

    y_prev = y;
    for (std::size_t i = 0; i < ncoef; ++i) v.values()[i] = x[i] + u[i];
    auto prox = prox_max_groups(g, v, p.lambda / rho, outer, p.group_weights, c, &inner);
    if (!prox.converged) ++out.inner_cap_hits;
    std::copy(prox.x.values().begin(), prox.x.values().end(), y.begin());
    for (std::size_t i = 0; i < ncoef; ++i) u[i] += x[i] - y[i];

    const auto dx = ridge.reconstruct(xh);
    const CoefficientMaps xm(nm, s.height(), s.width(), x);
    double pen = 0.0;
    if (p.lambda != 0.0) {
      Image sums = group_sums(g, xm, true);
      pen = outer_value(outer, sums.values(), p.group_weights);
    }
    const double f = data_term(dx, s) + p.lambda * pen;
    const Residuals r = consensus_residuals(x, y, y_prev, u, rho, c);
    record(out, f, r, rho);
    out.iterations = it + 1;
    if (!c.fixed_iterations && converged(r)) {
      out.converged = true;
      break;
    }
    if (c.residual_balancing && it + 1 < c.max_iter && balance_rho(r, c, rho, u)) {
      ridge.set_rho(rho);
      inner.valid = false;
    }
  }
  out.x = CoefficientMaps(nm, s.height(), s.width(), std::move(y));
  out.final_functional = csc_functional(d, s, p, out.x);
  out.wall_seconds = seconds_since(t0);
  return out;
}

SolveResult solve_csc_mixed_nonneg(const Dictionary& d, const Image& s, const PenaltySpec& p,
                                   const AdmmConfig& c) {
  if (p.kind == PenaltyKind::L1) throw InvalidArgument("non-negative solver requires a mixed-norm penalty");
  validate_problem(d, s, p);
  validate_config(c, true);
  const auto t0 = Clock::now();
  const std::size_t nm = d.num_filters();
  const std::size_t nm2 = 2 * nm;
  const std::size_t n = s.size();
  const std::size_t ncoef = nm2 * n;
  const OuterNorm outer = outer_of(p.kind);
  const GroupOperator g = make_group_operator(d, p, s.shape());
  const SpectralDictionary sd(d, s.shape());
  const Fft2d& fft = sd.fft();
  const std::size_t nk = fft.spectrum_size();
  const double rho = c.rho;
  const double a0 = c.alpha0;
  const double a1 = c.alpha1;

  // Doubled operators (D, -D) and (G, G), frequency-major with 2M columns.
  std::vector<cplx> dt(nk * nm2), gt(nk * nm2);
  for (std::size_t k = 0; k < nk; ++k) {
    const auto a = sd.at(k);
    const auto b = g.at(k);
    for (std::size_t m = 0; m < nm; ++m) {
      dt[k * nm2 + m] = a[m];
      dt[k * nm2 + nm + m] = -a[m];
      gt[k * nm2 + m] = b[m];
      gt[k * nm2 + nm + m] = b[m];
    }
  }
  const auto gsingle = table_of(g);
  const Rank2Factors factors(dt, gt, nm2, rho * a1 * a1, 1.0, rho * a0 * a0);
  std::vector<cplx> dts(nk * nm2);
  adjoint_spectra(dt, nm2, fft.forward(s.values()), dts);

  std::vector<double> xx(ncoef, 0.0), y1(ncoef, 0.0), u1(ncoef, 0.0), y1_prev, t1(ncoef);
  std::vector<double> y0(n, 0.0), u0(n, 0.0), y0_prev, t0v(n), w0(n), tmp(ncoef);
  std::vector<cplx> t1h(nk * nm2), xh(nk * nm2), rhs(nm2), sol(nm2), adj(nk * nm2);
  const double prox_scale = p.lambda / (rho * a0 * a0);
  const double rootn = std::sqrt(double(ncoef + n));

  // ||a0^2 G~^T e0 + a1^2 e1|| and friends: G~^T e0 is the same for both halves.
  auto adjoint_combo = [&](std::span<const double> e0, double c0, std::span<const double> e1,
                           double c1) {
    adjoint_spectra(gsingle, nm, fft.forward(e0), adj);
    ifft_maps(fft, std::span<const cplx>(adj.data(), nk * nm), nm, std::span<double>(tmp.data(), nm * n));
    double acc = 0.0;
    for (std::size_t h = 0; h < 2; ++h) {
      for (std::size_t i = 0; i < nm * n; ++i) {
        const double val = c0 * tmp[i] + c1 * e1[h * nm * n + i];
        acc += val * val;
      }
    }
    return std::sqrt(acc);
  };

  SolveResult out;
  for (int it = 0; it < c.max_iter; ++it) {
    for (std::size_t i = 0; i < ncoef; ++i) t1[i] = a1 * y1[i] - u1[i];
    for (std::size_t i = 0; i < n; ++i) t0v[i] = a0 * y0[i] - u0[i];
    fft_maps(fft, t1, nm2, t1h);
    const auto t0h = fft.forward(t0v);
    for (std::size_t k = 0; k < nk; ++k) {
      for (std::size_t m = 0; m < nm2; ++m) {
        rhs[m] = dts[m * nk + k] + rho * a0 * std::conj(gt[k * nm2 + m]) * t0h[k] +
                 rho * a1 * t1h[m * nk + k];
      }
      factors.solve(k, rhs, sol);
      for (std::size_t m = 0; m < nm2; ++m) xh[m * nk + k] = sol[m];
    }
    ifft_maps(fft, xh, nm2, xx);
    const auto gx = combine_inverse(fft, gt, nm2, xh);
    const auto dx = combine_inverse(fft, dt, nm2, xh);

    y0_prev = y0;
    y1_prev = y1;
    for (std::size_t i = 0; i < n; ++i) w0[i] = gx[i] + u0[i] / a0;
    y0 = outer_prox(outer, w0, prox_scale, p.group_weights);
    for (std::size_t i = 0; i < ncoef; ++i) y1[i] = std::max(xx[i] + u1[i] / a1, 0.0);
    for (std::size_t i = 0; i < n; ++i) u0[i] += a0 * (gx[i] - y0[i]);
    for (std::size_t i = 0; i < ncoef; ++i) u1[i] += a1 * (xx[i] - y1[i]);

    const double f = data_term(dx, s) + p.lambda * outer_value(outer, gx, p.group_weights);

    // Constraint A X = B Y with A = [a0 G~; a1 I], B = diag(a0, a1).
    Residuals r;
    r.primal = std::sqrt(a0 * a0 * sq_dist(gx, y0) + a1 * a1 * sq_dist(xx, y1));
    for (std::size_t i = 0; i < n; ++i) w0[i] = y0[i] - y0_prev[i];
    for (std::size_t i = 0; i < ncoef; ++i) t1[i] = y1[i] - y1_prev[i];
    r.dual = rho * adjoint_combo(w0, a0 * a0, t1, a1 * a1);
    r.eps_primal = rootn * c.eps_abs +
                   c.eps_rel * std::max(std::sqrt(a0 * a0 * sq_norm(gx) + a1 * a1 * sq_norm(xx)),
                                        std::sqrt(a0 * a0 * sq_norm(y0) + a1 * a1 * sq_norm(y1)));
    r.eps_dual = rootn * c.eps_abs + c.eps_rel * rho * adjoint_combo(u0, a0, u1, a1);
    record(out, f, r, rho);
    out.iterations = it + 1;
    if (!c.fixed_iterations && converged(r)) {
      out.converged = true;
      break;
    }
  }

  const std::size_t half = nm * n;
  std::vector<double> x(half);
  for (std::size_t i = 0; i < half; ++i) x[i] = y1[i] - y1[half + i];
  out.positive_part = CoefficientMaps(nm, s.height(), s.width(),
                                      std::vector<double>(y1.begin(), y1.begin() + std::ptrdiff_t(half)));
  out.negative_part = CoefficientMaps(nm, s.height(), s.width(),
                                      std::vector<double>(y1.begin() + std::ptrdiff_t(half), y1.end()));
  out.x = CoefficientMaps(nm, s.height(), s.width(), std::move(x));
  out.final_functional = csc_functional(d, s, p, out.x);
  out.wall_seconds = seconds_since(t0);
  return out;
}

SolveResult solve_csc(const Dictionary& d, const Image& s, const PenaltySpec& p,
                      const AdmmConfig& c, MixedAlgorithm algorithm) {
  if (p.kind == PenaltyKind::L1) return solve_csc_l1(d, s, p, c);
  return algorithm == MixedAlgorithm::Nested ? solve_csc_mixed_nested(d, s, p, c)
                                             : solve_csc_mixed_nonneg(d, s, p, c);
}

}  // namespace csc

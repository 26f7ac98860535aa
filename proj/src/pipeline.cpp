#include "csc/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "csc/error.hpp"
#include "csc/signal.hpp"

namespace csc {

std::string to_string(Weighting w) {
  switch (w) {
    case Weighting::None: return "none";
    case Weighting::Group: return "group";
    case Weighting::Inner: return "inner";
    case Weighting::GroupInner: return "group+inner";
    case Weighting::L1Corr: return "l1corr";
  }
  return "?";
}

Weighting parse_weighting(const std::string& s) {
  if (s == "none") return Weighting::None;
  if (s == "group") return Weighting::Group;
  if (s == "inner") return Weighting::Inner;
  if (s == "group+inner" || s == "group_inner") return Weighting::GroupInner;
  if (s == "l1corr") return Weighting::L1Corr;
  throw InvalidArgument("unknown weighting '" + s + "'");
}

AdmmConfig resolve_admm(const DenoiseConfig& cfg, double lambda) {
  AdmmConfig a = AdmmConfig::defaults(cfg.kind, lambda);
  const SolverOverrides& o = cfg.solver;
  if (o.rho_per_lambda) a.rho = std::max(*o.rho_per_lambda * lambda, 1e-3);
  if (o.alpha0) {
    a.alpha0 = *o.alpha0;
    a.alpha1 = 1.0 / *o.alpha0;
  }
  if (o.alpha1) a.alpha1 = *o.alpha1;
  if (o.max_iter) a.max_iter = *o.max_iter;
  if (o.residual_balancing) a.residual_balancing = *o.residual_balancing;
  a.fixed_iterations = !o.tolerance_mode;
  a.eps_rel = o.eps_rel;
  a.inner = o.inner;
  return a;
}

PenaltySpec build_penalty(const Dictionary& d, const Image& highpass, const DenoiseConfig& cfg,
                          double lambda) {
  PenaltySpec p;
  p.kind = cfg.kind;
  p.lambda = lambda;
  const bool mixed = cfg.kind != PenaltyKind::L1;
  switch (cfg.weighting) {
    case Weighting::None:
      break;
    case Weighting::L1Corr: {
      if (mixed) throw InvalidArgument("l1corr weighting applies to the l1 penalty only");
      const auto w = l1_weights_from_correlation(d, highpass, cfg.weight_eps);
      p.l1_weights.assign(w.values().begin(), w.values().end());
      break;
    }
    case Weighting::Group:
    case Weighting::Inner:
    case Weighting::GroupInner: {
      if (!mixed) {
        throw InvalidArgument(to_string(cfg.weighting) + " weighting applies to mixed norms only");
      }
      if (cfg.weighting != Weighting::Inner) {
        const auto w = group_weights_from_activity(d, highpass, cfg.activity, cfg.weight_eps);
        p.group_weights.assign(w.values().begin(), w.values().end());
      }
      if (cfg.weighting != Weighting::Group) p.inner_kernels = stripe_weight_kernels(d);
      break;
    }
  }
  return p;
}

DenoiseResult denoise_csc(const Image& noisy, const Dictionary& d, const DenoiseConfig& cfg) {
  auto split = tikhonov_lowpass(noisy, cfg.lowpass_lambda);
  const PenaltySpec p = build_penalty(d, split.highpass, cfg, cfg.lambda);
  DenoiseResult r;
  r.solve = solve_csc(d, split.highpass, p, resolve_admm(cfg, cfg.lambda), cfg.algorithm);
  r.reconstruction = apply_dictionary(d, r.solve.x);
  std::vector<double> out(noisy.size());
  const auto rec = r.reconstruction.values();
  const auto low = split.lowpass.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = rec[i] + low[i];
  r.denoised = Image(noisy.height(), noisy.width(), std::move(out));
  r.lowpass = std::move(split.lowpass);
  r.highpass = std::move(split.highpass);
  return r;
}

std::vector<double> log_grid(double lo, double hi, int count) {
  if (count < 1) throw InvalidArgument("grid needs at least one point");
  if (!(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi)) {
    throw InvalidArgument("grid bounds must satisfy 0 < lo <= hi");
  }
  if (count == 1) return {lo};
  if (hi == lo) throw InvalidArgument("grid with several points needs lo < hi");
  std::vector<double> g(static_cast<std::size_t>(count));
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < count; ++i) g[std::size_t(i)] = std::exp(a + (b - a) * i / (count - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

double grid_scale(PenaltyKind kind, Weighting weighting, Shape image_shape, Shape filter_shape) {
  // Relative to a 64 x 64 image coded with 8 x 8 filters.
  const double area = double(image_shape.size()) / 4096.0;
  const double support = double(filter_shape.size()) / 64.0;
  switch (kind) {
    case PenaltyKind::L1: return weighting == Weighting::L1Corr ? 50.0 : 1.0;
    case PenaltyKind::L1Inf: return 30.0 * area / support;
    case PenaltyKind::L12: return 1.5 * std::sqrt(area / support);
  }
  return 1.0;
}

std::vector<double> default_grid(PenaltyKind kind, Weighting weighting, double sigma,
                                 Shape image_shape, Shape filter_shape, int count) {
  if (!(sigma > 0.0)) throw InvalidArgument("default grid needs sigma > 0");
  const double s = sigma / 0.05 * grid_scale(kind, weighting, image_shape, filter_shape);
  return log_grid(1e-2 * s, s, count);
}

GridSearchResult lambda_grid_search(const Image& noisy, const Image& reference,
                                    const Dictionary& d, const DenoiseConfig& cfg,
                                    const std::vector<double>& grid) {
  if (grid.empty()) throw InvalidArgument("lambda grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0) || (i > 0 && !(grid[i] > grid[i - 1]))) {
      throw InvalidArgument("lambda grid must be positive and strictly increasing");
    }
  }
  require_same_shape(noisy.shape(), reference.shape(), "grid search reference");
  GridSearchResult out;
  bool have = false;
  for (double lambda : grid) {
    DenoiseConfig c = cfg;
    c.lambda = lambda;
    DenoiseResult r = denoise_csc(noisy, d, c);
    GridPoint pt{lambda, psnr(reference, r.denoised), r.solve.iterations, r.solve.final_functional};
    out.table.push_back(pt);
    if (!have || pt.psnr > out.best_psnr) {
      have = true;
      out.best_lambda = lambda;
      out.best_psnr = pt.psnr;
      out.best = std::move(r);
    }
  }
  return out;
}

std::vector<BlockErrorRecord> block_error_scatter(const Image& reference_hp, const Image& test_hp,
                                                  Shape block, const std::string& method) {
  require_same_shape(reference_hp.shape(), test_hp.shape(), "block error");
  const std::size_t h = reference_hp.height();
  const std::size_t w = reference_hp.width();
  if (block.height == 0 || block.width == 0 || block.height > h || block.width > w) {
    throw DimensionError("block " + to_string(block) + " does not fit image " +
                         to_string(reference_hp.shape()));
  }
  std::vector<BlockErrorRecord> out;
  out.reserve(h * w);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      double ref2 = 0.0;
      double err2 = 0.0;
      for (std::size_t i = 0; i < block.height; ++i) {
        const std::size_t rr = (r + i) % h;
        for (std::size_t j = 0; j < block.width; ++j) {
          const std::size_t cc = (c + j) % w;
          const double a = reference_hp(rr, cc);
          const double e = a - test_hp(rr, cc);
          ref2 += a * a;
          err2 += e * e;
        }
      }
      out.push_back({r, c, std::sqrt(ref2), std::sqrt(err2), method});
    }
  }
  return out;
}

double top_fraction_mean_error(const std::vector<BlockErrorRecord>& records, double fraction) {
  if (records.empty()) throw InvalidArgument("no block records");
  if (!(fraction > 0.0 && fraction <= 1.0)) throw InvalidArgument("fraction must be in (0, 1]");
  std::vector<std::size_t> idx(records.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return records[a].reference_norm > records[b].reference_norm;
  });
  const std::size_t n = std::max<std::size_t>(
      1, std::size_t(std::ceil(fraction * double(records.size()) - 1e-9)));
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += records[idx[i]].error;
  return sum / double(n);
}

namespace {

std::vector<double> dct_1d(std::size_t n, std::size_t k) {
  std::vector<double> out(n * k);
  for (std::size_t j = 0; j < k; ++j) {
    double* a = out.data() + j * n;
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = std::cos(double(i) * double(j) * std::numbers::pi / double(k));
    }
    if (j > 0) {
      double mean = 0.0;
      for (std::size_t i = 0; i < n; ++i) mean += a[i];
      mean /= double(n);
      for (std::size_t i = 0; i < n; ++i) a[i] -= mean;
    }
    double nrm = 0.0;
    for (std::size_t i = 0; i < n; ++i) nrm += a[i] * a[i];
    nrm = std::sqrt(nrm);
    for (std::size_t i = 0; i < n; ++i) a[i] /= nrm;
  }
  return out;
}

// OMP with the dictionary Gram matrix precomputed, shared across patches.
class OmpCoder {
public:
  explicit OmpCoder(const PatchDictionary& dict) : dict_(dict), k_(dict.num_atoms) {
    gram_.resize(k_ * k_);
    for (std::size_t i = 0; i < k_; ++i) {
      for (std::size_t j = i; j < k_; ++j) {
        gram_[i * k_ + j] = gram_[j * k_ + i] = dot(dict.atom(i), dict.atom(j));
      }
    }
  }

  SparseCode code(std::span<const double> s, double threshold, std::size_t max_atoms) const {
    const std::size_t n = dict_.patch.size();
    SparseCode out;
    std::vector<double> resid(s.begin(), s.end());
    double rnorm = norm2(resid);
    if (rnorm <= threshold || max_atoms == 0) {
      out.residual_norm = rnorm;
      return out;
    }
    std::vector<double> corr0(k_);
    for (std::size_t j = 0; j < k_; ++j) corr0[j] = dot(dict_.atom(j), s);
    std::vector<double> corr = corr0;
    std::vector<char> used(k_, 0);
    std::vector<double> chol;  // lower triangular, row-major, size t x t
    std::vector<std::size_t>& sup = out.support;
    std::vector<double>& coef = out.coefficients;
    while (sup.size() < max_atoms) {
      std::size_t best = k_;
      double best_abs = 0.0;
      for (std::size_t j = 0; j < k_; ++j) {
        if (used[j]) continue;
        const double a = std::abs(corr[j]);
        if (a > best_abs) {
          best_abs = a;
          best = j;
        }
      }
      if (best == k_ || best_abs <= 1e-14) break;
      const std::size_t t = sup.size();
      std::vector<double> row(t);
      for (std::size_t i = 0; i < t; ++i) {
        double v = gram_[sup[i] * k_ + best];
        for (std::size_t j = 0; j < i; ++j) v -= chol[i * t + j] * row[j];
        row[i] = v / chol[i * t + i];
      }
      double diag2 = 1.0;
      for (double v : row) diag2 -= v * v;
      if (diag2 <= 1e-12) {
        used[best] = 1;
        continue;
      }
      std::vector<double> grown((t + 1) * (t + 1), 0.0);
      for (std::size_t i = 0; i < t; ++i) {
        for (std::size_t j = 0; j <= i; ++j) grown[i * (t + 1) + j] = chol[i * t + j];
      }
      for (std::size_t j = 0; j < t; ++j) grown[t * (t + 1) + j] = row[j];
      grown[t * (t + 1) + t] = std::sqrt(diag2);
      chol = std::move(grown);
      sup.push_back(best);
      used[best] = 1;
      const std::size_t m = t + 1;
      std::vector<double> z(m);
      for (std::size_t i = 0; i < m; ++i) {
        double v = corr0[sup[i]];
        for (std::size_t j = 0; j < i; ++j) v -= chol[i * m + j] * z[j];
        z[i] = v / chol[i * m + i];
      }
      coef.assign(m, 0.0);
      for (std::size_t i = m; i-- > 0;) {
        double v = z[i];
        for (std::size_t j = i + 1; j < m; ++j) v -= chol[j * m + i] * coef[j];
        coef[i] = v / chol[i * m + i];
      }
      std::copy(s.begin(), s.end(), resid.begin());
      for (std::size_t i = 0; i < m; ++i) {
        const auto a = dict_.atom(sup[i]);
        for (std::size_t p = 0; p < n; ++p) resid[p] -= coef[i] * a[p];
      }
      rnorm = norm2(resid);
      if (rnorm <= threshold) break;
      for (std::size_t j = 0; j < k_; ++j) {
        double v = corr0[j];
        for (std::size_t i = 0; i < m; ++i) v -= gram_[j * k_ + sup[i]] * coef[i];
        corr[j] = v;
      }
    }
    out.residual_norm = rnorm;
    return out;
  }

private:
  const PatchDictionary& dict_;
  std::size_t k_;
  std::vector<double> gram_;
};

void check_patch_dictionary(const PatchDictionary& dict) {
  if (dict.patch.size() == 0 || dict.num_atoms == 0) {
    throw DimensionError("patch dictionary is empty");
  }
  if (dict.atoms.size() != dict.patch.size() * dict.num_atoms) {
    throw DimensionError("patch dictionary holds " + std::to_string(dict.atoms.size()) +
                         " values, expected " + std::to_string(dict.patch.size() * dict.num_atoms));
  }
}

}  // namespace

PatchDictionary overcomplete_dct(Shape patch, std::size_t atoms_per_dim) {
  if (patch.size() == 0 || atoms_per_dim == 0) throw InvalidArgument("empty DCT dictionary");
  const auto rows = dct_1d(patch.height, atoms_per_dim);
  const auto cols = dct_1d(patch.width, atoms_per_dim);
  PatchDictionary d;
  d.patch = patch;
  d.num_atoms = atoms_per_dim * atoms_per_dim;
  d.atoms.resize(d.num_atoms * patch.size());
  for (std::size_t a = 0; a < atoms_per_dim; ++a) {
    for (std::size_t b = 0; b < atoms_per_dim; ++b) {
      double* atom = d.atoms.data() + (a * atoms_per_dim + b) * patch.size();
      for (std::size_t r = 0; r < patch.height; ++r) {
        for (std::size_t c = 0; c < patch.width; ++c) {
          atom[r * patch.width + c] = rows[a * patch.height + r] * cols[b * patch.width + c];
        }
      }
    }
  }
  return d;
}

SparseCode omp_code(const PatchDictionary& dict, std::span<const double> signal, double threshold,
                    std::size_t max_atoms) {
  check_patch_dictionary(dict);
  if (signal.size() != dict.patch.size()) {
    throw DimensionError("signal length " + std::to_string(signal.size()) +
                         " does not match atom length " + std::to_string(dict.patch.size()));
  }
  return OmpCoder(dict).code(signal, threshold, max_atoms);
}

Image denoise_omp(const Image& noisy, const PatchDictionary& dict, double sigma,
                  const OmpConfig& cfg) {
  check_patch_dictionary(dict);
  if (!(sigma >= 0.0)) throw InvalidArgument("sigma must be nonnegative");
  const Shape ps = dict.patch;
  if (ps.height > noisy.height() || ps.width > noisy.width()) {
    throw DimensionError("patch " + to_string(ps) + " larger than image " +
                         to_string(noisy.shape()));
  }
  const auto split = tikhonov_lowpass(noisy, cfg.lowpass_lambda);
  const Image& hp = split.highpass;
  const std::size_t cap = cfg.max_atoms ? cfg.max_atoms : ps.size() / 2;
  const double threshold = cfg.error_constant * sigma * std::sqrt(double(ps.size()));
  const OmpCoder coder(dict);
  const std::size_t h = noisy.height();
  const std::size_t w = noisy.width();
  std::vector<double> acc(h * w, 0.0);
  std::vector<double> count(h * w, 0.0);
  std::vector<double> patch(ps.size());
  for (std::size_t r = 0; r + ps.height <= h; ++r) {
    for (std::size_t c = 0; c + ps.width <= w; ++c) {
      for (std::size_t i = 0; i < ps.height; ++i) {
        for (std::size_t j = 0; j < ps.width; ++j) patch[i * ps.width + j] = hp(r + i, c + j);
      }
      const SparseCode code = coder.code(patch, threshold, cap);
      std::fill(patch.begin(), patch.end(), 0.0);
      for (std::size_t t = 0; t < code.support.size(); ++t) {
        const auto a = dict.atom(code.support[t]);
        for (std::size_t p = 0; p < ps.size(); ++p) patch[p] += code.coefficients[t] * a[p];
      }
      for (std::size_t i = 0; i < ps.height; ++i) {
        for (std::size_t j = 0; j < ps.width; ++j) {
          acc[(r + i) * w + c + j] += patch[i * ps.width + j];
          count[(r + i) * w + c + j] += 1.0;
        }
      }
    }
  }
  const auto low = split.lowpass.values();
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = acc[i] / count[i] + low[i];
  return Image(h, w, std::move(acc));
}

}  // namespace csc

#include "csc/benchmark.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "csc/csv.hpp"
#include "csc/error.hpp"
#include "csc/io.hpp"
#include "csc/signal.hpp"
#include "csc/svg.hpp"

namespace csc {

MethodSpec parse_method(const std::string& s) {
  MethodSpec m;
  m.name = s;
  if (s == "omp") {
    m.omp = true;
    return m;
  }
  const auto colon = s.find(':');
  m.kind = parse_penalty_kind(s.substr(0, colon));
  if (colon != std::string::npos) m.weighting = parse_weighting(s.substr(colon + 1));
  const bool l1 = m.kind == PenaltyKind::L1;
  const bool l1_weighting = m.weighting == Weighting::L1Corr;
  if (m.weighting != Weighting::None && l1 != l1_weighting) {
    throw InvalidArgument("weighting '" + to_string(m.weighting) + "' does not apply to " +
                          to_string(m.kind));
  }
  return m;
}

std::vector<MethodSpec> default_methods() {
  std::vector<MethodSpec> out;
  for (const char* s : {"l1", "l12", "l1inf", "l1:l1corr", "l12:group+inner", "l1inf:group+inner", "omp"}) {
    out.push_back(parse_method(s));
  }
  return out;
}

std::size_t worker_threads(std::size_t requested) {
  std::size_t n = requested;
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("CSC_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) n = std::min<std::size_t>(n, std::size_t(cap));
  }
  return n;
}

namespace {

Image highpass_of(const Image& img, double lowpass_lambda) {
  return tikhonov_lowpass(img, lowpass_lambda).highpass;
}

BenchmarkCell run_cell(const MethodSpec& m, const BenchmarkImage& img, const Image& noisy,
                       const Dictionary& d, const BenchmarkConfig& cfg, Shape block) {
  BenchmarkCell cell;
  cell.method = m.name;
  cell.image = img.name;
  const auto t0 = std::chrono::steady_clock::now();
  if (m.omp) {
    OmpConfig oc = cfg.omp;
    oc.lowpass_lambda = cfg.base.lowpass_lambda;
    const auto pd = overcomplete_dct(d.filter_shape(), cfg.omp_atoms_per_dim);
    cell.denoised = denoise_omp(noisy, pd, cfg.sigma, oc);
    cell.psnr = psnr(img.reference, cell.denoised);
  } else {
    DenoiseConfig dc = cfg.base;
    dc.kind = m.kind;
    dc.weighting = m.weighting;
    const auto grid = cfg.grid.empty()
                          ? default_grid(m.kind, m.weighting, cfg.sigma, img.reference.shape(),
                                         d.filter_shape(), cfg.grid_count)
                          : cfg.grid;
    auto gs = lambda_grid_search(noisy, img.reference, d, dc, grid);
    cell.lambda = gs.best_lambda;
    cell.psnr = gs.best_psnr;
    cell.iterations = gs.best.solve.iterations;
    const AdmmConfig a = resolve_admm(dc, gs.best_lambda);
    cell.rho = a.rho;
    cell.alpha0 = a.alpha0;
    cell.alpha1 = a.alpha1;
    cell.grid = std::move(gs.table);
    cell.denoised = std::move(gs.best.denoised);
  }
  cell.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  cell.block_errors = block_error_scatter(highpass_of(img.reference, cfg.base.lowpass_lambda),
                                          highpass_of(cell.denoised, cfg.base.lowpass_lambda), block,
                                          m.name);
  return cell;
}

}  // namespace

BenchmarkResult run_benchmark(const std::vector<BenchmarkImage>& images, const Dictionary& d,
                              const std::vector<MethodSpec>& methods, const BenchmarkConfig& cfg) {
  if (images.empty() || methods.empty()) throw InvalidArgument("benchmark needs images and methods");
  const Shape block = cfg.block.value_or(d.filter_shape());
  BenchmarkResult r;
  for (const auto& m : methods) r.methods.push_back(m.name);
  for (std::size_t i = 0; i < images.size(); ++i) {
    const auto& img = images[i];
    r.images.push_back(img.name);
    r.noisy.push_back(add_gaussian_noise(img.reference, {cfg.sigma, cfg.seed + i}));
    r.noisy_psnr.push_back(psnr(img.reference, r.noisy.back()));
    r.noisy_block_errors.push_back(block_error_scatter(
        highpass_of(img.reference, cfg.base.lowpass_lambda),
        highpass_of(r.noisy.back(), cfg.base.lowpass_lambda), block, "noisy"));
  }
  const std::size_t tasks = methods.size() * images.size();
  r.cells.resize(tasks);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t t; (t = next.fetch_add(1)) < tasks;) {
      try {
        const std::size_t m = t / images.size();
        const std::size_t i = t % images.size();
        r.cells[t] = run_cell(methods[m], images[i], r.noisy[i], d, cfg, block);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = tasks;
      }
    }
  };
  const std::size_t n = std::min(worker_threads(cfg.threads), tasks);
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < n; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return r;
}

std::string table_csv(const BenchmarkResult& r) {
  std::vector<std::string> header{"method"};
  header.insert(header.end(), r.images.begin(), r.images.end());
  csv::Table t(header);
  std::vector<std::string> noisy{"noisy"};
  for (double p : r.noisy_psnr) noisy.push_back(csv::fixed(p, 2));
  t.add(noisy);
  for (std::size_t m = 0; m < r.methods.size(); ++m) {
    std::vector<std::string> row{r.methods[m]};
    for (std::size_t i = 0; i < r.images.size(); ++i) row.push_back(csv::fixed(r.cell(m, i).psnr, 2));
    t.add(row);
  }
  return t.str();
}

std::string metrics_csv(const BenchmarkResult& r) {
  csv::Table t({"method", "image", "lambda", "rho", "alpha0", "alpha1", "iterations", "psnr", "noisy_psnr"});
  for (std::size_t m = 0; m < r.methods.size(); ++m) {
    for (std::size_t i = 0; i < r.images.size(); ++i) {
      const auto& c = r.cell(m, i);
      const bool csc = c.lambda.has_value();
      t.add({c.method, c.image, csc ? csv::number(*c.lambda) : "", csc ? csv::number(c.rho) : "",
             csc ? csv::number(c.alpha0) : "", csc ? csv::number(c.alpha1) : "",
             std::to_string(c.iterations), csv::number(c.psnr), csv::number(r.noisy_psnr[i])});
    }
  }
  return t.str();
}

std::string timings_csv(const BenchmarkResult& r) {
  csv::Table t({"method", "image", "wall_seconds"});
  for (const auto& c : r.cells) t.add({c.method, c.image, csv::fixed(c.wall_seconds, 3)});
  return t.str();
}

std::string grid_csv(const BenchmarkResult& r) {
  csv::Table t({"method", "image", "lambda", "psnr", "iterations", "functional"});
  for (const auto& c : r.cells) {
    for (const auto& g : c.grid) {
      t.add({c.method, c.image, csv::number(g.lambda), csv::number(g.psnr), std::to_string(g.iterations),
             csv::number(g.functional)});
    }
  }
  return t.str();
}

std::string block_error_csv(const BenchmarkResult& r, std::size_t image) {
  csv::Table t({"method", "row", "col", "reference_norm", "error"});
  auto add = [&](const std::vector<BlockErrorRecord>& recs) {
    for (const auto& b : recs) {
      t.add({b.method, std::to_string(b.row), std::to_string(b.col), csv::number(b.reference_norm),
             csv::number(b.error)});
    }
  };
  add(r.noisy_block_errors.at(image));
  for (std::size_t m = 0; m < r.methods.size(); ++m) add(r.cell(m, image).block_errors);
  return t.str();
}

std::string block_error_svg(const BenchmarkResult& r, std::size_t image) {
  static const char* palette[] = {"#7f7f7f", "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                  "#9467bd", "#8c564b", "#e377c2", "#bcbd22", "#17becf"};
  std::vector<svg::Series> series;
  auto add = [&](const std::string& label, const std::vector<BlockErrorRecord>& recs) {
    svg::Series s;
    s.label = label;
    s.color = palette[series.size() % 10];
    for (const auto& b : recs) {
      s.x.push_back(b.reference_norm);
      s.y.push_back(b.error);
    }
    series.push_back(std::move(s));
  };
  add("noisy", r.noisy_block_errors.at(image));
  for (std::size_t m = 0; m < r.methods.size(); ++m) add(r.methods[m], r.cell(m, image).block_errors);
  svg::ScatterOptions opt;
  opt.title = "Block error: " + r.images.at(image);
  opt.x_label = "reference block norm";
  opt.y_label = "block error";
  return svg::scatter(series, opt);
}

namespace {

std::string file_tag(std::string s) {
  for (char& c : s) {
    if (c == ':' || c == '+' || c == '/' || c == ' ') c = '_';
  }
  return s;
}

}  // namespace

std::vector<std::filesystem::path> write_benchmark(const BenchmarkResult& r,
                                                   const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
  std::vector<std::filesystem::path> out;
  auto text = [&](const std::string& name, const std::string& body) {
    out.push_back(dir / name);
    io::write_text(out.back(), body);
  };
  text("table.csv", table_csv(r));
  text("metrics.csv", metrics_csv(r));
  text("grid.csv", grid_csv(r));
  text("timings.csv", timings_csv(r));
  for (std::size_t i = 0; i < r.images.size(); ++i) {
    const std::string tag = file_tag(r.images[i]);
    text("blockerr_" + tag + ".csv", block_error_csv(r, i));
    text("blockerr_" + tag + ".svg", block_error_svg(r, i));
    out.push_back(dir / ("noisy_" + tag + ".cimg"));
    io::write_cimg(out.back(), r.noisy[i]);
    for (std::size_t m = 0; m < r.methods.size(); ++m) {
      out.push_back(dir / ("denoised_" + file_tag(r.methods[m]) + "_" + tag + ".cimg"));
      io::write_cimg(out.back(), r.cell(m, i).denoised);
    }
  }
  return out;
}

}  // namespace csc

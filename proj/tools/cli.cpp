#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "csc/benchmark.hpp"
#include "csc/csv.hpp"
#include "csc/error.hpp"
#include "csc/io.hpp"
#include "csc/pipeline.hpp"
#include "csc/signal.hpp"
#include "csc/svg.hpp"
#include "csc/synth.hpp"
#include "csc/weighting.hpp"

#ifndef CSC_VERSION
#define CSC_VERSION "0.0.0"
#endif

namespace csc::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

class UsageError : public Error {
public:
  using Error::Error;
};

class SolverFailure : public Error {
public:
  using Error::Error;
};

Shape parse_shape(const std::string& s) {
  const auto x = s.find('x');
  try {
    std::size_t pos = 0;
    if (x == std::string::npos) {
      const auto n = std::stoul(s, &pos);
      if (pos != s.size() || n == 0) throw std::invalid_argument(s);
      return {n, n};
    }
    const auto h = std::stoul(s.substr(0, x), &pos);
    if (pos != x) throw std::invalid_argument(s);
    const auto w = std::stoul(s.substr(x + 1), &pos);
    if (pos != s.size() - x - 1 || h == 0 || w == 0) throw std::invalid_argument(s);
    return {h, w};
  } catch (const std::logic_error&) {
    throw UsageError("bad shape '" + s + "', expected HxW or N");
  }
}

std::string shape_str(Shape s) { return std::to_string(s.height) + "x" + std::to_string(s.width); }

void require_finite(const Image& img, const char* what) {
  for (double v : img.values()) {
    if (!std::isfinite(v)) throw SolverFailure(std::string(what) + " contains non-finite values");
  }
}

// Records inputs, outputs and resolved parameters of one command.
class Manifest {
public:
  Manifest(std::string command, const std::vector<std::string>& args)
      : command_(std::move(command)), args_(args.begin() + 1, args.end()),
        start_(std::chrono::steady_clock::now()) {}

  json params = json::object();

  void input(const fs::path& p) { inputs_.emplace_back(p.string(), io::file_checksum(p)); }
  void output(const fs::path& p) { outputs_.emplace_back(p.string(), io::file_checksum(p)); }

  void write(const fs::path& path) const {
    json j;
    j["command"] = command_;
    j["tool_version"] = CSC_VERSION;
    j["argv"] = args_;
    j["cwd"] = fs::current_path().string();
    j["params"] = params;
    auto files = [](const auto& list) {
      json a = json::array();
      for (const auto& [p, c] : list) a.push_back({{"path", p}, {"checksum", c}});
      return a;
    };
    j["inputs"] = files(inputs_);
    j["outputs"] = files(outputs_);
    j["wall_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    io::write_text(path, j.dump(2) + "\n");
  }

private:
  std::string command_;
  std::vector<std::string> args_;
  std::chrono::steady_clock::time_point start_;
  std::vector<std::pair<std::string, std::string>> inputs_, outputs_;
};

fs::path with_suffix(const fs::path& p, const std::string& suffix) {
  return fs::path(p.string() + suffix);
}

void add_solver_options(CLI::App* sc, DenoiseConfig& cfg, std::string& algorithm,
                        std::string& activity) {
  sc->add_option_function<double>(
      "--rho-per-lambda", [&cfg](double v) { cfg.solver.rho_per_lambda = v; },
      "ADMM rho as a multiple of lambda (default: 50 lambda + 1 for l1, 0.05 lambda for l1inf, "
      "3 lambda for l12)");
  sc->add_option_function<double>(
      "--alpha0", [&cfg](double v) { cfg.solver.alpha0 = v; },
      "Group split scaling (default 0.06 for l1inf, 0.03 for l12)");
  sc->add_option_function<double>(
      "--alpha1", [&cfg](double v) { cfg.solver.alpha1 = v; }, "Identity split scaling (default 1/alpha0)");
  sc->add_option_function<int>(
      "--iterations", [&cfg](int v) { cfg.solver.max_iter = v; },
      "ADMM iterations (default 250 for l1, 350 for l1inf and l12)");
  sc->add_flag("--tolerance", cfg.solver.tolerance_mode,
               "Stop on the relative residual test instead of running all iterations");
  sc->add_option("--eps-rel", cfg.solver.eps_rel, "Relative residual tolerance")->capture_default_str();
  sc->add_option_function<bool>(
      "--residual-balancing", [&cfg](bool v) { cfg.solver.residual_balancing = v; },
      "Adapt rho to balance the residuals (default on for l1 only)");
  sc->add_option("--inner-rho", cfg.solver.inner.rho, "Inner ADMM rho, multiplied by tau")
      ->capture_default_str();
  sc->add_option("--inner-iterations", cfg.solver.inner.max_iter, "Inner ADMM iteration cap")
      ->capture_default_str();
  sc->add_option("--inner-tol", cfg.solver.inner.rel_tol, "Inner relative functional change")
      ->capture_default_str();
  sc->add_option("--algorithm", algorithm, "Mixed-norm algorithm")
      ->check(CLI::IsMember({"nonneg", "nested"}))
      ->capture_default_str();
  sc->add_option("--lowpass", cfg.lowpass_lambda, "Tikhonov lowpass regularization")->capture_default_str();
  sc->add_option("--activity", activity, "Group weight activity measure")
      ->check(CLI::IsMember({"analysis", "image_energy"}))
      ->capture_default_str();
  sc->add_option("--weight-eps", cfg.weight_eps, "Relative weight stabilizer")->capture_default_str();
}

json solver_params(const DenoiseConfig& cfg, double lambda) {
  const AdmmConfig a = resolve_admm(cfg, lambda);
  return {{"rho", a.rho},
          {"alpha0", a.alpha0},
          {"alpha1", a.alpha1},
          {"max_iter", a.max_iter},
          {"fixed_iterations", a.fixed_iterations},
          {"eps_rel", a.eps_rel},
          {"residual_balancing", a.residual_balancing},
          {"inner_rho", a.inner.rho},
          {"inner_max_iter", a.inner.max_iter},
          {"inner_rel_tol", a.inner.rel_tol}};
}

// Filters scaled to [0,1] each and tiled with a one pixel gap.
Image dictionary_montage(const Dictionary& d) {
  const std::size_t m = d.num_filters();
  const std::size_t cols = std::size_t(std::ceil(std::sqrt(double(m))));
  const std::size_t rows = (m + cols - 1) / cols;
  const Shape fs = d.filter_shape();
  Image out(rows * (fs.height + 1) + 1, cols * (fs.width + 1) + 1, 0.5);
  for (std::size_t k = 0; k < m; ++k) {
    const auto f = d.filter(k);
    const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
    const double span = *hi - *lo > 0 ? *hi - *lo : 1.0;
    const std::size_t r0 = 1 + (k / cols) * (fs.height + 1);
    const std::size_t c0 = 1 + (k % cols) * (fs.width + 1);
    for (std::size_t r = 0; r < fs.height; ++r) {
      for (std::size_t c = 0; c < fs.width; ++c) out(r0 + r, c0 + c) = (d(k, r, c) - *lo) / span;
    }
  }
  return out;
}

bool is_dictionary_file(const fs::path& p) {
  const auto bytes = io::read_bytes(p);
  return bytes.size() >= 6 && std::string(bytes.begin(), bytes.begin() + 6) == "CDICT1";
}

int replay(const fs::path& manifest_path, std::ostream& out, std::ostream& err) {
  json m;
  try {
    m = json::parse(io::read_bytes(manifest_path));
  } catch (const json::exception& e) {
    throw FormatError("manifest '" + manifest_path.string() + "': " + e.what());
  }
  if (!m.contains("argv") || !m.contains("outputs") || !m.contains("cwd")) {
    throw FormatError("manifest '" + manifest_path.string() + "' lacks argv, outputs or cwd");
  }
  std::vector<std::string> args{"csc"};
  for (const auto& a : m["argv"]) args.push_back(a.get<std::string>());
  const fs::path old = fs::current_path();
  fs::current_path(m["cwd"].get<std::string>());
  std::ostringstream sink;
  const int code = run(args, sink, err);
  int mismatches = 0;
  if (code == kExitOk) {
    for (const auto& o : m["outputs"]) {
      const std::string path = o["path"];
      const std::string want = o["checksum"];
      const std::string got = fs::exists(path) ? io::file_checksum(path) : "missing";
      if (got != want) {
        ++mismatches;
        err << "replay: " << path << " checksum " << got << ", manifest " << want << "\n";
      }
    }
  }
  fs::current_path(old);
  if (code != kExitOk) return code;
  out << "replayed " << m["command"].get<std::string>() << ": " << m["outputs"].size() << " outputs, "
      << mismatches << " mismatches\n";
  return mismatches ? kExitData : kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Convolutional sparse coding toolkit", "csc"};
  app.set_version_flag("--version", CSC_VERSION);
  app.require_subcommand(1);

  // synth-image
  std::string image_name = "shapes";
  std::string size_str = "64";
  std::uint64_t seed = 1;
  fs::path out_path;
  auto* c_image = app.add_subcommand("synth-image", "Write a deterministic test image");
  c_image->add_option("--name", image_name, "Scene")
      ->check(CLI::IsMember(synth::image_names()))
      ->capture_default_str();
  c_image->add_option("--size", size_str, "HxW or N")->capture_default_str();
  c_image->add_option("--seed", seed, "Layout seed")->capture_default_str();
  c_image->add_option("--out", out_path, "Output (.pgm or CIMG1)")->required();

  // synth-dict
  std::string dict_kind = "gabor";
  std::string filter_str = "8x8";
  std::size_t num_filters = 32;
  auto* c_dict = app.add_subcommand("synth-dict", "Write a synthetic filter dictionary");
  c_dict->add_option("--kind", dict_kind, "Filter family")
      ->check(CLI::IsMember(synth::dictionary_kinds()))
      ->capture_default_str();
  c_dict->add_option("--filter-size", filter_str, "HxW or N")->capture_default_str();
  c_dict->add_option("--count", num_filters, "Number of filters")->capture_default_str();
  c_dict->add_option("--seed", seed, "Seed for random filters")->capture_default_str();
  c_dict->add_option("--out", out_path, "Output CDICT1 file")->required();

  // addnoise
  fs::path in_path;
  fs::path preview_path;
  double sigma = 0.05;
  auto* c_noise = app.add_subcommand("addnoise", "Add white Gaussian noise");
  c_noise->add_option("--in", in_path, "Input image")->required()->check(CLI::ExistingFile);
  c_noise->add_option("--out", out_path, "Noisy CIMG1 output")->required();
  c_noise->add_option("--preview", preview_path, "PGM preview (default: output with .pgm)");
  c_noise->add_option("--sigma", sigma, "Noise standard deviation")->capture_default_str();
  c_noise->add_option("--seed", seed, "Noise seed")->capture_default_str();

  // denoise
  DenoiseConfig dcfg;
  std::string method = "l1";
  std::string weighting = "none";
  std::string algorithm = "nonneg";
  std::string activity = "analysis";
  fs::path dict_path;
  fs::path reference_path;
  std::optional<double> lambda;
  bool use_grid = false;
  std::vector<double> grid_values;
  int grid_count = 16;
  std::optional<double> grid_lo, grid_hi;
  OmpConfig ocfg;
  std::size_t omp_atoms = 12;
  fs::path coefficients_path;
  auto* c_den = app.add_subcommand("denoise", "Denoise an image");
  c_den->add_option("--in", in_path, "Noisy image")->required()->check(CLI::ExistingFile);
  c_den->add_option("--dict", dict_path, "CDICT1 dictionary (filter shape sets the OMP patch)")
      ->required()
      ->check(CLI::ExistingFile);
  c_den->add_option("--method", method, "Method")
      ->check(CLI::IsMember({"l1", "l1inf", "l12", "omp"}))
      ->capture_default_str();
  c_den->add_option("--weighting", weighting, "Weighting")
      ->check(CLI::IsMember({"none", "group", "inner", "group+inner", "l1corr"}))
      ->capture_default_str();
  auto* o_lambda = c_den->add_option("--lambda", lambda, "Regularization weight");
  auto* o_grid = c_den->add_flag("--grid", use_grid, "Search lambda on a log grid (needs --reference)");
  o_lambda->excludes(o_grid);
  c_den->add_option("--grid-values", grid_values, "Explicit grid, implies --grid")->delimiter(',');
  c_den->add_option("--grid-count", grid_count, "Default grid size")->capture_default_str();
  c_den->add_option("--grid-lo", grid_lo, "Grid lower bound");
  c_den->add_option("--grid-hi", grid_hi, "Grid upper bound");
  c_den->add_option("--reference", reference_path, "Clean image for PSNR")->check(CLI::ExistingFile);
  c_den->add_option("--sigma", sigma, "Noise level (OMP threshold, default grid)")->capture_default_str();
  c_den->add_option("--omp-c", ocfg.error_constant, "OMP error constant")->capture_default_str();
  c_den->add_option("--omp-max-atoms", ocfg.max_atoms, "OMP sparsity cap (0: patch size / 2)")
      ->capture_default_str();
  c_den->add_option("--omp-atoms-per-dim", omp_atoms, "Overcomplete DCT atoms per dimension")
      ->capture_default_str();
  c_den->add_option("--coefficients", coefficients_path, "Write stacked coefficient maps (CIMG1)");
  c_den->add_option("--out", out_path, "Denoised image")->required();
  add_solver_options(c_den, dcfg, algorithm, activity);

  // benchmark
  std::vector<fs::path> image_paths;
  std::vector<std::string> synth_names;
  std::vector<std::string> methods;
  fs::path out_dir;
  std::size_t threads = 0;
  BenchmarkConfig bcfg;
  std::string block_str;
  auto* c_bench = app.add_subcommand("benchmark", "Methods x images PSNR table with diagnostics");
  c_bench->add_option("--images", image_paths, "Reference images")->delimiter(',')->check(CLI::ExistingFile);
  c_bench->add_option("--synth", synth_names, "Synthetic reference images")
      ->delimiter(',')
      ->check(CLI::IsMember(synth::image_names()));
  c_bench->add_option("--size", size_str, "Synthetic image size")->capture_default_str();
  c_bench->add_option("--dict", dict_path, "CDICT1 dictionary")->required()->check(CLI::ExistingFile);
  c_bench->add_option("--methods", methods,
                      "Methods, e.g. l1,l1:l1corr,l1inf:group+inner,omp (default: all)")
      ->delimiter(',');
  c_bench->add_option("--out-dir", out_dir, "Output directory")->required();
  c_bench->add_option("--sigma", sigma, "Noise level")->capture_default_str();
  c_bench->add_option("--seed", seed, "Noise seed of the first image")->capture_default_str();
  c_bench->add_option("--grid-count", grid_count, "Grid points per method")->capture_default_str();
  c_bench->add_option("--grid-values", grid_values, "Explicit grid for every method")->delimiter(',');
  c_bench->add_option("--block", block_str, "Block size for error scatter (default: filter size)");
  c_bench->add_option("--threads", threads, "Workers (0: all cores, capped by CSC_THREADS)")
      ->capture_default_str();
  c_bench->add_option("--omp-atoms-per-dim", omp_atoms, "Overcomplete DCT atoms per dimension")
      ->capture_default_str();
  add_solver_options(c_bench, dcfg, algorithm, activity);

  // blockerr
  std::vector<fs::path> test_paths;
  std::vector<std::string> labels;
  fs::path svg_path;
  bool already_highpass = false;
  double fraction = 0.1;
  auto* c_blk = app.add_subcommand("blockerr", "Block error against reference block norm");
  c_blk->add_option("--reference", reference_path, "Reference image")->required()->check(CLI::ExistingFile);
  c_blk->add_option("--test", test_paths, "Test images")->required()->delimiter(',')->check(CLI::ExistingFile);
  c_blk->add_option("--label", labels, "Labels for the test images")->delimiter(',');
  c_blk->add_option("--block", block_str, "Block size")->required();
  c_blk->add_option("--lowpass", dcfg.lowpass_lambda, "Lowpass regularization")->capture_default_str();
  c_blk->add_flag("--highpass-input", already_highpass, "Inputs are already highpass");
  c_blk->add_option("--fraction", fraction, "Top fraction for the summary")->capture_default_str();
  c_blk->add_option("--out", out_path, "CSV output")->required();
  c_blk->add_option("--svg", svg_path, "SVG scatter output");

  // dictinfo
  auto* c_info = app.add_subcommand("dictinfo", "Describe a dictionary file");
  c_info->add_option("--dict", dict_path, "CDICT1 dictionary")->required()->check(CLI::ExistingFile);

  // psnr
  fs::path test_path;
  auto* c_psnr = app.add_subcommand("psnr", "PSNR of a test image against a reference");
  c_psnr->add_option("--reference", reference_path, "Reference image")->required()->check(CLI::ExistingFile);
  c_psnr->add_option("--test", test_path, "Test image")->required()->check(CLI::ExistingFile);

  // convert
  auto* c_conv = app.add_subcommand("convert", "Convert between PGM and CIMG1; dictionaries to a PGM montage");
  c_conv->add_option("--in", in_path, "Input")->required()->check(CLI::ExistingFile);
  c_conv->add_option("--out", out_path, "Output (.pgm or CIMG1)")->required();

  // replay
  fs::path manifest_path;
  auto* c_replay = app.add_subcommand("replay", "Re-run a manifest and verify output checksums");
  c_replay->add_option("manifest", manifest_path, "Manifest JSON")->required()->check(CLI::ExistingFile);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (c_image->parsed()) {
      Manifest man("synth-image", args);
      const Shape shape = parse_shape(size_str);
      io::write_image(out_path, synth::test_image(image_name, shape, seed));
      man.params = {{"name", image_name}, {"size", shape_str(shape)}, {"seed", seed}};
      man.output(out_path);
      man.write(with_suffix(out_path, ".manifest.json"));
      return kExitOk;
    }
    if (c_dict->parsed()) {
      Manifest man("synth-dict", args);
      const Shape fs = parse_shape(filter_str);
      io::write_dictionary(out_path, synth::dictionary(dict_kind, fs, num_filters, seed));
      man.params = {{"kind", dict_kind}, {"filter_size", shape_str(fs)}, {"count", num_filters}, {"seed", seed}};
      man.output(out_path);
      man.write(with_suffix(out_path, ".manifest.json"));
      return kExitOk;
    }
    if (c_noise->parsed()) {
      if (!(sigma >= 0.0)) throw UsageError("--sigma must be nonnegative");
      if (out_path.extension() == ".pgm") throw UsageError("--out is written as CIMG1; use --preview for PGM");
      if (preview_path.empty()) preview_path = fs::path(out_path).replace_extension(".pgm");
      Manifest man("addnoise", args);
      man.input(in_path);
      const Image clean = io::read_image(in_path);
      const Image noisy = add_gaussian_noise(clean, {sigma, seed});
      io::write_cimg(out_path, noisy);
      io::write_pgm(preview_path, noisy);
      man.params = {{"sigma", sigma}, {"seed", seed}, {"psnr", psnr(clean, noisy)}};
      man.output(out_path);
      man.output(preview_path);
      man.write(with_suffix(out_path, ".manifest.json"));
      out << "psnr " << csv::fixed(psnr(clean, noisy), 4) << "\n";
      return kExitOk;
    }
    if (c_den->parsed()) {
      Manifest man("denoise", args);
      man.input(in_path);
      man.input(dict_path);
      const Image noisy = io::read_image(in_path);
      const Dictionary d = io::read_dictionary(dict_path);
      std::optional<Image> reference;
      if (!reference_path.empty()) {
        man.input(reference_path);
        reference = io::read_image(reference_path);
      }
      dcfg.algorithm = parse_mixed_algorithm(algorithm);
      dcfg.activity = parse_activity_source(activity);
      dcfg.weighting = parse_weighting(weighting);
      const fs::path metrics_path = with_suffix(out_path, ".metrics.csv");
      csv::Table metrics({"method", "weighting", "algorithm", "lambda", "rho", "alpha0", "alpha1",
                          "iterations", "functional", "psnr"});
      if (method == "omp") {
        if (use_grid || !grid_values.empty() || lambda) throw UsageError("omp takes no lambda");
        if (weighting != "none") throw UsageError("omp takes no weighting");
        ocfg.lowpass_lambda = dcfg.lowpass_lambda;
        const Image den = denoise_omp(noisy, overcomplete_dct(d.filter_shape(), omp_atoms), sigma, ocfg);
        require_finite(den, "OMP output");
        io::write_image(out_path, den);
        metrics.add({"omp", "none", "", "", "", "", "", "0", "",
                     reference ? csv::number(psnr(*reference, den)) : ""});
        man.params = {{"method", "omp"},
                      {"sigma", sigma},
                      {"error_constant", ocfg.error_constant},
                      {"max_atoms", ocfg.max_atoms},
                      {"atoms_per_dim", omp_atoms},
                      {"lowpass", ocfg.lowpass_lambda}};
      } else {
        dcfg.kind = parse_penalty_kind(method);
        DenoiseResult result;
        double chosen = 0.0;
        if (use_grid || !grid_values.empty()) {
          if (!reference) throw UsageError("--grid needs --reference");
          std::vector<double> grid = grid_values;
          if (grid.empty()) {
            grid = default_grid(dcfg.kind, dcfg.weighting, sigma, noisy.shape(), d.filter_shape(), grid_count);
            if (grid_lo || grid_hi) {
              grid = log_grid(grid_lo.value_or(grid.front()), grid_hi.value_or(grid.back()), grid_count);
            }
          }
          auto gs = lambda_grid_search(noisy, *reference, d, dcfg, grid);
          csv::Table gt({"lambda", "psnr", "iterations", "functional"});
          for (const auto& p : gs.table) {
            gt.add({csv::number(p.lambda), csv::number(p.psnr), std::to_string(p.iterations),
                    csv::number(p.functional)});
          }
          const fs::path grid_path = with_suffix(out_path, ".grid.csv");
          io::write_text(grid_path, gt.str());
          man.output(grid_path);
          chosen = gs.best_lambda;
          result = std::move(gs.best);
          man.params["grid"] = grid;
        } else {
          if (!lambda) throw UsageError("denoise needs --lambda or --grid");
          chosen = *lambda;
          dcfg.lambda = chosen;
          result = denoise_csc(noisy, d, dcfg);
        }
        require_finite(result.denoised, "denoised image");
        io::write_image(out_path, result.denoised);
        const AdmmConfig a = resolve_admm(dcfg, chosen);
        metrics.add({method, to_string(dcfg.weighting), to_string(dcfg.algorithm), csv::number(chosen),
                     csv::number(a.rho), csv::number(a.alpha0), csv::number(a.alpha1),
                     std::to_string(result.solve.iterations), csv::number(result.solve.final_functional),
                     reference ? csv::number(psnr(*reference, result.denoised)) : ""});
        if (!coefficients_path.empty()) {
          io::write_cimg(coefficients_path, stack_maps(result.solve.x));
          man.output(coefficients_path);
        }
        man.params["method"] = method;
        man.params["weighting"] = to_string(dcfg.weighting);
        man.params["algorithm"] = to_string(dcfg.algorithm);
        man.params["activity"] = to_string(dcfg.activity);
        man.params["weight_eps"] = dcfg.weight_eps;
        man.params["lowpass"] = dcfg.lowpass_lambda;
        man.params["lambda"] = chosen;
        man.params["solver"] = solver_params(dcfg, chosen);
        man.params["solve_seconds"] = result.solve.wall_seconds;
      }
      io::write_text(metrics_path, metrics.str());
      man.output(out_path);
      man.output(metrics_path);
      man.write(with_suffix(out_path, ".manifest.json"));
      return kExitOk;
    }
    if (c_bench->parsed()) {
      Manifest man("benchmark", args);
      man.input(dict_path);
      const Dictionary d = io::read_dictionary(dict_path);
      std::vector<BenchmarkImage> images;
      for (const auto& p : image_paths) {
        man.input(p);
        images.push_back({p.stem().string(), io::read_image(p)});
      }
      const Shape size = parse_shape(size_str);
      for (const auto& n : synth_names) images.push_back({n, synth::test_image(n, size, 1)});
      if (images.empty()) throw UsageError("benchmark needs --images or --synth");
      std::vector<MethodSpec> specs;
      if (methods.empty()) {
        specs = default_methods();
      } else {
        for (const auto& m : methods) specs.push_back(parse_method(m));
      }
      dcfg.algorithm = parse_mixed_algorithm(algorithm);
      dcfg.activity = parse_activity_source(activity);
      bcfg.sigma = sigma;
      bcfg.seed = seed;
      bcfg.grid_count = grid_count;
      bcfg.grid = grid_values;
      bcfg.base = dcfg;
      bcfg.omp_atoms_per_dim = omp_atoms;
      bcfg.threads = threads;
      if (!block_str.empty()) bcfg.block = parse_shape(block_str);
      const auto result = run_benchmark(images, d, specs, bcfg);
      for (const auto& p : write_benchmark(result, out_dir)) {
        if (p.filename() != "timings.csv") man.output(p);
      }
      json ms = json::array();
      for (const auto& m : specs) ms.push_back(m.name);
      man.params = {{"methods", ms},
                    {"sigma", sigma},
                    {"seed", seed},
                    {"grid_count", grid_count},
                    {"grid", grid_values},
                    {"algorithm", algorithm},
                    {"activity", activity},
                    {"lowpass", dcfg.lowpass_lambda},
                    {"threads", worker_threads(threads)},
                    {"omp_atoms_per_dim", omp_atoms}};
      man.write(out_dir / "manifest.json");
      out << table_csv(result);
      return kExitOk;
    }
    if (c_blk->parsed()) {
      Manifest man("blockerr", args);
      const Shape block = parse_shape(block_str);
      if (!labels.empty() && labels.size() != test_paths.size()) {
        throw UsageError("--label count must match --test count");
      }
      man.input(reference_path);
      auto hp = [&](const Image& img) {
        return already_highpass ? img : tikhonov_lowpass(img, dcfg.lowpass_lambda).highpass;
      };
      const Image ref = hp(io::read_image(reference_path));
      csv::Table t({"method", "row", "col", "reference_norm", "error"});
      std::vector<svg::Series> series;
      static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};
      for (std::size_t i = 0; i < test_paths.size(); ++i) {
        man.input(test_paths[i]);
        const std::string label = labels.empty() ? test_paths[i].stem().string() : labels[i];
        const auto recs = block_error_scatter(ref, hp(io::read_image(test_paths[i])), block, label);
        svg::Series s{label, palette[i % 6], {}, {}};
        for (const auto& r : recs) {
          t.add({r.method, std::to_string(r.row), std::to_string(r.col), csv::number(r.reference_norm),
                 csv::number(r.error)});
          s.x.push_back(r.reference_norm);
          s.y.push_back(r.error);
        }
        series.push_back(std::move(s));
        out << label << " top-" << fraction << " mean error " << csv::fixed(top_fraction_mean_error(recs, fraction), 6)
            << "\n";
      }
      io::write_text(out_path, t.str());
      man.output(out_path);
      if (!svg_path.empty()) {
        io::write_text(svg_path, svg::scatter(series, {"Block error", "reference block norm", "block error"}));
        man.output(svg_path);
      }
      man.params = {{"block", shape_str(block)}, {"lowpass", dcfg.lowpass_lambda},
                    {"highpass_input", already_highpass}, {"fraction", fraction}};
      man.write(with_suffix(out_path, ".manifest.json"));
      return kExitOk;
    }
    if (c_info->parsed()) {
      const Dictionary d = io::read_dictionary(dict_path);
      json j;
      j["filter_height"] = d.filter_height();
      j["filter_width"] = d.filter_width();
      j["num_filters"] = d.num_filters();
      j["normalized"] = d.normalized();
      json norms = json::array();
      json means = json::array();
      double coherence = 0.0;
      for (std::size_t m = 0; m < d.num_filters(); ++m) {
        const auto f = d.filter(m);
        norms.push_back(norm2(f));
        double s = 0.0;
        for (double v : f) s += v;
        means.push_back(s / double(f.size()));
        for (std::size_t k = m + 1; k < d.num_filters(); ++k) {
          const double nm = norm2(f) * norm2(d.filter(k));
          if (nm > 0) coherence = std::max(coherence, std::abs(dot(f, d.filter(k))) / nm);
        }
      }
      j["norms"] = norms;
      j["means"] = means;
      j["max_coherence"] = coherence;
      out << j.dump(2) << "\n";
      return kExitOk;
    }
    if (c_psnr->parsed()) {
      const double p = psnr(io::read_image(reference_path), io::read_image(test_path));
      out << csv::fixed(p, 6) << "\n";
      return kExitOk;
    }
    if (c_conv->parsed()) {
      Manifest man("convert", args);
      man.input(in_path);
      const Image img = is_dictionary_file(in_path) ? dictionary_montage(io::read_dictionary(in_path))
                                                    : io::read_image(in_path);
      io::write_image(out_path, img);
      man.output(out_path);
      man.write(with_suffix(out_path, ".manifest.json"));
      return kExitOk;
    }
    if (c_replay->parsed()) return replay(manifest_path, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SolverFailure& e) {
    err << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const ConditioningError& e) {
    err << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace csc::cli

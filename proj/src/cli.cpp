#include "rhoraw/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <json.hpp>
#include <sstream>

#include "rhoraw/error.hpp"
#include "rhoraw/inverse_isp.hpp"
#include "rhoraw/io.hpp"
#include "rhoraw/isp.hpp"
#include "rhoraw/losses.hpp"
#include "rhoraw/parallel.hpp"
#include "rhoraw/params_io.hpp"
#include "rhoraw/raw.hpp"
#include "rhoraw/ric/codec.hpp"
#include "rhoraw/selftest.hpp"
#include "rhoraw/stats.hpp"

namespace rhoraw::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class LogLevel { Error = 0, Warn, Info, Debug };

struct Globals {
  std::uint64_t seed = 0;
  bool seed_given = false;
  unsigned threads = 1;
  LogLevel level = LogLevel::Warn;
  bool human = false;
  std::string report;
};

class Context {
 public:
  Context(Globals g, std::ostream& out, std::ostream& err) : g(std::move(g)), out_(out), err_(err) {}

  void log(LogLevel lvl, const std::string& msg) const {
    static const char* names[] = {"error", "warn", "info", "debug"};
    if (lvl <= g.level) err_ << "[" << names[int(lvl)] << "] " << msg << "\n";
  }

  void emit(const json& report) const {
    if (!g.report.empty()) {
      std::ofstream f(g.report);
      if (!f) throw Error("cannot write report " + g.report);
      f << report.dump(2) << "\n";
      log(LogLevel::Info, "report written to " + g.report);
      return;
    }
    if (g.human)
      render(report, "", out_);
    else
      out_ << report.dump(2) << "\n";
  }

  Globals g;

 private:
  static void render(const json& j, const std::string& prefix, std::ostream& os) {
    if (j.is_object()) {
      for (auto it = j.begin(); it != j.end(); ++it)
        render(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), os);
    } else if (j.is_array() && !j.empty() && j.front().is_object()) {
      os << prefix << ":\n";
      std::vector<std::string> cols;
      for (auto it = j.front().begin(); it != j.front().end(); ++it) cols.push_back(it.key());
      os << " ";
      for (const auto& c : cols) os << " " << std::setw(14) << c;
      os << "\n";
      for (const auto& row : j) {
        os << " ";
        for (const auto& c : cols) os << " " << std::setw(14) << (row.contains(c) ? scalar(row[c]) : "");
        os << "\n";
      }
    } else {
      os << prefix << ": " << scalar(j) << "\n";
    }
  }

  static std::string scalar(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

  std::ostream& out_;
  std::ostream& err_;
};

bool has_ext(const fs::path& p, const char* ext) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return char(std::tolower(c)); });
  return e == ext;
}

// RGB view of an input: .braw files are normalized and demosaiced, anything
// else is read as PPM.
RgbImage load_rgb(const fs::path& p) {
  if (has_ext(p, ".braw")) return demosaic(normalize(io::read_braw(p)));
  return io::read_ppm(p);
}

// Channel planes shown as R = r, G = mean of the greens, B = b, normalized
// by the black/saturation levels and gamma encoded.
RgbImage planes_preview(const ric::Planes& planes, const RawMeta& meta) {
  RgbImage img(planes.width, planes.height);
  const double span = meta.span();
  auto norm = [&](double v) { return std::clamp((v - meta.black_lev) / span, 0.0, 1.0); };
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    img.planes[0][i] = norm(planes.planes[0][i]);
    img.planes[1][i] = norm(0.5 * (double(planes.planes[1][i]) + double(planes.planes[2][i])));
    img.planes[2][i] = norm(planes.planes[3][i]);
  }
  return isp::gamma_apply(img);
}

std::vector<double> parse_k_grid(const std::string& spec, double step) {
  std::vector<double> ks;
  try {
    const auto dots = spec.find("..");
    if (dots != std::string::npos) {
      const double lo = std::stod(spec.substr(0, dots));
      const double hi = std::stod(spec.substr(dots + 2));
      if (!(step > 0.0) || hi < lo) throw UsageError("bad k range " + spec);
      const auto n = std::size_t(std::floor((hi - lo) / step + 1e-9)) + 1;
      for (std::size_t i = 0; i < n; ++i) ks.push_back(lo + double(i) * step);
    } else {
      std::stringstream ss(spec);
      std::string item;
      while (std::getline(ss, item, ',')) ks.push_back(std::stod(item));
    }
  } catch (const std::logic_error&) {
    throw UsageError("bad k grid '" + spec + "'");
  }
  if (ks.empty()) throw UsageError("empty k grid");
  return ks;
}

void write_text(const fs::path& p, const std::string& s) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error("cannot write " + p.string());
  f << s;
}

isp::IspParams load_isp_params(const std::string& path) {
  return path.empty() ? isp::IspParams::defaults() : params_io::isp_params_from_json(params_io::load_json(path));
}

invisp::InvIspParams load_inv_params(const std::string& path) {
  return path.empty() ? invisp::InvIspParams::defaults() : params_io::inv_params_from_json(params_io::load_json(path));
}

// ---- subcommands -------------------------------------------------------

struct IspArgs {
  std::string in, out, params;
  bool estimate = false;
};

void cmd_isp(const Context& ctx, const IspArgs& a) {
  const BayerRaw raw = io::read_braw(a.in);
  isp::IspParams p = load_isp_params(a.params);
  const NormalizedRaw x = normalize(raw);
  if (a.estimate) p = isp::GrayWorldEstimator().estimate(demosaic(x), p);
  const RgbImage y = isp::isp_forward(x, p);
  io::write_ppm(a.out, y);
  ctx.log(LogLevel::Info, "wrote " + a.out);
  ctx.emit({{"command", "isp"},
            {"input", a.in},
            {"output", a.out},
            {"width", y.width},
            {"height", y.height},
            {"params", params_io::to_json(p)}});
}

struct InvIspArgs {
  std::vector<std::string> in;
  std::string in_dir, params, prior, out_dir, out;
  std::size_t n = 1;
  std::optional<double> theta, phi;
};

invisp::IlluminationPrior load_prior(const Context& ctx, const std::string& path) {
  invisp::IlluminationPrior prior =
      path.empty() ? invisp::IlluminationPrior{} : params_io::prior_from_json(params_io::load_json(path));
  if (ctx.g.seed_given || path.empty()) prior.seed = ctx.g.seed;
  return prior;
}

int cmd_invisp(const Context& ctx, InvIspArgs a, const char* name) {
  const invisp::InvIspParams params = load_inv_params(a.params);
  if (a.theta.has_value() != a.phi.has_value()) throw UsageError("--theta and --phi go together");
  if (a.theta) {
    if (a.in.size() != 1 || a.out.empty()) throw UsageError("replay needs exactly one --in and --out");
    const BayerRaw raw = invisp::inv_isp_raw(io::read_ppm(a.in[0]), params, *a.theta, *a.phi);
    io::write_braw(a.out, raw);
    ctx.emit({{"command", name}, {"input", a.in[0]}, {"output", a.out}, {"theta", *a.theta}, {"phi", *a.phi}});
    return kExitOk;
  }
  if (!a.in_dir.empty()) {
    std::vector<std::string> found;
    for (const auto& e : fs::directory_iterator(a.in_dir))
      if (e.is_regular_file() && has_ext(e.path(), ".ppm")) found.push_back(e.path().string());
    std::sort(found.begin(), found.end());
    a.in.insert(a.in.end(), found.begin(), found.end());
  }
  if (a.in.empty()) throw UsageError("no inputs");
  if (a.out_dir.empty()) throw UsageError("--out-dir is required");
  const invisp::IlluminationPrior prior = load_prior(ctx, a.prior);
  const std::vector<fs::path> inputs(a.in.begin(), a.in.end());
  const auto report = invisp::simraw_batch(inputs, prior, params, a.n, a.out_dir, ctx.g.threads);
  const json manifest = params_io::manifest_to_json(report, prior.seed, a.n);
  const fs::path manifest_path = fs::path(a.out_dir) / "manifest.json";
  write_text(manifest_path, manifest.dump(2) + "\n");
  for (const auto& f : report.failures) ctx.log(LogLevel::Error, f.input + ": " + f.error);
  ctx.emit({{"command", name},
            {"manifest", manifest_path.string()},
            {"written", report.entries.size()},
            {"failed", report.failures.size()},
            {"entries", manifest["entries"]}});
  return report.failures.empty() ? kExitOk : kExitData;
}

struct AnalyzeArgs {
  std::string in;
  bool gamma = false;
  int patch = 16;
};

json fit_json(const stats::KFit& f) {
  return {{"k", f.k}, {"k_unclamped", f.k_unclamped}, {"clamped", f.clamped()}, {"patches", f.samples}};
}

void cmd_analyze(const Context& ctx, const AnalyzeArgs& a) {
  json r = {{"command", "analyze"}, {"input", a.in}, {"patch_size", a.patch}};
  if (has_ext(a.in, ".braw")) {
    const NormalizedRaw x = normalize(io::read_braw(a.in));
    r["domain"] = "raw";
    r["fit"] = fit_json(stats::fit_k(x, a.patch));
    if (a.gamma) {
      const auto g = stats::gamma_k_report(x, a.patch);
      r["gamma"] = {{"k_before", g.before.k}, {"k_after", g.after.k}};
    }
  } else {
    const RgbImage y = io::read_ppm(a.in);
    r["domain"] = "rgb";
    r["fit"] = fit_json(stats::fit_k(y, a.patch));
    if (a.gamma) {
      const auto g = stats::gamma_k_report(y, a.patch);
      r["gamma"] = {{"k_before", g.before.k}, {"k_after", g.after.k}};
    }
  }
  ctx.emit(r);
}

struct BnArgs {
  std::string k = "0..12", out;
  double k_step = 2.0;
  int batch_size = 4;
  std::size_t batches = 500, repeats = 500;
  bool full = false;
};

void cmd_bnsim(const Context& ctx, const BnArgs& a) {
  stats::BnSimConfig cfg;
  cfg.k_grid = parse_k_grid(a.k, a.k_step);
  cfg.batch_size = a.batch_size;
  cfg.n_batches = a.full ? 5000 : a.batches;
  cfg.n_repeats = a.full ? 5000 : a.repeats;
  cfg.seed = ctx.g.seed;
  cfg.threads = ctx.g.threads;
  const auto res = stats::bn_var_mc(cfg);
  json rows = json::array();
  std::ostringstream csv;
  csv << "k,var_ybn_over_a2\n" << std::setprecision(17);
  for (const auto& r : res.rows) {
    rows.push_back({{"k", r.k}, {"value", r.value}});
    csv << r.k << "," << r.value << "\n";
  }
  if (!a.out.empty()) write_text(a.out, csv.str());
  ctx.emit({{"command", "bnsim"},
            {"batch_size", cfg.batch_size},
            {"n_batches", cfg.n_batches},
            {"n_repeats", cfg.n_repeats},
            {"rows", rows},
            {"spearman", res.spearman}});
}

struct GradArgs {
  std::string k = "-6..12", out;
  double k_step = 3.0;
  std::size_t trials = 50000;
  int patch = 8;
  double label_scale = 1.0;
};

void cmd_gradvar(const Context& ctx, const GradArgs& a) {
  stats::GradVarConfig cfg;
  cfg.trials = a.trials;
  cfg.patch = a.patch;
  cfg.label_scale = a.label_scale;
  cfg.seed = ctx.g.seed;
  cfg.threads = ctx.g.threads;
  const auto res = stats::grad_var_mc(parse_k_grid(a.k, a.k_step), cfg);
  json rows = json::array();
  std::ostringstream csv;
  csv << "k,grad_variance\n" << std::setprecision(17);
  for (const auto& r : res.rows) {
    rows.push_back({{"k", r.k}, {"variance", r.variance}});
    csv << r.k << "," << r.variance << "\n";
  }
  if (!a.out.empty()) write_text(a.out, csv.str());
  ctx.emit({{"command", "gradvar"},
            {"rows", rows},
            {"slope", res.fit.slope},
            {"intercept", res.fit.intercept},
            {"r2", res.fit.r2}});
}

struct LossArgs {
  std::string a, b, latents;
};

double l1(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += std::abs(x[i] - y[i]);
  return s;
}

void cmd_losses(const Context& ctx, const LossArgs& a) {
  const RgbImage ya = load_rgb(a.a), yb = load_rgb(a.b);
  json r = {{"command", "losses"}, {"a", a.a}, {"b", a.b}, {"cycle", losses::cycle_loss(ya, yb)}};
  const auto ca = losses::chroma_hist(ya), cb = losses::chroma_hist(yb);
  const auto ga = losses::gray_hist(ya), gb = losses::gray_hist(yb);
  r["chroma_hist"] = {{"l1_distance", l1(ca.bins, cb.bins)}, {"excluded_a", ca.excluded}, {"excluded_b", cb.excluded}};
  r["gray_hist"] = {{"l1_distance", l1(ga.bins, gb.bins)}};
  if (!a.latents.empty()) {
    const json lat = params_io::load_json(a.latents);
    try {
      if (lat.contains("theta") && lat.contains("phi")) {
        const auto th = lat["theta"].get<std::vector<double>>();
        const auto ph = lat["phi"].get<std::vector<double>>();
        if (th.size() != 2 || ph.size() != 2) throw InvalidParams("latents: theta and phi need two entries");
        r["var"] = losses::var_loss(losses::to_yuv(ya), losses::to_yuv(yb), th[0], ph[0], th[1], ph[1]);
      }
      if (lat.contains("d_real") && lat.contains("d_fake")) {
        const auto adv = losses::adv_losses(lat["d_real"].get<double>(), lat["d_fake"].get<double>());
        r["adv"] = {{"generator", adv.generator}, {"discriminator", adv.discriminator}};
      }
    } catch (const json::exception& e) {
      throw InvalidParams(std::string("latents: ") + e.what());
    }
  }
  ctx.emit(r);
}

struct EncodeArgs {
  std::string in, out, profile = "fitted";
  bool no_cross = false;
};

ric::EncodeOptions encode_options(const Context& ctx, const std::string& profile, bool no_cross) {
  ric::EncodeOptions opt;
  opt.profile = profile == "static" ? ric::Profile::Static : ric::Profile::Fitted;
  opt.cross_channel = !no_cross;
  opt.threads = ctx.g.threads;
  return opt;
}

void cmd_encode(const Context& ctx, const EncodeArgs& a) {
  const BayerRaw x = io::read_braw(a.in);
  const auto enc = ric::encode(x, encode_options(ctx, a.profile, a.no_cross));
  io::write_file(a.out, enc.bytes);
  const int pixels = x.width * x.height;
  ctx.emit({{"command", "encode"},
            {"input", a.in},
            {"output", a.out},
            {"bytes", enc.bytes.size()},
            {"header_bytes", enc.header_bytes},
            {"section_bytes", enc.section_bytes},
            {"bpp", enc.bpp(pixels)},
            {"model_bpp", enc.model_bits / pixels}});
}

struct DecodeArgs {
  std::string in, out, preview;
  int scale = ric::kLevels - 1;
};

int cmd_decode(const Context& ctx, const DecodeArgs& a) {
  if (a.out.empty() && a.preview.empty()) throw UsageError("decode needs --out and/or --preview");
  const auto bytes = io::read_file(a.in);
  const auto pd = ric::decode_progressive(bytes, a.scale);
  json r = {{"command", "decode"}, {"input", a.in}, {"scale", a.scale}, {"decoded_scales", pd.levels.size()}};
  if (pd.error) {
    r["error"] = {{"kind", std::string(ric::to_string(pd.error->kind()))},
                  {"scale", pd.error->scale()},
                  {"message", pd.error->what()}};
    ctx.log(LogLevel::Error, pd.error->what());
    ctx.emit(r);
    return kExitData;
  }
  // Level i of the padded pyramid, cropped to the samples that come from the
  // original image.
  const auto& h = pd.header;
  const int shift = ric::kLevels - 1 - a.scale;
  const int pw = (h.plane_width() + (1 << shift) - 1) >> shift;
  const int ph = (h.plane_height() + (1 << shift) - 1) >> shift;
  const ric::Planes level = ric::crop_planes(pd.levels.back(), pw, ph);
  if (!a.out.empty()) io::write_braw(a.out, unstack(level, h.meta));
  if (!a.preview.empty()) io::write_ppm(a.preview, planes_preview(level, h.meta));
  r["width"] = 2 * pw;
  r["height"] = 2 * ph;
  if (!a.out.empty()) r["output"] = a.out;
  if (!a.preview.empty()) r["preview"] = a.preview;
  ctx.emit(r);
  return kExitOk;
}

struct RoundtripArgs {
  std::string in, profile = "fitted";
  bool timing = false;
};

int cmd_roundtrip(const Context& ctx, const RoundtripArgs& a) {
  const BayerRaw x = io::read_braw(a.in);
  const auto t0 = std::chrono::steady_clock::now();
  const auto enc = ric::encode(x, encode_options(ctx, a.profile, false));
  const auto t1 = std::chrono::steady_clock::now();
  const BayerRaw y = ric::decode(enc.bytes);
  const auto t2 = std::chrono::steady_clock::now();
  const bool lossless = y.samples == x.samples && y.width == x.width && y.height == x.height;
  const int pixels = x.width * x.height;
  json r = {{"command", "roundtrip"},
            {"input", a.in},
            {"lossless", lossless},
            {"bytes", enc.bytes.size()},
            {"bpp", enc.bpp(pixels)},
            {"model_bpp", enc.model_bits / pixels}};
  if (a.timing) {
    r["encode_seconds"] = std::chrono::duration<double>(t1 - t0).count();
    r["decode_seconds"] = std::chrono::duration<double>(t2 - t1).count();
  }
  ctx.emit(r);
  return lossless ? kExitOk : kExitData;
}

int cmd_selftest(const Context& ctx, bool corrupt_lut) {
  ric::SigmoidTable table;
  if (corrupt_lut) table.overwrite(ric::SigmoidTable::kEntries / 2, 0);
  const auto results = selftest(ctx.g.seed, table);
  json rows = json::array();
  bool all = true;
  for (const auto& r : results) {
    rows.push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
    all = all && r.passed;
    if (!r.passed) ctx.log(LogLevel::Error, "selftest " + r.name + " FAILED: " + r.detail);
  }
  ctx.emit({{"command", "selftest"}, {"passed", all}, {"results", rows}});
  return all ? kExitOk : kExitData;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"rhoraw: RAW ISP simulation, statistics and lossless coding"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_help_all_flag("--help-all", "Expand all help");

  Globals g;
  unsigned threads = 0;
  std::string level = "warn";
  app.add_option("--seed", g.seed, "Seed for every random draw")->capture_default_str();
  app.add_option("--threads", threads, "Worker threads (0: RHO_RAW_THREADS or 1)");
  app.add_option("--log-level", level, "error | warn | info | debug")
      ->check(CLI::IsMember({"error", "warn", "info", "debug"}));
  app.add_flag("--human", g.human, "Render the report as text instead of JSON");
  app.add_option("--report", g.report, "Write the JSON report to this path");

  IspArgs isp_a;
  auto* isp = app.add_subcommand("isp", "Forward ISP: .braw -> .ppm");
  isp->add_option("--in", isp_a.in, "Input .braw")->required();
  isp->add_option("--out", isp_a.out, "Output .ppm")->required();
  isp->add_option("--isp-params", isp_a.params, "ISP parameter JSON");
  isp->add_flag("--estimate", isp_a.estimate, "Estimate AWB weights and raw gain (gray world)");

  InvIspArgs inv_a;
  auto add_inv = [&](CLI::App* c, bool dir) {
    c->add_option("--in", inv_a.in, "Input .ppm (repeatable)");
    if (dir) c->add_option("--in-dir", inv_a.in_dir, "Directory of .ppm inputs");
    c->add_option("--params", inv_a.params, "Inverse ISP parameter JSON");
    c->add_option("--prior", inv_a.prior, "Illumination prior JSON");
    c->add_option("--n", inv_a.n, "Draws per input")->check(CLI::PositiveNumber);
    c->add_option("--out-dir", inv_a.out_dir, "Output directory (gets manifest.json)");
    c->add_option("--out", inv_a.out, "Output .braw for a replayed draw");
    c->add_option("--theta", inv_a.theta, "Replay: colour-temperature latent");
    c->add_option("--phi", inv_a.phi, "Replay: brightness latent");
  };
  auto* inv = app.add_subcommand("invisp", "Inverse ISP: .ppm -> simulated .braw");
  add_inv(inv, false);
  auto* sim = app.add_subcommand("simraw", "Inverse ISP over a set of .ppm files");
  add_inv(sim, true);

  AnalyzeArgs an_a;
  auto* an = app.add_subcommand("analyze", "Fit the patch-mean density parameter k");
  an->add_option("--in", an_a.in, "Input .braw or .ppm")->required();
  an->add_flag("--gamma", an_a.gamma, "Also report k after BT.709 gamma");
  an->add_option("--patch", an_a.patch, "Patch size")->check(CLI::PositiveNumber);

  BnArgs bn_a;
  auto* bn = app.add_subcommand("bnsim", "Monte Carlo of the cross-batch BN output variance");
  bn->add_option("--k", bn_a.k, "k grid: lo..hi or a comma list");
  bn->add_option("--k-step", bn_a.k_step, "Step for lo..hi grids");
  bn->add_option("--batch-size", bn_a.batch_size, "Mini-batch size M")->check(CLI::Range(2, 1 << 20));
  bn->add_option("--batches", bn_a.batches, "Mini-batches per repeat");
  bn->add_option("--repeats", bn_a.repeats, "Repeats per k");
  bn->add_flag("--full", bn_a.full, "5000 batches x 5000 repeats");
  bn->add_option("--out", bn_a.out, "CSV output (k,var_ybn_over_a2)");

  GradArgs gr_a;
  auto* gr = app.add_subcommand("gradvar", "Monte Carlo of the weight-gradient variance");
  gr->add_option("--k", gr_a.k, "k grid: lo..hi or a comma list (use --k=-6..12)");
  gr->add_option("--k-step", gr_a.k_step, "Step for lo..hi grids");
  gr->add_option("--trials", gr_a.trials, "Trials per k")->check(CLI::Range(std::size_t(2), std::size_t(1) << 40));
  gr->add_option("--patch", gr_a.patch, "Patch side")->check(CLI::PositiveNumber);
  gr->add_option("--label-scale", gr_a.label_scale, "Labels ~ scale * U(0,1)");
  gr->add_option("--out", gr_a.out, "CSV output (k,grad_variance)");

  LossArgs lo_a;
  auto* lo = app.add_subcommand("losses", "Cycle, variation and adversarial losses of two images");
  lo->add_option("--a", lo_a.a, "First image (.ppm or .braw)")->required();
  lo->add_option("--b", lo_a.b, "Second image (.ppm or .braw)")->required();
  lo->add_option("--latents", lo_a.latents, "JSON with theta/phi pairs and/or d_real/d_fake");

  EncodeArgs en_a;
  auto* en = app.add_subcommand("encode", "Lossless encode .braw -> .ric");
  en->add_option("--in", en_a.in, "Input .braw")->required();
  en->add_option("--out", en_a.out, "Output .ric")->required();
  en->add_option("--profile", en_a.profile, "static | fitted")->check(CLI::IsMember({"static", "fitted"}));
  en->add_flag("--no-cross", en_a.no_cross, "Disable cross-channel prediction terms");

  DecodeArgs de_a;
  auto* de = app.add_subcommand("decode", "Decode .ric, optionally only up to a coarser scale");
  de->add_option("--in", de_a.in, "Input .ric")->required();
  de->add_option("--out", de_a.out, "Output .braw");
  de->add_option("--scale", de_a.scale, "Pyramid scale 0..4")->check(CLI::Range(0, ric::kLevels - 1));
  de->add_option("--preview", de_a.preview, "Gamma-encoded .ppm of the channel planes");

  RoundtripArgs rt_a;
  auto* rt = app.add_subcommand("roundtrip", "Encode, decode and compare");
  rt->add_option("--in", rt_a.in, "Input .braw")->required();
  rt->add_option("--profile", rt_a.profile, "static | fitted")->check(CLI::IsMember({"static", "fitted"}));
  rt->add_flag("--timing", rt_a.timing, "Include wall-clock timings");

  bool corrupt = false;
  auto* st = app.add_subcommand("selftest", "Run the embedded property checks");
  st->add_flag("--corrupt-lut", corrupt, "Damage the sigmoid table first (fault injection)");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  g.seed_given = app.get_option("--seed")->count() > 0;
  g.threads = resolve_threads(threads);
  g.level = level == "error" ? LogLevel::Error : level == "info" ? LogLevel::Info : level == "debug" ? LogLevel::Debug : LogLevel::Warn;
  const Context ctx(g, out, err);
  ctx.log(LogLevel::Debug, "threads=" + std::to_string(g.threads) + " seed=" + std::to_string(g.seed));

  try {
    if (isp->parsed()) return cmd_isp(ctx, isp_a), kExitOk;
    if (inv->parsed()) return cmd_invisp(ctx, inv_a, "invisp");
    if (sim->parsed()) return cmd_invisp(ctx, inv_a, "simraw");
    if (an->parsed()) return cmd_analyze(ctx, an_a), kExitOk;
    if (bn->parsed()) return cmd_bnsim(ctx, bn_a), kExitOk;
    if (gr->parsed()) return cmd_gradvar(ctx, gr_a), kExitOk;
    if (lo->parsed()) return cmd_losses(ctx, lo_a), kExitOk;
    if (en->parsed()) return cmd_encode(ctx, en_a), kExitOk;
    if (de->parsed()) return cmd_decode(ctx, de_a);
    if (rt->parsed()) return cmd_roundtrip(ctx, rt_a);
    if (st->parsed()) return cmd_selftest(ctx, corrupt);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

int main_entry(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace rhoraw::cli

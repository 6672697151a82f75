#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dynmap/core.hpp"
#include "dynmap/io.hpp"
#include "dynmap/metrics.hpp"
#include "dynmap/optimize.hpp"
#include "dynmap/preprocess.hpp"
#include "dynmap/sim.hpp"
#include "dynmap/svg.hpp"
#include "dynmap/transform.hpp"
#include "dynmap/tune.hpp"

namespace {

using namespace dynmap;

constexpr const char* kVersion = "0.3.0";

// ---------------------------------------------------------------------------
// shared option groups

struct SpecFlags {
  std::string method = "mds";
  std::string mds_type = "ratio";
  double perplexity = 30.0;
  bool early_exaggeration = false;
  double alpha = 0.0;
  int p = 1;
  int dims = 2;

  void add(CLI::App* app, bool with_hyper = true) {
    app->add_option("--method", method, "Static method")->check(CLI::IsMember({"mds", "sammon", "tsne"}));
    app->add_option("--mds-type", mds_type, "MDS disparity model")
        ->check(CLI::IsMember({"ratio", "interval", "ordinal"}));
    app->add_option("--perplexity", perplexity, "t-SNE perplexity");
    app->add_flag("--early-exaggeration", early_exaggeration, "t-SNE: exaggerate P by 4 for 100 iterations");
    if (with_hyper) {
      app->add_option("--alpha", alpha, "Temporal penalty weight");
      app->add_option("--p", p, "Highest difference order of the penalty");
    }
    app->add_option("--dims", dims, "Map dimensionality");
  }

  FitSpec spec() const {
    FitSpec s;
    s.method = parse_method(method);
    s.method_params.mds_type = parse_mds_type(mds_type);
    s.method_params.perplexity = perplexity;
    s.method_params.early_exaggeration = early_exaggeration;
    s.alpha = alpha;
    s.p = p;
    s.dims = dims;
    return s;
  }
};

struct OptimizerFlags {
  int n_iter = 2000;
  double tol = 1e-4;
  double step_size = 1.0;
  int n_inits = 1;
  std::uint64_t seed = 0;
  std::string init;
  int verbose = 0;
  int n_iter_check = 50;

  void add(CLI::App* app) {
    app->add_option("--n-iter", n_iter, "Maximum iterations");
    app->add_option("--tol", tol, "RMS gradient threshold");
    app->add_option("--step-size", step_size, "Initial step size");
    app->add_option("--n-inits", n_inits, "Random restarts");
    app->add_option("--seed", seed, "PRNG seed");
    app->add_option("--init", init, "Coordinates CSV, 'cmds' or 'cmds-first'");
    app->add_option("--verbose", verbose, "0, 1 or 2")->check(CLI::Range(0, 2));
    app->add_option("--n-iter-check", n_iter_check, "Diagnostic and plateau cadence");
  }

  OptimizerSettings settings(const DissimilaritySequence& d, const FitSpec& spec, const InclusionMask* mask) const {
    OptimizerSettings s;
    s.n_iter = n_iter;
    s.tol = tol;
    s.step_size = step_size;
    s.n_inits = n_inits;
    s.seed = seed;
    s.verbose = verbose;
    s.n_iter_check = n_iter_check;
    if (init == "cmds" || init == "cmds-first") {
      s.init = cmds_init(d, spec.dims, mask, init == "cmds-first");
    } else if (!init.empty()) {
      io::LabeledConfiguration lc = io::read_coordinates(init);
      if (lc.labels != d.labels || lc.periods != d.periods) {
        fail(ErrorKind::data, "init coordinates do not match the labels and periods of the input");
      }
      s.init = std::move(lc.x);
    }
    return s;
  }
};

struct Inputs {
  DissimilaritySequence data;
  std::optional<InclusionMask> mask;
  const InclusionMask* mask_ptr() const { return mask ? &*mask : nullptr; }
};

Inputs load_inputs(const std::string& matrices, const std::string& mask_path) {
  Inputs in;
  in.data = io::read_matrices(matrices);
  if (!mask_path.empty()) in.mask = io::read_mask(mask_path, in.data.periods, in.data.labels);
  return in;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(io::parse_double(item, "argument", 0));
  if (out.empty()) fail(ErrorKind::parse, "empty list '" + s + "'");
  return out;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (double v : parse_list(s)) {
    if (v != std::floor(v)) fail(ErrorKind::parse, "'" + s + "' must list integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::vector<std::string> parse_names(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string now_iso() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

// ---------------------------------------------------------------------------
// convert

struct ConvertFlags {
  std::string input;
  io::EdgeColumns cols;
  std::string transform;
  std::string normalize;
  bool unbalanced = false;
  std::string out = "matrices.csv";
  std::string labels_out;
  std::string mask_out;
};

int cmd_convert(const ConvertFlags& f) {
  const std::vector<EdgeRow> rows = io::read_edgelist(f.input, f.cols);
  PeriodMatrices pm = edgelist_to_matrices(rows);
  if (!f.transform.empty()) pm = sim_to_diss(pm, parse_sim_transform(f.transform));

  DissimilaritySequence d;
  InclusionMask mask;
  if (f.unbalanced) {
    ExpandedSequence e = expand_matrices(pm);
    d = std::move(e.sequence);
    mask = std::move(e.mask);
  } else {
    d = to_sequence(pm);
    mask = InclusionMask::all(d.periods_count(), d.objects());
  }
  d.validate();
  if (!f.normalize.empty()) d = normalize_diss(d, parse_normalize_mode(f.normalize));

  std::ostringstream m;
  io::write_matrices(m, d);
  io::write_text(f.out, m.str());
  if (!f.labels_out.empty()) {
    std::ostringstream l;
    l << "label\n";
    for (const std::string& s : d.labels) l << s << '\n';
    io::write_text(f.labels_out, l.str());
  }
  if (!f.mask_out.empty()) {
    std::ostringstream k;
    io::write_mask(k, mask, d.periods, d.labels);
    io::write_text(f.mask_out, k.str());
  }
  std::cerr << "converted " << d.periods_count() << " periods over " << d.objects() << " objects\n";
  return 0;
}

// ---------------------------------------------------------------------------
// fit

struct FitFlags {
  std::string input;
  std::string mask;
  SpecFlags spec;
  OptimizerFlags opt;
  std::string out = "coords.csv";
  std::string manifest;
};

int cmd_fit(const FitFlags& f) {
  const Inputs in = load_inputs(f.input, f.mask);
  const FitSpec spec = f.spec.spec();
  spec.validate(in.data.periods_count());
  const OptimizerSettings settings = f.opt.settings(in.data, spec, in.mask_ptr());
  const FitResult r = fit(in.data, spec, settings, in.mask_ptr());

  std::ostringstream c;
  io::write_coordinates(c, r.coords, in.data.periods, in.data.labels);
  io::write_text(f.out, c.str());

  if (!f.manifest.empty()) {
    io::Manifest m;
    m.set("tool", "dynmap");
    m.set("version", kVersion);
    m.set("created", now_iso());
    m.set("input", f.input);
    m.set("mask", f.mask.empty() ? "none" : f.mask);
    m.set("method", to_string(spec.method));
    m.set("mds_type", to_string(spec.method_params.mds_type));
    m.set("perplexity", spec.method_params.perplexity);
    m.set("alpha", spec.alpha);
    m.set("p", std::to_string(spec.p));
    m.set("dims", std::to_string(spec.dims));
    m.set("n_iter", std::to_string(settings.n_iter));
    m.set("tol", settings.tol);
    m.set("step_size", settings.step_size);
    m.set("n_inits", std::to_string(settings.n_inits));
    m.set("init", f.opt.init.empty() ? "random" : f.opt.init);
    m.set("seed", std::to_string(settings.seed));
    m.set("cost_total_final", r.cost_total_final);
    m.set("cost_static_avg", r.cost_static_avg);
    m.set("converged", r.converged ? "true" : "false");
    m.set("stop_reason", to_string(r.stop));
    m.set("iterations_used", std::to_string(r.iterations_used));
    m.set("init_index_selected", std::to_string(r.init_index_selected));
    m.set("grad_norm_final", r.grad_norm_final);
    std::string costs;
    for (std::size_t t = 0; t < r.static_costs.size(); ++t) costs += (t ? ";" : "") + io::format_double(r.static_costs[t]);
    m.set("static_costs", costs);
    std::ostringstream s;
    m.write(s);
    io::write_text(f.manifest, s.str());
  }
  return 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalFlags {
  std::string coords;
  std::string input;
  std::string mask;
  std::string metrics;
  int k = 0;
  std::string misalign = "mean";
  std::string persistence = "pooled";
  bool per_period = false;
  SpecFlags spec;
  std::string out = "-";
};

io::LabeledConfiguration load_matching_coords(const std::string& path, const DissimilaritySequence& d) {
  io::LabeledConfiguration lc = io::read_coordinates(path);
  if (lc.labels != d.labels) fail(ErrorKind::data, "coordinate labels do not match the matrix labels");
  if (lc.periods != d.periods) fail(ErrorKind::data, "coordinate periods do not match the matrix periods");
  return lc;
}

int cmd_eval(const EvalFlags& f) {
  const Inputs in = load_inputs(f.input, f.mask);
  const io::LabeledConfiguration lc = load_matching_coords(f.coords, in.data);
  const ConfigurationSequence& x = lc.x;
  const InclusionMask* mask = in.mask_ptr();
  const int k = f.k > 0 ? f.k : default_k(x.objects());
  const MisalignAggregate agg = parse_misalign_aggregate(f.misalign);
  const PersistenceMode pm = parse_persistence_mode(f.persistence);

  const bool explicit_list = !f.metrics.empty();
  const std::vector<std::string> names =
      explicit_list ? parse_names(f.metrics)
                    : std::vector<std::string>{"misalign", "alignment", "persistence", "avg_hitrate",
                                               "avg_adjusted_hitrate", "cost_static_avg"};
  std::ostringstream out;
  out << "metric,value\n";
  for (const std::string& name : names) {
    try {
      double v = 0.0;
      if (name == "misalign") {
        v = misalign_score(x, mask, agg);
      } else if (name == "alignment") {
        v = align_score(x, mask);
      } else if (name == "persistence") {
        v = persistence_score(x, mask, pm);
      } else if (name == "avg_hitrate") {
        v = avg_hitrate_score(x, in.data, k, mask);
      } else if (name == "avg_adjusted_hitrate") {
        v = avg_adjusted_hitrate_score(x, in.data, k, mask);
      } else if (name == "cost_static_avg") {
        FitSpec spec = f.spec.spec();
        spec.dims = static_cast<int>(x.dims());
        const auto cost = make_static_cost(in.data, spec, mask);
        double s = 0.0;
        for (std::size_t t = 0; t < x.periods_count(); ++t) s += cost->evaluate(t, x.coords[t], nullptr);
        v = s / static_cast<double>(x.periods_count());
      } else {
        fail(ErrorKind::config, "unknown metric '" + name + "'");
      }
      out << name << ',' << io::format_double(v) << '\n';
    } catch (const Error& e) {
      if (explicit_list || e.kind() == ErrorKind::config) throw;
      std::cerr << "skipping " << name << ": " << e.what() << '\n';
    }
  }
  if (f.per_period) {
    for (bool adjusted : {false, true}) {
      const std::vector<double> h = hitrates(x, in.data, k, mask, adjusted);
      if (h.size() != x.periods_count()) continue;
      for (std::size_t t = 0; t < h.size(); ++t) {
        out << (adjusted ? "adjusted_hitrate[" : "hitrate[") << in.data.periods[t] << "]," << io::format_double(h[t])
            << '\n';
      }
    }
  }
  io::write_text(f.out, out.str());
  return 0;
}

// ---------------------------------------------------------------------------
// tune

struct TuneFlags {
  std::string input;
  std::string mask;
  SpecFlags spec;
  OptimizerFlags opt;
  std::vector<std::string> grid;
  bool bayes = false;
  std::vector<std::string> space;
  int n_calls = 20;
  int n_initial_points = 3;
  std::string weights;
  std::string metrics = "misalign,persistence_inverted";
  int k = 0;
  std::string out = "tune.csv";
};

std::pair<std::string, std::string> split_assignment(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) fail(ErrorKind::parse, "expected name=values, got '" + s + "'");
  return {s.substr(0, eq), s.substr(eq + 1)};
}

// "lo:hi:count" is an inclusive linear grid; otherwise a comma list.
GridAxis parse_axis(const std::string& s) {
  auto [name, spec] = split_assignment(s);
  GridAxis axis{name, {}};
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3) fail(ErrorKind::parse, "grid range must be lo:hi:count, got '" + spec + "'");
    const double lo = io::parse_double(parts[0], "grid", 0);
    const double hi = io::parse_double(parts[1], "grid", 0);
    const double count = io::parse_double(parts[2], "grid", 0);
    if (count < 1 || count != std::floor(count)) fail(ErrorKind::parse, "grid count must be a positive integer");
    const int c = static_cast<int>(count);
    for (int i = 0; i < c; ++i) axis.values.push_back(c == 1 ? lo : lo + (hi - lo) * i / (c - 1));
  } else {
    axis.values = parse_list(spec);
  }
  return axis;
}

// "lo:hi" for reals, "lo:hi:int" for integers.
ParamRange parse_range(const std::string& s) {
  auto [name, spec] = split_assignment(s);
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() < 2 || parts.size() > 3 || (parts.size() == 3 && parts[2] != "int")) {
    fail(ErrorKind::parse, "search range must be lo:hi or lo:hi:int, got '" + spec + "'");
  }
  ParamRange r;
  r.name = name;
  r.lo = io::parse_double(parts[0], "space", 0);
  r.hi = io::parse_double(parts[1], "space", 0);
  r.integer = parts.size() == 3 || name == "p";
  return r;
}

std::string tune_csv(const TuneResult& r) {
  std::ostringstream s;
  for (const std::string& p : r.param_names) s << p << ',';
  for (const std::string& m : r.metric_names) s << m << ',';
  s << "cost_static_avg,combined_loss,error\n";
  for (const TuneRow& row : r.rows) {
    for (const std::string& p : r.param_names) s << io::format_double(row.params.at(p)) << ',';
    for (const std::string& m : r.metric_names) {
      auto it = row.metrics.find(m);
      s << (it != row.metrics.end() ? io::format_double(it->second) : "") << ',';
    }
    s << (row.error.empty() ? io::format_double(row.cost_static_avg) : "") << ','
      << (row.combined_loss ? io::format_double(*row.combined_loss) : "") << ',';
    std::string err = row.error;
    for (char& c : err) {
      if (c == ',' || c == '\n') c = ';';
    }
    s << err << '\n';
  }
  return s.str();
}

int cmd_tune(const TuneFlags& f) {
  const Inputs in = load_inputs(f.input, f.mask);
  TuneContext ctx;
  ctx.data = in.data;
  ctx.mask = in.mask;
  ctx.spec = f.spec.spec();
  ctx.settings = f.opt.settings(in.data, ctx.spec, in.mask_ptr());
  ctx.settings.verbose = 0;
  ctx.metrics = parse_names(f.metrics);
  ctx.eval.k = f.k;
  const std::vector<double> weights = f.weights.empty() ? std::vector<double>{} : parse_list(f.weights);

  TuneResult r;
  if (f.bayes) {
    if (f.space.empty()) fail(ErrorKind::config, "--bayes needs at least one --space entry");
    if (weights.empty()) fail(ErrorKind::config, "--bayes needs --weights");
    SearchSpace space;
    for (const std::string& s : f.space) space.push_back(parse_range(s));
    BayesSettings bs;
    bs.n_calls = f.n_calls;
    bs.n_initial_points = f.n_initial_points;
    bs.seed = f.opt.seed;
    r = bayesian_search(ctx, space, weights, bs);
  } else {
    if (f.grid.empty()) fail(ErrorKind::config, "tune needs --grid entries or --bayes");
    std::vector<GridAxis> grid;
    for (const std::string& g : f.grid) grid.push_back(parse_axis(g));
    r = grid_search(ctx, grid, weights);
  }
  io::write_text(f.out, tune_csv(r));

  if (r.best_row) {
    const TuneRow& best = r.rows[*r.best_row];
    std::cout << "Best result found:\n";
    for (const std::string& p : r.param_names) {
      std::cout << "  " << p << ": " << (p == "p" ? std::to_string(std::lround(best.params.at(p))) : fixed4(best.params.at(p)))
                << '\n';
    }
    std::cout << "  cost_static_avg: " << fixed4(best.cost_static_avg) << '\n';
    for (const std::string& m : r.metric_names) std::cout << "  " << m << ": " << fixed4(best.metrics.at(m)) << '\n';
    std::cout << "  combined_loss: " << fixed4(*best.combined_loss) << '\n';
  } else {
    std::cout << "evaluated " << r.rows.size() << " grid points\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// simulate / bench

struct SimulateFlags {
  SimConfig cfg;
  std::string noise = "0";
  std::string alphas;
  int reps = 10;
  int n_inits = 10;
  int p = 1;
  std::string out = "-";
  std::string truth_out;
  std::string matrices_out;
};

int cmd_simulate(const SimulateFlags& f) {
  const std::vector<double> noise = parse_list(f.noise);
  if (f.alphas.empty()) {
    SimConfig cfg = f.cfg;
    cfg.measurement_noise = noise.front();
    const ConfigurationSequence truth = simulate_paths(cfg);
    const DissimilaritySequence d = measure_distances(truth, cfg.measurement_noise, cfg.seed + 1000003ULL);
    if (!f.truth_out.empty()) {
      std::ostringstream s;
      io::write_coordinates(s, truth, d.periods, d.labels);
      io::write_text(f.truth_out, s.str());
    }
    std::ostringstream s;
    io::write_matrices(s, d);
    io::write_text(f.matrices_out.empty() ? f.out : f.matrices_out, s.str());
    return 0;
  }
  RecoveryOptions o = default_recovery_options();
  o.base = f.cfg;
  o.noise_levels = noise;
  o.alpha_levels = parse_list(f.alphas);
  o.reps = f.reps;
  o.settings.n_inits = f.n_inits;
  o.spec.p = f.p;
  const std::vector<RecoveryCell> cells = recovery_study(o);
  std::ostringstream s;
  s << "noise,alpha,stress,procrustes\n";
  for (const RecoveryCell& c : cells) {
    s << io::format_double(c.noise) << ',' << io::format_double(c.alpha) << ',' << fixed4(c.stress) << ','
      << fixed4(c.procrustes) << '\n';
  }
  io::write_text(f.out, s.str());
  return 0;
}

struct BenchFlags {
  std::string n = "10,50,100";
  std::string t = "10,50,100";
  int iterations = 750;
  int repeats = 1;
  std::uint64_t seed = 0;
  std::string out = "-";
  std::string out_static;
};

int cmd_bench(const BenchFlags& f) {
  BenchOptions o;
  o.n_list = parse_int_list(f.n);
  o.t_list = parse_int_list(f.t);
  o.iterations = f.iterations;
  o.repeats = f.repeats;
  o.seed = f.seed;
  const std::vector<BenchCell> cells = runtime_benchmark(o);
  std::ostringstream joint;
  std::ostringstream indep;
  joint << "n,t,seconds\n";
  indep << "n,t,seconds\n";
  for (const BenchCell& c : cells) {
    joint << c.n << ',' << c.t << ',' << fixed4(c.joint_seconds) << '\n';
    indep << c.n << ',' << c.t << ',' << fixed4(c.independent_seconds) << '\n';
  }
  if (f.out_static.empty()) {
    io::write_text(f.out, joint.str() + "\n" + indep.str());
  } else {
    io::write_text(f.out, joint.str());
    io::write_text(f.out_static, indep.str());
  }
  return 0;
}

// ---------------------------------------------------------------------------
// plot / align / synth

struct PlotFlags {
  std::string coords;
  std::string mode = "static";
  std::string mask;
  std::string period;
  std::string colors;
  std::string sizes;
  double transparency_start = 0.2;
  double transparency_end = 1.0;
  bool show_arrows = false;
  bool no_labels = false;
  std::string title;
  int width = 640;
  int height = 640;
  std::string out = "map.svg";
};

// Two-column CSV (label, value) aligned to `labels`.
std::vector<std::string> read_aesthetic(const std::string& path, const std::vector<std::string>& labels) {
  const io::CsvTable t = io::read_csv_file(path);
  if (t.header.size() != 2) fail(ErrorKind::parse, path + ": expected two columns (label, value)");
  std::map<std::string, std::string> by_label;
  for (const auto& row : t.rows) by_label[row[0]] = row[1];
  if (t.rows.size() != labels.size() || by_label.size() != labels.size()) {
    fail(ErrorKind::data, path + ": expected one row per label (" + std::to_string(labels.size()) + ")");
  }
  std::vector<std::string> out;
  for (const std::string& l : labels) {
    auto it = by_label.find(l);
    if (it == by_label.end()) fail(ErrorKind::data, path + ": no entry for label '" + l + "'");
    out.push_back(it->second);
  }
  return out;
}

int cmd_plot(const PlotFlags& f) {
  const io::LabeledConfiguration lc = io::read_coordinates(f.coords);
  std::optional<InclusionMask> mask;
  if (!f.mask.empty()) mask = io::read_mask(f.mask, lc.periods, lc.labels);
  PlotOptions o;
  o.mode = parse_plot_mode(f.mode);
  if (!f.period.empty()) {
    auto it = std::find(lc.periods.begin(), lc.periods.end(), f.period);
    if (it == lc.periods.end()) fail(ErrorKind::data, "period '" + f.period + "' not in the coordinates");
    o.period = static_cast<std::size_t>(it - lc.periods.begin());
  }
  if (!f.colors.empty()) o.colors = read_aesthetic(f.colors, lc.labels);
  if (!f.sizes.empty()) {
    for (const std::string& s : read_aesthetic(f.sizes, lc.labels)) o.sizes.push_back(io::parse_double(s, f.sizes, 0));
  }
  o.transparency_start = f.transparency_start;
  o.transparency_end = f.transparency_end;
  o.show_arrows = f.show_arrows;
  o.show_labels = !f.no_labels;
  o.title = f.title;
  o.width = f.width;
  o.height = f.height;
  io::write_text(f.out, render_svg(lc.x, lc.labels, lc.periods, o, mask ? &*mask : nullptr));
  return 0;
}

struct AlignFlags {
  std::string coords;
  std::string reference;
  std::string reference_period;
  std::string mode = "per_map";
  bool allow_scaling = false;
  std::string out = "aligned.csv";
};

int cmd_align(const AlignFlags& f) {
  const io::LabeledConfiguration lc = io::read_coordinates(f.coords);
  const io::LabeledConfiguration ref = f.reference.empty() ? lc : io::read_coordinates(f.reference);
  if (ref.labels != lc.labels) fail(ErrorKind::data, "reference labels do not match");
  std::size_t idx = 0;
  if (!f.reference_period.empty()) {
    auto it = std::find(ref.periods.begin(), ref.periods.end(), f.reference_period);
    if (it == ref.periods.end()) fail(ErrorKind::data, "reference period '" + f.reference_period + "' not found");
    idx = static_cast<std::size_t>(it - ref.periods.begin());
  }
  const ConfigurationSequence aligned =
      align_maps(lc.x, ref.x.coords[idx], parse_align_mode(f.mode), f.allow_scaling);
  std::ostringstream s;
  io::write_coordinates(s, aligned, lc.periods, lc.labels);
  io::write_text(f.out, s.str());
  return 0;
}

int cmd_synth(const std::string& out, std::uint64_t seed, bool unbalanced) {
  std::ostringstream s;
  io::write_edgelist(s, synthetic_tech_edgelist(seed, unbalanced));
  io::write_text(out, s.str());
  return 0;
}

int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::parse: return 2;
    case ErrorKind::divergence: return 4;
    default: return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic proximity maps: joint fitting of map sequences to dissimilarity sequences"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  ConvertFlags cf;
  auto* convert = app.add_subcommand("convert", "Edgelist CSV to a long-format matrix sequence");
  convert->add_option("--input", cf.input, "Edgelist CSV")->required();
  convert->add_option("--time-col", cf.cols.period, "Period column");
  convert->add_option("--id-i-col", cf.cols.id_i, "First id column");
  convert->add_option("--id-j-col", cf.cols.id_j, "Second id column");
  convert->add_option("--score-col", cf.cols.score, "Score column");
  convert->add_option("--transform", cf.transform, "Similarity to dissimilarity transformation")
      ->check(CLI::IsMember({"mirror", "max_minus", "reciprocal"}));
  convert->add_option("--normalize", cf.normalize, "Normalization")->check(CLI::IsMember({"max1", "zscore_offdiag"}));
  convert->add_flag("--unbalanced", cf.unbalanced, "Expand differing rosters and emit a mask");
  convert->add_option("--out", cf.out, "Matrix output");
  convert->add_option("--labels-out", cf.labels_out, "Label list output");
  convert->add_option("--mask-out", cf.mask_out, "Mask output");

  FitFlags ff;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a configuration sequence");
  fit_cmd->add_option("--input", ff.input, "Matrix CSV")->required();
  fit_cmd->add_option("--mask", ff.mask, "Mask CSV");
  ff.spec.add(fit_cmd);
  ff.opt.add(fit_cmd);
  fit_cmd->add_option("--out", ff.out, "Coordinates output");
  fit_cmd->add_option("--manifest", ff.manifest, "Run manifest output");

  EvalFlags ef;
  auto* eval = app.add_subcommand("eval", "Evaluate a configuration sequence");
  eval->add_option("--coords", ef.coords, "Coordinates CSV")->required();
  eval->add_option("--input", ef.input, "Matrix CSV")->required();
  eval->add_option("--mask", ef.mask, "Mask CSV");
  eval->add_option("--metrics", ef.metrics, "Comma-separated metric names");
  eval->add_option("--k", ef.k, "Hit-rate neighbours (default min(5, n-1))");
  eval->add_option("--misalign", ef.misalign, "mean or total")->check(CLI::IsMember({"mean", "total"}));
  eval->add_option("--persistence", ef.persistence, "pooled or per_object")
      ->check(CLI::IsMember({"pooled", "per_object"}));
  eval->add_flag("--per-period", ef.per_period, "Also emit per-period hit-rates");
  ef.spec.add(eval, false);
  eval->add_option("--out", ef.out, "Metrics output");

  TuneFlags tf;
  auto* tune = app.add_subcommand("tune", "Grid or Bayesian hyperparameter search");
  tune->add_option("--input", tf.input, "Matrix CSV")->required();
  tune->add_option("--mask", tf.mask, "Mask CSV");
  tf.spec.add(tune);
  tf.opt.add(tune);
  tune->add_option("--grid", tf.grid, "name=lo:hi:count or name=v1,v2,...");
  tune->add_flag("--bayes", tf.bayes, "Bayesian search instead of a grid");
  tune->add_option("--space", tf.space, "name=lo:hi or name=lo:hi:int");
  tune->add_option("--n-calls", tf.n_calls, "Bayesian evaluations");
  tune->add_option("--n-initial-points", tf.n_initial_points, "Quasi-random points before the surrogate");
  tune->add_option("--weights", tf.weights, "Static cost weight then one per metric");
  tune->add_option("--metrics", tf.metrics, "Minimization-aligned metric names");
  tune->add_option("--k", tf.k, "Hit-rate neighbours");
  tune->add_option("--out", tf.out, "Evaluation table output");

  SimulateFlags sf;
  auto* simulate = app.add_subcommand("simulate", "Simulated paths and recovery study");
  simulate->add_option("--n", sf.cfg.n, "Objects");
  simulate->add_option("--t", sf.cfg.t, "Periods");
  simulate->add_option("--scale", sf.cfg.scale, "Initial position spread");
  simulate->add_option("--step-noise", sf.cfg.noise, "Path step noise");
  simulate->add_option("--momentum", sf.cfg.momentum, "Velocity carry-over");
  simulate->add_option("--seed", sf.cfg.seed, "PRNG seed");
  simulate->add_option("--noise", sf.noise, "Measurement noise level(s), comma-separated");
  simulate->add_option("--alphas", sf.alphas, "Run the recovery study over these alphas");
  simulate->add_option("--reps", sf.reps, "Replications per cell");
  simulate->add_option("--n-inits", sf.n_inits, "Restarts per fit");
  simulate->add_option("--p", sf.p, "Penalty order");
  simulate->add_option("--out", sf.out, "Study table, or matrices when no alphas are given");
  simulate->add_option("--truth-out", sf.truth_out, "Ground-truth coordinates output");
  simulate->add_option("--matrices-out", sf.matrices_out, "Measured matrices output");

  BenchFlags bf;
  auto* bench = app.add_subcommand("bench", "Runtime of joint and independent fits");
  bench->add_option("--n", bf.n, "Object counts");
  bench->add_option("--t", bf.t, "Period counts");
  bench->add_option("--iterations", bf.iterations, "Fixed iteration budget");
  bench->add_option("--repeats", bf.repeats, "Repeats per cell (minimum reported)");
  bench->add_option("--seed", bf.seed, "PRNG seed");
  bench->add_option("--out", bf.out, "Joint-fit table (both tables when --out-static is absent)");
  bench->add_option("--out-static", bf.out_static, "Independent-fit table");

  PlotFlags pf;
  auto* plot = app.add_subcommand("plot", "Render coordinates as SVG");
  plot->add_option("--coords", pf.coords, "Coordinates CSV")->required();
  plot->add_option("--mode", pf.mode, "static, dynamic or trajectories")
      ->check(CLI::IsMember({"static", "dynamic", "trajectories"}));
  plot->add_option("--mask", pf.mask, "Mask CSV");
  plot->add_option("--period", pf.period, "Period label for static maps (default first)");
  plot->add_option("--colors", pf.colors, "CSV label,color");
  plot->add_option("--sizes", pf.sizes, "CSV label,radius");
  plot->add_option("--transparency-start", pf.transparency_start, "Opacity of the first period");
  plot->add_option("--transparency-end", pf.transparency_end, "Opacity of the last period");
  plot->add_flag("--show-arrows", pf.show_arrows, "Movement arrows in dynamic maps");
  plot->add_flag("--no-labels", pf.no_labels, "Omit text labels");
  plot->add_option("--title", pf.title, "Title text");
  plot->add_option("--width", pf.width, "Canvas width");
  plot->add_option("--height", pf.height, "Canvas height");
  plot->add_option("--out", pf.out, "SVG output");

  AlignFlags af;
  auto* align = app.add_subcommand("align", "Procrustes-align a configuration sequence");
  align->add_option("--coords", af.coords, "Coordinates CSV")->required();
  align->add_option("--reference", af.reference, "Reference coordinates (default: the input)");
  align->add_option("--reference-period", af.reference_period, "Reference period (default first)");
  align->add_option("--align", af.mode, "per_map or fixed")->check(CLI::IsMember({"per_map", "fixed"}));
  align->add_flag("--allow-scaling", af.allow_scaling, "Allow uniform scaling");
  align->add_option("--out", af.out, "Aligned coordinates output");

  std::string synth_out = "synthetic_tech.csv";
  std::uint64_t synth_seed = 7;
  bool synth_unbalanced = false;
  auto* synth = app.add_subcommand("synth", "Write the synthetic technology-firm edgelist");
  synth->add_option("--out", synth_out, "Edgelist output");
  synth->add_option("--seed", synth_seed, "PRNG seed");
  synth->add_flag("--unbalanced", synth_unbalanced, "Add a firm entering in 2002");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*convert) return cmd_convert(cf);
    if (*fit_cmd) return cmd_fit(ff);
    if (*eval) return cmd_eval(ef);
    if (*tune) return cmd_tune(tf);
    if (*simulate) return cmd_simulate(sf);
    if (*bench) return cmd_bench(bf);
    if (*plot) return cmd_plot(pf);
    if (*align) return cmd_align(af);
    if (*synth) return cmd_synth(synth_out, synth_seed, synth_unbalanced);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}

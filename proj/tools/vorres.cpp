// vorres: command-line front end for the residual diagnostics library.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "vorres/config.hpp"
#include "vorres/error.hpp"
#include "vorres/etas_fit.hpp"
#include "vorres/geometry.hpp"
#include "vorres/inference.hpp"
#include "vorres/io.hpp"
#include "vorres/residuals.hpp"
#include "vorres/rng.hpp"
#include "vorres/simulate.hpp"
#include "vorres/svg.hpp"
#include "vorres/text.hpp"

namespace fs = std::filesystem;
using namespace vorres;

namespace {

struct Overrides {
  std::string config;
  std::optional<long> seed;
  std::optional<std::string> out, model, partition, catalog, input;
  std::optional<int> replicates, n_sim, bins;
  std::optional<double> alpha;
  std::vector<std::string> set;
  bool jitter = false;
};

RunConfig load_run(const Overrides& o) {
  RunConfig run = o.config.empty() ? RunConfig() : RunConfig::load(o.config);
  Config& c = run.raw();
  for (const std::string& kv : o.set) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw DataError("--set expects key=value, got '" + kv + "'");
    c.set(std::string(trim(std::string_view(kv).substr(0, eq))),
          std::string(trim(std::string_view(kv).substr(eq + 1))));
  }
  if (o.seed) c.set("seed", std::to_string(*o.seed));
  if (o.out) c.set("out", *o.out);
  if (o.partition) c.set("partition", *o.partition);
  if (o.catalog) c.set("catalog", *o.catalog);
  if (o.replicates) c.set("replicates", std::to_string(*o.replicates));
  if (o.n_sim) c.set("n_sim", std::to_string(*o.n_sim));
  if (o.bins) c.set("bins", std::to_string(*o.bins));
  if (o.alpha) c.set("alpha", *o.alpha);
  if (o.model) {
    // A path selects a parameter file; anything else names a model family.
    if (fs::exists(*o.model)) {
      c.set("model_file", *o.model);
    } else {
      c.erase("model_file");
      c.set("model", *o.model);
    }
  }
  run.resolve();
  return run;
}

fs::path prepare_out(const RunConfig& run) {
  const fs::path dir = run.out_dir();
  fs::create_directories(dir);
  run.raw().save(dir / "resolved.cfg");
  return dir;
}

template <class Write>
void write_file(const fs::path& path, Write&& write) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  write(out);
}

// The catalog named in the config; its window and span replace the config's
// when the sidecar declares them.
Catalog load_catalog(RunConfig& run) {
  const std::string path = run.raw().get_string("catalog");
  ReadReport rep;
  Catalog cat = read_catalog(fs::path(path), &rep);
  if (rep.dropped() > 0)
    std::cerr << "read " << rep.rows << " rows; dropped " << rep.dropped_magnitude
              << " below the cutoff, " << rep.dropped_window << " outside the window, "
              << rep.dropped_time << " outside the span\n";
  if (rep.tie_adjusted > 0)
    std::cerr << "warning: separated " << rep.tie_adjusted << " duplicate timestamps\n";
  if (fs::exists(CatalogDeclaration::sidecar_path(path))) {
    const Window w = cat.window;
    run.raw().set("window", format_double(w.xmin()) + "," + format_double(w.xmax()) + "," +
                                format_double(w.ymin()) + "," + format_double(w.ymax()));
    run.raw().set("t0", cat.span.t0);
    run.raw().set("t1", cat.span.t1);
  } else {
    cat.window = run.window();
    cat.span = run.span();
    cat.validate();
  }
  return cat;
}

std::string file_tag(const Partition& p) {
  return p.kind == Partition::Kind::voronoi ? "voronoi" : "pixel" + std::to_string(p.pixels);
}

int cmd_simulate(const Overrides& o) {
  RunConfig run = load_run(o);
  const IntensityModel model = run.model();
  Catalog cat = model.kind() == ModelKind::etas
                    ? sample_etas(model.etas_params(), run.window(), run.span(),
                                  run.magnitude_law(), run.seed())
                    : sample_poisson(model, run.window(), run.seed(), run.span());
  const fs::path dir = prepare_out(run);
  write_catalog(dir / "catalog.csv", cat);
  std::cout << "simulated " << cat.size() << " events -> " << (dir / "catalog.csv").string() << '\n';
  return 0;
}

Catalog prepared_catalog(RunConfig& run, const Overrides& o) {
  Catalog cat = load_catalog(run);
  if (o.jitter) {
    auto pts = cat.points();
    const std::size_t moved =
        jitter_duplicates(pts, cat.window, derive_seed(run.seed(), {stream::kJitter}));
    if (moved > 0) std::cerr << "jittered " << moved << " duplicate locations\n";
    for (std::size_t i = 0; i < pts.size(); ++i) cat.events[i].x = pts[i].x, cat.events[i].y = pts[i].y;
  }
  return cat;
}

int cmd_tessellate(const Overrides& o) {
  RunConfig run = load_run(o);
  const Catalog cat = prepared_catalog(run, o);
  const VoronoiDiagram diagram = tessellate(cat.points(), cat.window);
  const fs::path dir = prepare_out(run);
  write_file(dir / "cells.txt", [&](std::ostream& out) { write_polygons(out, diagram); });
  std::cout << "tessellated " << diagram.size() << " cells\n";
  return 0;
}

int cmd_residuals(const Overrides& o) {
  RunConfig run = load_run(o);
  const Catalog cat = prepared_catalog(run, o);
  run.resolve();
  const IntensityModel model = run.model();
  const fs::path dir = prepare_out(run);
  for (const Partition& part : run.partitions()) {
    const std::string tag = file_tag(part);
    std::vector<ResidualRecord> records;
    if (part.kind == Partition::Kind::voronoi) {
      const VoronoiDiagram diagram = tessellate(cat.points(), cat.window);
      records = voronoi_residuals(cat, model, diagram);
      write_svg(dir / ("residual_map_" + tag + ".svg"), [&](std::ostream& out) {
        render_residual_map(out, diagram, records, "Voronoi residuals");
      });
    } else {
      const PixelGrid grid = PixelGrid::square(cat.window, part.pixels);
      records = pixel_residuals(cat, model, grid, derive_seed(run.seed(), {stream::kPitNoise}));
      write_svg(dir / ("residual_map_" + tag + ".svg"), [&](std::ostream& out) {
        render_residual_map(out, grid, records, part.name() + " residuals");
      });
    }
    write_file(dir / ("residuals_" + tag + ".csv"),
               [&](std::ostream& out) { write_residuals_csv(out, records); });
  }
  return 0;
}

PitSampler sampler_for(const RunConfig& run, const IntensityModel& model, const Partition& part) {
  if (model.kind() == ModelKind::etas)
    return etas_pit_sampler(model.etas_params(), run.window(), run.span(), run.magnitude_law(), part);
  // Simulated patterns live on the observation window, like the catalog.
  return [model, part, window = run.window()](std::uint64_t seed) {
    return catalog_pits(sample_poisson(model, window, seed), model, part,
                        derive_seed(seed, {stream::kPitNoise}));
  };
}

int cmd_pit(const Overrides& o) {
  RunConfig run = load_run(o);
  const Catalog cat = prepared_catalog(run, o);
  run.resolve();
  const IntensityModel model = run.model();
  const int bins = static_cast<int>(run.raw().get_long("bins", 10));
  run.raw().set("bins", std::to_string(bins));
  const fs::path dir = prepare_out(run);
  std::ofstream ks(dir / "ks.csv");
  ks << "partition,statistic,n,critical_value,alpha,reject,n_sim\n";
  for (const Partition& part : run.partitions()) {
    const auto pits = catalog_pits(cat, model, part, derive_seed(run.seed(), {stream::kPitNoise}));
    const auto sims = simulate_pits(sampler_for(run, model, part), run.n_sim(), run.seed());
    std::vector<double> null;
    for (const auto& u : sims) null.push_back(u.empty() ? 0.0 : ks_statistic(u));
    const KsResult r = ks_test(pits, critical_value(null, run.alpha()), run.alpha(), run.n_sim());
    ks << part.name() << ',' << format_double(r.statistic) << ',' << r.n << ','
       << format_double(r.critical_value) << ',' << format_double(r.alpha) << ','
       << (r.reject ? 1 : 0) << ',' << r.n_sim << '\n';
    const PitHistogram h = pit_histogram(pits, bins, sims);
    const std::string tag = file_tag(part);
    write_file(dir / ("histogram_" + tag + ".csv"),
               [&](std::ostream& out) { write_histogram_csv(out, h); });
    write_svg(dir / ("histogram_" + tag + ".svg"), [&](std::ostream& out) {
      render_histogram(out, h, part.name() + " PIT histogram");
    });
  }
  return 0;
}

int cmd_power(const Overrides& o) {
  RunConfig run = load_run(o);
  Config& c = run.raw();
  c.set_default("design", "homogeneous");
  c.set_default("true_value", c.get_string("design") == "homogeneous" ? "500" : "4");
  c.set_default("proposed", c.get_string("design") == "homogeneous" ? "375,437,500,562,625"
                                                                     : "0.5,2,4,7,11");
  if (!c.has("margin")) c.set("margin", 0.25);
  PowerConfig cfg;
  cfg.design = parse_design(c.get_string("design"));
  cfg.true_value = c.get_double("true_value");
  cfg.proposed = c.get_doubles("proposed");
  cfg.partitions = run.partitions();
  cfg.replicates = run.replicates();
  cfg.n_sim = run.n_sim();
  cfg.alpha = run.alpha();
  cfg.seed = run.seed();
  cfg.core = run.window();
  cfg.margin = run.margin();
  const PowerResult result = power_study(cfg);
  const fs::path dir = prepare_out(run);
  write_file(dir / "power.csv", [&](std::ostream& out) { write_power_csv(out, result); });
  write_svg(dir / "power.svg", [&](std::ostream& out) {
    render_power_curves(out, result, std::string(to_string(cfg.design)) + " design");
  });
  return 0;
}

int cmd_fit(const Overrides& o) {
  RunConfig run = load_run(o);
  const Catalog cat = prepared_catalog(run, o);
  run.resolve();
  EtasParams init;
  if (run.is_etas()) {
    init = run.etas_params();
  } else {
    // Generic start: half the events from the background, M0 from the data.
    init.mu = std::max(1e-3, 0.5 * static_cast<double>(cat.size()) / cat.span.duration());
    init.M0 = cat.mag_cutoff.value_or(0.0);
    init.K = 1e-3;
  }
  if (cat.mag_cutoff) init.M0 = *cat.mag_cutoff;
  FitOptions opt;
  opt.seed = run.seed();
  opt.starts = static_cast<int>(run.raw().get_long("starts", opt.starts));
  opt.max_evaluations = static_cast<int>(run.raw().get_long("max_evaluations", opt.max_evaluations));
  const FitResult fit = fit_mle(cat, init, opt);
  const fs::path dir = prepare_out(run);
  write_file(dir / "fit.params", [&](std::ostream& out) { write_fit(out, fit); });
  if (!fit.converged) std::cerr << "warning: no start converged within the evaluation cap\n";
  return 0;
}

std::string first_line(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  return std::string(trim(line));
}

int cmd_plot(const Overrides& o) {
  if (!o.input) throw DataError("plot needs --input");
  RunConfig run = load_run(o);
  const fs::path in_path = *o.input;
  const std::string head = first_line(in_path);
  const fs::path dir = prepare_out(run);
  const fs::path svg = dir / (in_path.stem().string() + ".svg");
  std::ifstream in(in_path);
  if (head.starts_with("design,")) {
    const PowerResult result = read_power_csv(in);
    write_svg(svg, [&](std::ostream& out) { render_power_curves(out, result); });
  } else if (head.starts_with("bin_lo,")) {
    std::string line;
    std::getline(in, line);
    PitHistogram h;
    h.edges.push_back(0.0);
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      const auto f = split(trim(line), ',');
      if (f.size() != 5) throw DataError("histogram CSV: expected 5 fields");
      h.edges.back() = parse_double(f[0], "bin_lo");
      h.edges.push_back(parse_double(f[1], "bin_hi"));
      h.counts.push_back(parse_long(f[2], "count"));
      h.band_lo.push_back(parse_double(f[3], "band_lo"));
      h.band_hi.push_back(parse_double(f[4], "band_hi"));
    }
    write_svg(svg, [&](std::ostream& out) { render_histogram(out, h); });
  } else if (head.starts_with("region_id,")) {
    const auto records = read_residuals_csv(in);
    Catalog cat = load_catalog(run);
    if (!records.empty() && records.front().kind == RegionKind::pixel) {
      const int n = static_cast<int>(records.size());
      const PixelGrid grid = PixelGrid::square(cat.window, n);
      write_svg(svg, [&](std::ostream& out) { render_residual_map(out, grid, records); });
    } else {
      const VoronoiDiagram diagram = tessellate(cat.points(), cat.window);
      write_svg(svg, [&](std::ostream& out) { render_residual_map(out, diagram, records); });
    }
  } else {
    throw DataError("plot: unrecognized CSV header in " + in_path.string());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Voronoi and pixel residual diagnostics for spatial point process models"};
  app.require_subcommand(1, 1);
  Overrides o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "run configuration (key = value)")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "root seed");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--model", o.model, "model family or parameter file");
    sub->add_option("--partition", o.partition, "voronoi, pixel(N) or a comma list");
    sub->add_option("--replicates", o.replicates, "power replicates");
    sub->add_option("--n-sim", o.n_sim, "simulations for critical values and bands");
    sub->add_option("--alpha", o.alpha, "test level");
    sub->add_option("--catalog", o.catalog, "catalog CSV");
    sub->add_option("--set", o.set, "extra key=value override (repeatable)");
  };
  struct Sub {
    const char* name;
    const char* help;
    int (*run)(const Overrides&);
  };
  const Sub subs[] = {
      {"simulate", "simulate a catalog from the configured model", cmd_simulate},
      {"tessellate", "write the Voronoi cells of a catalog", cmd_tessellate},
      {"residuals", "residual CSV and map for each partition", cmd_residuals},
      {"pit", "PIT histograms and K-S tests against simulated references", cmd_pit},
      {"power", "power study over proposed parameter values", cmd_power},
      {"fit", "maximum likelihood ETAS fit", cmd_fit},
      {"plot", "render an SVG from a residual, histogram or power CSV", cmd_plot},
  };
  int (*chosen)(const Overrides&) = nullptr;
  for (const Sub& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    common(sub);
    if (std::string(s.name) == "tessellate" || std::string(s.name) == "residuals" ||
        std::string(s.name) == "pit" || std::string(s.name) == "fit")
      sub->add_flag("--jitter-duplicates", o.jitter, "separate coincident locations by < 1e-9");
    if (std::string(s.name) == "pit") sub->add_option("--bins", o.bins, "histogram bins");
    if (std::string(s.name) == "plot") sub->add_option("--input", o.input, "CSV to render");
    sub->callback([&chosen, run = s.run] { chosen = run; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e, std::cerr, std::cerr);
    return 1;
  }
  try {
    return chosen(o);
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

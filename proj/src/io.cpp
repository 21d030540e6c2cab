#include "vorres/io.hpp"

#include <chrono>
#include <fstream>
#include <istream>
#include <ostream>

#include "vorres/error.hpp"
#include "vorres/text.hpp"

namespace vorres {

namespace {

int digits(std::string_view s, std::size_t pos, std::size_t n, std::string_view what) {
  if (pos + n > s.size()) throw DataError("bad ISO-8601 " + std::string(what));
  int v = 0;
  for (std::size_t i = pos; i < pos + n; ++i) {
    if (s[i] < '0' || s[i] > '9') throw DataError("bad ISO-8601 " + std::string(what));
    v = v * 10 + (s[i] - '0');
  }
  return v;
}

Window parse_window(const std::string& text) {
  std::vector<double> v;
  for (std::string_view f : split(text, ',')) v.push_back(parse_double(trim(f), "window"));
  if (v.size() != 4) throw DataError("window needs xmin,xmax,ymin,ymax");
  return Window(v[0], v[1], v[2], v[3]);
}

std::string window_text(const Window& w) {
  return format_double(w.xmin()) + "," + format_double(w.xmax()) + "," + format_double(w.ymin()) +
         "," + format_double(w.ymax());
}

}  // namespace

bool looks_like_iso8601(std::string_view s) {
  s = trim(s);
  return s.size() >= 10 && s[4] == '-' && s[7] == '-';
}

double parse_iso8601_days(std::string_view text) {
  const std::string_view s = trim(text);
  if (!looks_like_iso8601(s)) throw DataError("bad ISO-8601 timestamp '" + std::string(s) + "'");
  using namespace std::chrono;
  const year_month_day ymd{year{digits(s, 0, 4, "year")},
                           month{static_cast<unsigned>(digits(s, 5, 2, "month"))},
                           day{static_cast<unsigned>(digits(s, 8, 2, "day"))}};
  if (!ymd.ok()) throw DataError("invalid date '" + std::string(s) + "'");
  double days = static_cast<double>(sys_days(ymd).time_since_epoch().count());
  std::size_t pos = 10;
  if (pos < s.size() && (s[pos] == 'T' || s[pos] == ' ')) {
    const int hh = digits(s, pos + 1, 2, "hour");
    if (pos + 3 >= s.size() || s[pos + 3] != ':') throw DataError("bad ISO-8601 time");
    const int mm = digits(s, pos + 4, 2, "minute");
    double sec = 0.0;
    pos += 6;
    if (pos < s.size() && s[pos] == ':') {
      std::size_t end = pos + 1;
      while (end < s.size() && (std::isdigit(static_cast<unsigned char>(s[end])) || s[end] == '.'))
        ++end;
      sec = parse_double(s.substr(pos + 1, end - pos - 1), "seconds");
      pos = end;
    }
    if (hh > 23 || mm > 59 || sec < 0.0 || sec >= 61.0) throw DataError("bad ISO-8601 time");
    days += (hh * 3600.0 + mm * 60.0 + sec) / 86400.0;
  }
  if (pos < s.size() && s[pos] == 'Z') ++pos;
  if (pos != s.size()) throw DataError("unsupported ISO-8601 suffix in '" + std::string(s) + "'");
  return days;
}

CatalogDeclaration CatalogDeclaration::from_config(const Config& cfg) {
  CatalogDeclaration d;
  d.window = parse_window(cfg.get_string("window", "0,1,0,1"));
  d.epoch = cfg.get("epoch");
  const std::string t0 = cfg.get_string("t0", "0"), t1 = cfg.get_string("t1", "1");
  if (looks_like_iso8601(t0) || looks_like_iso8601(t1)) {
    if (!d.epoch) d.epoch = looks_like_iso8601(t0) ? t0 : t1;
    const double origin = parse_iso8601_days(*d.epoch);
    d.span.t0 = looks_like_iso8601(t0) ? parse_iso8601_days(t0) - origin : parse_double(t0, "t0");
    d.span.t1 = looks_like_iso8601(t1) ? parse_iso8601_days(t1) - origin : parse_double(t1, "t1");
  } else {
    d.span = {parse_double(t0, "t0"), parse_double(t1, "t1")};
  }
  if (!(d.span.t1 > d.span.t0)) throw ParameterError("t1", "must exceed t0");
  if (auto m = cfg.get("mag_cutoff")) d.mag_cutoff = parse_double(*m, "mag_cutoff");
  return d;
}

Config CatalogDeclaration::to_config() const {
  Config cfg;
  cfg.set("window", window_text(window));
  cfg.set("t0", span.t0);
  cfg.set("t1", span.t1);
  if (mag_cutoff) cfg.set("mag_cutoff", *mag_cutoff);
  if (epoch) cfg.set("epoch", *epoch);
  return cfg;
}

std::filesystem::path CatalogDeclaration::sidecar_path(const std::filesystem::path& catalog) {
  return std::filesystem::path(catalog).replace_extension(".cfg");
}

Catalog read_catalog(std::istream& in, const CatalogDeclaration& decl, ReadReport* report) {
  ReadReport local;
  ReadReport& rep = report ? *report : local;
  rep = {};
  std::string line;
  if (!std::getline(in, line)) throw DataError("catalog: missing header");
  const std::string_view header = trim(line);
  bool has_mag;
  if (header == "t,x,y,mag") has_mag = true;
  else if (header == "t,x,y") has_mag = false;
  else throw DataError("catalog: expected header t,x,y,mag");

  std::optional<double> origin;
  Catalog cat;
  cat.window = decl.window;
  cat.span = decl.span;
  cat.mag_cutoff = decl.mag_cutoff;
  for (long lineno = 2; std::getline(in, line); ++lineno) {
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    const std::string where = "catalog line " + std::to_string(lineno);
    const auto f = split(row, ',');
    if (f.size() != (has_mag ? 4u : 3u)) throw DataError(where + ": wrong number of fields");
    ++rep.rows;
    Event e;
    try {
      if (looks_like_iso8601(f[0])) {
        if (!origin) {
          if (!decl.epoch) throw DataError("ISO-8601 times need an epoch in the declaration");
          origin = parse_iso8601_days(*decl.epoch);
        }
        e.t = parse_iso8601_days(f[0]) - *origin;
      } else {
        e.t = parse_double(trim(f[0]), "t");
      }
      e.x = parse_double(trim(f[1]), "x");
      e.y = parse_double(trim(f[2]), "y");
      if (has_mag && !trim(f[3]).empty()) e.mag = parse_double(trim(f[3]), "mag");
    } catch (const DataError& err) {
      throw DataError(where + ": " + err.what());
    }
    if (decl.mag_cutoff && e.mag && *e.mag < *decl.mag_cutoff) {
      ++rep.dropped_magnitude;
    } else if (!decl.window.contains(e.location())) {
      ++rep.dropped_window;
    } else if (e.t < decl.span.t0 || e.t > decl.span.t1) {
      ++rep.dropped_time;
    } else {
      cat.events.push_back(e);
    }
  }
  rep.tie_adjusted = cat.sort_and_separate_ties();
  cat.validate();
  return cat;
}

Catalog read_catalog(const std::filesystem::path& path, ReadReport* report) {
  const auto sidecar = CatalogDeclaration::sidecar_path(path);
  const CatalogDeclaration decl = std::filesystem::exists(sidecar)
                                      ? CatalogDeclaration::from_config(Config::load(sidecar))
                                      : CatalogDeclaration{};
  std::ifstream in(path);
  if (!in) throw DataError("cannot open catalog " + path.string());
  return read_catalog(in, decl, report);
}

void write_catalog(std::ostream& out, const Catalog& catalog) {
  out << "t,x,y,mag\n";
  for (const Event& e : catalog.events) {
    out << format_double(e.t) << ',' << format_double(e.x) << ',' << format_double(e.y) << ','
        << (e.mag ? format_double(*e.mag) : std::string()) << '\n';
  }
}

void write_catalog(const std::filesystem::path& path, const Catalog& catalog) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  write_catalog(out, catalog);
  CatalogDeclaration decl{catalog.window, catalog.span, catalog.mag_cutoff, std::nullopt};
  decl.to_config().save(CatalogDeclaration::sidecar_path(path));
}

RunConfig RunConfig::load(const std::filesystem::path& path) { return RunConfig(Config::load(path)); }

void RunConfig::resolve() {
  // A model file carries its own kind and parameters; copy them in so the
  // resolved config stands alone.
  if (auto file = cfg_.get("model_file")) {
    if (!std::filesystem::exists(*file)) throw DataError("model file not found: " + *file);
    const Config m = Config::load(*file);
    cfg_.set("model", m.get_string("model", "etas"));
    for (const auto& [k, v] : m.values()) {
      if (k == "model" || k == "loglik" || k == "converged" || k == "evaluations" ||
          k == "iterations")
        continue;
      cfg_.set("model." + k, v);
    }
  }
  for (const char* key : {"catalog", "grid_file"}) {
    if (auto p = cfg_.get(key); p && !std::filesystem::exists(*p))
      throw DataError(std::string(key) + " not found: " + *p);
  }
  cfg_.set_default("window", "0,1,0,1");
  cfg_.set_default("t0", "0");
  cfg_.set_default("t1", "1");
  cfg_.set_default("seed", "1");
  cfg_.set_default("out", "out");
  cfg_.set_default("alpha", "0.05");
  cfg_.set_default("replicates", "100");
  cfg_.set_default("n_sim", "99");
  cfg_.set_default("margin", "0");
  cfg_.set_default("partition", "voronoi");
  cfg_.set_default("model", "homogeneous");
  cfg_.set_default("mag.b", "1");
  cfg_.set_default("mag.max_excess", "4");
  if (cfg_.get_string("model") == "homogeneous") cfg_.set_default("model.rate", "500");
  // Parse everything once so errors surface before any work starts.
  (void)window();
  (void)span();
  (void)seed();
  (void)alpha();
  (void)partitions();
  (void)magnitude_law();
  (void)model();
}

Window RunConfig::window() const { return parse_window(cfg_.get_string("window", "0,1,0,1")); }

TimeSpan RunConfig::span() const {
  const TimeSpan s{cfg_.get_double("t0", 0.0), cfg_.get_double("t1", 1.0)};
  if (!(s.t1 > s.t0)) throw ParameterError("t1", "must exceed t0");
  return s;
}

std::uint64_t RunConfig::seed() const {
  const long s = cfg_.get_long("seed", 1);
  if (s < 0) throw ParameterError("seed", "must be >= 0");
  return static_cast<std::uint64_t>(s);
}

std::filesystem::path RunConfig::out_dir() const { return cfg_.get_string("out", "out"); }

double RunConfig::alpha() const {
  const double a = cfg_.get_double("alpha", 0.05);
  if (!(a > 0.0 && a <= 1.0)) throw ParameterError("alpha", "must lie in (0, 1]");
  return a;
}

int RunConfig::replicates() const {
  const long r = cfg_.get_long("replicates", 100);
  if (r < 1) throw ParameterError("replicates", "must be positive");
  return static_cast<int>(r);
}

int RunConfig::n_sim() const {
  const long r = cfg_.get_long("n_sim", 99);
  if (r < 1) throw ParameterError("n_sim", "must be positive");
  return static_cast<int>(r);
}

double RunConfig::margin() const {
  const double m = cfg_.get_double("margin", 0.0);
  if (!(m >= 0.0)) throw ParameterError("margin", "must be >= 0");
  return m;
}

std::vector<Partition> RunConfig::partitions() const {
  std::vector<Partition> out;
  const std::string text = cfg_.get_string("partition", "voronoi");
  for (std::string_view f : split(text, ',')) out.push_back(Partition::parse(f));
  return out;
}

MagnitudeLaw RunConfig::magnitude_law() const {
  MagnitudeLaw law;
  law.b = cfg_.get_double("mag.b", 1.0);
  law.max_excess = cfg_.get_double("mag.max_excess", 4.0);
  if (!(law.b > 0.0)) throw ParameterError("mag.b", "must be > 0");
  if (!(law.max_excess > 0.0)) throw ParameterError("mag.max_excess", "must be > 0");
  return law;
}

bool RunConfig::is_etas() const { return cfg_.get_string("model", "homogeneous") == "etas"; }

EtasParams RunConfig::etas_params() const { return model().etas_params(); }

IntensityModel RunConfig::model() const {
  const ModelKind kind = parse_model_kind(cfg_.get_string("model", "homogeneous"));
  std::map<std::string, double> params;
  for (const auto& [k, v] : cfg_.values()) {
    if (k.starts_with("model.")) params[k.substr(6)] = parse_double(v, k);
  }
  std::shared_ptr<const GridTable> grid;
  if (kind == ModelKind::user_grid)
    grid = std::make_shared<GridTable>(GridTable::read_csv(std::filesystem::path(cfg_.get_string("grid_file"))));
  return IntensityModel::from_params(kind, params, window(), span(), std::move(grid));
}

}  // namespace vorres

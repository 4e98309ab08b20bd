#include "hyperwind/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "hyperwind/error.hpp"

namespace hyperwind {

using nlohmann::json;

namespace {

std::filesystem::path data_directory() {
  if (const char* env = std::getenv("HYPERWIND_DATA_DIR"); env && *env) return env;
  if (std::filesystem::exists(std::filesystem::path(HYPERWIND_DATA_DIR) / "presets")) return HYPERWIND_DATA_DIR;
  return HYPERWIND_INSTALLED_DATA_DIR;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError(path.string(), "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(const std::string& text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(where, std::string("malformed JSON: ") + e.what());
  }
}

/// Walks a JSON object, rejecting keys that were never asked for.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw SchemaError(path_.empty() ? "<root>" : path_, "expected an object");
  }
  ~Reader() = default;

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }
  const json& at(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw SchemaError(child(key), "missing required key");
    return j_.at(key);
  }
  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  double number(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_number()) throw SchemaError(child(key), "expected a number");
    return v.get<double>();
  }
  std::uint64_t count(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
      throw SchemaError(child(key), "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }
  std::string text(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_string()) throw SchemaError(child(key), "expected a string");
    return v.get<std::string>();
  }
  bool flag(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_boolean()) throw SchemaError(child(key), "expected a boolean");
    return v.get<bool>();
  }
  std::vector<double> numbers(const std::string& key) {
    const auto& v = at(key);
    if (!v.is_array()) throw SchemaError(child(key), "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw SchemaError(child(key), "expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  template <class T, class F>
  void maybe(const std::string& key, T& target, F get) {
    if (has(key)) target = (this->*get)(key);
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.contains(it.key())) throw SchemaError(child(it.key()), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_tolerances(Tolerances& t, const json& j) {
  Reader r(j, "tolerances");
  if (r.has("version")) t.version = r.text("version");
  auto section = [&](const std::string& key, auto body) {
    if (!r.has(key)) return;
    Reader s(r.at(key), r.child(key));
    body(s);
    s.finish();
  };
  section("escape", [&](Reader& s) { s.maybe("abs", t.escape_abs, &Reader::number); });
  section("lln", [&](Reader& s) {
    s.maybe("abs", t.lln.abs_tolerance, &Reader::number);
    s.maybe("se_multiplier", t.lln.se_multiplier, &Reader::number);
  });
  section("clt", [&](Reader& s) {
    s.maybe("alpha", t.clt.alpha, &Reader::number);
    s.maybe("covariance", t.clt.covariance_tolerance, &Reader::number);
    s.maybe("jitter", t.clt.jitter, &Reader::flag);
  });
  section("clt_stopped", [&](Reader& s) { s.maybe("max_censored", t.clt_stopped.max_censored, &Reader::number); });
  section("routes", [&](Reader& s) { s.maybe("se_multiplier", t.route_se_multiplier, &Reader::number); });
  section("rank", [&](Reader& s) { s.maybe("z", t.rank_z, &Reader::number); });
  section("gr", [&](Reader& s) {
    s.maybe("abs", t.gr.abs_tolerance, &Reader::number);
    s.maybe("se_multiplier", t.gr.se_multiplier, &Reader::number);
    s.maybe("trend_se_multiplier", t.gr.trend_se_multiplier, &Reader::number);
    s.maybe("max_censored", t.gr.max_censored, &Reader::number);
  });
  section("pld", [&](Reader& s) {
    s.maybe("alpha_dev", t.pld.alpha_dev, &Reader::number);
    s.maybe("min_r2", t.pld.min_r2, &Reader::number);
  });
  section("stopping", [&](Reader& s) {
    s.maybe("foster_se_multiplier", t.foster_se_multiplier, &Reader::number);
    s.maybe("time_control_spread", t.time_control_spread, &Reader::number);
    s.maybe("overshoot_band", t.overshoot_band, &Reader::number);
  });
  section("tracking", [&](Reader& s) {
    s.maybe("fraction", t.tracking_fraction, &Reader::number);
    s.maybe("slope_spread", t.tracking_slope_spread, &Reader::number);
    s.maybe("min_r2", t.tracking_min_r2, &Reader::number);
  });
  section("lil", [&](Reader& s) {
    s.maybe("t0", t.lil.t0, &Reader::number);
    if (s.has("band")) {
      const auto band = s.numbers("band");
      if (band.size() != 2 || !(band[0] < band[1])) throw SchemaError(s.child("band"), "expected [low, high]");
      t.lil.band_low = band[0];
      t.lil.band_high = band[1];
    }
    s.maybe("path_cap", t.lil.path_cap, &Reader::number);
    s.maybe("trend_horizon", t.lil.trend_horizon, &Reader::number);
  });
  section("plane", [&](Reader& s) {
    s.maybe("busemann", t.plane_busemann, &Reader::number);
    s.maybe("isometry", t.plane_isometry, &Reader::number);
    s.maybe("cocycle", t.plane_cocycle, &Reader::number);
    s.maybe("drift_z", t.plane_drift_z, &Reader::number);
  });
  section("exact", [&](Reader& s) {
    s.maybe("instances", t.exact_instances, &Reader::count);
    s.maybe("seconds", t.exact_seconds, &Reader::number);
  });
  r.finish();
  t.clt_stopped.clt = t.clt;
  if (!(t.clt.alpha > 0.0 && t.clt.alpha < 1.0)) throw SchemaError("tolerances.clt.alpha", "must lie in (0, 1)");
  if (!(t.pld.alpha_dev > 0.0)) throw SchemaError("tolerances.pld.alpha_dev", "must be positive");
}

std::vector<double> increasing(Reader& r, const std::string& key, bool positive) {
  auto v = r.numbers(key);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (positive && !(v[i] > 0.0)) throw SchemaError(r.child(key), "values must be positive");
    if (i > 0 && !(v[i] > v[i - 1])) throw SchemaError(r.child(key), "values must be increasing");
  }
  return v;
}

}  // namespace

void apply_tolerances(Tolerances& tol, const std::string& json_text) {
  read_tolerances(tol, parse_json(json_text, "tolerances"));
}

Tolerances load_tolerances(const std::filesystem::path& path) {
  Tolerances t;
  apply_tolerances(t, read_text(path));
  return t;
}

Tolerances default_tolerances() {
  const auto path = data_directory() / "tolerances.json";
  if (std::filesystem::exists(path)) return load_tolerances(path);
  return Tolerances{};
}

const std::vector<std::string>& known_tests() {
  static const std::vector<std::string> names = {
      "exact-core", "escape",   "lln",      "clt",   "routes",  "rank",      "gr",         "pld",
      "stopping",   "tracking", "lil",      "plane", "clt-stopped", "martingale", "psi"};
  return names;
}

RunConfig parse_config(const std::string& json_text, const Tolerances& base) {
  const json root = parse_json(json_text, "<root>");
  Reader r(root, "");
  RunConfig c;
  c.tolerances = base;
  c.name = r.text("name");
  if (r.has("description")) c.description = r.text("description");

  {
    Reader m(r.at("model"), "model");
    const auto kind = m.text("kind");
    if (kind == "tree")
      c.kind = ModelKind::tree;
    else if (kind == "plane")
      c.kind = ModelKind::plane;
    else
      throw SchemaError("model.kind", "expected \"tree\" or \"plane\"");
    c.rank = m.count("rank");
    if (c.rank < 2 || c.rank > 26) throw SchemaError("model.rank", "rank must lie in [2, 26]");
    if (c.kind == ModelKind::plane) {
      Reader s(m.at("schottky"), "model.schottky");
      if (s.has("symmetric_radius")) c.plane.symmetric_radius = s.number("symmetric_radius");
      if (s.has("generators") || s.has("disks")) {
        for (const auto& g : s.at("generators")) {
          if (!g.is_array() || g.size() != 4) throw SchemaError("model.schottky.generators", "expected [a, b, c, d]");
          c.plane.generators.push_back({g[0].get<double>(), g[1].get<double>(), g[2].get<double>(), g[3].get<double>()});
        }
        for (const auto& disk : s.at("disks")) {
          if (!disk.is_array() || disk.size() != 2) throw SchemaError("model.schottky.disks", "expected [angle, radius]");
          c.plane.disks.push_back({disk[0].get<double>(), disk[1].get<double>()});
        }
      }
      s.finish();
      if (c.plane.symmetric_radius.has_value() == !c.plane.generators.empty())
        throw SchemaError("model.schottky", "give either symmetric_radius or generators with disks");
      if (!c.plane.generators.empty() &&
          (c.plane.generators.size() != c.rank || c.plane.disks.size() != 2 * c.rank))
        throw SchemaError("model.schottky", "need rank generators and 2 rank disks");
    }
    m.finish();
  }

  {
    const auto& mj = r.at("measure");
    if (mj.is_string()) {
      if (mj.get<std::string>() != "simple") throw SchemaError("measure", "expected \"simple\" or a list of atoms");
      const Alphabet abc(c.rank);
      const std::string fraction = "1/" + std::to_string(2 * c.rank);
      for (std::size_t g = 1; g <= c.rank; ++g)
        for (int sign : {1, -1}) {
          Word w;
          w.push_back(Letter(static_cast<int>(g), sign));
          c.measure.push_back({abc.format(w), fraction});
        }
    } else if (mj.is_array()) {
      for (std::size_t i = 0; i < mj.size(); ++i) {
        Reader a(mj[i], "measure[" + std::to_string(i) + "]");
        AtomConfig atom;
        atom.word = a.text("word");
        const auto& p = a.at("probability");
        if (p.is_string())
          atom.probability = p.get<std::string>();
        else if (p.is_number()) {
          std::ostringstream ss;
          ss.precision(17);
          ss << p.get<double>();
          atom.probability = ss.str();
        } else
          throw SchemaError(a.child("probability"), "expected a number or \"p/q\"");
        a.finish();
        c.measure.push_back(std::move(atom));
      }
    } else {
      throw SchemaError("measure", "expected \"simple\" or a list of atoms");
    }
  }

  if (r.has("projection")) {
    const auto& pj = r.at("projection");
    if (!pj.is_array() || pj.size() != c.rank) throw SchemaError("projection", "need one image per generator");
    for (const auto& row : pj) {
      if (!row.is_array() || row.empty()) throw SchemaError("projection", "images must be integer arrays");
      std::vector<std::int64_t> img;
      for (const auto& e : row) {
        if (!e.is_number_integer()) throw SchemaError("projection", "images must be integer arrays");
        img.push_back(e.get<std::int64_t>());
      }
      if (!c.projection.empty() && img.size() != c.projection.front().size())
        throw SchemaError("projection", "images must share one dimension");
      c.projection.push_back(std::move(img));
    }
  }

  c.seed = r.count("seed");
  c.paths = r.count("paths");
  c.horizon = r.count("horizon");
  if (r.has("stride")) c.stride = r.count("stride");
  if (r.has("stopping")) c.thresholds = increasing(r, "stopping", true);
  if (r.has("references")) {
    const auto& refs = r.at("references");
    if (!refs.is_array()) throw SchemaError("references", "expected an array");
    for (const auto& e : refs) {
      if (c.kind == ModelKind::tree && e.is_string())
        c.references.emplace_back(e.get<std::string>());
      else if (c.kind == ModelKind::plane && e.is_number())
        c.references.emplace_back(e.get<double>());
      else
        throw SchemaError("references", "tree references are period words, plane references are angles");
    }
  }
  if (r.has("ray_times")) c.ray_times = increasing(r, "ray_times", true);
  if (r.has("tracking")) c.tracking = r.flag("tracking");
  if (r.has("exits")) {
    Reader e(r.at("exits"), "exits");
    c.functional = e.numbers("functional");
    const auto& windows = e.at("windows");
    if (!windows.is_array()) throw SchemaError("exits.windows", "expected an array");
    for (std::size_t i = 0; i < windows.size(); ++i) {
      Reader w(windows[i], "exits.windows[" + std::to_string(i) + "]");
      ExitConfig x;
      x.k = w.number("k");
      x.l = w.number("l");
      x.s = increasing(w, "s", true);
      if (!(x.k > 0.0 && x.l > 0.0)) throw SchemaError(w.child("k"), "k and l must be positive");
      w.finish();
      c.exits.push_back(std::move(x));
    }
    e.finish();
  }
  if (r.has("calibration")) {
    Reader k(r.at("calibration"), "calibration");
    k.maybe("paths", c.calibration.paths, &Reader::count);
    k.maybe("horizon", c.calibration.horizon, &Reader::count);
    k.maybe("threshold", c.calibration.threshold, &Reader::number);
    k.maybe("tracking_horizon", c.calibration.tracking_horizon, &Reader::count);
    k.finish();
    if (c.calibration.paths < 2) throw SchemaError("calibration.paths", "need at least two paths");
  }
  if (r.has("estimate")) {
    Reader k(r.at("estimate"), "estimate");
    k.maybe("formula_n", c.estimate.formula_n, &Reader::count);
    k.maybe("ray_time", c.estimate.ray_time, &Reader::number);
    k.finish();
  }
  if (r.has("tests")) {
    for (const auto& t : r.at("tests")) {
      if (!t.is_string()) throw SchemaError("tests", "expected test names");
      const auto name = t.get<std::string>();
      if (std::find(known_tests().begin(), known_tests().end(), name) == known_tests().end())
        throw SchemaError("tests", "unknown test \"" + name + "\"");
      c.tests.push_back(name);
    }
  }
  if (r.has("tolerances")) read_tolerances(c.tolerances, r.at("tolerances"));
  if (r.has("oracle")) {
    Reader o(r.at("oracle"), "oracle");
    if (o.has("lambda")) c.oracle_lambda = o.number("lambda");
    o.finish();
  }
  if (r.has("out")) c.out = r.text("out");
  if (r.has("workers")) c.workers = r.count("workers");
  r.finish();

  // Surface probability and alphabet violations as schema errors.
  try {
    (void)c.walk_spec();
  } catch (const MeasureError& e) {
    throw SchemaError("measure", e.what());
  } catch (const DomainError& e) {
    throw SchemaError(c.kind == ModelKind::plane ? "model.schottky" : "projection", e.what());
  }
  if (!c.functional.empty() && c.functional.size() != c.walk_spec().dim())
    throw SchemaError("exits.functional", "dimension differs from the projection");
  return c;
}

RunConfig load_config(const std::filesystem::path& path, const Tolerances& base) {
  return parse_config(read_text(path), base);
}

WalkSpec RunConfig::walk_spec() const {
  WalkSpec spec;
  spec.kind = kind;
  const Alphabet abc(rank);
  std::vector<Atom> atoms;
  for (const auto& a : measure) {
    Atom atom;
    try {
      atom.word = abc.parse(a.word);
    } catch (const Error& e) {
      throw MeasureError("atom \"" + a.word + "\": " + e.what());
    }
    if (a.probability.find('/') != std::string::npos) {
      atom.exact = parse_rational(a.probability);
      atom.probability = boost::rational_cast<double>(*atom.exact);
    } else {
      try {
        std::size_t used = 0;
        atom.probability = std::stod(a.probability, &used);
        if (used != a.probability.size()) throw std::invalid_argument(a.probability);
      } catch (const std::exception&) {
        throw MeasureError("probability \"" + a.probability + "\" is not a number");
      }
    }
    atoms.push_back(std::move(atom));
  }
  spec.measure = StepMeasure(rank, std::move(atoms));
  if (projection.empty()) {
    spec.projection = Projection::canonical(rank);
  } else {
    spec.projection.dim = projection.front().size();
    spec.projection.images = projection;
  }
  spec.projection.validate(rank);
  if (kind == ModelKind::plane) {
    if (plane.symmetric_radius) {
      spec.schottky = plane::SchottkyModel::symmetric(rank, *plane.symmetric_radius);
    } else {
      std::vector<plane::Isometry> gens;
      for (std::size_t g = 0; g < plane.generators.size(); ++g) {
        const auto& m = plane.generators[g];
        Word label;
        label.push_back(Letter(static_cast<int>(g + 1), 1));
        gens.push_back(plane::Isometry::from_real(m[0], m[1], m[2], m[3], label));
      }
      std::vector<plane::PingPongDisk> disks;
      for (const auto& d : plane.disks) disks.push_back({d[0], d[1]});
      spec.schottky = plane::SchottkyModel(std::move(gens), std::move(disks));
    }
    validate_schottky(spec.schottky, 64, true);
  }
  return spec;
}

std::vector<BoundaryWord> RunConfig::tree_references() const {
  std::vector<BoundaryWord> out;
  if (kind != ModelKind::tree) return out;
  const Alphabet abc(rank);
  for (const auto& ref : references) {
    const Word period = abc.parse(std::get<std::string>(ref));
    if (period.empty() || period[0].cancels(period.back()))
      throw SchemaError("references", "period \"" + std::get<std::string>(ref) + "\" is not cyclically reduced");
    out.push_back(BoundaryWord::periodic(Word{}, period));
  }
  return out;
}

std::vector<double> RunConfig::plane_references() const {
  std::vector<double> out;
  if (kind != ModelKind::plane) return out;
  for (const auto& ref : references) out.push_back(std::get<double>(ref));
  return out;
}

std::vector<ExitWindow> RunConfig::exit_windows() const {
  std::vector<ExitWindow> out;
  for (const auto& e : exits)
    for (double s : e.s) out.push_back({e.k, e.l, s});
  return out;
}

std::string canonical_json(const RunConfig& c) {
  json j;
  j["name"] = c.name;
  j["description"] = c.description;
  j["model"] = {{"kind", c.kind == ModelKind::tree ? "tree" : "plane"}, {"rank", c.rank}};
  if (c.kind == ModelKind::plane) {
    json s;
    if (c.plane.symmetric_radius) s["symmetric_radius"] = *c.plane.symmetric_radius;
    if (!c.plane.generators.empty()) {
      s["generators"] = c.plane.generators;
      s["disks"] = c.plane.disks;
    }
    j["model"]["schottky"] = s;
  }
  json atoms = json::array();
  for (const auto& a : c.measure) atoms.push_back({{"word", a.word}, {"probability", a.probability}});
  j["measure"] = atoms;
  if (!c.projection.empty()) j["projection"] = c.projection;
  j["seed"] = c.seed;
  j["paths"] = c.paths;
  j["horizon"] = c.horizon;
  j["stride"] = c.stride;
  j["stopping"] = c.thresholds;
  json refs = json::array();
  for (const auto& ref : c.references) std::visit([&](const auto& v) { refs.push_back(v); }, ref);
  j["references"] = refs;
  j["ray_times"] = c.ray_times;
  j["tracking"] = c.tracking;
  if (!c.exits.empty()) {
    json windows = json::array();
    for (const auto& e : c.exits) windows.push_back({{"k", e.k}, {"l", e.l}, {"s", e.s}});
    j["exits"] = {{"functional", c.functional}, {"windows", windows}};
  }
  j["calibration"] = {{"paths", c.calibration.paths},
                      {"horizon", c.calibration.horizon},
                      {"threshold", c.calibration.threshold},
                      {"tracking_horizon", c.calibration.tracking_horizon}};
  j["estimate"] = {{"formula_n", c.estimate.formula_n}, {"ray_time", c.estimate.ray_time}};
  j["tests"] = c.tests;
  const auto& t = c.tolerances;
  j["tolerances"] = {
      {"version", t.version},
      {"escape", {{"abs", t.escape_abs}}},
      {"lln", {{"abs", t.lln.abs_tolerance}, {"se_multiplier", t.lln.se_multiplier}}},
      {"clt", {{"alpha", t.clt.alpha}, {"covariance", t.clt.covariance_tolerance}, {"jitter", t.clt.jitter}}},
      {"clt_stopped", {{"max_censored", t.clt_stopped.max_censored}}},
      {"routes", {{"se_multiplier", t.route_se_multiplier}}},
      {"rank", {{"z", t.rank_z}}},
      {"gr",
       {{"abs", t.gr.abs_tolerance},
        {"se_multiplier", t.gr.se_multiplier},
        {"trend_se_multiplier", t.gr.trend_se_multiplier},
        {"max_censored", t.gr.max_censored}}},
      {"pld", {{"alpha_dev", t.pld.alpha_dev}, {"min_r2", t.pld.min_r2}}},
      {"stopping",
       {{"foster_se_multiplier", t.foster_se_multiplier},
        {"time_control_spread", t.time_control_spread},
        {"overshoot_band", t.overshoot_band}}},
      {"tracking",
       {{"fraction", t.tracking_fraction}, {"slope_spread", t.tracking_slope_spread}, {"min_r2", t.tracking_min_r2}}},
      {"lil",
       {{"t0", t.lil.t0},
        {"band", {t.lil.band_low, t.lil.band_high}},
        {"path_cap", t.lil.path_cap},
        {"trend_horizon", t.lil.trend_horizon}}},
      {"plane",
       {{"busemann", t.plane_busemann},
        {"isometry", t.plane_isometry},
        {"cocycle", t.plane_cocycle},
        {"drift_z", t.plane_drift_z}}},
      {"exact", {{"instances", t.exact_instances}, {"seconds", t.exact_seconds}}}};
  if (c.oracle_lambda) j["oracle"] = {{"lambda", *c.oracle_lambda}};
  return j.dump(2);
}

std::filesystem::path preset_directory() { return data_directory() / "presets"; }

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  const auto dir = preset_directory();
  if (!std::filesystem::is_directory(dir)) return names;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.path().extension() == ".json") names.push_back(entry.path().stem().string());
  std::sort(names.begin(), names.end());
  return names;
}

RunConfig load_preset(const std::string& name, const Tolerances& base) {
  const auto path = preset_directory() / (name + ".json");
  if (!std::filesystem::exists(path)) throw SchemaError("preset", "no preset named \"" + name + "\"");
  return load_config(path, base);
}

}  // namespace hyperwind

#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "nlflat/errors.hpp"

namespace nlflat::cli {

namespace {

using nlohmann::json;

/// Typed access to one JSON object that remembers which keys were read, so
/// anything left over can be reported as unknown.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    return number_at(key);
  }

  double required_number(const std::string& key) {
    if (!has(key)) throw ConfigError(where(key) + " is required");
    return number_at(key);
  }

  std::size_t count(const std::string& key, std::size_t fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(where(key) + " must be a nonnegative integer");
    return v.get<std::size_t>();
  }

  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(where(key) + " must be a string");
    return v.get<std::string>();
  }

  bool flag(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(where(key) + " must be true or false");
    return v.get<bool>();
  }

  std::vector<double> numbers(const std::string& key) {
    std::vector<double> out;
    if (!has(key)) return out;
    const json& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(where(key) + " must be an array of numbers");
    for (const auto& e : v) {
      if (!e.is_number()) throw ConfigError(where(key) + " must be an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::optional<Window> window(const std::string& key) {
    if (!has(key)) return std::nullopt;
    const auto v = numbers(key);
    if (v.size() != 2 || !(v[1] > v[0])) throw ConfigError(where(key) + " must be [lo, hi] with lo < hi");
    return Window{v[0], v[1]};
  }

  std::optional<Section> child(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return Section(j_.at(key), where(key));
  }

  void reject_unknown() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError(where(key) + ": unknown key");
    }
  }

  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  double number_at(const std::string& key) const {
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(where(key) + " must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(where(key) + " must be finite");
    return d;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

KernelSpec parse_kernel(Section& k, bool& force) {
  const std::string family = k.text("family", "cauchy");
  force = k.flag("force", false);
  if (family == "cauchy") {
    KernelSpec base = cauchy_kernel();
    HypothesisConstants hc = base.declared();
    hc.J0 = k.number("J0", hc.J0);
    hc.J1 = k.number("J1", hc.J1);
    hc.R0 = k.number("R0", hc.R0);
    const std::string id = k.text("id", base.id());
    k.reject_unknown();
    return KernelSpec(base.family(), base.s(), hc, id);
  }
  const double s = k.required_number("s");
  HypothesisConstants hc{k.required_number("J0"), k.required_number("J1"), k.required_number("R0")};
  const std::string id = k.text("id", family);
  KernelFamily fam;
  if (family == "pure_fractional") {
    fam = PureFractional{k.required_number("amplitude")};
  } else if (family == "truncated_fractional") {
    fam = TruncatedFractional{k.required_number("amplitude"), k.required_number("cutoff")};
  } else if (family == "compact_plus_tail") {
    const std::string profile = k.text("profile", "bump");
    NearProfile p;
    if (profile == "bump") p = NearProfile::bump;
    else if (profile == "uniform") p = NearProfile::uniform;
    else throw ConfigError(k.where("profile") + ": expected bump or uniform");
    fam = CompactPlusTail{p, k.required_number("near_amplitude"), k.required_number("tail_amplitude")};
  } else {
    throw ConfigError(k.where("family") +
                      ": expected cauchy, pure_fractional, truncated_fractional or compact_plus_tail");
  }
  k.reject_unknown();
  try {
    return KernelSpec(fam, s, hc, id);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("kernel: ") + e.what());
  }
}

ApplyMethod parse_method(const std::string& m, const std::string& where) {
  if (m == "direct") return ApplyMethod::direct;
  if (m == "fft") return ApplyMethod::fft;
  if (m == "automatic") return ApplyMethod::automatic;
  throw ConfigError(where + ": expected direct, fft or automatic");
}

}  // namespace

OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  if (s == "both") return OutputFormat::both;
  throw ConfigError("format: expected csv, json or both, got '" + s + "'");
}

bool wants_csv(OutputFormat f) { return f != OutputFormat::json; }
bool wants_json(OutputFormat f) { return f != OutputFormat::csv; }

RunConfig parse_config(const nlohmann::json& doc) {
  RunConfig cfg;
  cfg.source = doc;
  Section root(doc, "");

  if (auto k = root.child("kernel")) cfg.kernel = parse_kernel(*k, cfg.force_kernel);

  if (auto g = root.child("grid")) {
    cfg.grid.x_min = g->number("x_min", cfg.grid.x_min);
    cfg.grid.x_max = g->number("x_max", cfg.grid.x_max);
    cfg.grid.n = g->count("n", cfg.grid.n);
    g->reject_unknown();
  }
  if (!(cfg.grid.x_max > cfg.grid.x_min)) throw ConfigError("grid: x_max must exceed x_min");
  if (cfg.grid.n < Grid::kMinPoints) throw ConfigError("grid.n must be at least " + std::to_string(Grid::kMinPoints));

  double a = 1.0, b = 0.0;
  std::string kind = "step";
  if (auto d = root.child("initial")) {
    kind = d->text("kind", kind);
    a = d->number("a", a);
    b = d->number("b", b);
    if (!(a > 0.0)) throw ConfigError("initial.a must be positive");
    if (kind == "step") {
      const std::string sampling = d->text("sampling", "cell_average");
      StepSampling sm;
      if (sampling == "cell_average") sm = StepSampling::cell_average;
      else if (sampling == "pointwise") sm = StepSampling::pointwise;
      else throw ConfigError("initial.sampling: expected cell_average or pointwise");
      cfg.datum = InitialDatum::step(a, b, sm);
    } else if (kind == "mollified_step") {
      cfg.datum = InitialDatum::mollified_step(a, b, d->number("epsilon", 0.5));
    } else if (kind == "custom") {
      const Grid grid(cfg.grid.x_min, cfg.grid.x_max, cfg.grid.n);
      cfg.datum = InitialDatum::custom(a, b, grid, d->numbers("values"));
    } else {
      throw ConfigError("initial.kind: expected step, mollified_step or custom");
    }
    d->reject_unknown();
  }

  cfg.boundary.left = a;
  if (auto bd = root.child("boundary")) {
    cfg.boundary.left = bd->number("left", a);
    const std::string right = bd->text("right", "zero");
    if (right == "zero") cfg.boundary.right = RightZero{};
    else if (right == "constant") cfg.boundary.right = RightConstant{bd->required_number("right_value")};
    else if (right == "algebraic_tail") cfg.boundary.right = RightAlgebraicTail{};
    else throw ConfigError("boundary.right: expected zero, constant or algebraic_tail");
    bd->reject_unknown();
  }

  if (auto t = root.child("time")) {
    cfg.time.t_final = t->number("t_final", cfg.time.t_final);
    cfg.time.snapshots = t->numbers("snapshots");
    cfg.time.safety = t->number("safety", cfg.time.safety);
    cfg.time.method = parse_method(t->text("method", "automatic"), t->where("method"));
    t->reject_unknown();
  }
  if (!(cfg.time.t_final >= 0.0)) throw ConfigError("time.t_final must be nonnegative");
  if (!(cfg.time.safety > 0.0 && cfg.time.safety <= 1.0)) throw ConfigError("time.safety must lie in (0, 1]");
  for (std::size_t i = 0; i < cfg.time.snapshots.size(); ++i) {
    const double s = cfg.time.snapshots[i];
    if (s < 0.0 || s > cfg.time.t_final) throw ConfigError("time.snapshots must lie in [0, t_final]");
    if (i > 0 && !(s > cfg.time.snapshots[i - 1])) throw ConfigError("time.snapshots must be strictly increasing");
  }

  if (auto c = root.child("checks")) {
    if (auto h = c->child("halfline")) {
      cfg.halfline.tol = h->number("tol", cfg.halfline.tol);
      h->reject_unknown();
    }
    if (auto m = c->child("mirror")) {
      cfg.mirror.half_width = m->number("half_width", cfg.mirror.half_width);
      cfg.mirror.n = m->count("n", cfg.mirror.n);
      cfg.mirror.epsilon = m->number("epsilon", cfg.mirror.epsilon);
      cfg.mirror.t_final = m->number("t_final", cfg.mirror.t_final);
      cfg.mirror.tol = m->number("tol", cfg.mirror.tol);
      m->reject_unknown();
      if (!(cfg.mirror.half_width > 0.0) || cfg.mirror.n < Grid::kMinPoints || !(cfg.mirror.epsilon > 0.0) ||
          !(cfg.mirror.t_final >= 0.0)) {
        throw ConfigError("checks.mirror: half_width, epsilon must be positive, n >= 16, t_final >= 0");
      }
    }
    if (auto f = c->child("flattening")) {
      if (f->has("t")) cfg.flattening.t = f->required_number("t");
      cfg.flattening.window = f->window("window");
      cfg.flattening.tol_rel = f->number("tol_rel", cfg.flattening.tol_rel);
      f->reject_unknown();
    }
    if (auto s = c->child("subsolution")) {
      cfg.subsolution.C = s->number("C", cfg.subsolution.C);
      cfg.subsolution.t_count = s->count("t_count", cfg.subsolution.t_count);
      cfg.subsolution.x_count = s->count("x_count", cfg.subsolution.x_count);
      if (s->has("x_lo")) cfg.subsolution.x_lo = s->required_number("x_lo");
      cfg.subsolution.x_hi = s->number("x_hi", cfg.subsolution.x_hi);
      cfg.subsolution.quad_tol = s->number("quad_tol", cfg.subsolution.quad_tol);
      s->reject_unknown();
      if (!(cfg.subsolution.C > 0.0) || !(cfg.subsolution.quad_tol > 0.0)) {
        throw ConfigError("checks.subsolution: C and quad_tol must be positive");
      }
    }
    if (auto r = c->child("reference")) {
      cfg.reference.window = r->window("window");
      cfg.reference.levels = r->count("levels", cfg.reference.levels);
      cfg.reference.tol = r->number("tol", cfg.reference.tol);
      cfg.reference.min_ratio = r->number("min_ratio", cfg.reference.min_ratio);
      r->reject_unknown();
    }
    if (auto bn = c->child("bench")) {
      if (bn->has("sizes")) {
        cfg.bench.sizes.clear();
        for (double v : bn->numbers("sizes")) {
          if (!(v >= Grid::kMinPoints) || v != std::floor(v)) throw ConfigError("checks.bench.sizes: integers >= 16");
          cfg.bench.sizes.push_back(static_cast<std::size_t>(v));
        }
      }
      cfg.bench.repeats = bn->count("repeats", cfg.bench.repeats);
      if (cfg.bench.repeats == 0) throw ConfigError("checks.bench.repeats must be positive");
      bn->reject_unknown();
    }
    c->reject_unknown();
  }

  if (auto o = root.child("output")) {
    cfg.output_dir = o->text("directory", cfg.output_dir.string());
    cfg.format = parse_format(o->text("format", "both"));
    o->reject_unknown();
  }
  if (root.has("seed")) {
    const json& v = doc.at("seed");
    if (!v.is_number_unsigned()) throw ConfigError("seed must be a nonnegative integer");
    cfg.seed = v.get<std::uint64_t>();
  }
  root.reject_unknown();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

}  // namespace nlflat::cli

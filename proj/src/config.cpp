#include "chf/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace chf {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>> kKeys = {
    {"geometry", {"nx", "ny", "lx", "ly"}},
    {"target", {"kind", "n"}},
    {"params",
     {"a", "b", "dt", "t_end", "u_scheme", "f_scheme", "baseline_classic", "on_manifold_tol", "project", "safety",
      "max_substeps", "cg_tol"}},
    {"scenario", {"name", "k", "lambda", "center_x", "center_y", "seed", "modes", "amplitude", "file"}},
    {"output", {"dir", "cadence", "snapshot_every"}},
    {"diagnostics", {"eps1", "radii", "ball_grid", "scan_every", "ceiling"}},
    {"picard", {"T", "tol", "max_iter"}},
};

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  T v{};
  if constexpr (std::is_unsigned_v<T>) {
    if (!s.empty() && s[0] == '-') throw ConfigError(key + ": expected a non-negative integer, got '" + raw + "'");
  }
  const char* begin = s.data();
  if (!s.empty() && s[0] == '+') ++begin;
  const auto [end, ec] = std::from_chars(begin, s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || end != s.data() + s.size())
    throw ConfigError(key + ": cannot parse '" + raw + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& raw) {
  std::string s = trim(raw);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(key + ": expected a boolean, got '" + raw + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& raw) {
  std::vector<double> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<double>(key, item));
  return out;
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::optional<std::string> raw(const std::string& path) const {
    if (auto v = tree_.get_optional<std::string>(pt::ptree::path_type(path, '.'))) return trim(*v);
    return std::nullopt;
  }
  template <class T>
  void number(const std::string& path, T& out) const {
    if (auto v = raw(path)) out = parse_number<T>(path, *v);
  }
  template <class T>
  void number(const std::string& path, std::optional<T>& out) const {
    if (auto v = raw(path)) out = parse_number<T>(path, *v);
  }
  void flag(const std::string& path, bool& out) const {
    if (auto v = raw(path)) out = parse_bool(path, *v);
  }
  void text(const std::string& path, std::string& out) const {
    if (auto v = raw(path)) out = *v;
  }

 private:
  const pt::ptree& tree_;
};

void check_keys(const pt::ptree& tree) {
  for (const auto& [section, body] : tree) {
    const auto it = kKeys.find(section);
    if (it == kKeys.end()) throw ConfigError("unknown config section [" + section + "]");
    if (body.empty() && !body.data().empty()) throw ConfigError("key '" + section + "' outside a section");
    for (const auto& [key, value] : body)
      if (!it->second.count(key)) throw ConfigError("unknown config key " + section + "." + key);
  }
}

UScheme parse_u_scheme(const std::string& s) {
  if (s == "closed_form") return UScheme::ClosedForm;
  if (s == "direct_ode") return UScheme::DirectODE;
  throw ConfigError("params.u_scheme: expected closed_form or direct_ode, got '" + s + "'");
}

FScheme parse_f_scheme(const std::string& s) {
  if (s == "euler") return FScheme::Euler;
  if (s == "rk4") return FScheme::RK4;
  if (s == "semi_implicit") return FScheme::SemiImplicit;
  throw ConfigError("params.f_scheme: expected euler, rk4 or semi_implicit, got '" + s + "'");
}

ScenarioSpec::Kind parse_scenario(const std::string& s) {
  if (s == "constant") return ScenarioSpec::Kind::Constant;
  if (s == "harmonic_wrap") return ScenarioSpec::Kind::HarmonicWrap;
  if (s == "bubble_candidate") return ScenarioSpec::Kind::BubbleCandidate;
  if (s == "random_smooth") return ScenarioSpec::Kind::RandomSmooth;
  if (s == "custom") return ScenarioSpec::Kind::Custom;
  throw ConfigError("scenario.name: unknown scenario '" + s + "'");
}

RunConfig from_tree(const pt::ptree& tree) {
  check_keys(tree);
  const Reader r(tree);
  RunConfig c;

  r.number("geometry.nx", c.geometry.nx);
  r.number("geometry.ny", c.geometry.ny);
  r.number("geometry.lx", c.geometry.lx);
  r.number("geometry.ly", c.geometry.ly);

  std::string kind = "sphere";
  int n = 2;
  r.text("target.kind", kind);
  r.number("target.n", n);
  if (kind == "sphere")
    c.target = TargetManifold::sphere(n);
  else if (kind == "euclidean")
    c.target = TargetManifold::euclidean(n);
  else
    throw ConfigError("target.kind: expected sphere or euclidean, got '" + kind + "'");

  FlowParams& p = c.params;
  r.number("params.a", p.a);
  r.number("params.b", p.b);
  r.number("params.dt", p.dt);
  r.number("params.t_end", p.t_end);
  if (auto v = r.raw("params.u_scheme")) p.u_scheme = parse_u_scheme(*v);
  if (auto v = r.raw("params.f_scheme")) p.f_scheme = parse_f_scheme(*v);
  r.flag("params.baseline_classic", p.baseline_classic);
  r.number("params.on_manifold_tol", p.on_manifold_tol);
  r.flag("params.project", p.project);
  r.number("params.safety", p.safety);
  r.number("params.max_substeps", p.max_substeps);
  r.number("params.cg_tol", p.cg_tol);

  ScenarioSpec& s = c.scenario;
  if (auto v = r.raw("scenario.name")) s.kind = parse_scenario(*v);
  r.number("scenario.k", s.k);
  r.number("scenario.lambda", s.lambda);
  r.number("scenario.center_x", s.center_x);
  r.number("scenario.center_y", s.center_y);
  r.number("scenario.seed", s.seed);
  r.number("scenario.modes", s.modes);
  r.number("scenario.amplitude", s.amplitude);
  r.text("scenario.file", s.file);

  r.text("output.dir", c.output_dir);
  r.number("output.cadence", c.cadence);
  r.number("output.snapshot_every", c.snapshot_every);

  DiagnosticsSpec& d = c.diagnostics;
  r.number("diagnostics.eps1", d.eps1);
  if (auto v = r.raw("diagnostics.radii")) d.radii = parse_list("diagnostics.radii", *v);
  r.number("diagnostics.ball_grid", d.ball_grid);
  r.number("diagnostics.scan_every", d.scan_every);
  r.number("diagnostics.ceiling", d.ceiling);

  r.number("picard.T", c.picard.T);
  r.number("picard.tol", c.picard.tol);
  r.number("picard.max_iter", c.picard.max_iter);

  c.validate();
  return c;
}

void apply_override(pt::ptree& tree, const std::string& item) {
  std::string s = item;
  if (s.rfind("--", 0) == 0) s = s.substr(2);
  const auto eq = s.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + item + "' is not of the form section.key=value");
  const std::string key = trim(s.substr(0, eq));
  if (std::count(key.begin(), key.end(), '.') != 1)
    throw ConfigError("override key '" + key + "' must be section.key");
  tree.put(pt::ptree::path_type(key, '.'), trim(s.substr(eq + 1)));
}

}  // namespace

void RunConfig::validate() const {
  geometry.validate();
  target.validate();
  params.validate();
  if (cadence < 1) throw ConfigError("output.cadence must be >= 1");
  if (snapshot_every < 0) throw ConfigError("output.snapshot_every must be >= 0");
  if (output_dir.empty()) throw ConfigError("output.dir must not be empty");

  const double hmax = std::max(geometry.hx(), geometry.hy());
  switch (scenario.kind) {
    case ScenarioSpec::Kind::HarmonicWrap:
      if (scenario.k < 1) throw ConfigError("scenario.k must be >= 1");
      if (target.dim < 2) throw ConfigError("harmonic_wrap needs a target of dimension >= 2");
      break;
    case ScenarioSpec::Kind::BubbleCandidate:
      if (!(scenario.lambda > 2.0 * hmax)) throw ConfigError("scenario.lambda must exceed 2 grid spacings");
      if (!(4.0 * scenario.lambda <= 0.5 * std::min(geometry.lx, geometry.ly)))
        throw ConfigError("scenario.lambda too large for the torus");
      if (!target.is_sphere() || target.dim != 3) throw ConfigError("bubble_candidate needs the 2-sphere target");
      break;
    case ScenarioSpec::Kind::RandomSmooth:
      if (scenario.modes < 1) throw ConfigError("scenario.modes must be >= 1");
      if (!(scenario.amplitude > 0.0 && scenario.amplitude <= 0.5))
        throw ConfigError("scenario.amplitude must be in (0, 0.5]");
      break;
    case ScenarioSpec::Kind::Custom:
      if (scenario.file.empty()) throw ConfigError("custom scenario needs scenario.file");
      break;
    case ScenarioSpec::Kind::Constant:
      break;
  }

  if (diagnostics.eps1 && !(*diagnostics.eps1 > 0.0)) throw ConfigError("diagnostics.eps1 must be > 0");
  if (diagnostics.radii.empty()) throw ConfigError("diagnostics.radii must not be empty");
  for (double r : diagnostics.radii) {
    if (r < 4.0 * hmax) throw ConfigError("diagnostics.radii must be >= 4 grid spacings");
    if (2.0 * r > 0.5 * std::min(geometry.lx, geometry.ly)) throw ConfigError("diagnostics.radii too large");
  }
  if (diagnostics.ball_grid < 1) throw ConfigError("diagnostics.ball_grid must be >= 1");
  if (diagnostics.scan_every < 1) throw ConfigError("diagnostics.scan_every must be >= 1");
  if (!(diagnostics.ceiling > 0.0)) throw ConfigError("diagnostics.ceiling must be > 0");

  if (!(picard.T > 0.0)) throw ConfigError("picard.T must be > 0");
  if (!(picard.tol > 0.0)) throw ConfigError("picard.tol must be > 0");
  if (picard.max_iter < 1) throw ConfigError("picard.max_iter must be >= 1");
}

RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  for (const auto& o : overrides) apply_override(tree, o);
  return from_tree(tree);
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

std::string to_string(UScheme s) { return s == UScheme::ClosedForm ? "closed_form" : "direct_ode"; }

std::string to_string(FScheme s) {
  switch (s) {
    case FScheme::Euler: return "euler";
    case FScheme::RK4: return "rk4";
    case FScheme::SemiImplicit: return "semi_implicit";
  }
  return "?";
}

std::string to_string(ScenarioSpec::Kind k) {
  switch (k) {
    case ScenarioSpec::Kind::Constant: return "constant";
    case ScenarioSpec::Kind::HarmonicWrap: return "harmonic_wrap";
    case ScenarioSpec::Kind::BubbleCandidate: return "bubble_candidate";
    case ScenarioSpec::Kind::RandomSmooth: return "random_smooth";
    case ScenarioSpec::Kind::Custom: return "custom";
  }
  return "?";
}

}  // namespace chf

#include "wdecay/config.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "wdecay/errors.hpp"

namespace wdecay {

std::string to_string(RunMode mode) { return mode == RunMode::Certify ? "certify" : "explore"; }

RunMode run_mode_from_string(const std::string& name) {
  if (name == "certify") return RunMode::Certify;
  if (name == "explore") return RunMode::Explore;
  throw Error(ErrorCode::ParseError, "cli", "run_mode_from_string", "unknown mode '" + name + "'");
}

namespace {

[[noreturn]] void parse_fail(const YAML::Node& node, const std::string& key, const std::string& what) {
  std::ostringstream os;
  os << "line " << node.Mark().line + 1 << ", key '" << key << "': " << what;
  throw Error(ErrorCode::ParseError, "cli", "parse_config", os.str());
}

class Section {
 public:
  Section(const YAML::Node& node, std::string path) : node_(node), path_(std::move(path)) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) parse_fail(node_, path_, "expected a mapping");
  }

  template <class T>
  void read(const std::string& key, T& out) {
    seen_.insert(key);
    if (!node_ || node_.IsNull()) return;
    const YAML::Node v = node_[key];
    if (!v) return;
    try {
      out = v.as<T>();
    } catch (const YAML::Exception&) {
      parse_fail(v, qualified(key), "cannot convert value");
    }
  }

  template <class T>
  void read_optional(const std::string& key, std::optional<T>& out) {
    seen_.insert(key);
    if (!node_ || node_.IsNull()) return;
    const YAML::Node v = node_[key];
    if (!v || v.IsNull()) return;
    T t{};
    read(key, t);
    out = t;
  }

  Section child(const std::string& key) {
    seen_.insert(key);
    if (!node_ || node_.IsNull()) return Section(YAML::Node(), qualified(key));
    return Section(node_[key], qualified(key));
  }

  std::optional<YAML::Node> raw(const std::string& key) {
    seen_.insert(key);
    if (!node_ || node_.IsNull()) return std::nullopt;
    const YAML::Node v = node_[key];
    if (!v || v.IsNull()) return std::nullopt;
    return v;
  }

  void finish() const {
    if (!node_ || node_.IsNull()) return;
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      const std::string k = it->first.as<std::string>();
      if (!seen_.count(k)) parse_fail(it->first, qualified(k), "unknown key");
    }
  }

  std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  YAML::Node node_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class F>
auto convert(const YAML::Node& node, const std::string& key, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    parse_fail(node, key, e.what());
  }
}

}  // namespace

RunConfig parse_config_string(const std::string& text, const std::string& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    std::ostringstream os;
    os << "line " << e.mark.line + 1 << ": " << e.msg;
    throw Error(ErrorCode::ParseError, "cli", "parse_config", os.str());
  }
  RunConfig c;
  Section top(root, "");

  {
    Section p = top.child("physics");
    PhysicsParams& ph = c.model.physics;
    p.read("m1", ph.masses.m1);
    p.read("m2", ph.masses.m2);
    p.read("m3", ph.masses.m3);
    p.read("mW", ph.masses.mW);
    p.read("lambda", ph.lambda);
    p.read("delta", ph.delta);
    p.read("species", ph.species);
    p.read_optional("g", c.g);
    p.read("g_fraction", c.g_fraction);
    p.read_optional("g1", ph.g1);
    p.read("threshold_fraction", ph.threshold_fraction);
    p.read("beta", ph.beta);
    p.read("eta", ph.eta);
    p.read("optimize_beta_eta", c.model.optimize_beta_eta);
    Section be = p.child("beta_eta_grid");
    be.read("min", c.model.beta_eta_grid.min);
    be.read("max", c.model.beta_eta_grid.max);
    be.read("points", c.model.beta_eta_grid.points);
    be.finish();
    p.finish();
  }
  {
    Section g = top.child("grid");
    GridSpec& gs = c.model.grid;
    g.read("pmax", gs.pmax);
    g.read("shells", gs.shells);
    const std::optional<YAML::Node> scheme = g.raw("scheme");
    if (scheme) {
      gs.scheme = convert(*scheme, "grid.scheme", [&] { return scheme_from_string(scheme->as<std::string>()); });
    }
    g.read("massive_pmax", gs.massive_pmax);
    g.read("massive_shells", gs.massive_shells);
    g.read("boson_pmax", gs.boson_pmax);
    g.read("boson_shells", gs.boson_shells);
    g.read("collapse_labels", gs.collapse_labels);
    g.finish();
  }
  {
    Section t = top.child("caps");
    TruncationCaps& caps = c.model.caps;
    t.read("massive_particle", caps.massive_particle);
    t.read("massive_antiparticle", caps.massive_antiparticle);
    t.read("neutrino", caps.neutrino);
    t.read("antineutrino", caps.antineutrino);
    t.read("boson", caps.boson);
    t.read("max_dimension", caps.max_dimension);
    t.finish();
  }
  {
    Section k = top.child("kernel");
    const std::optional<YAML::Node> fam = k.raw("family");
    if (fam) c.model.family = convert(*fam, "kernel.family", [&] { return family_from_string(fam->as<std::string>()); });
    KernelParams& kp = c.model.kernel;
    k.read("amplitude", kp.amplitude);
    k.read("width", kp.width);
    k.read("uv_cutoff", kp.uv_cutoff);
    k.read("physical_helicity", kp.physical_helicity);
    std::vector<double> aw;
    k.read("alpha_weights", aw);
    if (!aw.empty()) {
      if (aw.size() != 2) parse_fail(*k.raw("alpha_weights"), "kernel.alpha_weights", "expected two values");
      kp.alpha_weights = {aw[0], aw[1]};
    }
    std::optional<std::string> table;
    k.read_optional("table", table);
    if (table) {
      const std::filesystem::path tp(*table);
      c.model.kernel_table = tp.is_absolute() ? tp.string() : (std::filesystem::path(base_dir) / tp).string();
    }
    k.finish();
  }
  {
    Section h = top.child("hypotheses");
    h.read("divergence_factor", c.model.hypotheses.divergence_factor);
    h.read("refinement_levels", c.model.hypotheses.refinement_levels);
    h.finish();
  }
  {
    Section s = top.child("cascade");
    s.read("nmax", c.model.nmax);
    s.read("full_space", c.cascade.full_space);
    s.read("pull_through", c.cascade.pull_through);
    s.read("pull_tolerance", c.cascade.pull_tolerance);
    s.read("dense_limit", c.cascade.solver.dense_limit);
    s.read("tolerance", c.cascade.solver.tol);
    s.read("krylov_size", c.cascade.solver.krylov_size);
    s.read("max_restarts", c.cascade.solver.max_restarts);
    s.finish();
  }
  {
    Section m = top.child("mourre");
    m.read("stages", c.mourre_stages);
    const std::optional<YAML::Node> mode = m.raw("mode");
    if (mode) {
      c.mourre.mode = convert(*mode, "mourre.mode", [&] { return commutator_mode_from_string(mode->as<std::string>()); });
    }
    m.read_optional("C_delta", c.mourre.C_delta_user);
    m.read("dense_limit", c.mourre.dense_limit);
    m.finish();
  }
  {
    Section p = top.child("probe");
    p.read("stage", c.probe.stage);
    p.read("s", c.probe.s);
    p.read("lambdas", c.probe.lambdas);
    p.read("epsilons", c.probe.epsilons);
    p.read("dense_limit", c.probe.dense_limit);
    p.finish();
  }
  {
    Section k = top.child("checks");
    k.read("samples", c.samples);
    k.read("smeared_samples", c.smeared_samples);
    k.finish();
  }
  {
    Section r = top.child("run");
    r.read("seed", c.seed);
    r.read("threads", c.threads);
    r.read("out", c.out);
    const std::optional<YAML::Node> mode = r.raw("mode");
    if (mode) c.mode = convert(*mode, "run.mode", [&] { return run_mode_from_string(mode->as<std::string>()); });
    r.finish();
  }
  top.finish();

  const std::vector<std::string> bad = validate(c);
  if (!bad.empty()) {
    std::string msg;
    for (const std::string& b : bad) msg += (msg.empty() ? "" : "; ") + b;
    throw Error(ErrorCode::ValidationError, "cli", "parse_config", msg);
  }
  return c;
}

RunConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cli", "parse_config", "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_string(ss.str(), std::filesystem::path(path).parent_path().string());
}

std::vector<std::string> validate(const RunConfig& c) {
  std::vector<std::string> v;
  const PhysicsParams& p = c.model.physics;
  const Masses& m = p.masses;
  if (!(p.delta > 0.0 && p.delta < m.m1)) v.push_back("0 < δ < m₁ violated (delta = " + std::to_string(p.delta) + ")");
  if (!(m.m1 < m.m2 && m.m2 < m.m3 && m.m3 < m.mW)) v.push_back("m₁ < m₂ < m₃ < m_W violated");
  if (!(p.lambda > m.m1)) v.push_back("Λ > m₁ violated (lambda = " + std::to_string(p.lambda) + ")");
  if (p.species < 1 || p.species > 3) v.push_back("species must be 1, 2 or 3");
  if (c.g && !(*c.g >= 0.0)) v.push_back("g must be >= 0");
  if (!(c.g_fraction >= 0.0)) v.push_back("g_fraction must be >= 0");
  if (p.g1 && !(*p.g1 > 0.0)) v.push_back("g1 must be > 0");
  if (!(p.threshold_fraction > 0.0 && p.threshold_fraction < 1.0)) v.push_back("threshold_fraction must lie in (0, 1)");
  if (!(p.beta > 0.0 && p.eta > 0.0)) v.push_back("beta and eta must be > 0");
  const BetaEtaGrid& be = c.model.beta_eta_grid;
  if (!(be.min > 0.0 && be.max >= be.min && be.points >= 1)) v.push_back("beta_eta_grid needs 0 < min <= max, points >= 1");
  const GridSpec& g = c.model.grid;
  if (!(g.pmax > 0.0 && g.massive_pmax > 0.0 && g.boson_pmax > 0.0)) v.push_back("grid pmax values must be > 0");
  if (g.shells < 1 || g.massive_shells < 1 || g.boson_shells < 1) v.push_back("grid shell counts must be >= 1");
  if (c.model.caps.max_dimension < 1) v.push_back("caps.max_dimension must be >= 1");
  if (!(c.model.kernel.width > 0.0)) v.push_back("kernel.width must be > 0");
  if (c.model.nmax < 1) v.push_back("cascade.nmax must be >= 1");
  if (!(c.cascade.solver.tol > 0.0)) v.push_back("cascade.tolerance must be > 0");
  for (int n : c.mourre_stages) {
    if (n < 1 || n > c.model.nmax) v.push_back("mourre.stages entries must lie in [1, nmax]");
  }
  if (c.probe.stage < 0 || c.probe.stage > c.model.nmax) v.push_back("probe.stage must lie in [0, nmax]");
  if (!(c.probe.s > 0.5)) v.push_back("probe.s must be > 1/2");
  for (double e : c.probe.epsilons) {
    if (!(e > 0.0)) v.push_back("probe.epsilons must be > 0");
  }
  if (c.samples < 1 || c.smeared_samples < 1) v.push_back("checks sample counts must be >= 1");
  if (c.threads < 0) v.push_back("run.threads must be >= 0");
  return v;
}

double coupling(const RunConfig& c, const ConstantLedger& l) { return c.g ? *c.g : c.g_fraction * l.g_delta1; }

nlohmann::json to_json(const RunConfig& c) {
  const PhysicsParams& p = c.model.physics;
  const GridSpec& g = c.model.grid;
  const TruncationCaps& t = c.model.caps;
  const KernelParams& k = c.model.kernel;
  nlohmann::json j;
  j["physics"] = {{"m1", p.masses.m1},
                  {"m2", p.masses.m2},
                  {"m3", p.masses.m3},
                  {"mW", p.masses.mW},
                  {"lambda", p.lambda},
                  {"delta", p.delta},
                  {"species", p.species},
                  {"g", c.g ? nlohmann::json(*c.g) : nlohmann::json(nullptr)},
                  {"g_fraction", c.g_fraction},
                  {"g1", p.g1 ? nlohmann::json(*p.g1) : nlohmann::json(nullptr)},
                  {"threshold_fraction", p.threshold_fraction},
                  {"beta", p.beta},
                  {"eta", p.eta},
                  {"optimize_beta_eta", c.model.optimize_beta_eta},
                  {"beta_eta_grid",
                   {{"min", c.model.beta_eta_grid.min},
                    {"max", c.model.beta_eta_grid.max},
                    {"points", c.model.beta_eta_grid.points}}}};
  j["grid"] = {{"pmax", g.pmax},
               {"shells", g.shells},
               {"scheme", to_string(g.scheme)},
               {"massive_pmax", g.massive_pmax},
               {"massive_shells", g.massive_shells},
               {"boson_pmax", g.boson_pmax},
               {"boson_shells", g.boson_shells},
               {"collapse_labels", g.collapse_labels}};
  j["caps"] = {{"massive_particle", t.massive_particle}, {"massive_antiparticle", t.massive_antiparticle},
               {"neutrino", t.neutrino},                 {"antineutrino", t.antineutrino},
               {"boson", t.boson},                       {"max_dimension", t.max_dimension}};
  j["kernel"] = {{"family", to_string(c.model.family)},
                 {"amplitude", k.amplitude},
                 {"width", k.width},
                 {"uv_cutoff", k.uv_cutoff},
                 {"physical_helicity", k.physical_helicity},
                 {"alpha_weights", {k.alpha_weights[0], k.alpha_weights[1]}},
                 {"table", c.model.kernel_table ? nlohmann::json(*c.model.kernel_table) : nlohmann::json(nullptr)}};
  j["hypotheses"] = {{"divergence_factor", c.model.hypotheses.divergence_factor},
                     {"refinement_levels", c.model.hypotheses.refinement_levels}};
  j["cascade"] = {{"nmax", c.model.nmax},
                  {"full_space", c.cascade.full_space},
                  {"pull_through", c.cascade.pull_through},
                  {"pull_tolerance", c.cascade.pull_tolerance},
                  {"dense_limit", c.cascade.solver.dense_limit},
                  {"tolerance", c.cascade.solver.tol},
                  {"krylov_size", c.cascade.solver.krylov_size},
                  {"max_restarts", c.cascade.solver.max_restarts}};
  j["mourre"] = {{"stages", c.mourre_stages},
                 {"mode", to_string(c.mourre.mode)},
                 {"C_delta", c.mourre.C_delta_user ? nlohmann::json(*c.mourre.C_delta_user) : nlohmann::json(nullptr)},
                 {"dense_limit", c.mourre.dense_limit}};
  j["probe"] = {{"stage", c.probe.stage},
                {"s", c.probe.s},
                {"lambdas", c.probe.lambdas},
                {"epsilons", c.probe.epsilons},
                {"dense_limit", c.probe.dense_limit}};
  j["checks"] = {{"samples", c.samples}, {"smeared_samples", c.smeared_samples}};
  j["run"] = {{"seed", c.seed}, {"threads", c.threads}, {"out", c.out}, {"mode", to_string(c.mode)}};
  return j;
}

}  // namespace wdecay

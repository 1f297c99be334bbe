#include "pwdarcy/manifest.hpp"

#include <set>
#include <stdexcept>

#include <json.hpp>

#include "pwdarcy/io.hpp"

namespace pwdarcy {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& known,
                    const std::string& where) {
  for (const auto& [key, value] : obj.items())
    if (!known.count(key))
      throw std::runtime_error("manifest: unknown key \"" +
                               (where.empty() ? key : where + "." + key) + "\"");
}

}  // namespace

GeometryModel Manifest::geometry() const {
  return GeometryModel::parse(model, layers_K, layers_N);
}

std::vector<FieldSpec> Manifest::resolved_fields() const {
  if (!fields.empty()) return fields;
  if (model == "fault3")
    return {{2.0, 1.4, 2.0}, {0.0, 1.8, 1.0}, {-2.0, 1.4, 2.0}};
  if (model == "layer2" || model == "curve2" || model == "channel")
    return {{1.0, 1.4, 1.0}, {-1.0, 1.8, 1.0}};
  throw std::runtime_error("manifest: model \"" + model +
                           "\" has no default field priors; list them explicitly");
}

std::vector<FieldPrior> Manifest::field_priors(int mesh) const {
  std::vector<FieldPrior> priors;
  for (const auto& spec : resolved_fields()) {
    FieldPrior p;
    p.mean = spec.mean;
    p.alpha = spec.alpha;
    p.scale = spec.scale;
    p.truncation = mesh - 1;
    p.validate();
    priors.push_back(p);
  }
  return priors;
}

PdeProblem Manifest::pde_problem() const {
  PdeProblem p;
  p.f_value = f_value;
  p.g_value = g_value;
  if (g_kind == "x") p.g_kind = PdeProblem::GKind::coord_x;
  else if (g_kind == "y") p.g_kind = PdeProblem::GKind::coord_y;
  else if (g_kind == "constant") p.g_kind = PdeProblem::GKind::constant;
  else throw std::runtime_error("manifest: pde.g must be \"x\", \"y\" or \"constant\"");
  return p;
}

ObservationSetup Manifest::observation_setup() const {
  return ObservationSetup::lattice(obs_count, epsilon, gamma);
}

void Manifest::validate() const {
  if (version != 1) throw std::runtime_error("manifest: unsupported version");
  if (sigma != "exp") throw std::runtime_error("manifest: sigma must be \"exp\"");
  if (truth_mesh < 3 || inversion_mesh < 3)
    throw std::runtime_error("manifest: meshes need at least 3 nodes per axis");
  if (truth_mesh <= inversion_mesh && !allow_inverse_crime)
    throw std::runtime_error(
        "manifest: truth mesh must exceed the inversion mesh (inverse crime); "
        "set allow_inverse_crime to override");
  const GeometryModel gm = geometry();
  const auto specs = resolved_fields();
  if (static_cast<int>(specs.size()) != gm.region_count())
    throw std::runtime_error("manifest: model " + model + " needs " +
                             std::to_string(gm.region_count()) + " field priors, got " +
                             std::to_string(specs.size()));
  pde_problem();
  observation_setup();
  if (!(map.tol > 0)) throw std::runtime_error("manifest: map.tol must be positive");
  if (map.escape.count < 1)
    throw std::runtime_error("manifest: map.escape.count must be >= 1");
  if (mcmc.burn_in >= mcmc.samples)
    throw std::runtime_error("manifest: mcmc.burnin must be below mcmc.samples");
  if (!(mcmc.beta >= 0 && mcmc.beta <= 1))
    throw std::runtime_error("manifest: mcmc.beta must lie in [0, 1]");
  field_priors(inversion_mesh);
}

Manifest manifest_from_json_text(const std::string& text) {
  const json doc = json::parse(text);
  if (!doc.is_object()) throw std::runtime_error("manifest: top level must be an object");
  reject_unknown(doc, {"version", "model", "layers", "mesh", "fields", "pde", "obs",
                       "map", "mcmc", "seed", "allow_inverse_crime"},
                 "");
  Manifest m;
  m.version = doc.value("version", 1);
  m.model = doc.value("model", std::string("layer2"));
  if (doc.contains("layers")) {
    const json& l = doc["layers"];
    reject_unknown(l, {"K", "N"}, "layers");
    m.layers_K = l.value("K", 0);
    m.layers_N = l.value("N", 0);
  }
  if (doc.contains("mesh")) {
    const json& mesh = doc["mesh"];
    reject_unknown(mesh, {"truth", "inversion"}, "mesh");
    m.truth_mesh = mesh.value("truth", 256);
    m.inversion_mesh = mesh.value("inversion", 64);
  }
  if (doc.contains("fields")) {
    for (const auto& f : doc["fields"]) {
      reject_unknown(f, {"mean", "alpha", "scale"}, "fields[]");
      FieldSpec spec;
      spec.mean = f.value("mean", 0.0);
      spec.alpha = f.value("alpha", 1.4);
      spec.scale = f.value("scale", 1.0);
      m.fields.push_back(spec);
    }
  }
  if (doc.contains("pde")) {
    const json& p = doc["pde"];
    reject_unknown(p, {"f", "g", "g_value", "sigma"}, "pde");
    m.f_value = p.value("f", 0.0);
    m.g_kind = p.value("g", std::string("x"));
    m.g_value = p.value("g_value", m.g_kind == "constant" ? 0.0 : 4.0);
    m.sigma = p.value("sigma", std::string("exp"));
  }
  if (doc.contains("obs")) {
    const json& o = doc["obs"];
    reject_unknown(o, {"count", "epsilon", "gamma"}, "obs");
    m.obs_count = o.value("count", 25);
    m.epsilon = o.value("epsilon", 0.05);
    m.gamma = o.value("gamma", 0.01);
  }
  if (doc.contains("map")) {
    const json& mp = doc["map"];
    reject_unknown(mp, {"tol", "max_outer", "inits", "nm", "gn", "escape"}, "map");
    m.map.tol = mp.value("tol", 1e-5);
    m.map.max_outer = mp.value("max_outer", 100);
    m.map_inits = mp.value("inits", 50);
    if (mp.contains("nm")) {
      const json& nm = mp["nm"];
      reject_unknown(nm,
                     {"reflection", "expansion", "contraction", "shrink",
                      "initial_edge", "diameter_tol", "max_iter"},
                     "map.nm");
      m.map.nm.reflection = nm.value("reflection", 1.0);
      m.map.nm.expansion = nm.value("expansion", 2.0);
      m.map.nm.contraction = nm.value("contraction", 0.5);
      m.map.nm.shrink = nm.value("shrink", 0.5);
      m.map.nm.initial_edge = nm.value("initial_edge", 0.05);
      m.map.nm.diameter_tol = nm.value("diameter_tol", 1e-6);
      m.map.nm.max_iter = nm.value("max_iter", 200);
    }
    if (mp.contains("gn")) {
      const json& gn = mp["gn"];
      reject_unknown(gn, {"max_line_search", "armijo"}, "map.gn");
      m.map.gn.max_line_search = gn.value("max_line_search", 30);
      m.map.gn.armijo = gn.value("armijo", 1e-4);
    }
    if (mp.contains("escape")) {
      const json& esc = mp["escape"];
      reject_unknown(esc, {"count", "geometry_scale", "field_scale"}, "map.escape");
      m.map.escape.count = esc.value("count", 50);
      m.map.escape.geometry_scale = esc.value("geometry_scale", 0.05);
      m.map.escape.field_scale = esc.value("field_scale", 0.1);
    }
  }
  if (doc.contains("mcmc")) {
    const json& mc = doc["mcmc"];
    reject_unknown(mc, {"samples", "burnin", "beta", "tau_scale", "thin"}, "mcmc");
    m.mcmc.samples = mc.value("samples", 100000L);
    m.mcmc.burn_in = mc.value("burnin", 20000L);
    m.mcmc.beta = mc.value("beta", 0.05);
    m.mcmc.tau_scale = mc.value("tau_scale", 0.02);
    m.mcmc.thin = mc.value("thin", 10L);
  }
  m.seed = doc.value("seed", std::uint64_t{1});
  m.allow_inverse_crime = doc.value("allow_inverse_crime", false);
  m.validate();
  return m;
}

std::string manifest_to_json_text(const Manifest& m) {
  json doc;
  doc["version"] = m.version;
  doc["model"] = m.model;
  if (m.model == "multilayer") doc["layers"] = {{"K", m.layers_K}, {"N", m.layers_N}};
  doc["mesh"] = {{"truth", m.truth_mesh}, {"inversion", m.inversion_mesh}};
  json fields = json::array();
  for (const auto& f : m.resolved_fields())
    fields.push_back({{"mean", f.mean}, {"alpha", f.alpha}, {"scale", f.scale}});
  doc["fields"] = fields;
  doc["pde"] = {{"f", m.f_value}, {"g", m.g_kind}, {"g_value", m.g_value}, {"sigma", m.sigma}};
  doc["obs"] = {{"count", m.obs_count}, {"epsilon", m.epsilon}, {"gamma", m.gamma}};
  doc["map"] = {{"tol", m.map.tol},
                {"max_outer", m.map.max_outer},
                {"inits", m.map_inits},
                {"nm",
                 {{"reflection", m.map.nm.reflection},
                  {"expansion", m.map.nm.expansion},
                  {"contraction", m.map.nm.contraction},
                  {"shrink", m.map.nm.shrink},
                  {"initial_edge", m.map.nm.initial_edge},
                  {"diameter_tol", m.map.nm.diameter_tol},
                  {"max_iter", m.map.nm.max_iter}}},
                {"gn",
                 {{"max_line_search", m.map.gn.max_line_search},
                  {"armijo", m.map.gn.armijo}}},
                {"escape",
                 {{"count", m.map.escape.count},
                  {"geometry_scale", m.map.escape.geometry_scale},
                  {"field_scale", m.map.escape.field_scale}}}};
  doc["mcmc"] = {{"samples", m.mcmc.samples},
                 {"burnin", m.mcmc.burn_in},
                 {"beta", m.mcmc.beta},
                 {"tau_scale", m.mcmc.tau_scale},
                 {"thin", m.mcmc.thin}};
  doc["seed"] = m.seed;
  doc["allow_inverse_crime"] = m.allow_inverse_crime;
  return doc.dump(2) + "\n";
}

Manifest load_manifest(const std::filesystem::path& path) {
  return manifest_from_json_text(read_text_file(path));
}

void save_manifest(const std::filesystem::path& path, const Manifest& m) {
  write_text_file(path, manifest_to_json_text(m));
}

}  // namespace pwdarcy

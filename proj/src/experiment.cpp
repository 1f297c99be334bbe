#include "pwdarcy/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "pwdarcy/io.hpp"
#include "pwdarcy/validate.hpp"

namespace pwdarcy {

namespace fs = std::filesystem;
using nlohmann::json;

DataSet generate(const Manifest& manifest) {
  manifest.validate();
  if (manifest.truth_mesh == manifest.inversion_mesh && !manifest.allow_inverse_crime)
    throw std::runtime_error("generate: truth and inversion meshes coincide "
                             "(inverse crime); set allow_inverse_crime to override");
  const Grid grid(manifest.truth_mesh);
  const GeometryModel model = manifest.geometry();
  const auto priors = manifest.field_priors(manifest.truth_mesh);
  const GeometricPrior geom_prior = GeometricPrior::standard(model);

  DataSet ds;
  for (std::size_t i = 0; i < priors.size(); ++i) {
    Rng rng = seeded_rng(manifest.seed, "truth.fields." + std::to_string(i + 1));
    ds.truth_fields.push_back(sample(priors[i], rng));
  }
  {
    Rng rng = seeded_rng(manifest.seed, "truth.geom");
    ds.truth_a = geom_prior.sample(rng);
  }
  ds.truth_ua = construct(ds.truth_fields, model, ds.truth_a, grid).values;

  ForwardModel fm(grid, model, manifest.pde_problem(), manifest.observation_setup());
  ds.y_clean = fm.predict_from_ua(ds.truth_ua);

  Rng noise_rng = seeded_rng(manifest.seed, "noise");
  ds.noise = manifest.gamma * noise_rng.normal_vector(ds.y_clean.size());
  ds.y = ds.y_clean + ds.noise;

  ds.rel_errors_percent.resize(ds.y.size());
  for (Eigen::Index j = 0; j < ds.y.size(); ++j)
    ds.rel_errors_percent[j] =
        std::abs(ds.y_clean[j]) < 1e-12
            ? std::numeric_limits<double>::quiet_NaN()
            : 100.0 * std::abs(ds.noise[j]) / std::abs(ds.y_clean[j]);
  return ds;
}

ErrorStats error_table(const Eigen::VectorXd& rel_errors_percent) {
  ErrorStats stats;
  stats.min_percent = kInf;
  stats.max_percent = -kInf;
  double sum = 0;
  int count = 0;
  for (Eigen::Index j = 0; j < rel_errors_percent.size(); ++j) {
    const double e = rel_errors_percent[j];
    if (!std::isfinite(e)) {
      ++stats.excluded;
      continue;
    }
    sum += e;
    ++count;
    stats.min_percent = std::min(stats.min_percent, e);
    stats.max_percent = std::max(stats.max_percent, e);
  }
  if (count == 0) throw std::runtime_error("error_table: no usable observations");
  stats.mean_percent = sum / count;
  return stats;
}

std::vector<int> cluster_minimizers(const std::vector<Eigen::MatrixXd>& ua_library,
                                    const std::vector<double>& om_totals,
                                    double threshold, const Grid& grid) {
  const int n = static_cast<int>(ua_library.size());
  if (n == 0) throw std::invalid_argument("cluster_minimizers: empty library");
  if (om_totals.size() != ua_library.size())
    throw std::invalid_argument("cluster_minimizers: totals/library size mismatch");

  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (l2_norm(grid, ua_library[i] - ua_library[j]) <= threshold)
        parent[find(i)] = find(j);

  // order classes by their best representative's I
  std::vector<int> roots;
  for (int i = 0; i < n; ++i)
    if (find(i) == i) roots.push_back(i);
  std::vector<double> best(n, kInf);
  for (int i = 0; i < n; ++i)
    best[find(i)] = std::min(best[find(i)], om_totals[i]);
  std::stable_sort(roots.begin(), roots.end(),
                   [&](int a, int b) { return best[a] < best[b]; });
  std::vector<int> label_of_root(n, 0);
  for (std::size_t c = 0; c < roots.size(); ++c) label_of_root[roots[c]] = int(c) + 1;

  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = label_of_root[find(i)];
  return labels;
}

// --- persistence -------------------------------------------------------------

void save_spectral_field(const fs::path& dir, const std::string& name,
                         const SpectralField& field, double alpha, double scale) {
  json header;
  header["mean"] = field.mean;
  header["alpha"] = alpha;
  header["scale"] = scale;
  header["truncation"] = field.truncation();
  header["coeffs"] = name + ".csv";
  write_text_file(dir / (name + ".json"), header.dump(2) + "\n");
  save_csv_matrix(dir / (name + ".csv"), field.coeffs);
}

SpectralField load_spectral_field(const fs::path& dir, const std::string& name) {
  const json header = json::parse(read_text_file(dir / (name + ".json")));
  SpectralField field;
  field.mean = header.at("mean").get<double>();
  field.coeffs = load_csv_matrix(dir / header.at("coeffs").get<std::string>());
  if (field.truncation() != header.at("truncation").get<int>())
    throw std::runtime_error("load_spectral_field: truncation mismatch in " + name);
  return field;
}

void save_state_bin(const fs::path& path, const std::vector<SpectralField>& fields,
                    const Eigen::VectorXd& a) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
  out.write("PWST", 4);
  const std::uint32_t nf = static_cast<std::uint32_t>(fields.size());
  const std::uint32_t ka = static_cast<std::uint32_t>(a.size());
  out.write(reinterpret_cast<const char*>(&nf), 4);
  out.write(reinterpret_cast<const char*>(&ka), 4);
  out.write(reinterpret_cast<const char*>(a.data()), 8 * a.size());
  for (const auto& f : fields) {
    const std::uint32_t m = static_cast<std::uint32_t>(f.truncation());
    out.write(reinterpret_cast<const char*>(&m), 4);
    out.write(reinterpret_cast<const char*>(&f.mean), 8);
    out.write(reinterpret_cast<const char*>(f.coeffs.data()), 8 * f.coeffs.size());
  }
}

void load_state_bin(const fs::path& path, std::vector<SpectralField>& fields,
                    Eigen::VectorXd& a) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path.string() + ": cannot open");
  char magic[4];
  in.read(magic, 4);
  if (!in || std::string(magic, 4) != "PWST")
    throw std::runtime_error(path.string() + ": bad magic");
  std::uint32_t nf = 0, ka = 0;
  in.read(reinterpret_cast<char*>(&nf), 4);
  in.read(reinterpret_cast<char*>(&ka), 4);
  a.resize(ka);
  in.read(reinterpret_cast<char*>(a.data()), 8 * ka);
  fields.assign(nf, SpectralField{});
  for (auto& f : fields) {
    std::uint32_t m = 0;
    in.read(reinterpret_cast<char*>(&m), 4);
    in.read(reinterpret_cast<char*>(&f.mean), 8);
    f.coeffs.resize(m + 1, m + 1);
    in.read(reinterpret_cast<char*>(f.coeffs.data()), 8 * f.coeffs.size());
  }
  if (!in) throw std::runtime_error(path.string() + ": truncated state file");
}

namespace {

json geometry_json(const Manifest& manifest, const Eigen::VectorXd& a) {
  json doc;
  doc["model"] = manifest.model;
  if (manifest.model == "multilayer")
    doc["layers"] = {{"K", manifest.layers_K}, {"N", manifest.layers_N}};
  doc["a"] = std::vector<double>(a.data(), a.data() + a.size());
  return doc;
}

Eigen::VectorXd vector_from_json(const json& arr) {
  Eigen::VectorXd v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) v[i] = arr[i].get<double>();
  return v;
}

void save_trace_csv(const fs::path& path, const std::vector<OmValue>& trace) {
  std::ostringstream out;
  out << "iter,phi,j,k,total\n";
  for (std::size_t i = 0; i < trace.size(); ++i)
    out << i << "," << format_double(trace[i].phi) << ","
        << format_double(trace[i].j) << "," << format_double(trace[i].k) << ","
        << format_double(trace[i].total()) << "\n";
  write_text_file(path, out.str());
}

int parse_trailing_index(const std::string& name) {
  const auto pos = name.rfind('_');
  if (pos == std::string::npos) throw std::runtime_error("bad indexed name: " + name);
  return std::stoi(name.substr(pos + 1));
}

std::vector<fs::path> sorted_indexed_dirs(const fs::path& parent, const std::string& prefix) {
  std::vector<fs::path> dirs;
  if (!fs::exists(parent)) return dirs;
  for (const auto& entry : fs::directory_iterator(parent))
    if (entry.is_directory() && entry.path().filename().string().rfind(prefix, 0) == 0)
      dirs.push_back(entry.path());
  std::sort(dirs.begin(), dirs.end(), [](const fs::path& a, const fs::path& b) {
    return parse_trailing_index(a.filename().string()) <
           parse_trailing_index(b.filename().string());
  });
  return dirs;
}

}  // namespace

void write_experiment(const fs::path& dir, const Manifest& manifest, const DataSet& data) {
  fs::create_directories(dir / "truth");
  save_manifest(dir / "manifest.json", manifest);

  write_text_file(dir / "truth" / "geometry.json",
                  geometry_json(manifest, data.truth_a).dump(2) + "\n");
  const auto specs = manifest.resolved_fields();
  for (std::size_t i = 0; i < data.truth_fields.size(); ++i)
    save_spectral_field(dir / "truth", "field_" + std::to_string(i + 1),
                        data.truth_fields[i], specs[i].alpha, specs[i].scale);
  save_csv_matrix(dir / "truth" / "u_a.csv", data.truth_ua);
  save_csv_matrix_int(
      dir / "truth" / "region.csv",
      region_masks(manifest.geometry(), data.truth_a, Grid(manifest.truth_mesh)).region);

  const ObservationSetup obs = manifest.observation_setup();
  json data_doc;
  json points = json::array();
  for (Eigen::Index j = 0; j < obs.points.rows(); ++j)
    points.push_back({obs.points(j, 0), obs.points(j, 1)});
  data_doc["points"] = points;
  data_doc["epsilon"] = obs.epsilon;
  data_doc["gamma"] = obs.gamma;
  data_doc["y"] = std::vector<double>(data.y.data(), data.y.data() + data.y.size());
  write_text_file(dir / "data.json", data_doc.dump(2) + "\n");

  const ErrorStats stats = error_table(data.rel_errors_percent);
  json noise_doc;
  noise_doc["y_clean"] =
      std::vector<double>(data.y_clean.data(), data.y_clean.data() + data.y_clean.size());
  noise_doc["noise"] =
      std::vector<double>(data.noise.data(), data.noise.data() + data.noise.size());
  json rel = json::array();
  for (Eigen::Index j = 0; j < data.rel_errors_percent.size(); ++j) {
    const double e = data.rel_errors_percent[j];
    if (std::isfinite(e)) rel.push_back(e);
    else rel.push_back(nullptr);
  }
  noise_doc["rel_errors_percent"] = rel;
  noise_doc["mean_percent"] = stats.mean_percent;
  noise_doc["min_percent"] = stats.min_percent;
  noise_doc["max_percent"] = stats.max_percent;
  noise_doc["excluded"] = stats.excluded;
  write_text_file(dir / "noise.json", noise_doc.dump(2) + "\n");
}

Eigen::VectorXd load_observations(const fs::path& dir) {
  const json doc = json::parse(read_text_file(dir / "data.json"));
  return vector_from_json(doc.at("y"));
}

std::vector<MapRunRecord> run_map(const fs::path& dir, const Manifest& manifest,
                                  int inits, int jobs) {
  const Eigen::VectorXd y = load_observations(dir);
  const Grid grid(manifest.inversion_mesh);
  const GeometryModel model = manifest.geometry();
  const auto priors = manifest.field_priors(manifest.inversion_mesh);
  const GeometricPrior geom_prior = GeometricPrior::standard(model);
  const auto specs = manifest.resolved_fields();
  fs::create_directories(dir / "map");

  std::vector<MapRunRecord> records(inits);
  std::atomic<int> next{1};
  auto worker = [&]() {
    ForwardModel fm(grid, model, manifest.pde_problem(), manifest.observation_setup());
    for (;;) {
      const int k = next.fetch_add(1);
      if (k > inits) break;
      Rng rng = seeded_rng(manifest.seed, "map.init." + std::to_string(k));
      Eigen::VectorXd a0 = geom_prior.sample(rng);
      std::vector<SpectralField> fields0;
      for (const auto& prior : priors) fields0.push_back(smoothed_sample(prior, rng));

      const MapResult result =
          map_estimate(fm, priors, geom_prior, fields0, a0, y, manifest.map, rng, k);

      const fs::path init_dir = dir / "map" / ("init_" + std::to_string(k));
      fs::create_directories(init_dir);
      write_text_file(init_dir / "geometry.json",
                      geometry_json(manifest, result.a).dump(2) + "\n");
      for (std::size_t i = 0; i < result.fields.size(); ++i)
        save_spectral_field(init_dir, "field_" + std::to_string(i + 1), result.fields[i],
                            specs[i].alpha, specs[i].scale);
      save_trace_csv(init_dir / "trace.csv", result.trace);
      json res;
      res["init"] = k;
      res["phi"] = result.om.phi;
      res["j"] = result.om.j;
      res["k"] = result.om.k;
      res["total"] = result.om.total();
      res["converged"] = result.converged;
      write_text_file(init_dir / "result.json", res.dump(2) + "\n");
      records[k - 1] = {k, result.om, result.converged};
    }
  };
  jobs = std::max(1, std::min(jobs, inits));
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::vector<int> order(inits);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return records[a].om.total() < records[b].om.total();
  });
  std::ostringstream out;
  out << "rank,init,phi,j,k,total,converged\n";
  for (int rank = 0; rank < inits; ++rank) {
    const auto& r = records[order[rank]];
    out << rank + 1 << "," << r.init_id << "," << format_double(r.om.phi) << ","
        << format_double(r.om.j) << "," << format_double(r.om.k) << ","
        << format_double(r.om.total()) << "," << (r.converged ? 1 : 0) << "\n";
  }
  write_text_file(dir / "map" / "summary.csv", out.str());
  return records;
}

void load_map_result(const fs::path& init_dir, std::vector<SpectralField>& fields,
                     Eigen::VectorXd& a) {
  const json geom = json::parse(read_text_file(init_dir / "geometry.json"));
  a = vector_from_json(geom.at("a"));
  fields.clear();
  for (int i = 1;; ++i) {
    const fs::path header = init_dir / ("field_" + std::to_string(i) + ".json");
    if (!fs::exists(header)) break;
    fields.push_back(load_spectral_field(init_dir, "field_" + std::to_string(i)));
  }
  if (fields.empty())
    throw std::runtime_error("load_map_result: no fields in " + init_dir.string());
}

void run_mcmc(const fs::path& dir, const Manifest& manifest, const fs::path& init_dir,
              long samples, long burn_in) {
  const int chain_id = parse_trailing_index(init_dir.filename().string());
  const Eigen::VectorXd y = load_observations(dir);
  const Grid grid(manifest.inversion_mesh);
  const GeometryModel model = manifest.geometry();
  const auto priors = manifest.field_priors(manifest.inversion_mesh);
  const GeometricPrior geom_prior = GeometricPrior::standard(model);

  std::vector<SpectralField> fields;
  Eigen::VectorXd a;
  load_map_result(init_dir, fields, a);

  // the m_n library: every MAP result present, ordered by init id
  std::vector<Eigen::MatrixXd> library;
  std::vector<int> library_ids;
  for (const auto& d : sorted_indexed_dirs(dir / "map", "init_")) {
    std::vector<SpectralField> lf;
    Eigen::VectorXd la;
    load_map_result(d, lf, la);
    library.push_back(construct(lf, model, la, grid).values);
    library_ids.push_back(parse_trailing_index(d.filename().string()));
  }

  ForwardModel fm(grid, model, manifest.pde_problem(), manifest.observation_setup());
  McmcConfig config;
  config.n_samples = samples;
  config.burn_in = burn_in;
  config.beta = manifest.mcmc.beta;
  config.tau = McmcConfig::tau_from_width(geom_prior, manifest.mcmc.tau_scale);
  config.thin = manifest.mcmc.thin;

  Rng rng = seeded_rng(manifest.seed, "mcmc.chain." + std::to_string(chain_id));
  const ChainState init =
      make_chain_state(fields, a, model, grid, fm.potential_fn(y));
  const ChainOutput out = run_chain(init, fm.potential_fn(y), priors, geom_prior, model,
                                    grid, config, rng, library);

  const fs::path chain_dir = dir / "mcmc" / ("chain_" + std::to_string(chain_id));
  fs::create_directories(chain_dir / "states");
  {
    std::ostringstream s;
    s << "iter,phi\n";
    for (std::size_t i = 0; i < out.phi_trace.size(); ++i)
      s << i << "," << format_double(out.phi_trace[i]) << "\n";
    write_text_file(chain_dir / "phi_trace.csv", s.str());
  }
  if (!out.mn_trace.empty()) {
    std::ostringstream s;
    s << "iter,mn\n";
    for (std::size_t i = 0; i < out.mn_trace.size(); ++i)
      s << i << "," << out.mn_trace[i] << "\n";
    write_text_file(chain_dir / "mn_trace.csv", s.str());
    std::ostringstream lib;
    lib << "position,init\n";
    for (std::size_t i = 0; i < library_ids.size(); ++i)
      lib << i + 1 << "," << library_ids[i] << "\n";
    write_text_file(chain_dir / "library.csv", lib.str());
  }
  {
    json acc;
    acc["geometry"] = out.accept_geometry;
    acc["fields"] = std::vector<double>(out.accept_fields.data(),
                                        out.accept_fields.data() + out.accept_fields.size());
    write_text_file(chain_dir / "acceptance.json", acc.dump(2) + "\n");
  }
  save_csv_matrix(chain_dir / "conditional_mean.csv", out.conditional_mean);
  for (const auto& state : out.states) {
    char name[32];
    std::snprintf(name, sizeof(name), "state_%08ld.bin", state.iteration);
    save_state_bin(chain_dir / "states" / name, state.fields, state.a);
  }
  json info;
  info["chain"] = chain_id;
  info["init_dir"] = init_dir.filename().string();
  info["samples"] = samples;
  info["burnin"] = burn_in;
  info["beta"] = config.beta;
  info["tau"] = std::vector<double>(config.tau.data(), config.tau.data() + config.tau.size());
  info["thin"] = config.thin;
  write_text_file(chain_dir / "chain_info.json", info.dump(2) + "\n");
}

void run_analyze(const fs::path& dir, const Manifest& manifest, double cluster_threshold) {
  const Grid grid(manifest.inversion_mesh);
  const GeometryModel model = manifest.geometry();
  fs::create_directories(dir / "analysis");

  // truth restricted to the inversion grid (bilinear; plotting aid only, the
  // inference path never touches it)
  if (fs::exists(dir / "truth" / "u_a.csv")) {
    const Eigen::MatrixXd truth_ua = load_csv_matrix(dir / "truth" / "u_a.csv");
    const Grid truth_grid(static_cast<int>(truth_ua.rows()));
    Eigen::MatrixXd restricted(grid.n, grid.n);
    for (int iy = 0; iy < grid.n; ++iy)
      for (int ix = 0; ix < grid.n; ++ix)
        restricted(ix, iy) =
            interpolate(truth_grid, truth_ua, grid.coord(ix), grid.coord(iy));
    save_csv_matrix(dir / "analysis" / "truth_on_inversion_grid.csv", restricted);
  }

  const auto init_dirs = sorted_indexed_dirs(dir / "map", "init_");
  std::vector<Eigen::MatrixXd> library;
  std::vector<double> totals;
  std::vector<json> results;
  std::vector<Eigen::VectorXd> geoms;
  for (const auto& d : init_dirs) {
    std::vector<SpectralField> fields;
    Eigen::VectorXd a;
    load_map_result(d, fields, a);
    library.push_back(construct(fields, model, a, grid).values);
    geoms.push_back(a);
    results.push_back(json::parse(read_text_file(d / "result.json")));
    totals.push_back(results.back().at("total").get<double>());
  }

  if (!library.empty()) {
    const std::vector<int> labels =
        cluster_minimizers(library, totals, cluster_threshold, grid);
    std::ostringstream out;
    out << "init,phi,j,k,total,converged,class";
    for (Eigen::Index q = 0; q < geoms[0].size(); ++q) out << ",a" << q + 1;
    out << "\n";
    for (std::size_t i = 0; i < library.size(); ++i) {
      const auto& r = results[i];
      out << r.at("init").get<int>() << "," << format_double(r.at("phi").get<double>())
          << "," << format_double(r.at("j").get<double>()) << ","
          << format_double(r.at("k").get<double>()) << ","
          << format_double(r.at("total").get<double>()) << ","
          << (r.at("converged").get<bool>() ? 1 : 0) << "," << labels[i];
      for (Eigen::Index q = 0; q < geoms[i].size(); ++q)
        out << "," << format_double(geoms[i][q]);
      out << "\n";
    }
    write_text_file(dir / "analysis" / "minimizers.csv", out.str());

    const int n_classes = *std::max_element(labels.begin(), labels.end());
    std::ostringstream cls;
    cls << "class,size,best_init,best_total\n";
    for (int c = 1; c <= n_classes; ++c) {
      int size = 0, best_init = 0;
      double best_total = kInf;
      for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != c) continue;
        ++size;
        if (totals[i] < best_total) {
          best_total = totals[i];
          best_init = results[i].at("init").get<int>();
        }
      }
      cls << c << "," << size << "," << best_init << "," << format_double(best_total)
          << "\n";
    }
    write_text_file(dir / "analysis" / "classes.csv", cls.str());
  }

  // chain summaries, dwell fractions and gnuplot traces
  std::ostringstream chains;
  chains << "chain,samples,burnin,phi_mean_post,accept_geometry\n";
  std::ostringstream dwell;
  dwell << "chain,position,init,fraction\n";
  Eigen::MatrixXd cond_mean_sum;
  int cond_count = 0;
  for (const auto& d : sorted_indexed_dirs(dir / "mcmc", "chain_")) {
    const int chain_id = parse_trailing_index(d.filename().string());
    const json info = json::parse(read_text_file(d / "chain_info.json"));
    const long burn_in = info.at("burnin").get<long>();
    const json acc = json::parse(read_text_file(d / "acceptance.json"));

    std::ifstream phi_in(d / "phi_trace.csv");
    std::string line;
    std::getline(phi_in, line);  // header
    std::vector<double> phis;
    std::ostringstream gnuplot;
    gnuplot << "# iter phi\n";
    while (std::getline(phi_in, line)) {
      const auto comma = line.find(',');
      const long iter = std::stol(line.substr(0, comma));
      const double phi = std::stod(line.substr(comma + 1));
      gnuplot << iter << " " << format_double(phi) << "\n";
      if (iter > burn_in) phis.push_back(phi);
    }
    write_text_file(dir / "analysis" / ("phi_trace_chain_" + std::to_string(chain_id) + ".dat"),
                    gnuplot.str());
    const double phi_mean =
        phis.empty() ? 0.0
                     : std::accumulate(phis.begin(), phis.end(), 0.0) / phis.size();
    chains << chain_id << "," << info.at("samples").get<long>() << "," << burn_in << ","
           << format_double(phi_mean) << ","
           << format_double(acc.at("geometry").get<double>()) << "\n";

    if (fs::exists(d / "mn_trace.csv")) {
      std::ifstream mn_in(d / "mn_trace.csv");
      std::getline(mn_in, line);
      std::map<int, long> counts;
      long total = 0;
      std::ostringstream mn_gnuplot;
      mn_gnuplot << "# iter mn\n";
      while (std::getline(mn_in, line)) {
        const auto comma = line.find(',');
        const long iter = std::stol(line.substr(0, comma));
        const int mn = std::stoi(line.substr(comma + 1));
        mn_gnuplot << iter << " " << mn << "\n";
        if (iter > burn_in) {
          ++counts[mn];
          ++total;
        }
      }
      write_text_file(dir / "analysis" / ("mn_trace_chain_" + std::to_string(chain_id) + ".dat"),
                      mn_gnuplot.str());
      std::map<int, int> position_init;
      if (fs::exists(d / "library.csv")) {
        std::ifstream lib_in(d / "library.csv");
        std::getline(lib_in, line);
        while (std::getline(lib_in, line)) {
          const auto comma = line.find(',');
          position_init[std::stoi(line.substr(0, comma))] =
              std::stoi(line.substr(comma + 1));
        }
      }
      for (const auto& [mn, count] : counts)
        dwell << chain_id << "," << mn << ","
              << (position_init.count(mn) ? position_init[mn] : mn) << ","
              << format_double(double(count) / double(total)) << "\n";
    }

    const Eigen::MatrixXd cm = load_csv_matrix(d / "conditional_mean.csv");
    if (cond_count == 0) cond_mean_sum = cm;
    else cond_mean_sum += cm;
    ++cond_count;
  }
  write_text_file(dir / "analysis" / "chains.csv", chains.str());
  write_text_file(dir / "analysis" / "dwell.csv", dwell.str());
  if (cond_count > 0)
    save_csv_matrix(dir / "analysis" / "conditional_mean_avg.csv",
                    cond_mean_sum / double(cond_count));
}

}  // namespace pwdarcy

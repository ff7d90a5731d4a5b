#include "unwind/sweep.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <thread>

#include "unwind/superop.hpp"

namespace unwind {

namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::ConfigInvalid, what);
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) invalid("unknown key '" + it.key() + "' in " + where);
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    invalid(std::string("bad value for '") + key + "': " + e.what());
  }
}

Pauli parse_axis_label(const std::string& s) {
  if (s == "x") return Pauli::X;
  if (s == "y") return Pauli::Y;
  if (s == "z") return Pauli::Z;
  invalid("dissipator axis must be x, y or z");
}

Axis parse_axis(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc.at(key).is_object()) invalid(std::string("missing axis '") + key + "'");
  const json& a = doc.at(key);
  reject_unknown(a, {"name", "min", "max", "count", "scale"}, key);
  Axis axis;
  axis.name = get_or<std::string>(a, "name", "");
  axis.min = get_or<double>(a, "min", 0.0);
  axis.max = get_or<double>(a, "max", 0.0);
  axis.count = get_or<int>(a, "count", 0);
  const std::string scale = get_or<std::string>(a, "scale", "linear");
  static const std::set<std::string> names = {"E", "omega", "w", "inv_T", "gamma", "lambda"};
  if (!names.count(axis.name)) invalid(std::string(key) + ".name must be one of E, omega, w, inv_T, gamma, lambda");
  if (axis.count < 1) invalid(std::string(key) + ".count must be >= 1");
  if (!(axis.min < axis.max)) invalid(std::string(key) + ".min must be below max");
  if (scale != "linear") invalid(std::string(key) + ".scale must be linear");
  return axis;
}

void apply_axis(const std::string& name, double value, ModelKind kind, SpinChainParams& chain,
                MixtureParams& mixture) {
  if (name == "E") chain.drive = value;
  else if (name == "omega") chain.omega = value;
  else if (name == "w") chain.coupling = value;
  else if (name == "gamma") chain.gamma = value;
  else if (name == "lambda") mixture.lambda = value;
  else if (name == "inv_T") {
    if (kind == ModelKind::SpinChain) chain.omega = 2.0 * M_PI * value;
    else mixture.inv_period = value;
  }
}

}  // namespace

double Axis::value(int index) const {
  if (count == 1) return min;
  return min + (max - min) * static_cast<double>(index) / static_cast<double>(count - 1);
}

SweepConfig parse_config(const json& doc) {
  if (!doc.is_object()) invalid("config must be a JSON object");
  reject_unknown(doc, {"model", "axis1", "axis2", "methods", "numerics", "output", "workers"}, "config");
  SweepConfig cfg;
  cfg.source = doc;

  if (!doc.contains("model") || !doc.at("model").is_object()) invalid("missing model section");
  const json& m = doc.at("model");
  reject_unknown(m, {"kind", "L", "deltas", "w", "E", "omega", "gamma", "temperature", "lambda", "inv_T", "axes"},
                 "model");
  const std::string kind = get_or<std::string>(m, "kind", "spin_chain");
  if (kind == "spin_chain") cfg.model = ModelKind::SpinChain;
  else if (kind == "convex_mixture") cfg.model = ModelKind::ConvexMixture;
  else invalid("model.kind must be spin_chain or convex_mixture");

  cfg.chain.n_sites = get_or<int>(m, "L", 2);
  if (cfg.chain.n_sites < 1 || cfg.chain.n_sites > 6) invalid("model.L must lie in 1..6");
  cfg.chain.deltas = get_or<std::vector<double>>(m, "deltas", {});
  if (static_cast<int>(cfg.chain.deltas.size()) != cfg.chain.n_sites) invalid("model.deltas needs L entries");
  cfg.chain.coupling = get_or<double>(m, "w", 0.0);
  cfg.chain.drive = get_or<double>(m, "E", 0.0);
  cfg.chain.omega = get_or<double>(m, "omega", 1.0);
  cfg.chain.gamma = get_or<double>(m, "gamma", 0.0);
  cfg.chain.temperature = get_or<double>(m, "temperature", 1.0);
  cfg.mixture.lambda = get_or<double>(m, "lambda", 0.5);
  cfg.mixture.inv_period = get_or<double>(m, "inv_T", 1.0);
  const auto axes = get_or<std::vector<std::string>>(m, "axes", {"x", "y"});
  if (axes.size() != 2) invalid("model.axes needs two entries");
  cfg.mixture.first = parse_axis_label(axes[0]);
  cfg.mixture.second = parse_axis_label(axes[1]);
  if (cfg.chain.gamma < 0.0) invalid("model.gamma must be nonnegative");
  if (!(cfg.chain.temperature > 0.0)) invalid("model.temperature must be positive");

  cfg.axis1 = parse_axis(doc, "axis1");
  cfg.axis2 = parse_axis(doc, "axis2");
  if (cfg.axis1.name == cfg.axis2.name) invalid("axis1 and axis2 must differ");
  const std::set<std::string> chain_axes = {"E", "omega", "w", "inv_T", "gamma"};
  const std::set<std::string> mixture_axes = {"w", "inv_T", "gamma", "lambda"};
  for (const Axis* a : {&cfg.axis1, &cfg.axis2}) {
    const auto& allowed = cfg.model == ModelKind::SpinChain ? chain_axes : mixture_axes;
    if (!allowed.count(a->name)) invalid("axis '" + a->name + "' does not apply to model " + kind);
    if (a->name == "lambda" && (a->min < 0.0 || a->max > 1.0)) invalid("lambda axis must stay in [0, 1]");
    if ((a->name == "omega" || a->name == "inv_T") && a->min <= 0.0) invalid(a->name + " axis must be positive");
    if (a->name == "gamma" && a->min < 0.0) invalid("gamma axis must be nonnegative");
  }
  const std::set<std::string> picked = {cfg.axis1.name, cfg.axis2.name};
  if (picked.count("omega") && picked.count("inv_T")) invalid("omega and inv_T both set the period");

  if (!doc.contains("methods")) invalid("missing methods");
  const json& meth = doc.at("methods");
  json methods_obj = json::object();
  if (meth.is_array()) {
    for (const auto& n : meth) {
      if (!n.is_string()) invalid("methods array must hold names");
      methods_obj[n.get<std::string>()] = json::object();
    }
  } else if (meth.is_object()) {
    methods_obj = meth;
  } else {
    invalid("methods must be an array or object");
  }
  reject_unknown(methods_obj, {"principal", "unwound", "modified", "standard"}, "methods");
  if (methods_obj.empty()) invalid("method list must be nonempty");
  cfg.principal = methods_obj.contains("principal");
  cfg.unwound = methods_obj.contains("unwound");
  if (methods_obj.contains("modified")) {
    const json& p = methods_obj.at("modified");
    reject_unknown(p, {"eta", "N_b", "budget"}, "methods.modified");
    ModifiedParams mp;
    mp.eta = get_or<double>(p, "eta", mp.eta);
    mp.n_b = get_or<int>(p, "N_b", mp.n_b);
    mp.budget = get_or<double>(p, "budget", mp.budget);
    if (!(mp.eta >= 0.0 && mp.eta <= 1.0)) invalid("methods.modified.eta must lie in [0, 1]");
    if (mp.n_b < 0) invalid("methods.modified.N_b must be nonnegative");
    cfg.modified = mp;
  }
  if (methods_obj.contains("standard")) {
    const json& p = methods_obj.at("standard");
    reject_unknown(p, {"radius", "budget"}, "methods.standard");
    StandardParams sp;
    sp.radius = get_or<int>(p, "radius", sp.radius);
    sp.budget = get_or<double>(p, "budget", sp.budget);
    if (sp.radius < 0) invalid("methods.standard.radius must be nonnegative");
    cfg.standard = sp;
  }

  if (doc.contains("numerics")) {
    const json& n = doc.at("numerics");
    reject_unknown(n, {"n_steps", "n_t", "tol_ccp", "tol_pair", "cond_max", "x_cap"}, "numerics");
    cfg.numerics.n_steps = get_or<int>(n, "n_steps", cfg.numerics.n_steps);
    cfg.numerics.n_t = get_or<int>(n, "n_t", cfg.numerics.n_t);
    cfg.numerics.tol_ccp = get_or<double>(n, "tol_ccp", cfg.numerics.tol_ccp);
    cfg.numerics.tol_pair = get_or<double>(n, "tol_pair", cfg.numerics.tol_pair);
    cfg.numerics.cond_max = get_or<double>(n, "cond_max", cfg.numerics.cond_max);
    cfg.numerics.x_cap = get_or<int>(n, "x_cap", cfg.numerics.x_cap);
  }
  if (cfg.numerics.n_t < 2 || cfg.numerics.n_steps < 1 || cfg.numerics.n_steps % cfg.numerics.n_t != 0)
    invalid("numerics.n_steps must be a positive multiple of numerics.n_t >= 2");
  if (!(cfg.numerics.tol_pair > 0.0) || !(cfg.numerics.cond_max > 1.0) || cfg.numerics.x_cap < 1)
    invalid("numerics tolerances out of range");

  if (doc.contains("output")) {
    const json& o = doc.at("output");
    reject_unknown(o, {"path", "format", "timing"}, "output");
    cfg.output_path = get_or<std::string>(o, "path", "");
    cfg.format = get_or<std::string>(o, "format", "csv");
    cfg.record_timing = get_or<bool>(o, "timing", true);
  }
  if (cfg.format != "csv") invalid("output.format must be csv");
  cfg.workers = get_or<int>(doc, "workers", 1);
  if (cfg.workers < 0) invalid("workers must be >= 0");

  point_params(cfg, 0, 0).chain.validate();
  return cfg;
}

SweepConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) invalid("cannot open config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    invalid(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

std::uint64_t config_hash(const SweepConfig& config) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : config.source.dump()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

PointParams point_params(const SweepConfig& config, int i, int j) {
  if (i < 0 || i >= config.axis1.count || j < 0 || j >= config.axis2.count)
    throw Error(ErrorCode::IndexOutOfRange, "grid index outside the configured axes");
  PointParams p{config.chain, config.mixture, 0.0};
  apply_axis(config.axis1.name, config.axis1.value(i), config.model, p.chain, p.mixture);
  apply_axis(config.axis2.name, config.axis2.value(j), config.model, p.chain, p.mixture);
  p.period = config.model == ModelKind::SpinChain ? p.chain.period() : 1.0 / p.mixture.inv_period;
  return p;
}

SampledMap build_sampled_map(const SweepConfig& config, const PointParams& params) {
  if (config.model == ModelKind::SpinChain) {
    const PeriodicLindbladian generator(params.chain);
    PropagationOptions opts;
    opts.n_t = config.numerics.n_t;
    opts.n_steps = config.numerics.n_steps;
    return propagate_periodic(std::cref(generator), params.period, opts);
  }
  const auto [first, second] = sm_static_pair(params.chain, params.mixture.first, params.mixture.second);
  return convex_mixture_map(first, second, params.mixture.lambda, params.period, config.numerics.n_t);
}

EvaluationConfig evaluation_config(const SweepConfig& config) {
  EvaluationConfig ec;
  ec.principal = config.principal;
  ec.unwound = config.unwound;
  ec.modified = config.modified;
  ec.standard = config.standard;
  ec.spectrum.tol_pair = config.numerics.tol_pair;
  ec.spectrum.cond_max = config.numerics.cond_max;
  ec.tol_ccp = config.numerics.tol_ccp;
  ec.x_cap = config.numerics.x_cap;
  return ec;
}

PointRecord evaluate_grid_point(const SweepConfig& config, int i, int j) {
  const auto start = std::chrono::steady_clock::now();
  PointRecord rec;
  rec.idx1 = i;
  rec.idx2 = j;
  rec.value1 = config.axis1.value(i);
  rec.value2 = config.axis2.value(j);
  try {
    const PointParams params = point_params(config, i, j);
    const SampledMap sampled = build_sampled_map(config, params);
    const MarkovianityReport report = evaluate_point(sampled, evaluation_config(config));
    rec.n_c = report.n_c;
    rec.status = report.status;
    rec.message = report.message;
    rec.methods = report.methods;
    rec.mu_min = report.mu;
    rec.nu_min = report.nu;
    rec.best_branch = report.best_branch;
  } catch (const Error& e) {
    rec.status = status_from_error(e.code());
    rec.message = e.what();
  } catch (const std::exception& e) {
    rec.status = PointStatus::Failed;
    rec.message = e.what();
  }
  rec.seconds = config.record_timing
                    ? std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()
                    : 0.0;
  return rec;
}

int resolve_workers(const SweepConfig& config) {
  int workers = config.workers;
  if (const char* env = std::getenv("UNWIND_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 0) workers = static_cast<int>(v);
  }
  if (workers == 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return std::max(1, workers);
}

std::vector<PointRecord> run_grid(const SweepConfig& config, int workers) {
  const int n1 = config.axis1.count;
  const int n2 = config.axis2.count;
  const int total = n1 * n2;
  std::vector<PointRecord> records(static_cast<std::size_t>(total));
  std::atomic<int> next{0};
  auto work = [&] {
    for (int k = next.fetch_add(1); k < total; k = next.fetch_add(1))
      records[static_cast<std::size_t>(k)] = evaluate_grid_point(config, k / n2, k % n2);
  };
  workers = std::max(1, std::min(workers, total));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return records;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

const std::vector<std::string>& csv_columns(const SweepConfig& config) {
  thread_local std::vector<std::string> cols;
  cols = {"idx1", "idx2", config.axis1.name, config.axis2.name, "n_c", "status",
          "mu_principal", "nu_principal", "mu_unwound", "nu_unwound", "mu_modified", "nu_modified",
          "card_modified", "mu_standard", "card_standard", "mu_min", "nu_min", "best_branch", "seconds"};
  return cols;
}

void write_csv_header(std::ostream& out, const SweepConfig& config, const std::string& timestamp) {
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(config_hash(config)));
  const double tol_ccp = config.numerics.tol_ccp;
  out << "# unwind sweep\n";
  out << "# config_hash: " << hash << "\n";
  out << "# config: " << config.source.dump() << "\n";
  out << "# timestamp: " << timestamp << "\n";
  out << "# model: " << (config.model == ModelKind::SpinChain ? "spin_chain" : "convex_mixture") << "\n";
  out << "# numerics: n_steps=" << config.numerics.n_steps << " n_t=" << config.numerics.n_t
      << " tol_ccp=" << (tol_ccp < 0.0 ? std::string("1e-9*d") : format_double(tol_ccp))
      << " tol_pair=" << format_double(config.numerics.tol_pair)
      << " cond_max=" << format_double(config.numerics.cond_max) << " x_cap=" << config.numerics.x_cap << "\n";
  out << "# conventions: vec row-major |i><j| -> i*d+j; Omega = i log(lambda)/T; "
         "branch shift +i(2pi/T)x on the Im(lambda)>0 member of each pair; site 1 most significant\n";
  out << "# integrator: commutator-free Magnus order 4, Gauss-Legendre nodes\n";
  out << "# dissipator: quantum-optical jumps include k=q terms with g(0)=T\n";
  out << "# mu: max(0, -d * lambda_min) per candidate; nu: trace norm of projected Choi matrix\n";
  const auto& cols = csv_columns(config);
  for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
  out << "\n";
}

void write_csv_row(std::ostream& out, const PointRecord& r) {
  const bool ok = r.status == PointStatus::Ok;
  auto method = [&](Method m) -> const MethodResult* {
    if (!ok) return nullptr;
    for (const auto& x : r.methods)
      if (x.method == m && x.evaluated) return &x;
    return nullptr;
  };
  auto num = [](const MethodResult* m, double MethodResult::*field) {
    return m ? format_double(m->*field) : std::string();
  };
  auto card = [](const MethodResult* m) { return m ? std::to_string(m->cardinality) : std::string(); };
  const MethodResult* p = method(Method::Principal);
  const MethodResult* u = method(Method::Unwound);
  const MethodResult* mo = method(Method::Modified);
  const MethodResult* s = method(Method::Standard);
  out << r.idx1 << ',' << r.idx2 << ',' << format_double(r.value1) << ',' << format_double(r.value2) << ','
      << r.n_c << ',' << to_string(r.status) << ',' << num(p, &MethodResult::mu) << ','
      << num(p, &MethodResult::nu) << ',' << num(u, &MethodResult::mu) << ',' << num(u, &MethodResult::nu)
      << ',' << num(mo, &MethodResult::mu) << ',' << num(mo, &MethodResult::nu) << ',' << card(mo) << ','
      << num(s, &MethodResult::mu) << ',' << card(s) << ',' << (ok ? format_double(r.mu_min) : "") << ','
      << (ok ? format_double(r.nu_min) : "") << ',' << (ok ? r.best_branch.str() : "") << ','
      << format_double(r.seconds) << "\n";
}

bool records_consistent(const std::vector<PointRecord>& records) {
  for (const auto& r : records) {
    if (r.status != PointStatus::Ok) continue;
    bool any = false;
    double best = 0.0;
    for (const auto& m : r.methods) {
      if (!m.evaluated) continue;
      best = any ? std::min(best, m.mu) : m.mu;
      any = true;
    }
    if (!any || best != r.mu_min) return false;
  }
  return true;
}

int run_sweep(const SweepConfig& config) {
  const auto records = run_grid(config, resolve_workers(config));
  if (!records_consistent(records))
    std::cerr << "warning: mu_min column disagrees with the per-method minimum\n";

  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char stamp[64];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!config.output_path.empty() && config.output_path != "-") {
    file.open(config.output_path);
    if (!file) throw Error(ErrorCode::ConfigInvalid, "cannot open output file " + config.output_path);
    out = &file;
  }
  write_csv_header(*out, config, stamp);
  std::size_t failed = 0;
  for (const auto& r : records) {
    write_csv_row(*out, r);
    if (r.status != PointStatus::Ok) ++failed;
  }
  out->flush();
  return failed == records.size() ? 3 : 0;
}

namespace {

json complex_json(cplx z) {
  return json::array({z.real(), z.imag()});
}

}  // namespace

json point_report(const SweepConfig& config, int i, int j, std::size_t max_candidates) {
  const PointParams params = point_params(config, i, j);
  json doc;
  doc["point"] = {{"idx1", i},
                  {"idx2", j},
                  {config.axis1.name, config.axis1.value(i)},
                  {config.axis2.name, config.axis2.value(j)},
                  {"period", params.period}};

  EvaluationConfig ec = evaluation_config(config);
  ec.keep_candidates = true;
  MarkovianityReport report;
  try {
    const SampledMap sampled = build_sampled_map(config, params);
    report = evaluate_point(sampled, ec);
  } catch (const Error& e) {
    report.status = status_from_error(e.code());
    report.message = e.what();
  }
  doc["status"] = std::string(to_string(report.status));
  doc["message"] = report.message;
  doc["d"] = report.d;
  doc["n_c"] = report.n_c;
  doc["tol_ccp"] = report.tol_ccp;

  if (report.spectrum) {
    const ChannelSpectrum& spec = *report.spectrum;
    json eig = json::array();
    for (Eigen::Index k = 0; k < spec.values.size(); ++k) eig.push_back(complex_json(spec.values(k)));
    doc["eigenvalues"] = eig;
    json pairs = json::array();
    for (int c = 0; c < spec.n_c(); ++c) {
      const int rep = spec.pairs[static_cast<std::size_t>(c)];
      pairs.push_back({{"c", c},
                       {"index", rep},
                       {"partner", spec.partner[static_cast<std::size_t>(rep)]},
                       {"lambda", complex_json(spec.values(rep))},
                       {"Omega", complex_json(spec.quasienergy(rep, params.period))}});
    }
    doc["pairs"] = pairs;
  }
  if (report.profile) {
    json fourier = json::array();
    for (std::size_t c = 0; c < report.profile->pairs.size(); ++c) {
      json peaks = json::array();
      const auto& ranked = report.profile->pairs[c].ranked;
      for (std::size_t k = 0; k < std::min<std::size_t>(5, ranked.size()); ++k)
        peaks.push_back({{"n", ranked[k].harmonic}, {"amplitude", ranked[k].amplitude}});
      fourier.push_back({{"c", c}, {"peaks", peaks}});
    }
    doc["fourier"] = fourier;
    doc["x_max"] = report.x_max.shifts;
  }
  if (config.modified && report.ok()) {
    doc["modified"] = {{"eta", config.modified->eta},
                       {"N_b", config.modified->n_b},
                       {"z", report.z},
                       {"n_tilde", report.n_tilde}};
  }
  json methods = json::array();
  for (const auto& m : report.methods) {
    json e = {{"method", std::string(to_string(m.method))}, {"evaluated", m.evaluated}};
    if (m.evaluated) {
      e["mu"] = m.mu;
      e["nu"] = m.nu;
      e["ccp_min_eigenvalue"] = m.ccp_min_eigenvalue;
      e["cardinality"] = m.cardinality;
      e["best_branch"] = m.best_branch.shifts;
    } else {
      e["note"] = m.note;
    }
    methods.push_back(e);
  }
  doc["methods"] = methods;
  json cands = json::array();
  for (std::size_t k = 0; k < std::min(max_candidates, report.candidates.size()); ++k) {
    const auto& c = report.candidates[k];
    cands.push_back({{"method", std::string(to_string(c.method))},
                     {"branch", c.branch.shifts},
                     {"mu", c.score.mu},
                     {"nu", c.score.nu},
                     {"ccp_min_eigenvalue", c.score.ccp_min_eigenvalue}});
  }
  doc["candidates"] = cands;
  doc["candidates_truncated"] = report.candidates.size() > max_candidates;
  if (report.ok()) {
    doc["mu"] = report.mu;
    doc["nu"] = report.nu;
    doc["best_branch"] = report.best_branch.shifts;
  }
  return doc;
}

}  // namespace unwind

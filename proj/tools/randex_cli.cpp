// Command-line front end: certified rate surfaces, asymptotic and finite-size
// expansion rates, protocol simulation, min-tradeoff fitting, and seeded
// extraction. CSV/JSON artifact formats are documented in the README.

#include <CLI11.hpp>
#include <json.hpp>

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "randex/envelope.hpp"
#include "randex/extractor.hpp"
#include "randex/qubit_bound.hpp"
#include "randex/rates.hpp"
#include "randex/simulate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace randex;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAbort = 2;
constexpr int kExitConfig = 3;
constexpr int kExitNonConverged = 4;

json load_config(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i + 1 < args.size(); ++i)
    if (args[i] == "--config") {
      std::ifstream in(args[i + 1]);
      if (!in) throw std::runtime_error("cannot open config " + args[i + 1]);
      json j;
      in >> j;
      if (!j.is_object()) throw std::runtime_error("config must be a flat JSON object");
      return j;
    }
  return json::object();
}

template <typename T>
T cfg(const json& c, const std::string& key, T fallback) {
  if (c.contains(key)) return c.at(key).get<T>();
  return fallback;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

struct EnvelopeRequest {
  double p0 = 0.5;
  int grid_n = 51;
  double tol = 1e-3;
  bool exact_objective = true;
  int order = 8;

  json describe() const {
    return {{"p0", p0},          {"grid_n", grid_n}, {"tol", tol},
            {"exact", exact_objective}, {"order", order},  {"domain", "[0.5,1]^2"}};
  }
  std::string cache_key() const { return "env_" + std::to_string(fnv1a(describe().dump())); }
};

// Build (or load from cache) the certified surface and its envelope.
std::pair<RateSurface, ConvexEnvelope> obtain_envelope(const EnvelopeRequest& req,
                                                       const std::string& cache_dir,
                                                       bool use_cache) {
  fs::path cache_file;
  if (use_cache && !cache_dir.empty()) {
    fs::create_directories(cache_dir);
    cache_file = fs::path(cache_dir) / (req.cache_key() + ".json");
    if (fs::exists(cache_file)) {
      std::ifstream in(cache_file);
      json j;
      in >> j;
      RateSurface s;
      s.grid.axes = {j.at("omega_axis").get<std::vector<double>>(),
                     j.at("theta_axis").get<std::vector<double>>()};
      s.values = j.at("values").get<std::vector<double>>();
      for (auto& v : s.values)
        if (v < 0) v = kInf;  // serialized sentinel for unreachable points
      s.p0 = j.at("p0").get<double>();
      for (int f : j.at("flags")) s.flags.push_back(static_cast<PointFlag>(f));
      auto env = envelope_from_json(j.at("envelope"));
      std::fprintf(stderr, "[randex] envelope cache hit: %s\n", cache_file.string().c_str());
      return {std::move(s), std::move(env)};
    }
  }
  SurfaceConfig cfg;
  cfg.bound.tol = req.tol;
  cfg.bound.exact_objective = req.exact_objective;
  cfg.bound.order = req.order;
  auto grid = uniform_grid({{0.5, 1.0}, {0.5, 1.0}}, static_cast<std::size_t>(req.grid_n));
  auto [surface, env] = build_rate_surface(req.p0, grid, cfg);
  if (use_cache && !cache_file.empty()) {
    json values = json::array();
    for (double v : surface.values) values.push_back(std::isfinite(v) ? v : -1.0);
    json flags = json::array();
    for (auto f : surface.flags) flags.push_back(static_cast<int>(f));
    json j = {{"omega_axis", surface.grid.axes[0]},
              {"theta_axis", surface.grid.axes[1]},
              {"p0", surface.p0},
              {"solver", req.describe()},
              {"values", values},
              {"flags", flags},
              {"envelope", envelope_to_json(env)}};
    std::ofstream out(cache_file);
    out << j.dump();
  }
  return {surface, env};
}

std::vector<double> parse_list(const std::string& csv) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    std::size_t comma = csv.find(',', pos);
    if (comma == std::string::npos) comma = csv.size();
    out.push_back(std::stod(csv.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

std::uint64_t resolve_seed(bool seed_set, std::uint64_t seed) {
  if (seed_set) return seed;
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

int cmd_gfunc(const EnvelopeRequest& req, BoundMode mode, const std::string& out_path) {
  BoundOptions opt;
  opt.tol = req.tol;
  opt.exact_objective = req.exact_objective;
  opt.order = req.order;
  opt.mode = mode;
  auto grid = uniform_grid({{0.5, 1.0}, {0.5, 1.0}}, static_cast<std::size_t>(req.grid_n));

  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open " + out_path);
  out << "omega,theta,value,feasible\n";
  out.precision(12);
  bool nonconverged = false;
  for (double w : grid.axes[0])
    for (double t : grid.axes[1]) {
      auto r = round_entropy_bound({w, t, req.p0}, opt);
      double value = (mode == BoundMode::heuristic)
                         ? (r.has_witness ? r.witness_value : kInf)
                         : r.certified_lower;
      nonconverged |= !r.converged;
      out << w << ',' << t << ',';
      if (r.infeasible) out << "inf";
      else out << value;
      out << ',' << (r.infeasible ? 0 : 1) << '\n';
    }
  return nonconverged ? kExitNonConverged : kExitOk;
}

int cmd_rates(const EnvelopeRequest& req, const std::string& cache_dir, bool use_cache,
              double gamma, const std::vector<double>& thetas, int omega_steps,
              const std::vector<std::string>& kinds, const std::string& out_path) {
  auto [surface, env] = obtain_envelope(req, cache_dir, use_cache);
  write_surface_csv(surface, out_path + ".surface.csv");
  write_surface_meta(surface, env, req.describe(), out_path + ".meta.json");
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open " + out_path);
  out << "omega,theta,protocol,rate\n";
  out.precision(12);
  for (const auto& kind_name : kinds) {
    RateKind kind;
    if (kind_name == "r1") kind = RateKind::r1;
    else if (kind_name == "r1_noT") kind = RateKind::r1_noT;
    else if (kind_name == "r2_cert") kind = RateKind::r2_cert;
    else if (kind_name == "r2_expansion") kind = RateKind::r2_expansion;
    else throw std::invalid_argument("unknown protocol rate: " + kind_name);
    for (double t : thetas)
      for (int i = 0; i < omega_steps; ++i) {
        double w = 0.5 + 0.5 * static_cast<double>(i) / (omega_steps - 1);
        // beyond the quantum boundary no strategy exists; the curve saturates
        double w_eval = std::min(w, quantum_max_score(t));
        out << w << ',' << t << ',' << kind_name << ','
            << asymptotic_rate(kind, env, w_eval, t, gamma, req.p0) << '\n';
      }
  }
  return kExitOk;
}

int cmd_finite(const EnvelopeRequest& req, const std::string& cache_dir, bool use_cache,
               ProtocolParams base, double eps_ext, double n_min, double n_max, int n_points,
               const std::string& out_path) {
  auto [surface, env] = obtain_envelope(req, cache_dir, use_cache);
  (void)surface;
  std::vector<double> ns;
  for (int i = 0; i < n_points; ++i) {
    double f = static_cast<double>(i) / (n_points - 1);
    ns.push_back(std::round(n_min * std::pow(n_max / n_min, f)));
  }
  auto curve = expansion_curve(base, ns, env, eps_ext);

  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open " + out_path);
  out << "n,gamma,net_rate\n";
  out.precision(12);
  double crossover = -1.0;
  for (const auto& pt : curve) {
    out << pt.n << ',' << base.gamma << ',' << (pt.ok ? pt.rate_net : -kInf) << '\n';
    if (crossover < 0 && pt.ok && pt.rate_net > 0) crossover = pt.n;
  }
  out << "# crossover_n=" << crossover << '\n';
  write_expansion_csv(curve, out_path + ".detail.csv");
  return kExitOk;
}

int cmd_simulate(const ProtocolParams& params, const DeviceModel& model, bool seed_set,
                 std::uint64_t seed_in, const std::string& out_path) {
  std::uint64_t seed = resolve_seed(seed_set, seed_in);
  auto result = run_protocol(params, model, seed);
  write_transcript_csv(result.transcript, out_path);

  json counts = json::array();
  for (int t = 0; t < 2; ++t)
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y)
        counts.push_back({{"t", t}, {"x", x}, {"y", y}, {"count", result.scores.counts[t][x][y]}});
  json summary = {{"seed", seed},
                  {"n", params.n},
                  {"p0", params.p0},
                  {"gamma", params.gamma},
                  {"theta_exp", params.theta_exp},
                  {"delta_theta", params.delta_theta},
                  {"omega_exp", params.omega_exp},
                  {"delta_omega", params.delta_omega},
                  {"theta_hash", result.scores.theta_hash},
                  {"omega_hash", result.scores.omega_hash},
                  {"aborted", result.aborted},
                  {"abort_reason",
                   result.aborted
                       ? (result.scores.theta_hash < params.theta_exp - params.delta_theta
                              ? "overlap below threshold"
                              : "score below threshold")
                       : ""},
                  {"counts", counts}};
  std::ofstream sum(out_path + ".summary.json");
  sum << summary.dump(2) << '\n';
  std::fprintf(stderr, "[randex] simulate: seed=%" PRIu64 " theta#=%.5f omega#=%.5f%s\n", seed,
               result.scores.theta_hash, result.scores.omega_hash,
               result.aborted ? " ABORTED" : "");
  return result.aborted ? kExitAbort : kExitOk;
}

int cmd_extract(const std::string& transcript_path, const std::string& bits_path,
                Protocol protocol, double h_min, long m_explicit, double eps_ext, bool seed_set,
                std::uint64_t seed_in, const std::string& seed_file,
                const std::string& out_path) {
  BitString input;
  if (!transcript_path.empty()) {
    auto transcript = read_transcript_csv(transcript_path);
    for (const auto& r : transcript) {
      if (protocol == Protocol::recycling) {
        input.bits.push_back(r.t);
        input.bits.push_back(r.x);
      }
      input.bits.push_back(r.y);
    }
  } else {
    input = read_bits(bits_path);
  }

  std::size_t m;
  if (m_explicit >= 0) {
    m = static_cast<std::size_t>(m_explicit);
  } else {
    long len = output_length(h_min, eps_ext);
    m = std::min<std::size_t>(input.size(), static_cast<std::size_t>(std::max(0L, len)));
  }

  BitString seed;
  std::string seed_source;
  if (!seed_file.empty()) {
    seed = read_bits(seed_file);
    seed_source = seed_file;
  } else {
    SplitMix64 rng(resolve_seed(seed_set, seed_in));
    seed.bits.resize(blocked_seed_length(input.size(), m));
    for (auto& b : seed.bits) b = rng.next_bit() ? 1 : 0;
    write_bits(seed, out_path + ".seed.bin");
    seed_source = out_path + ".seed.bin";
  }
  if (m > 0 && seed.size() != blocked_seed_length(input.size(), m))
    throw std::invalid_argument("extract: seed length mismatch");

  BitString output = m == 0 ? BitString{} : toeplitz_extract_blocked(input, seed, m);
  write_bits(output, out_path);
  json summary = {{"input_bits", input.size()},
                  {"output_bits", output.size()},
                  {"seed_bits", seed.size()},
                  {"seed_file", seed_source},
                  {"eps_ext", eps_ext}};
  std::ofstream sum(out_path + ".summary.json");
  sum << summary.dump(2) << '\n';
  std::fprintf(stderr, "[randex] extract: %zu -> %zu bits\n", input.size(), output.size());
  return kExitOk;
}

int cmd_tradeoff(const EnvelopeRequest& req, const std::string& cache_dir, bool use_cache,
                 ProtocolParams params, double eps_ext, const std::string& out_path) {
  auto [surface, env] = obtain_envelope(req, cache_dir, use_cache);
  (void)surface;
  double wstar = params.omega_exp - params.delta_omega;
  double tstar = params.theta_exp - params.delta_theta;
  auto grid = detail_rates::tradeoff_grid(env, params.gamma, wstar, tstar);
  auto f = fit_min_tradeoff(grid, {params.gamma, wstar, tstar});
  double hmin = eat_min_entropy(params, f);
  json report = {{"c", {f.c[0], f.c[1], f.c[2]}},
                 {"d", f.d},
                 {"fit_value", f.fit_value},
                 {"max_f", f.max_f},
                 {"min_q_f", f.min_q_f},
                 {"min_box_f", f.min_box_f},
                 {"var_bound", f.var_bound},
                 {"observed", {params.gamma, wstar, tstar}},
                 {"n", params.n},
                 {"eps_s", params.eps_s},
                 {"h_min", hmin},
                 {"extractable_bits", hmin > 0 ? output_length(hmin, eps_ext) : 0}};
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open " + out_path);
  out << report.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> raw_args(argv + 1, argv + argc);
  json config;
  try {
    config = load_config(raw_args);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "[randex] config error: %s\n", e.what());
    return kExitConfig;
  }

  CLI::App app{"certified randomness-expansion rates for overlap-tested prepare-and-measure protocols"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "flat JSON key-value configuration file");

  // shared knobs, seeded from the config file; flags override
  EnvelopeRequest req;
  req.p0 = cfg(config, "p0", 0.5);
  req.grid_n = cfg(config, "grid", 51);
  req.tol = cfg(config, "tol", 1e-3);
  req.order = cfg(config, "order", 8);
  std::string objective = cfg<std::string>(config, "objective", "exact");
  std::string mode = cfg<std::string>(config, "mode", "certified");
  std::string out_path = cfg<std::string>(config, "out", "out.csv");
  std::string cache_dir = cfg<std::string>(config, "cache_dir", ".randex-cache");
  bool no_cache = cfg(config, "no_cache", false);
  double gamma = cfg(config, "gamma", 0.0);
  double eps_c = cfg(config, "eps_c", 1e-3);
  double eps_s = cfg(config, "eps_s", 1e-6);
  double eps_ext = cfg(config, "eps_ext", 1e-6);
  std::uint64_t seed = cfg<std::uint64_t>(config, "seed", 0);
  bool seed_set = config.contains("seed");
  long n_rounds = cfg<long>(config, "n", 100000);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--p0", req.p0, "input bias p_X(0)");
    sub->add_option("--grid", req.grid_n, "grid points per axis on [0.5,1]^2");
    sub->add_option("--tol", req.tol, "certification gap in bits");
    sub->add_option("--order", req.order, "series order for the polynomial objective");
    sub->add_option("--objective", objective, "objective kind: exact | poly");
    sub->add_option("--out", out_path, "output path");
    sub->add_option("--cache-dir", cache_dir, "envelope cache directory");
    sub->add_flag("--no-cache", no_cache, "disable the envelope cache");
  };

  // gfunc
  auto* gfunc = app.add_subcommand("gfunc", "certified round-entropy heatmap over (omega, theta)");
  add_common(gfunc);
  gfunc->add_option("--mode", mode, "certified | heuristic");

  // rates
  auto* rates = app.add_subcommand("rates", "asymptotic rate curves");
  add_common(rates);
  std::string thetas_csv = cfg<std::string>(config, "thetas", "0.6,0.7,0.8,0.9");
  int omega_steps = cfg(config, "omega_steps", 101);
  std::string kinds_csv = cfg<std::string>(config, "protocols", "r1");
  rates->add_option("--gamma", gamma, "test probability (0 for asymptotics)");
  rates->add_option("--thetas", thetas_csv, "comma-separated overlap values");
  rates->add_option("--omega-steps", omega_steps, "score sweep resolution");
  rates->add_option("--protocols", kinds_csv, "comma list of r1,r1_noT,r2_cert,r2_expansion");

  // shared protocol parameters
  ProtocolParams params;
  params.n = n_rounds;
  params.p0 = std::min(req.p0, 1.0 - req.p0);
  params.gamma = cfg(config, "gamma", 0.1);
  params.theta_exp = cfg(config, "theta", 0.9);
  params.omega_exp = cfg(config, "omega", quantum_max_score(params.theta_exp));
  params.delta_theta = cfg(config, "delta_theta", 0.02);
  params.delta_omega = cfg(config, "delta_omega", 0.02);
  params.eps_c = eps_c;
  params.eps_s = eps_s;
  std::string protocol_name = cfg<std::string>(config, "protocol", "recycling");
  bool omega_given = config.contains("omega");

  // finite
  auto* finite = app.add_subcommand("finite", "net expansion rate vs number of rounds");
  add_common(finite);
  double n_min = cfg(config, "n_min", 1e4), n_max = cfg(config, "n_max", 1e10);
  int n_points = cfg(config, "n_points", 25);
  finite->add_option("--gamma", params.gamma, "test probability");
  auto* fin_omega = finite->add_option("--omega", params.omega_exp, "expected score");
  finite->add_option("--theta", params.theta_exp, "expected overlap");
  finite->add_option("--eps-c", params.eps_c, "completeness error");
  finite->add_option("--eps-s", params.eps_s, "soundness error");
  finite->add_option("--eps-ext", eps_ext, "extractor error");
  finite->add_option("--protocol", protocol_name, "recycling | public-input");
  finite->add_option("--n-min", n_min, "smallest round count");
  finite->add_option("--n-max", n_max, "largest round count");
  finite->add_option("--n-points", n_points, "points in the logarithmic sweep");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo protocol execution");
  std::string device = cfg<std::string>(config, "device", "qubit");
  double device_theta = cfg(config, "theta", 0.9);
  double det_eff = cfg(config, "det_eff", 1.0);
  std::vector<double> ground = {1.0, 1.0}, win = {1.0, 1.0};
  simulate->add_option("--n", params.n, "number of rounds");
  simulate->add_option("--p0", params.p0, "input bias p_X(0)");
  simulate->add_option("--gamma", params.gamma, "test probability");
  simulate->add_option("--theta-exp", params.theta_exp, "expected overlap");
  auto* sim_omega = simulate->add_option("--omega-exp", params.omega_exp, "expected score");
  simulate->add_option("--delta-theta", params.delta_theta, "overlap confidence width");
  simulate->add_option("--delta-omega", params.delta_omega, "score confidence width");
  simulate->add_option("--device", device, "qubit | coherent | classical | custom");
  simulate->add_option("--theta", device_theta, "device overlap target");
  simulate->add_option("--det-eff", det_eff, "detection efficiency");
  simulate->add_option("--ground", ground, "custom device: p(ground|x) pair")->expected(2);
  simulate->add_option("--win", win, "custom device: p(win|x) pair")->expected(2);
  simulate->add_option("--seed", seed, "RNG seed")->each([&](const std::string&) { seed_set = true; });
  simulate->add_option("--out", out_path, "transcript CSV path");

  // extract
  auto* extract = app.add_subcommand("extract", "seeded Toeplitz extraction");
  std::string transcript_path = cfg<std::string>(config, "transcript", "");
  std::string bits_path = cfg<std::string>(config, "in", "");
  std::string seed_file = cfg<std::string>(config, "seed_file", "");
  double h_min = cfg(config, "h_min", 0.0);
  long m_explicit = cfg<long>(config, "m", -1);
  extract->add_option("--transcript", transcript_path, "transcript CSV to extract from");
  extract->add_option("--in", bits_path, "raw bit file to extract from");
  extract->add_option("--protocol", protocol_name, "recycling | public-input");
  extract->add_option("--h-min", h_min, "certified min-entropy in bits");
  extract->add_option("--m", m_explicit, "explicit output length in bits");
  extract->add_option("--eps-ext", eps_ext, "extractor error");
  extract->add_option("--seed", seed, "RNG seed for seed-string generation")
      ->each([&](const std::string&) { seed_set = true; });
  extract->add_option("--seed-file", seed_file, "existing extractor seed bit file");
  extract->add_option("--out", out_path, "output bit file");

  // tradeoff
  auto* tradeoff = app.add_subcommand("tradeoff", "fit the affine min-tradeoff at the accepted point");
  add_common(tradeoff);
  tradeoff->add_option("--n", params.n, "number of rounds");
  tradeoff->add_option("--gamma", params.gamma, "test probability");
  auto* tr_omega = tradeoff->add_option("--omega", params.omega_exp, "expected score");
  tradeoff->add_option("--theta", params.theta_exp, "expected overlap");
  tradeoff->add_option("--delta-theta", params.delta_theta, "overlap confidence width");
  tradeoff->add_option("--delta-omega", params.delta_omega, "score confidence width");
  tradeoff->add_option("--eps-s", params.eps_s, "soundness error");
  tradeoff->add_option("--eps-ext", eps_ext, "extractor error");

  for (auto* sub : app.get_subcommands({}))
    sub->add_option("--config", config_path, "flat JSON key-value configuration file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    BoundMode bound_mode;
    if (mode == "certified") bound_mode = BoundMode::certified;
    else if (mode == "heuristic") bound_mode = BoundMode::heuristic;
    else throw std::invalid_argument("unknown mode: " + mode);
    if (objective == "poly") req.exact_objective = false;
    else if (objective != "exact") throw std::invalid_argument("unknown objective: " + objective);

    Protocol protocol;
    if (protocol_name == "recycling") protocol = Protocol::recycling;
    else if (protocol_name == "public-input") protocol = Protocol::public_input;
    else throw std::invalid_argument("unknown protocol: " + protocol_name);
    params.protocol = protocol;
    params.p0 = std::min(params.p0, 1.0 - params.p0);

    if (gfunc->parsed()) return cmd_gfunc(req, bound_mode, out_path);
    if (rates->parsed())
      return cmd_rates(req, cache_dir, !no_cache, gamma, parse_list(thetas_csv), omega_steps,
                       [&] {
                         std::vector<std::string> ks;
                         std::size_t pos = 0;
                         while (pos < kinds_csv.size()) {
                           auto comma = kinds_csv.find(',', pos);
                           if (comma == std::string::npos) comma = kinds_csv.size();
                           ks.push_back(kinds_csv.substr(pos, comma - pos));
                           pos = comma + 1;
                         }
                         return ks;
                       }(),
                       out_path);
    if (finite->parsed()) {
      if (fin_omega->count() == 0 && !omega_given)
        params.omega_exp = quantum_max_score(params.theta_exp);
      req.p0 = params.p0;
      return cmd_finite(req, cache_dir, !no_cache, params, eps_ext, n_min, n_max, n_points,
                        out_path);
    }
    if (simulate->parsed()) {
      if (sim_omega->count() == 0 && !omega_given) {
        if (device == "qubit") params.omega_exp = quantum_max_score(device_theta);
        else if (device == "coherent")
          params.omega_exp = ideal_score(DeviceModel::make_coherent(device_theta));
        else if (device == "classical") params.omega_exp = 1.5 - device_theta;
      }
      DeviceModel model;
      if (device == "qubit") model = DeviceModel::make_qubit(device_theta, det_eff);
      else if (device == "coherent") model = DeviceModel::make_coherent(device_theta, det_eff);
      else if (device == "classical") model = DeviceModel::make_classical_mixing(device_theta, det_eff);
      else if (device == "custom") model = DeviceModel::make_custom(ground.data(), win.data(), det_eff);
      else throw std::invalid_argument("unknown device: " + device);
      return cmd_simulate(params, model, seed_set, seed, out_path);
    }
    if (extract->parsed()) {
      if (transcript_path.empty() == bits_path.empty())
        throw std::invalid_argument("extract: need exactly one of --transcript / --in");
      if (m_explicit < 0 && h_min <= 0.0)
        throw std::invalid_argument("extract: need --m or --h-min");
      return cmd_extract(transcript_path, bits_path, protocol, h_min, m_explicit, eps_ext,
                         seed_set, seed, seed_file, out_path);
    }
    if (tradeoff->parsed()) {
      if (tr_omega->count() == 0 && !omega_given)
        params.omega_exp = quantum_max_score(params.theta_exp);
      req.p0 = params.p0;
      return cmd_tradeoff(req, cache_dir, !no_cache, params, eps_ext, out_path);
    }
    throw std::invalid_argument("no subcommand");
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "[randex] error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "[randex] error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::logic_error& e) {
    std::fprintf(stderr, "[randex] solver error: %s\n", e.what());
    return kExitNonConverged;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "[randex] error: %s\n", e.what());
    return kExitConfig;
  }
}

#include "avgnet_cli/cli.hpp"

#include "avgnet_cli/config.hpp"
#include "avgnet_cli/manifest.hpp"

#include <avgnet/format.hpp>

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace avgnet::cli {

namespace {

namespace fs = std::filesystem;

constexpr const char* kArtifactVersion = "0.1.0";

struct Globals {
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::string out_dir = ".";
  std::string format = "json";
};

// Everything a command needs besides its own flags.
struct RunContext {
  Globals globals;
  std::string command;
  std::string config_bytes;
  RunManifest manifest;

  fs::path Out(const std::string& name) const { return fs::path(globals.out_dir) / name; }
};

void WriteFile(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("/", "cannot open config file " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::uint64_t RequireSeed(const RunContext& ctx, const ObjectReader& top) {
  if (ctx.globals.seed) return *ctx.globals.seed;
  if (auto s = top.OptSeed("seed")) return *s;
  throw ConfigError("/seed", "a seed is required (config field or --seed)");
}

double TolOr(const RunContext& ctx, const ObjectReader& top, double fallback) {
  if (ctx.globals.tol) return *ctx.globals.tol;
  return top.OptNumber("tol").value_or(fallback);
}

void StartManifest(RunContext& ctx) {
  ctx.manifest.command = ctx.command;
  ctx.manifest.artifact_version = kArtifactVersion;
  std::ostringstream flags;
  flags << ctx.command << "\nseed=" << (ctx.globals.seed ? std::to_string(*ctx.globals.seed) : "")
        << "\ntol=" << (ctx.globals.tol ? FormatDouble(*ctx.globals.tol) : "")
        << "\nformat=" << ctx.globals.format << "\n";
  ctx.manifest.config_hash = Sha256Hex(ctx.config_bytes + "\n" + flags.str());
  ctx.manifest.timestamp = ManifestTimestamp();
}

void FinishManifest(const RunContext& ctx) {
  WriteFile(ctx.Out("manifest.json"), Dump(ctx.manifest.ToJson()));
}

void WriteTrace(const RunContext& ctx, const IterationTrace& trace,
                const std::string& stem) {
  if (ctx.globals.format == "csv") {
    WriteFile(ctx.Out(stem + ".csv"), TraceToCsv(trace));
  } else {
    WriteFile(ctx.Out(stem + ".json"), Dump(ToJson(trace)));
  }
}

bool Finite(const IterationTrace& trace) { return trace.final_iterate().allFinite(); }

// ---- check-averaged ------------------------------------------------------

struct CheckFlags {
  std::vector<std::string> kinds;
  bool all = false;
  std::optional<double> gamma;
  std::size_t samples = 10000;
  std::vector<std::string> params;  // key=value
};

int CmdCheckAveraged(RunContext& ctx, const CheckFlags& flags) {
  std::vector<std::string> kinds = flags.all ? CatalogNames() : flags.kinds;
  if (kinds.empty()) throw ConfigError("/kind", "pass --kind NAME or --all");
  ActivationParams params;
  for (const auto& kv : flags.params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("/param", "expected key=value, got " + kv);
    try {
      params[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
    } catch (const std::exception&) {
      throw ConfigError("/param/" + kv.substr(0, eq), "not a number");
    }
  }
  const std::uint64_t seed = ctx.globals.seed.value_or(kDefaultSeed);
  ctx.manifest.seed = seed;
  SamplingOptions sampling;
  sampling.pairs = flags.samples;
  sampling.seed = seed;
  if (ctx.globals.tol) sampling.tol = *ctx.globals.tol;
  ctx.manifest.tolerances["check_averaged"] = sampling.tol;

  ActivationOptions options;
  options.verify_claim = false;
  options.sampling = sampling;

  bool any_failed = false;
  Json summary = Json::array();
  std::ostringstream csv;
  csv << "kind,gamma,provenance,pass,worst_violation\n";
  for (const auto& kind : kinds) {
    ActivationSpec spec;
    try {
      spec = MakeActivation(kind, flags.all ? ActivationParams{} : params, options);
    } catch (const InvalidInput& e) {
      throw ConfigError("/kind", e.what());
    }
    Json entry{{"kind", spec.kind}};
    std::optional<double> gamma = flags.gamma;
    if (!gamma && spec.certificate) gamma = spec.certificate->gamma();
    if (!gamma) {
      entry["pass"] = false;
      entry["note"] = spec.note.empty() ? "not certifiable" : spec.note;
      any_failed = any_failed || spec.claimed_gamma.has_value();
      csv << spec.kind << ",,none,false,\n";
    } else {
      const Index dim = spec.arity == Arity::kVector ? options.vector_dim : 1;
      const auto pairs = SamplePairs(dim, sampling, "check_averaged/" + spec.kind);
      AveragednessReport rep = CheckAveraged(spec.eval, *gamma, pairs, sampling.tol);
      rep.label = spec.kind;
      rep.provenance = flags.gamma ? Provenance::kNumericEstimate
                                   : spec.certificate->provenance();
      entry = ToJson(rep);
      entry["activation"] = ToJson(spec);
      if (flags.gamma) entry["gamma_override"] = true;
      const bool counts = flags.gamma.has_value() || spec.claimed_gamma.has_value();
      any_failed = any_failed || (counts && !rep.pass);
      csv << spec.kind << ',' << FormatDouble(*gamma) << ',' << ToString(rep.provenance)
          << ',' << (rep.pass ? "true" : "false") << ','
          << FormatDouble(rep.worst_violation) << '\n';
    }
    WriteFile(ctx.Out("check_" + spec.kind + ".json"), Dump(entry));
    std::cout << spec.kind << ": "
              << (entry.value("pass", false) ? "pass" : "FAIL");
    if (entry.contains("gamma")) std::cout << " gamma=" << FormatDouble(entry["gamma"].get<double>());
    std::cout << '\n';
    summary.push_back(Json{{"kind", spec.kind}, {"pass", entry.value("pass", false)}});
  }
  if (ctx.globals.format == "csv") {
    WriteFile(ctx.Out("summary.csv"), csv.str());
  } else {
    WriteFile(ctx.Out("summary.json"), Dump(summary));
  }
  FinishManifest(ctx);
  return any_failed ? kExitVerificationFailed : kExitOk;
}

// ---- catalog ---------------------------------------------------------------

int CmdCatalog(RunContext& ctx) {
  if (ctx.globals.format == "csv") {
    std::cout << "name,title,arity,rule,gamma_formula\n";
    for (const auto& e : Catalog()) {
      std::cout << e.name << ",\"" << e.title << "\"," << ToString(e.arity)
                << ',' << ToString(e.rule) << ",\"" << e.gamma_formula << "\"\n";
    }
    return kExitOk;
  }
  Json out = Json::array();
  for (const auto& e : Catalog()) {
    Json params = Json::object();
    for (const auto& p : e.params) params[p.name] = p.default_value;
    out.push_back({{"name", e.name},
                   {"title", e.title},
                   {"formula", e.formula},
                   {"arity", ToString(e.arity)},
                   {"rule", ToString(e.rule)},
                   {"gamma_formula", e.gamma_formula},
                   {"defaults", params}});
  }
  std::cout << Dump(out);
  return kExitOk;
}

// ---- iterate ---------------------------------------------------------------

int CmdIterate(RunContext& ctx, const Json& doc) {
  ObjectReader top = TopLevel(
      doc, {"schema_version", "seed", "network", "tol", "max_iter", "mode", "unchecked",
            "nash"});
  const std::uint64_t seed = RequireSeed(ctx, top);
  ctx.manifest.seed = seed;
  SamplingOptions sampling;
  sampling.seed = seed;
  const NetworkSpec net = ParseNetwork(top.Get("network"), "/network", sampling, true);
  const double tol = TolOr(ctx, top, 1e-8);
  const std::size_t max_iter = top.OptCount("max_iter").value_or(100000);
  const std::string mode = top.OptString("mode").value_or("km");
  ctx.manifest.tolerances["residual"] = tol;

  Json report{{"mode", mode}};
  IterationTrace trace;
  bool ok = false;
  if (mode == "contraction") {
    ContractionReport cr;
    try {
      cr = ContractionMode(net, tol, max_iter);
    } catch (const InvalidInput& e) {
      throw ConfigError("/network", e.what());
    }
    trace = cr.trace;
    report["contraction"] = ToJson(cr);
    ok = cr.trace.converged && cr.rate_holds;
  } else if (mode == "km") {
    KmOptions km;
    km.tol = tol;
    km.max_iter = max_iter;
    km.unchecked = top.OptBool("unchecked").value_or(false);
    km.fallback = sampling;
    report["certificate"] = ToJson(CertifyNetwork(net, sampling));
    trace = KmIterate(net, km);
    report["trace"] = ToJson(trace);
    ok = trace.converged;
  } else {
    throw ConfigError("/mode", "expected \"km\" or \"contraction\"");
  }
  if (!Finite(trace)) {
    WriteFile(ctx.Out("report.json"), Dump(report));
    WriteTrace(ctx, trace, "trace");
    FinishManifest(ctx);
    return kExitDiverged;
  }
  if (ok && top.OptBool("nash").value_or(true)) {
    NashOptions no;
    no.tol = std::max(tol, 1e-8);
    no.seed = seed;
    ctx.manifest.tolerances["nash"] = no.tol;
    const NashReport nash = VerifyNash(net, StateFromTrace(trace), no);
    report["nash"] = ToJson(nash);
    ok = nash.is_equilibrium;
  }
  WriteFile(ctx.Out("report.json"), Dump(report));
  WriteTrace(ctx, trace, "trace");
  FinishManifest(ctx);
  return ok ? kExitOk : kExitVerificationFailed;
}

// ---- train -----------------------------------------------------------------

TrainingProblem ParseProblem(const ObjectReader& top, const SamplingOptions& sampling) {
  TrainingProblem problem;
  problem.net_template = ParseNetwork(top.Get("network"), "/network", sampling, false);
  if (top.Has("teacher")) {
    problem.teacher = ParseNetwork(top.Get("teacher"), "/teacher", sampling, false);
  }
  problem.samples = ParseSamples(top.Get("samples"), "/samples");
  if (top.Has("omega")) {
    const Mat omega = top.Matrix("omega");
    for (Index l = 0; l < omega.rows(); ++l) {
      std::vector<double> row(static_cast<std::size_t>(omega.cols()));
      for (Index t = 0; t < omega.cols(); ++t) row[static_cast<std::size_t>(t)] = omega(l, t);
      problem.omega.push_back(std::move(row));
    }
  }
  try {
    problem.Validate();
  } catch (const InvalidInput& e) {
    throw ConfigError("/samples", e.what());
  }
  return problem;
}

std::string CurvesCsv(const TrainReport& r) {
  std::ostringstream os;
  os << "sweep";
  for (std::size_t l = 0; l < r.residual_curves.size(); ++l) os << ",layer" << l + 1;
  os << '\n';
  const std::size_t n = r.residual_curves.empty() ? 0 : r.residual_curves.front().size();
  for (std::size_t s = 0; s < n; ++s) {
    os << s;
    for (const auto& curve : r.residual_curves) os << ',' << FormatDouble(curve[s]);
    os << '\n';
  }
  return os.str();
}

int CmdTrain(RunContext& ctx, const Json& doc) {
  ObjectReader top = TopLevel(doc, {"schema_version", "seed", "network", "teacher", "samples",
                                    "omega", "gamma", "tol", "max_steps", "mode", "fit_tol"});
  if (ctx.globals.seed) {
    ctx.manifest.seed = ctx.globals.seed;
  } else if (auto s = top.OptSeed("seed")) {
    ctx.manifest.seed = s;
  }
  SamplingOptions sampling;
  sampling.seed = ctx.manifest.seed.value_or(kDefaultSeed);
  const TrainingProblem problem = ParseProblem(top, sampling);
  TrainOptions options;
  options.gamma = top.OptNumber("gamma").value_or(options.gamma);
  options.tol = TolOr(ctx, top, options.tol);
  options.max_steps = top.OptCount("max_steps").value_or(options.max_steps);
  options.fit_tol = top.OptNumber("fit_tol").value_or(options.fit_tol);
  const std::string mode = top.OptString("mode").value_or("shared");
  if (mode == "per_sample") {
    options.mode = ThetaMode::kPerSample;
  } else if (mode != "shared") {
    throw ConfigError("/mode", "expected \"shared\" or \"per_sample\"");
  }
  ctx.manifest.tolerances["vi_residual"] = options.tol;
  ctx.manifest.tolerances["fit"] = options.fit_tol;

  TrainResult result;
  try {
    result = Train(problem, options);
  } catch (const InvalidInput& e) {
    throw ConfigError("/", e.what());
  }
  Json report{{"report", ToJson(result.report)}};
  if (options.mode == ThetaMode::kShared) {
    report["params"] = ToJson(result.state.theta);
  } else {
    Json per = Json::array();
    for (const auto& p : result.state.per_sample) per.push_back(ToJson(p));
    report["per_sample_params"] = std::move(per);
  }
  WriteFile(ctx.Out("report.json"), Dump(report));
  if (ctx.globals.format == "csv") {
    WriteFile(ctx.Out("curves.csv"), CurvesCsv(result.report));
  } else {
    WriteFile(ctx.Out("curves.json"), Dump(Json(result.report.residual_curves)));
  }
  FinishManifest(ctx);
  const bool finite = std::isfinite(result.report.fit_error);
  if (!finite) return kExitDiverged;
  return result.report.converged ? kExitOk : kExitVerificationFailed;
}

// ---- federated -------------------------------------------------------------

int CmdFederated(RunContext& ctx, const Json& doc) {
  ObjectReader top = TopLevel(
      doc, {"schema_version", "seed", "network", "teacher", "clients", "servers", "tau",
            "gamma", "rounds", "aggregation", "selection", "subset_fraction", "dropout", "tol"});
  const std::uint64_t seed = RequireSeed(ctx, top);
  ctx.manifest.seed = seed;
  SamplingOptions sampling;
  sampling.seed = seed;
  const NetworkSpec model = ParseNetwork(top.Get("network"), "/network", sampling, false);
  std::optional<NetworkSpec> teacher;
  if (top.Has("teacher")) {
    teacher = ParseNetwork(top.Get("teacher"), "/teacher", sampling, false);
  }
  FederatedTopology topo;
  topo.seed = seed;
  const Json& clients = top.Get("clients");
  if (!clients.is_array() || clients.empty()) {
    throw ConfigError("/clients", "expected a non-empty array");
  }
  for (std::size_t c = 0; c < clients.size(); ++c) {
    const std::string cp = "/clients/" + std::to_string(c);
    ObjectReader cr(clients[c], cp, {"id", "samples"});
    topo.clients.emplace_back(cr.Count("id"), ParseSamples(cr.Get("samples"), cr.PathOf("samples")),
                              teacher);
  }
  const Json& servers = top.Get("servers");
  if (!servers.is_array() || servers.empty()) {
    throw ConfigError("/servers", "expected a non-empty array");
  }
  for (std::size_t s = 0; s < servers.size(); ++s) {
    const std::string sp = "/servers/" + std::to_string(s);
    ObjectReader sr(servers[s], sp, {"id", "clients"});
    ServerConfig server;
    server.id = sr.Count("id");
    server.model = model;
    const Json& ids = sr.Get("clients");
    if (!ids.is_array()) throw ConfigError(sr.PathOf("clients"), "expected an array");
    for (const auto& id : ids) {
      if (!id.is_number_unsigned()) throw ConfigError(sr.PathOf("clients"), "expected client ids");
      server.clients.push_back(id.get<std::size_t>());
    }
    topo.servers.push_back(std::move(server));
  }
  topo.tau = top.OptCount("tau").value_or(1);
  topo.gamma = top.OptNumber("gamma").value_or(0.5);
  if (top.Has("aggregation")) {
    ObjectReader ar(top.Get("aggregation"), "/aggregation", {"kind", "weights"});
    try {
      topo.rule.kind = ParseAggregationKind(ar.String("kind"));
    } catch (const InvalidInput& e) {
      throw ConfigError("/aggregation/kind", e.what());
    }
    if (ar.Has("weights")) {
      const Vec w = ar.Vector("weights");
      topo.rule.weights.assign(w.data(), w.data() + w.size());
    }
  }
  const std::string selection = top.OptString("selection").value_or("all");
  if (selection == "random_subset") {
    topo.selection = SelectionPolicy::kRandomSubset;
  } else if (selection != "all") {
    throw ConfigError("/selection", "expected \"all\" or \"random_subset\"");
  }
  topo.subset_fraction = top.OptNumber("subset_fraction").value_or(1.0);
  topo.dropout = top.OptNumber("dropout").value_or(0.0);
  const std::size_t rounds = top.Count("rounds");
  const double tol = TolOr(ctx, top, 1e-6);
  ctx.manifest.tolerances["equilibrium"] = tol;
  try {
    topo.Validate();
  } catch (const InvalidInput& e) {
    throw ConfigError("/", e.what());
  }

  const FederatedResult result = RunRounds(topo, rounds);
  std::string jsonl;
  for (const auto& e : result.log) jsonl += ToJson(e).dump() + "\n";
  WriteFile(ctx.Out("rounds.jsonl"), jsonl);
  Json server_out = Json::array();
  bool finite = true;
  for (std::size_t s = 0; s < result.server_models.size(); ++s) {
    const NetworkParams params = ParamsOf(result.server_models[s]);
    for (const auto& l : params) finite = finite && l.W.allFinite() && l.b.allFinite();
    server_out.push_back({{"id", topo.servers[s].id}, {"params", ToJson(params)}});
  }
  const bool equilibrium = finite && FederatedEquilibrium(topo, result, tol);
  Json report{{"rounds", rounds}, {"servers", server_out}, {"equilibrium", equilibrium}};
  if (result.server_models.size() == 1) report["params"] = server_out[0]["params"];
  WriteFile(ctx.Out("report.json"), Dump(report));
  FinishManifest(ctx);
  if (!finite) return kExitDiverged;
  return equilibrium ? kExitOk : kExitVerificationFailed;
}

// ---- gram-schmidt ----------------------------------------------------------

int CmdGramSchmidt(RunContext& ctx, const Json& doc, const fs::path& config_dir) {
  ObjectReader top =
      TopLevel(doc, {"schema_version", "seed", "family", "family_csv", "max_condition", "tol"});
  if (top.Has("family") == top.Has("family_csv")) {
    throw ConfigError("/family", "give exactly one of family, family_csv");
  }
  const GsFamily family = top.Has("family")
                              ? ParseFamily(top.Get("family"), "/family")
                              : ReadFamilyCsv(config_dir / top.String("family_csv"));
  const double max_condition = top.OptNumber("max_condition").value_or(1e12);
  const double tol = TolOr(ctx, top, 1e-10);
  ctx.manifest.tolerances["gram_identity"] = tol;
  ctx.manifest.tolerances["idempotence"] = 1e-12;

  GsRun run;
  try {
    run = GsNetworkRun(family, max_condition);
  } catch (const InvalidInput& e) {
    throw ConfigError("/family", e.what());
  }
  const IdempotenceReport idem = IdempotenceCheck(family);
  const double gram_error =
      (run.gram - Mat::Identity(run.gram.rows(), run.gram.cols())).cwiseAbs().maxCoeff();
  Json report = ToJson(run);
  report["gram_identity_error"] = gram_error;
  report["idempotence"] = ToJson(idem);
  const bool ok = gram_error <= tol && idem.idempotent;
  report["pass"] = ok;
  WriteFile(ctx.Out("gram_schmidt.json"), Dump(report));
  if (ctx.globals.format == "csv") {
    std::ostringstream os;
    for (Index i = 0; i < run.gram.rows(); ++i) {
      for (Index j = 0; j < run.gram.cols(); ++j) {
        os << (j ? "," : "") << FormatDouble(run.gram(i, j));
      }
      os << '\n';
    }
    WriteFile(ctx.Out("gram.csv"), os.str());
  }
  FinishManifest(ctx);
  return ok ? kExitOk : kExitVerificationFailed;
}

// ---- llm-fixpoint ----------------------------------------------------------

int CmdLlmFixpoint(RunContext& ctx, const Json& doc) {
  ObjectReader top = TopLevel(doc, {"schema_version", "seed", "tokens", "blocks", "tol",
                                    "max_iter", "lambda", "box_half_width", "samples",
                                    "probe_jacobian"});
  const std::uint64_t seed = RequireSeed(ctx, top);
  ctx.manifest.seed = seed;
  SamplingOptions sampling;
  sampling.seed = seed;
  const Mat tokens = top.Matrix("tokens");
  const auto blocks = ParseBlocks(top.Get("blocks"), "/blocks", sampling);
  DecoderFixpointOptions options;
  options.tol = TolOr(ctx, top, options.tol);
  options.max_iter = top.OptCount("max_iter").value_or(options.max_iter);
  options.box_half_width = top.OptNumber("box_half_width").value_or(options.box_half_width);
  options.samples = top.OptCount("samples").value_or(options.samples);
  options.probe_jacobian = top.OptBool("probe_jacobian").value_or(false);
  options.seed = seed;
  if (auto lambda = top.OptNumber("lambda")) {
    options.schedule = RelaxationSchedule::Constant(*lambda);
  }
  ctx.manifest.tolerances["residual"] = options.tol;

  DecoderFixpointResult result;
  try {
    result = DecoderFixpoint(blocks, tokens, options);
  } catch (const InvalidInput& e) {
    throw ConfigError("/", e.what());
  }
  WriteFile(ctx.Out("llm_fixpoint.json"), Dump(ToJson(result)));
  WriteTrace(ctx, result.trace, "trace");
  FinishManifest(ctx);
  if (!Finite(result.trace)) return kExitDiverged;
  return result.trace.converged && result.equilibrium ? kExitOk : kExitVerificationFailed;
}

}  // namespace

int RunCli(int argc, const char* const* argv) {
  CLI::App app{"Averaged-operator networks: certification, iteration and training"};
  app.require_subcommand(1);
  Globals globals;
  std::uint64_t seed = 0;
  double tol = 0.0;
  auto* seed_opt = app.add_option("--seed", seed, "Run seed (overrides the config)");
  auto* tol_opt = app.add_option("--tol", tol, "Main tolerance (overrides the config)");
  app.add_option("--out-dir", globals.out_dir, "Output directory")->capture_default_str();
  app.add_option("--format", globals.format, "Trace/summary format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();

  CheckFlags check;
  auto* check_cmd = app.add_subcommand("check-averaged", "Sampled averagedness check");
  check_cmd->add_option("--kind", check.kinds, "Activation name (repeatable)");
  check_cmd->add_flag("--all", check.all, "Every catalog row");
  check_cmd->add_option("--gamma", check.gamma, "Check at this gamma instead");
  check_cmd->add_option("--samples", check.samples, "Sampled pairs")->capture_default_str();
  check_cmd->add_option("--param", check.params, "Activation parameter key=value");

  auto* catalog_cmd = app.add_subcommand("catalog", "List the activation catalog");

  std::string config;
  std::vector<CLI::App*> config_cmds;
  for (const char* name : {"iterate", "train", "federated", "gram-schmidt", "llm-fixpoint"}) {
    auto* cmd = app.add_subcommand(name, std::string("Run ") + name + " from a config file");
    cmd->add_option("config", config, "Config file (JSON)")->required();
    config_cmds.push_back(cmd);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigError;
  }
  if (*seed_opt) globals.seed = seed;
  if (*tol_opt) globals.tol = tol;

  RunContext ctx;
  ctx.globals = globals;
  try {
    fs::create_directories(globals.out_dir);
    if (*catalog_cmd) {
      ctx.command = "catalog";
      return CmdCatalog(ctx);
    }
    if (*check_cmd) {
      ctx.command = "check-averaged";
      std::ostringstream flags;
      for (const auto& k : check.kinds) flags << "kind=" << k << '\n';
      for (const auto& p : check.params) flags << "param=" << p << '\n';
      flags << "all=" << check.all << "\nsamples=" << check.samples
            << "\ngamma=" << (check.gamma ? FormatDouble(*check.gamma) : "") << '\n';
      ctx.config_bytes = flags.str();
      StartManifest(ctx);
      return CmdCheckAveraged(ctx, check);
    }
    for (auto* cmd : config_cmds) {
      if (!*cmd) continue;
      ctx.command = cmd->get_name();
      ctx.config_bytes = ReadFile(config);
      StartManifest(ctx);
      Json doc;
      try {
        doc = Json::parse(ctx.config_bytes);
      } catch (const Json::parse_error& e) {
        throw ConfigError("/", std::string("invalid JSON: ") + e.what());
      }
      if (ctx.command == "iterate") return CmdIterate(ctx, doc);
      if (ctx.command == "train") return CmdTrain(ctx, doc);
      if (ctx.command == "federated") return CmdFederated(ctx, doc);
      if (ctx.command == "gram-schmidt") {
        return CmdGramSchmidt(ctx, doc, fs::path(config).parent_path());
      }
      return CmdLlmFixpoint(ctx, doc);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitDiverged;
  }
  return kExitConfigError;
}

int RunCli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  return RunCli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace avgnet::cli

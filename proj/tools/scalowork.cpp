#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "scalowork/chain.hpp"
#include "scalowork/committee.hpp"
#include "scalowork/graph.hpp"
#include "scalowork/mds.hpp"
#include "scalowork/pool.hpp"
#include "scalowork/protocol.hpp"
#include "scalowork/scheduler.hpp"
#include "scalowork/simulator.hpp"

namespace sw = scalowork;
using nlohmann::json;

namespace {

constexpr int kUsage = 2;
constexpr int kRejectBase = 10;    // verify: 10 + reject reason
constexpr int kGenerateBase = 30;  // mine: 30 + generation status

struct Globals {
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::string config;
  std::string out;
};

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    sw::write_file(path, text);
  }
}

json load_json(const std::string& path) {
  try {
    return json::parse(sw::read_file(path));
  } catch (const json::exception& e) {
    throw sw::ParameterError("config " + path + ": " + e.what());
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

template <typename T>
std::vector<T> parse_list(const std::string& s) {
  std::vector<T> out;
  for (const auto& item : split(s, ',')) {
    std::istringstream in(item);
    double v = 0;
    if (!(in >> v) || !in.eof()) throw sw::ParameterError("bad list entry '" + item + "'");
    out.push_back(static_cast<T>(v));
  }
  if (out.empty()) throw sw::ParameterError("empty list");
  return out;
}

// ---------------------------------------------------------------------------
// Epoch file: everything a miner or verifier learns from the committee phase.

struct EpochFile {
  sw::ProblemDescriptor descriptor;
  sw::Signature sig_descriptor;
  sw::CommitteeApproval approval;
  std::vector<sw::PublicKey> committee;
  std::int64_t origin_ms = 0;
  sw::Digest prev_hash{};
  std::uint64_t prev_id = 0;

  json to_json() const {
    json j;
    const auto& d = descriptor;
    j["descriptor"] = {{"reward", d.reward},       {"utility_pk", d.utility_pk.hex()}, {"n", d.n},
                       {"m", d.m},                 {"delta_min", d.delta_min},         {"delta_max", d.delta_max},
                       {"z", d.z},                 {"instance_addr", d.instance_addr}, {"t_max_ms", d.t_max_ms}};
    j["descriptor_hash"] = sw::descriptor_hash(d).hex();
    j["sig_descriptor"] = sig_descriptor.hex();
    std::vector<std::string> signers, members;
    for (const auto& pk : approval.signers) signers.push_back(pk.hex());
    for (const auto& pk : committee) members.push_back(pk.hex());
    j["approval"] = {{"instance_id", approval.instance_id}, {"signers", signers}, {"signature", approval.signature.hex()}};
    j["committee"] = members;
    j["origin_ms"] = origin_ms;
    j["prev_hash"] = prev_hash.hex();
    j["prev_id"] = prev_id;
    return j;
  }

  static EpochFile from_json(const json& j) {
    try {
      EpochFile e;
      const auto& d = j.at("descriptor");
      e.descriptor.reward = d.at("reward").get<sw::Coin>();
      e.descriptor.utility_pk = sw::PublicKey::from_hex(d.at("utility_pk").get<std::string>());
      e.descriptor.n = d.at("n").get<std::uint64_t>();
      e.descriptor.m = d.at("m").get<std::uint64_t>();
      e.descriptor.delta_min = d.at("delta_min").get<std::uint64_t>();
      e.descriptor.delta_max = d.at("delta_max").get<std::uint64_t>();
      e.descriptor.z = d.at("z").get<std::uint64_t>();
      e.descriptor.instance_addr = d.at("instance_addr").get<std::string>();
      e.descriptor.t_max_ms = d.at("t_max_ms").get<std::int64_t>();
      e.sig_descriptor = sw::Signature::from_hex(j.at("sig_descriptor").get<std::string>());
      const auto& a = j.at("approval");
      e.approval.instance_id = a.at("instance_id").get<std::uint64_t>();
      for (const auto& s : a.at("signers")) e.approval.signers.push_back(sw::PublicKey::from_hex(s.get<std::string>()));
      e.approval.signature = sw::AggregateSignature::from_hex(a.at("signature").get<std::string>());
      for (const auto& s : j.at("committee")) e.committee.push_back(sw::PublicKey::from_hex(s.get<std::string>()));
      e.origin_ms = j.value("origin_ms", std::int64_t{0});
      if (j.contains("prev_hash")) e.prev_hash = sw::Digest::from_hex(j.at("prev_hash").get<std::string>());
      e.prev_id = j.value("prev_id", std::uint64_t{0});
      return e;
    } catch (const json::exception& ex) {
      throw sw::ParameterError(std::string("malformed epoch file: ") + ex.what());
    }
  }
};

// ---------------------------------------------------------------------------

int cmd_gen_graph(const Globals& g, const std::string& model, std::size_t n, double degree, double p, bool gzip) {
  sw::Graph graph = [&] {
    if (model == "ba") {
      const auto attach = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(degree / 2.0)));
      return sw::generate_ba(n, attach, g.seed);
    }
    if (model == "er") return sw::generate_er(n, p >= 0.0 ? p : degree / static_cast<double>(n - 1), g.seed);
    throw sw::ParameterError("unknown model '" + model + "' (expected ba or er)");
  }();
  if (g.out.empty() || g.out == "-") {
    std::cout << sw::to_text(graph);
  } else {
    sw::write_graph_file(g.out, graph, gzip);
    const auto props = sw::properties(graph);
    std::cout << "n=" << props.n << " m=" << props.m << " delta_min=" << props.delta_min
              << " delta_max=" << props.delta_max << " avg_degree=" << sw::detail::num(props.avg_degree())
              << " degree_ambiguity_log=" << sw::detail::num(sw::degree_ambiguity_log(graph)) << '\n';
  }
  return 0;
}

int cmd_solve(const Globals& g, const std::string& graph_path, bool gzip, const std::string& stats_path) {
  const sw::Graph graph = sw::read_graph_file(graph_path, gzip);
  const auto result = sw::greedy_distributed(graph, g.workers);
  const auto bound = sw::compute_bound(sw::properties(graph));
  const bool dominating = sw::is_dominating(graph, result.set).dominating;
  std::string line;
  for (std::size_t i = 0; i < result.set.vertices.size(); ++i) {
    if (i) line += ' ';
    line += std::to_string(result.set.vertices[i]);
  }
  emit(g.out, line + '\n');
  if (!stats_path.empty()) emit(stats_path, sw::round_stats_csv(result));
  std::ostringstream s;
  s.precision(17);
  s << "size=" << result.set.size() << " bound=" << bound.k << " within_bound=" << (bound.admits(result.set.size()) ? "pass" : "fail")
    << " dominating=" << (dominating ? "yes" : "no") << " rounds=" << result.rounds << '\n';
  (g.out.empty() || g.out == "-" ? std::cerr : std::cout) << s.str();
  return dominating ? 0 : 1;
}

int cmd_iso_pool(const Globals& g, const std::string& graph_path, bool gzip, std::uint64_t z, sw::Coin reward,
                 std::int64_t t_max, const std::string& lookup_path, double l, std::size_t committee_size,
                 std::uint64_t instance_id) {
  if (g.out.empty()) throw sw::ParameterError("iso-pool needs --out <directory>");
  const sw::Graph graph = sw::read_graph_file(graph_path, gzip);
  const auto props = sw::properties(graph);
  if (!lookup_path.empty()) {
    t_max = sw::estimate_tmax(sw::LookupTable::from_csv(sw::read_file(lookup_path), l), props.n, props.m);
  }
  const auto utility = sw::keygen("utility-0", g.seed);
  const std::filesystem::path root(g.out);
  const auto d = sw::make_descriptor(props, reward, utility.pk, z, (root / "instances").string(), t_max);
  const auto dh = sw::descriptor_hash(d);

  std::vector<sw::CommitteeMember> members;
  for (std::size_t i = 0; i < committee_size; ++i) {
    const std::string id = "member-" + std::to_string(i);
    members.push_back({id, sw::keygen(id, g.seed)});
  }
  sw::ApprovalAuthority authority(instance_id - 1);
  EpochFile e;
  e.descriptor = d;
  e.sig_descriptor = sw::sign(dh.bytes, utility.sk);
  e.approval = authority.approve(d, sw::HardnessPolicy{}, members);
  for (const auto& m : members) e.committee.push_back(m.keys.pk);

  sw::DirectoryInstanceStore store(root / "instances");
  sw::publish_instances(store, dh, sw::make_instance_pool(graph, z, g.seed), utility.sk);
  std::filesystem::create_directories(root);
  sw::write_file((root / "epoch.json").string(), e.to_json().dump(2) + "\n");
  std::cout << "descriptor=" << dh.hex() << " z=" << z << " t_max_ms=" << t_max << " instance_id=" << e.approval.instance_id
            << '\n';
  return 0;
}

int cmd_mine(const Globals& g, const std::string& epoch_path, const std::string& store_path, const std::string& manager,
             double units_per_ms) {
  if (g.out.empty()) throw sw::ParameterError("mine needs --out <block file>");
  const EpochFile e = EpochFile::from_json(load_json(epoch_path));
  sw::DirectoryInstanceStore store(store_path);
  sw::MiningRequest req;
  req.descriptor = e.descriptor;
  req.sig_descriptor = e.sig_descriptor;
  req.approval = e.approval;
  req.reward = sw::make_reward_transaction(e.descriptor, e.origin_ms, e.committee);
  req.prev_hash = e.prev_hash;
  req.prev_instance_id = e.prev_id;
  req.manager = manager;
  sw::ManualClock clock(e.origin_ms);
  bool used = false;
  sw::PoolConfig pool;
  pool.pool_id = manager;
  pool.manager = manager;
  for (unsigned w = 0; w < g.workers; ++w) pool.miners.push_back(manager + "/m" + std::to_string(w));
  auto solver = [&](const sw::Graph& instance) -> std::optional<sw::DominatingSet> {
    if (used) return std::nullopt;
    used = true;
    auto r = sw::run_pool_solve(instance, pool);
    clock.advance(sw::detail::modeled_ms(r.solve.critical_units, units_per_ms));
    return r.solve.set;
  };
  const auto gen = sw::generate_block(req, store, clock, solver);
  std::cout << "status=" << sw::status_name(gen.status) << " index=" << gen.index
            << " merkle_root=" << gen.merkle_root.hex() << " finished_ms=" << gen.finished_ms;
  if (gen.status != sw::GenerationStatus::ok) {
    std::cout << '\n';
    return kGenerateBase + static_cast<int>(gen.status);
  }
  std::cout << " size=" << gen.block->header.solution.size() << " digest=" << sw::block_digest(*gen.block).hex() << '\n';
  const auto bytes = sw::serialize_block(*gen.block);
  sw::write_file(g.out, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  return 0;
}

std::uint64_t last_chain_id(const std::string& path) {
  std::istringstream in(sw::read_file(path));
  std::string line, last;
  while (std::getline(in, line))
    if (!line.empty() && line.rfind("height", 0) != 0) last = line;
  if (last.empty()) return 0;
  const auto fields = split(last, ',');
  if (fields.size() < 3) throw sw::ParameterError("malformed chain log line: " + last);
  return std::stoull(fields[2]);
}

int cmd_verify(const std::string& block_path, const std::string& epoch_path, const std::string& store_path,
               std::int64_t now_ms, std::optional<std::uint64_t> prev_id, const std::string& chain_log,
               std::optional<std::size_t> past_size) {
  const EpochFile e = EpochFile::from_json(load_json(epoch_path));
  const std::string raw = sw::read_file(block_path);
  const sw::Block block = sw::deserialize_block(std::span(reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size()));
  sw::DirectoryInstanceStore store(store_path);
  sw::VerifyContext ctx;
  ctx.past_size = past_size;
  ctx.prev_instance_id = prev_id ? *prev_id : (chain_log.empty() ? e.prev_id : last_chain_id(chain_log));
  ctx.now_ms = now_ms;
  ctx.epoch_origin_ms = e.origin_ms;
  ctx.committee = e.committee;
  ctx.store = &store;
  const auto v = sw::verify_block(block, ctx);
  if (v.accepted()) {
    std::cout << "status=accept index=" << v.index << " size=" << block.header.solution.size()
              << " work=" << sw::detail::num(sw::work_done(block.header)) << '\n';
    return 0;
  }
  std::cout << "status=reject reason=" << sw::reason_name(v.reason) << " code=" << static_cast<int>(v.reason);
  if (!v.uncovered.empty()) std::cout << " uncovered=" << v.uncovered.front();
  std::cout << '\n';
  return kRejectBase + static_cast<int>(v.reason);
}

int cmd_simulate(const Globals& g, std::string scenario, std::optional<std::size_t> epochs, const std::string& chain_log,
                 std::size_t seeds) {
  json j = g.config.empty() ? json::object() : load_json(g.config);
  if (scenario.empty()) scenario = j.value("scenario", std::string("honest"));
  j.erase("scenario");
  const std::size_t theft_n = j.value("theft_n", std::size_t{8});
  const std::uint64_t theft_budget = j.value("theft_budget", std::uint64_t{10000});
  std::string lambda_text = "0.25";
  if (j.contains("lambda")) lambda_text = j.at("lambda").is_string() ? j.at("lambda").get<std::string>() : j.at("lambda").dump();
  const sw::Coin fee = j.value("fee", sw::Coin{0});
  for (const char* k : {"theft_n", "theft_budget"}) j.erase(k);
  j["seed"] = g.seed;
  if (epochs) j["epochs"] = *epochs;

  if (scenario == "honest" || scenario == "selfish") {
    const auto cfg = sw::SimConfig::from_json(j);
    const auto metrics = scenario == "honest" ? sw::run_honest(cfg) : sw::run_selfish(cfg, cfg.adversary.lambda, cfg.adversary.forge_descriptor);
    emit(g.out, metrics.csv());
    if (!chain_log.empty()) emit(chain_log, metrics.chain_log);
    std::cerr << "epochs=" << metrics.epochs.size() << " collisions=" << metrics.collisions
              << " expected_collisions=" << sw::detail::num(metrics.expected_collisions)
              << " reversions=" << metrics.reversions << " adversary_blocks=" << metrics.adversary_blocks
              << " releases=" << metrics.adversary_releases << " adversary_adopted=" << metrics.adversary_adopted
              << " rejected_late=" << metrics.rejected_late << " rejected_forged=" << metrics.rejected_forged << '\n';
    return 0;
  }
  if (scenario == "replay") {
    const auto reward = j.value("reward", sw::Coin{100});
    const auto r = sw::replay_payoff(sw::Fraction::parse(lambda_text), fee, reward);
    emit(g.out, "lambda,fee,reward,payoff,profitable\n" + lambda_text + ',' + std::to_string(fee) + ',' +
                    std::to_string(reward) + ',' + sw::detail::num(r.value()) + ',' + (r.profitable ? "1" : "0") + '\n');
    return 0;
  }
  if (scenario == "theft") {
    std::string out = "seed,n,search_space,tried,success,identical\n";
    for (std::size_t s = 0; s < seeds; ++s) {
      for (bool identical : {false, true}) {
        const auto r = sw::run_solution_theft(g.seed + s, theft_n, theft_budget, identical);
        out += std::to_string(g.seed + s) + ',' + std::to_string(r.n) + ',' + std::to_string(r.search_space) + ',' +
               std::to_string(r.tried) + ',' + (r.success ? "1" : "0") + ',' + (identical ? "1" : "0") + '\n';
      }
    }
    emit(g.out, out);
    return 0;
  }
  throw sw::ParameterError("unknown scenario '" + scenario + "' (expected honest, selfish, replay or theft)");
}

int cmd_bench(const Globals& g, const std::string& ns, const std::string& degrees, const std::string& workers,
              std::int64_t cutoff_ms, const std::string& timing) {
  sw::BenchConfig cfg;
  if (!g.config.empty()) {
    const json j = load_json(g.config);
    if (j.contains("n")) cfg.node_counts = j.at("n").get<std::vector<std::size_t>>();
    if (j.contains("degree")) cfg.avg_degrees = j.at("degree").get<std::vector<double>>();
    if (j.contains("workers")) cfg.workers = j.at("workers").get<std::vector<unsigned>>();
    cfg.cutoff_ms = j.value("cutoff_ms", cfg.cutoff_ms);
  }
  if (!ns.empty()) cfg.node_counts = parse_list<std::size_t>(ns);
  if (!degrees.empty()) cfg.avg_degrees = parse_list<double>(degrees);
  if (!workers.empty()) cfg.workers = parse_list<unsigned>(workers);
  else if (g.config.empty()) cfg.workers = {g.workers};
  if (cutoff_ms > 0) cfg.cutoff_ms = cutoff_ms;
  if (timing != "model" && timing != "wall") throw sw::ParameterError("timing must be model or wall");
  cfg.wall_clock = timing == "wall";
  cfg.seed = g.seed;
  const auto rows = sw::run_benchmark(cfg);
  emit(g.out, sw::bench_csv(rows, cfg.wall_clock));
  return 0;
}

int cmd_storage(const Globals& g, std::uint64_t pools, const std::string& graph_path, bool gzip, std::uint64_t n,
                std::uint64_t m, std::uint64_t delta) {
  if (!graph_path.empty()) {
    const auto p = sw::properties(sw::read_graph_file(graph_path, gzip));
    n = p.n;
    m = p.m;
    delta = p.delta_min;
  }
  const auto r = sw::storage_accounting(pools, m, n, delta);
  emit(g.out, "pools,n,m,delta_min,scalowork,chrisimos,difference\n" + std::to_string(pools) + ',' + std::to_string(n) +
                  ',' + std::to_string(m) + ',' + std::to_string(delta) + ',' + sw::detail::num(r.scalowork) + ',' +
                  sw::detail::num(r.chrisimos) + ',' + sw::detail::num(r.difference) + '\n');
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scalowork: useful-work blockchain tools"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "RNG seed");
  app.add_option("--workers", g.workers, "Solver workers")->check(CLI::PositiveNumber);
  app.add_option("--config", g.config, "JSON configuration file");
  app.add_option("--out", g.out, "Output path ('-' for stdout)");

  bool gzip = false;
  std::string graph_path;

  auto* gen = app.add_subcommand("gen-graph", "Generate a BA or ER graph");
  std::string model = "ba";
  std::size_t n = 1000;
  double degree = 10, p = -1;
  gen->add_option("--model", model, "ba | er");
  gen->add_option("--n", n, "Vertex count")->check(CLI::PositiveNumber);
  gen->add_option("--degree", degree, "Average degree");
  gen->add_option("--p", p, "ER edge probability (overrides --degree)");
  gen->add_flag("--gzip", gzip, "Write gzip-compressed");

  auto* iso = app.add_subcommand("iso-pool", "Publish z signed isomorphs and an approved epoch file");
  std::uint64_t z = 16;
  sw::Coin reward = 100;
  std::int64_t t_max = 60000;
  std::string lookup;
  double l = 1.5;
  std::size_t committee = 4;
  std::uint64_t instance_id = 1;
  iso->add_option("--graph", graph_path, "Graph file")->required();
  iso->add_option("--z", z, "Instance count")->check(CLI::PositiveNumber);
  iso->add_option("--reward", reward, "Reward");
  iso->add_option("--t-max-ms", t_max, "Block interval")->check(CLI::PositiveNumber);
  iso->add_option("--lookup", lookup, "Lookup table CSV; estimates t_max");
  iso->add_option("--l", l, "Lookup multiplier");
  iso->add_option("--committee", committee, "Committee size")->check(CLI::PositiveNumber);
  iso->add_option("--instance-id", instance_id, "Instance id to issue")->check(CLI::PositiveNumber);
  iso->add_flag("--gzip", gzip, "Graph file is gzip-compressed");

  auto* solve = app.add_subcommand("solve", "Distributed greedy dominating set");
  std::string stats;
  solve->add_option("--graph", graph_path, "Graph file")->required();
  solve->add_option("--stats", stats, "Per-round CSV output");
  solve->add_flag("--gzip", gzip, "Graph file is gzip-compressed");

  auto* mine = app.add_subcommand("mine", "Generate a block for an epoch");
  std::string epoch_path, store_path, manager = "pool-0";
  double units_per_ms = 2000.0;
  mine->add_option("--epoch", epoch_path, "Epoch file")->required();
  mine->add_option("--store", store_path, "Instance store directory")->required();
  mine->add_option("--manager", manager, "Pool manager identity");
  mine->add_option("--units-per-ms", units_per_ms, "Modeled solver throughput")->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify", "Verify a block");
  std::string block_path, chain_log;
  std::int64_t now_ms = 0;
  std::optional<std::uint64_t> prev_id;
  std::optional<std::size_t> past_size;
  verify->add_option("--block", block_path, "Block file")->required();
  verify->add_option("--epoch", epoch_path, "Epoch file")->required();
  verify->add_option("--store", store_path, "Instance store directory")->required();
  verify->add_option("--now-ms", now_ms, "Verifier clock");
  verify->add_option("--prev-id", prev_id, "Instance id of the previous block");
  verify->add_option("--chain-log", chain_log, "Chain log; last id is the previous id");
  verify->add_option("--past-size", past_size, "Best accepted size this epoch");

  auto* sim = app.add_subcommand("simulate", "Run a scenario");
  std::string scenario;
  std::optional<std::size_t> epochs;
  std::size_t seeds = 1;
  sim->add_option("--scenario", scenario, "honest | selfish | replay | theft");
  sim->add_option("--epochs", epochs, "Epoch count");
  sim->add_option("--chain-log", chain_log, "Reference node chain log output");
  sim->add_option("--seeds", seeds, "Seeds for the theft scenario")->check(CLI::PositiveNumber);

  auto* bench = app.add_subcommand("bench", "Generation/verification timing sweep");
  std::string ns, degrees, workers, timing = "model";
  std::int64_t cutoff = 0;
  bench->add_option("--n", ns, "Comma-separated vertex counts");
  bench->add_option("--degree", degrees, "Comma-separated average degrees");
  bench->add_option("--worker-list", workers, "Comma-separated worker counts");
  bench->add_option("--cutoff-ms", cutoff, "Per-run cutoff");
  bench->add_option("--timing", timing, "model (reproducible) | wall");

  auto* storage = app.add_subcommand("storage-report", "Storage accounting");
  std::uint64_t pools = 1, sn = 0, sm = 0, sd = 0;
  storage->add_option("--pools", pools, "Pool count K")->check(CLI::PositiveNumber);
  storage->add_option("--graph", graph_path, "Graph file");
  storage->add_option("--n", sn, "Vertex count");
  storage->add_option("--m", sm, "Edge count");
  storage->add_option("--delta", sd, "Minimum degree");
  storage->add_flag("--gzip", gzip, "Graph file is gzip-compressed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*gen) return cmd_gen_graph(g, model, n, degree, p, gzip);
    if (*iso) return cmd_iso_pool(g, graph_path, gzip, z, reward, t_max, lookup, l, committee, instance_id);
    if (*solve) return cmd_solve(g, graph_path, gzip, stats);
    if (*mine) return cmd_mine(g, epoch_path, store_path, manager, units_per_ms);
    if (*verify) return cmd_verify(block_path, epoch_path, store_path, now_ms, prev_id, chain_log, past_size);
    if (*sim) return cmd_simulate(g, scenario, epochs, chain_log, seeds);
    if (*bench) return cmd_bench(g, ns, degrees, workers, cutoff, timing);
    if (*storage) {
      if (graph_path.empty() && sn == 0) throw sw::ParameterError("storage-report needs --graph or --n/--m/--delta");
      return cmd_storage(g, pools, graph_path, gzip, sn, sm, sd);
    }
  } catch (const sw::DecodeError& e) {
    std::cerr << "error: " << e.what() << " (at " << e.offset() << ")\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

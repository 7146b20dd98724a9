#include "harness.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstring>
#include <map>
#include <random>
#include <set>
#include <tuple>

#include "dpusim/bsdp.hpp"
#include "dpusim/cycle_model.hpp"
#include "dpusim/gemv.hpp"
#include "dpusim/mul_kernels.hpp"
#include "dpusim/transfer_model.hpp"

namespace dpusim::bench {

using json = nlohmann::ordered_json;

namespace {

constexpr std::uint64_t kVerifyCap = 64ull << 20;

json calibration_block(const ModelConfig& m) {
  json out = json::object();
  for (const auto& [k, v] : m.entries()) out[k] = json::parse(v);
  return out;
}

json base_config(const BenchConfig& cfg) {
  json c;
  c["subcommand"] = cfg.subcommand;
  c["seed"] = cfg.seed;
  c["config_file"] = cfg.config_path.empty() ? json(nullptr) : json(cfg.config_path);
  return c;
}

Report new_report(const BenchConfig& cfg, std::string title) {
  Report r;
  r.title = std::move(title);
  r.config = base_config(cfg);
  r.calibration = calibration_block(cfg.model);
  return r;
}

std::vector<std::uint8_t> random_bytes(std::mt19937_64& rng, std::uint64_t n) {
  std::vector<std::uint8_t> out(n);
  for (auto& b : out) b = static_cast<std::uint8_t>(rng());
  return out;
}

std::vector<std::int8_t> random_nibbles(std::mt19937_64& rng, std::uint64_t n, bool is_signed) {
  std::uniform_int_distribution<int> d(is_signed ? -8 : 0, is_signed ? 7 : 15);
  std::vector<std::int8_t> out(n);
  for (auto& v : out) v = static_cast<std::int8_t>(d(rng));
  return out;
}

std::vector<std::int8_t> random_int8(std::mt19937_64& rng, std::uint64_t n) {
  std::vector<std::int8_t> out(n);
  for (auto& v : out) v = static_cast<std::int8_t>(rng());
  return out;
}

std::int32_t naive_dot(std::span<const std::int8_t> a, std::span<const std::int8_t> b) {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::int64_t{a[i]} * b[i];
  return static_cast<std::int32_t>(static_cast<std::uint32_t>(s));
}

bool check_microkernel(const MicrokernelConfig& mk, std::span<const std::uint8_t> in,
                       std::span<const std::uint8_t> out, Word32 scalar) {
  if (mk.dtype == DType::Int8) {
    for (std::size_t i = 0; i < in.size(); ++i) {
      std::uint8_t expect = mk.op == ArithOp::Add
                                ? static_cast<std::uint8_t>(in[i] + scalar)
                                : static_cast<std::uint8_t>(static_cast<std::int8_t>(in[i]) *
                                                            static_cast<std::int8_t>(scalar & 0xFF));
      if (out[i] != expect) return false;
    }
    return true;
  }
  for (std::size_t i = 0; i < in.size(); i += 4) {
    Word32 a, b;
    std::memcpy(&a, &in[i], 4);
    std::memcpy(&b, &out[i], 4);
    if (b != (mk.op == ArithOp::Add ? a + scalar : a * scalar)) return false;
  }
  return true;
}

}  // namespace

OutputFormat parse_format(const std::string& s) {
  if (s == "table") return OutputFormat::Table;
  if (s == "json") return OutputFormat::Json;
  if (s == "csv") return OutputFormat::Csv;
  throw ContractViolation("unknown format '" + s + "'");
}

std::uint64_t parse_size(const std::string& s) {
  if (s.empty()) throw ContractViolation("empty size");
  std::size_t pos = 0;
  std::uint64_t v = 0;
  while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) v = v * 10 + (s[pos++] - '0');
  if (pos == 0) throw ContractViolation("bad size '" + s + "'");
  std::string suf = s.substr(pos);
  if (suf == "" || suf == "B") return v;
  if (suf == "K" || suf == "KB" || suf == "KiB") return v << 10;
  if (suf == "M" || suf == "MB" || suf == "MiB") return v << 20;
  if (suf == "G" || suf == "GB" || suf == "GiB") return v << 30;
  throw ContractViolation("bad size suffix in '" + s + "'");
}

// ---- arith ----

Report run_arith_bench(const BenchConfig& cfg) {
  const auto& p = cfg.arith;
  Report r = new_report(cfg, "single-DPU arithmetic microbenchmark");
  r.config["ops"] = p.ops;
  r.config["dtypes"] = p.dtypes;
  r.config["variants"] = p.variants;
  r.config["unrolls"] = p.unrolls;
  r.config["elements"] = p.elements;
  r.config["scalar"] = p.scalar ? json(*p.scalar) : json("default");

  std::vector<MicrokernelConfig> cases;
  for (const auto& o : p.ops)
    for (const auto& d : p.dtypes)
      for (const auto& v : p.variants)
        for (const auto& u : p.unrolls) {
          MicrokernelConfig mk{parse_arith_op(o), parse_dtype(d), parse_variant(v), Unroll::parse(u), 1024,
                               cfg.model.memory};
          try {
            validate_microkernel(mk);
          } catch (const ContractViolation&) {
            continue;
          }
          cases.push_back(mk);
        }
  if (cases.empty()) throw ContractViolation("no valid op/dtype/variant combination selected");
  if (p.elements == 0 || p.elements % 8 != 0)
    throw ContractViolation("elements must be a positive multiple of 8");

  std::mt19937_64 rng(cfg.seed);
  const auto buf8 = random_bytes(rng, p.elements);
  const auto buf32 = random_bytes(rng, p.elements * 4);
  auto scalar_for = [&](DType d) -> Word32 {
    if (p.scalar) return static_cast<Word32>(*p.scalar);
    return d == DType::Int8 ? 3u : 0x2AAAAAu;
  };

  struct Outcome {
    bool linked = false;
    std::uint64_t program = 0;
    double cpe = 0, worst = 0;
  };
  std::map<std::tuple<ArithOp, DType, Variant, std::string>, Outcome> memo;
  auto run_case = [&](const MicrokernelConfig& mk) -> Outcome {
    auto key = std::make_tuple(mk.op, mk.dtype, mk.variant, mk.unroll.label());
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    Outcome o;
    const auto& buf = mk.dtype == DType::Int8 ? buf8 : buf32;
    Word32 s = scalar_for(mk.dtype);
    try {
      auto res = update_microkernel(buf, s, mk);
      o.linked = true;
      o.program = res.program_instructions;
      o.cpe = res.cycles_per_element();
      o.worst = res.worst_case_cycles_per_element;
      r.check(check_microkernel(mk, buf, res.buffer, s));
    } catch (const IramOverflow&) {
      o.program = microkernel_program_size(mk);
    }
    memo[key] = o;
    return o;
  };

  r.columns = {"op",  "dtype", "variant", "unroll", "status", "program_instructions", "cycles_per_element",
               "mops_t1", "mops_t11", "worst_case_mops_t11", "speedup_vs_rolled", "speedup_vs_baseline"};
  for (const auto& mk : cases) {
    Outcome o = run_case(mk);
    json row;
    row["op"] = to_string(mk.op);
    row["dtype"] = to_string(mk.dtype);
    row["variant"] = to_string(mk.variant);
    row["unroll"] = mk.unroll.label();
    row["status"] = o.linked ? "ok" : "does not link";
    row["program_instructions"] = o.program;
    if (!o.linked) {
      for (const char* k : {"cycles_per_element", "mops_t1", "mops_t11", "worst_case_mops_t11", "speedup_vs_rolled",
                            "speedup_vs_baseline"})
        row[k] = nullptr;
      r.cases.push_back(row);
      continue;
    }
    auto sweep = tasklet_sweep(o.cpe, cfg.model.pipeline);
    auto sat = std::min(cfg.model.pipeline.saturation_tasklets, cfg.model.pipeline.max_tasklets);
    row["cycles_per_element"] = o.cpe;
    row["mops_t1"] = sweep.front().mops;
    row["mops_t11"] = sweep[sat - 1].mops;
    row["worst_case_cycles_per_element"] = o.worst;
    row["worst_case_mops_t11"] = throughput_mops(o.worst, sat, cfg.model.pipeline).mops;

    MicrokernelConfig rolled = mk;
    rolled.unroll = Unroll::by(1);
    MicrokernelConfig base = rolled;
    base.variant = Variant::Baseline;
    Outcome orl = run_case(rolled), ob = run_case(base);
    row["speedup_vs_rolled"] = orl.cpe / o.cpe;
    row["speedup_vs_baseline"] = ob.cpe / o.cpe;
    json mops = json::array();
    for (const auto& t : sweep) mops.push_back(t.mops);
    row["mops"] = mops;
    r.cases.push_back(row);
  }
  r.notes.push_back("worst-case figures assume every multiply runs its maximum MUL_STEP count");
  r.notes.push_back("speedups compare cycles per element against the rolled loop of the same variant, "
                    "and against the rolled baseline of the same op and dtype");
  return r;
}

// ---- bsdp ----

Report run_bsdp_bench(const BenchConfig& cfg) {
  const auto& p = cfg.bsdp;
  Report r = new_report(cfg, "bit-serial dot product vs native INT8 dot product");
  r.config["length"] = p.length;
  r.config["signedness"] = p.signedness;
  r.config["schedule"] = p.schedule;
  r.config["tasklets"] = p.tasklets;
  if (p.length == 0 || p.length % 32 != 0) throw ContractViolation("length must be a positive multiple of 32");
  BsdpConfig bc;
  if (p.schedule == "reload32")
    bc.schedule = BsdpLoadSchedule::Reload32;
  else if (p.schedule == "paired64")
    bc.schedule = BsdpLoadSchedule::Paired64;
  else
    throw ContractViolation("unknown schedule '" + p.schedule + "'");

  std::mt19937_64 rng(cfg.seed);
  r.columns = {"signedness",   "length",        "result",         "oracle",           "bsdp_cycles_per_element",
               "baseline_cycles_per_element", "optimized_cycles_per_element", "bsdp_mops", "baseline_mops",
               "optimized_mops", "speedup_vs_baseline", "speedup_vs_optimized"};
  for (const auto& s : p.signedness) {
    bool is_signed;
    if (s == "signed")
      is_signed = true;
    else if (s == "unsigned")
      is_signed = false;
    else
      throw ContractViolation("unknown signedness '" + s + "'");
    auto a = random_nibbles(rng, p.length, is_signed);
    auto b = random_nibbles(rng, p.length, is_signed);
    auto sg = is_signed ? Signedness::Signed : Signedness::Unsigned;
    auto pa = transpose_to_bitplanes(a, sg), pb = transpose_to_bitplanes(b, sg);
    r.check(decode_bitplanes(encode_bitplanes(pa)).reconstruct() == a);

    auto kb = bsdp_dot(pa, pb, bc);
    auto kn = native_dot_baseline(a, b);
    auto ko = native_dot_optimized(a, b);
    std::int32_t oracle = naive_dot(a, b);
    r.check(as_signed(kb.outputs[0]) == oracle);
    r.check(as_signed(kn.outputs[0]) == oracle);
    r.check(as_signed(ko.outputs[0]) == oracle);

    auto n = static_cast<double>(p.length);
    double cb = static_cast<double>(cycles_of(kb.trace)) / n;
    double cn = static_cast<double>(cycles_of(kn.trace)) / n;
    double co = static_cast<double>(cycles_of(ko.trace)) / n;
    auto tb = throughput_mops(cb, p.tasklets, cfg.model.pipeline);
    auto tn = throughput_mops(cn, p.tasklets, cfg.model.pipeline);
    auto to = throughput_mops(co, p.tasklets, cfg.model.pipeline);
    json row;
    row["signedness"] = s;
    row["length"] = p.length;
    row["result"] = as_signed(kb.outputs[0]);
    row["oracle"] = oracle;
    row["bsdp_cycles_per_element"] = cb;
    row["baseline_cycles_per_element"] = cn;
    row["optimized_cycles_per_element"] = co;
    row["bsdp_mops"] = tb.mops;
    row["baseline_mops"] = tn.mops;
    row["optimized_mops"] = to.mops;
    row["speedup_vs_baseline"] = speedup(tn, tb);
    row["speedup_vs_optimized"] = speedup(to, tb);
    json mix = json::object();
    for (std::size_t i = 0; i < kOpcodeCount; ++i)
      if (auto c = kb.trace.counts()[i]) mix[std::string(opcode_name(static_cast<Opcode>(i)))] = c;
    row["bsdp_instruction_mix"] = mix;
    r.cases.push_back(row);
  }
  r.notes.push_back("MOPS counts dot-product elements (one multiply-accumulate each) per second");
  return r;
}

// ---- transfer ----

Report run_transfer_bench(const BenchConfig& cfg) {
  const auto& p = cfg.transfer;
  const auto& topo = cfg.model.topology;
  const auto& cal = cfg.model.transfer;
  Report r = new_report(cfg, "host <-> PIM parallel transfer throughput");
  r.config["min_ranks"] = p.min_ranks;
  r.config["max_ranks"] = p.max_ranks;
  r.config["baseline_placement"] = p.baseline_placement;
  r.config["balanced_placement"] = p.balanced_placement;
  r.config["node"] = p.node ? json(*p.node) : json(nullptr);
  r.config["bytes"] = p.bytes;
  if (p.min_ranks < 2 || p.max_ranks > topo.total_ranks() || p.min_ranks > p.max_ranks)
    throw ContractViolation("rank range must lie within 2.." + std::to_string(topo.total_ranks()));
  if (p.bytes == 0) throw ContractViolation("bytes must be positive");
  auto base_place = BufferPlacement::parse(p.baseline_placement);
  auto bal_place = BufferPlacement::parse(p.balanced_placement);
  AllocationPolicy bal_policy;
  bal_policy.node_constraint = p.node;
  AllocationPolicy base_policy{PolicyKind::BaselineSequential, std::nullopt, std::nullopt};

  auto channels_used = [](const RankSet& s) {
    std::set<std::pair<unsigned, unsigned>> ch;
    for (const auto& c : s.ranks) ch.insert({c.socket, c.channel});
    return ch.size();
  };

  r.columns = {"ranks",        "h2p_baseline_gbps", "h2p_balanced_gbps", "h2p_ratio", "p2h_baseline_gbps",
               "p2h_balanced_gbps", "p2h_ratio",     "h2p_balanced_s",    "p2h_balanced_s"};
  struct Acc {
    double peak = 0, sum = 0;
    unsigned n = 0;
    double last = 0;
  } h2p, p2h;
  bool write_gt_read = true, balanced_ge_baseline = true;
  double plateau = -1;
  unsigned plateau_from = 0;
  for (unsigned n = p.min_ranks; n <= p.max_ranks; ++n) {
    if (p.node && n > topo.ranks_per_socket()) break;
    auto base = allocate_ranks(n, base_policy, topo);
    auto bal = allocate_ranks(n, bal_policy, topo);
    json row;
    row["ranks"] = n;
    for (auto dir : {Direction::HostToPim, Direction::PimToHost}) {
      double gb = estimate_throughput(base, dir, base_place, cal, topo);
      double gl = estimate_throughput(bal, dir, bal_place, cal, topo);
      std::string pre = dir == Direction::HostToPim ? "h2p" : "p2h";
      row[pre + "_baseline_gbps"] = gb;
      row[pre + "_balanced_gbps"] = gl;
      row[pre + "_ratio"] = gl / gb;
      row[pre + "_balanced_s"] = transfer_time(p.bytes, bal, dir, bal_place, cal, topo);
      balanced_ge_baseline = balanced_ge_baseline && gl >= gb;
      auto& acc = dir == Direction::HostToPim ? h2p : p2h;
      if (n >= 2 && n <= 10) {
        acc.peak = std::max(acc.peak, gl / gb);
        acc.sum += gl / gb;
        ++acc.n;
      }
      acc.last = gl / gb;
    }
    for (const auto* rs : {&base, &bal})
      for (auto place : {base_place, bal_place})
        write_gt_read = write_gt_read && estimate_throughput(*rs, Direction::HostToPim, place, cal, topo) >
                                             estimate_throughput(*rs, Direction::PimToHost, place, cal, topo);
    double h = row["h2p_balanced_gbps"].get<double>();
    if (h != plateau) {
      plateau = h;
      plateau_from = n;
    }
    row["channels_baseline"] = channels_used(base);
    row["channels_balanced"] = channels_used(bal);
    r.cases.push_back(row);
  }
  auto summarize = [](const Acc& a) {
    json s;
    s["peak_ratio_2_10"] = a.n ? json(a.peak) : json(nullptr);
    s["mean_ratio_2_10"] = a.n ? json(a.sum / a.n) : json(nullptr);
    s["ratio_at_max_ranks"] = a.last;
    return s;
  };
  r.summary["host_to_pim"] = summarize(h2p);
  r.summary["pim_to_host"] = summarize(p2h);
  r.summary["h2p_balanced_plateau_gbps"] = plateau;
  r.summary["h2p_balanced_plateau_from_ranks"] = plateau_from;
  r.summary["write_exceeds_read"] = write_gt_read;
  r.summary["balanced_at_least_baseline"] = balanced_ge_baseline;
  r.notes.push_back("absolute GB/s values are fitted calibration, not measurements");
  return r;
}

// ---- gemv ----

Report run_gemv_bench(const BenchConfig& cfg) {
  const auto& p = cfg.gemv;
  const auto& topo = cfg.model.topology;
  Report r = new_report(cfg, "GEMV across DPUs");
  r.config["dtypes"] = p.dtypes;
  r.config["scenarios"] = p.scenarios;
  r.config["cols"] = p.cols;
  r.config["sizes"] = p.sizes;
  r.config["dpus"] = p.dpus;
  r.config["ranks"] = p.ranks;
  r.config["policy"] = p.policy;
  r.config["placement"] = p.placement;
  r.config["verify_size"] = p.verify_size;
  r.config["verify_cols"] = p.verify_cols;
  r.config["verify_max_dpus"] = p.verify_max_dpus;

  AllocationPolicy pol;
  pol.kind = parse_policy(p.policy);
  auto ranks = allocate_ranks(p.ranks, pol, topo);
  const std::uint32_t dpus = p.dpus ? p.dpus : usable_dpus(ranks, topo);
  GemvEnvironment env{cfg.model.transfer, topo, cfg.model.pipeline, BufferPlacement::parse(p.placement)};
  r.config["dpus_used"] = dpus;

  r.columns = {"dtype", "scenario", "matrix_bytes", "rows", "cols", "mode", "compute_s", "matrix_transfer_s",
               "vector_transfer_s", "result_transfer_s", "total_s", "gops"};
  std::map<std::string, double> peak;
  std::map<std::string, json> largest;
  for (const auto& dts : p.dtypes) {
    auto dt = parse_gemv_dtype(dts);
    if (dt == GemvDType::Int4Bsdp && p.cols % 32 != 0) throw ContractViolation("INT4 needs cols divisible by 32");
    for (const auto& sz : p.sizes) {
      std::uint64_t bytes = parse_size(sz);
      std::uint64_t row_bytes = dt == GemvDType::Int8 ? p.cols : p.cols / 2;
      std::uint64_t rows = bytes / row_bytes;
      if (rows < dpus)
        throw ContractViolation("size " + sz + " gives " + std::to_string(rows) + " rows, fewer than " +
                                std::to_string(dpus) + " DPUs");
      auto plan = plan_gemv(rows, p.cols, dpus, dt);
      for (const auto& scs : p.scenarios) {
        auto sc = parse_scenario(scs);
        auto t = estimate_gemv(plan, sc, ranks, env);
        json row;
        row["dtype"] = to_string(dt);
        row["scenario"] = to_string(sc);
        row["matrix_bytes"] = plan.matrix_bytes();
        row["rows"] = rows;
        row["cols"] = p.cols;
        row["mode"] = plan.matrix_bytes() <= kVerifyCap ? "estimate (desk scale)" : "estimate only";
        row["compute_s"] = t.compute_s;
        row["matrix_transfer_s"] = t.matrix_transfer_s;
        row["vector_transfer_s"] = t.vector_transfer_s;
        row["result_transfer_s"] = t.result_transfer_s;
        row["total_s"] = t.total_s();
        row["gops"] = t.gops;
        row["compute_over_vector_transfers"] = t.compute_s / (t.vector_transfer_s + t.result_transfer_s);
        if (sc == GemvScenario::MV) row["matrix_transfer_over_compute"] = t.matrix_transfer_s / t.compute_s;
        std::string key = std::string(to_string(dt)) + "_" + std::string(to_string(sc));
        peak[key] = std::max(peak[key], t.gops);
        largest[key] = row;
        r.cases.push_back(row);
      }
    }
  }
  json pk = json::object();
  for (const auto& [k, v] : peak) pk[k] = v;
  r.summary["peak_gops"] = pk;
  if (peak.count("int8_V") && peak.count("int4_V")) r.summary["int4_over_int8_V"] = peak["int4_V"] / peak["int8_V"];
  if (largest.count("int8_V")) {
    r.summary["int8_V_largest_compute_s"] = largest["int8_V"]["compute_s"];
    r.summary["int8_V_largest_compute_over_vector_transfers"] = largest["int8_V"]["compute_over_vector_transfers"];
  }
  r.summary["server_int8_reference_gops"] = {kServerInt8GopsTypical, kServerInt8GopsCeiling};

  // Functional check on a desk-scale instance, repeated over several partitions.
  std::uint64_t vbytes = parse_size(p.verify_size);
  if (vbytes > kVerifyCap) throw ContractViolation("functional verification is capped at 64M");
  json verify = json::array();
  if (vbytes > 0) {
    std::mt19937_64 rng(cfg.seed);
    for (const auto& dts : p.dtypes) {
      auto dt = parse_gemv_dtype(dts);
      std::uint64_t vc = p.verify_cols;
      if (dt == GemvDType::Int4Bsdp && vc % 32 != 0) throw ContractViolation("verify cols must divide by 32");
      std::uint64_t rows = vbytes / (dt == GemvDType::Int8 ? vc : vc / 2);
      if (rows < p.verify_max_dpus) throw ContractViolation("verification instance has too few rows");
      bool i4 = dt == GemvDType::Int4Bsdp;
      auto mat = i4 ? random_nibbles(rng, rows * vc, true) : random_int8(rng, rows * vc);
      auto vec = i4 ? random_nibbles(rng, vc, true) : random_int8(rng, vc);
      std::vector<std::int32_t> oracle(rows);
      for (std::uint64_t i = 0; i < rows; ++i) oracle[i] = naive_dot(std::span(mat).subspan(i * vc, vc), vec);
      std::vector<BitPlaneVector> enc;
      BitPlaneVector venc;
      if (i4) {
        enc = encode_int4_rows(mat, rows, vc);
        venc = transpose_to_bitplanes(vec, Signedness::Signed);
      }
      bool all = true;
      for (std::uint32_t d = 1; d <= p.verify_max_dpus; ++d) {
        auto plan = plan_gemv(rows, vc, d, dt);
        auto run = i4 ? run_gemv_functional(plan, enc, venc) : run_gemv_functional(plan, mat, vec);
        bool ok = run.result == oracle;
        r.check(ok);
        all = all && ok;
      }
      json v;
      v["dtype"] = to_string(dt);
      v["rows"] = rows;
      v["cols"] = vc;
      v["partitions"] = std::to_string(1) + ".." + std::to_string(p.verify_max_dpus);
      v["matches_oracle"] = all;
      verify.push_back(v);
    }
  }
  r.summary["functional_check"] = verify;
  r.notes.push_back("sizes are stored matrix bytes; INT4 packs two elements per byte");
  r.notes.push_back("compute time uses the DPU with the most rows at full pipeline occupancy");
  return r;
}

Report run_bench(const BenchConfig& cfg) {
  if (cfg.subcommand == "arith") return run_arith_bench(cfg);
  if (cfg.subcommand == "bsdp") return run_bsdp_bench(cfg);
  if (cfg.subcommand == "transfer") return run_transfer_bench(cfg);
  if (cfg.subcommand == "gemv") return run_gemv_bench(cfg);
  throw ContractViolation("unknown subcommand '" + cfg.subcommand + "'");
}

// ---- output ----

json to_json(const Report& r) {
  json j;
  j["tool"] = "dpusim";
  j["title"] = r.title;
  j["config"] = r.config;
  j["calibration"] = r.calibration;
  j["cases"] = r.cases;
  j["summary"] = r.summary;
  j["oracle"] = {{"checks", r.oracle_checks}, {"failures", r.oracle_failures}};
  j["notes"] = r.notes;
  return j;
}

namespace {

std::string cell(const json& v) {
  if (v.is_null()) return "-";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v.get<double>());
    return buf;
  }
  return v.dump();
}

}  // namespace

void write_report(std::ostream& os, const Report& r, OutputFormat f) {
  if (f == OutputFormat::Json) {
    os << to_json(r).dump(2) << "\n";
    return;
  }
  if (f == OutputFormat::Csv) {
    for (std::size_t i = 0; i < r.columns.size(); ++i) os << (i ? "," : "") << r.columns[i];
    os << "\n";
    for (const auto& row : r.cases) {
      for (std::size_t i = 0; i < r.columns.size(); ++i) {
        auto it = row.find(r.columns[i]);
        os << (i ? "," : "") << (it == row.end() || it->is_null() ? "" : cell(*it));
      }
      os << "\n";
    }
    return;
  }
  os << "# " << r.title << "\n";
  std::vector<std::vector<std::string>> grid;
  grid.push_back(r.columns);
  for (const auto& row : r.cases) {
    std::vector<std::string> line;
    for (const auto& c : r.columns) {
      auto it = row.find(c);
      line.push_back(it == row.end() ? "-" : cell(*it));
    }
    grid.push_back(line);
  }
  std::vector<std::size_t> width(r.columns.size(), 0);
  for (const auto& line : grid)
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  for (const auto& line : grid) {
    for (std::size_t i = 0; i < line.size(); ++i) {
      os << (i ? "  " : "") << line[i];
      if (i + 1 < line.size()) os << std::string(width[i] - line[i].size(), ' ');
    }
    os << "\n";
  }
  if (!r.summary.empty()) {
    os << "\nsummary:\n";
    for (const auto& [k, v] : r.summary.items()) os << "  " << k << ": " << (v.is_structured() ? v.dump() : cell(v)) << "\n";
  }
  for (const auto& n : r.notes) os << "note: " << n << "\n";
  os << "oracle checks: " << r.oracle_checks << ", failures: " << r.oracle_failures << "\n";
}

}  // namespace dpusim::bench

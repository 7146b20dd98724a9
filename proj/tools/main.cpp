#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "harness.hpp"

using namespace dpusim;
using namespace dpusim::bench;

int main(int argc, char** argv) {
  CLI::App app{"dpusim - DPU kernel, transfer and GEMV models"};
  app.require_subcommand(1);
  app.fallthrough();

  BenchConfig cfg;
  std::string format = "table";
  std::string out_path;
  app.add_option("--config", cfg.config_path, "model configuration file (key = value)");
  app.add_option("--seed", cfg.seed, "seed for generated inputs");
  app.add_option("--format", format, "table|json|csv")->check(CLI::IsMember({"table", "json", "csv"}));
  app.add_option("--out", out_path, "write the report here instead of stdout");

  auto* arith = app.add_subcommand("arith", "single-DPU add/multiply microbenchmark");
  arith->add_option("--op", cfg.arith.ops, "add, mul")->delimiter(',');
  arith->add_option("--dtype", cfg.arith.dtypes, "int8, int32")->delimiter(',');
  arith->add_option("--variant", cfg.arith.variants, "baseline, ni, nix4, nix8, dim")->delimiter(',');
  arith->add_option("--unroll", cfg.arith.unrolls, "1, 64, 128, auto")->delimiter(',');
  arith->add_option("--elements", cfg.arith.elements, "buffer length in elements");
  arith->add_option("--scalar", cfg.arith.scalar, "scalar operand (default 3 for int8, 0x2AAAAA for int32)");

  auto* bsdp = app.add_subcommand("bsdp", "bit-serial INT4 dot product benchmark");
  bsdp->add_option("--length", cfg.bsdp.length, "vector length (multiple of 32)");
  bsdp->add_option("--signedness", cfg.bsdp.signedness, "unsigned, signed")->delimiter(',');
  bsdp->add_option("--schedule", cfg.bsdp.schedule, "reload32|paired64");
  bsdp->add_option("--tasklets", cfg.bsdp.tasklets, "tasklets for the MOPS figures");

  auto* transfer = app.add_subcommand("transfer", "host <-> PIM transfer sweep");
  transfer->add_option("--min-ranks", cfg.transfer.min_ranks);
  transfer->add_option("--max-ranks", cfg.transfer.max_ranks);
  transfer->add_option("--baseline-placement", cfg.transfer.baseline_placement, "0|1|local|unpinned");
  transfer->add_option("--balanced-placement", cfg.transfer.balanced_placement, "0|1|local|unpinned");
  transfer->add_option("--node", cfg.transfer.node, "restrict the balanced policy to one socket");
  transfer->add_option("--bytes", cfg.transfer.bytes, "payload for the transfer-time column");

  auto* gemv = app.add_subcommand("gemv", "GEMV timing estimates and functional check");
  gemv->add_option("--dtype", cfg.gemv.dtypes, "int8, int4")->delimiter(',');
  gemv->add_option("--scenario", cfg.gemv.scenarios, "V, MV")->delimiter(',');
  gemv->add_option("--cols", cfg.gemv.cols);
  gemv->add_option("--sizes", cfg.gemv.sizes, "matrix sizes, e.g. 256M,1G,128G")->delimiter(',');
  gemv->add_option("--dpus", cfg.gemv.dpus, "DPUs to use (default: all usable in the ranks)");
  gemv->add_option("--ranks", cfg.gemv.ranks);
  gemv->add_option("--policy", cfg.gemv.policy, "baseline|balanced");
  gemv->add_option("--placement", cfg.gemv.placement, "0|1|local|unpinned");
  gemv->add_option("--verify-size", cfg.gemv.verify_size, "matrix bytes for the functional check (<= 64M, 0 to skip)");
  gemv->add_option("--verify-cols", cfg.gemv.verify_cols);
  gemv->add_option("--verify-max-dpus", cfg.gemv.verify_max_dpus);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  Report report;
  try {
    cfg.subcommand = app.get_subcommands().front()->get_name();
    cfg.format = parse_format(format);
    if (!cfg.config_path.empty()) cfg.model = load_model_config(cfg.config_path);
    report = run_bench(cfg);
  } catch (const ContractViolation& e) {
    std::cerr << "dpusim: " << e.what() << "\n";
    return 2;
  } catch (const AllocationError& e) {
    std::cerr << "dpusim: " << e.what() << "\n";
    return 2;
  }

  if (out_path.empty()) {
    write_report(std::cout, report, cfg.format);
  } else {
    std::ofstream f(out_path, std::ios::binary);
    if (!f) {
      std::cerr << "dpusim: cannot write " << out_path << "\n";
      return 2;
    }
    write_report(f, report, cfg.format);
  }
  if (!report.ok()) {
    std::cerr << "dpusim: " << report.oracle_failures << " oracle check(s) failed\n";
    return 1;
  }
  return 0;
}

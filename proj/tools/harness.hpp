#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpusim/config.hpp"

namespace dpusim::bench {

enum class OutputFormat { Table, Json, Csv };

OutputFormat parse_format(const std::string& s);

struct ArithParams {
  std::vector<std::string> ops{"add", "mul"};
  std::vector<std::string> dtypes{"int8", "int32"};
  std::vector<std::string> variants{"baseline", "ni", "nix4", "nix8", "dim"};
  std::vector<std::string> unrolls{"1", "64", "128", "auto"};
  std::uint64_t elements = 1u << 20;
  std::optional<std::int64_t> scalar;
};

struct BsdpParams {
  std::uint64_t length = 8192;
  std::vector<std::string> signedness{"unsigned", "signed"};
  std::string schedule = "reload32";
  unsigned tasklets = 11;
};

struct TransferParams {
  unsigned min_ranks = 2;
  unsigned max_ranks = 40;
  std::string baseline_placement = "unpinned";
  std::string balanced_placement = "local";
  std::optional<unsigned> node;
  std::uint64_t bytes = 1ull << 30;
};

struct GemvParams {
  std::vector<std::string> dtypes{"int8", "int4"};
  std::vector<std::string> scenarios{"V", "MV"};
  std::uint64_t cols = 65536;
  std::vector<std::string> sizes{"256M", "512M", "1G", "2G", "4G", "8G", "16G", "32G", "64G", "128G"};
  std::uint32_t dpus = 0;  // 0: every usable DPU of the allocated ranks
  unsigned ranks = 40;
  std::string policy = "balanced";
  std::string placement = "local";
  std::string verify_size = "4M";
  std::uint64_t verify_cols = 1024;
  std::uint32_t verify_max_dpus = 8;
};

struct BenchConfig {
  std::string subcommand;
  std::string config_path;
  ModelConfig model{};
  std::uint64_t seed = 1;
  OutputFormat format = OutputFormat::Table;
  ArithParams arith;
  BsdpParams bsdp;
  TransferParams transfer;
  GemvParams gemv;
};

struct Report {
  std::string title;
  nlohmann::ordered_json config;
  nlohmann::ordered_json calibration;
  std::vector<std::string> columns;  // scalar keys shown in table/CSV views
  std::vector<nlohmann::ordered_json> cases;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  std::uint64_t oracle_checks = 0;
  std::uint64_t oracle_failures = 0;
  std::vector<std::string> notes;

  bool ok() const noexcept { return oracle_failures == 0; }
  void check(bool pass) {
    ++oracle_checks;
    if (!pass) ++oracle_failures;
  }
};

Report run_arith_bench(const BenchConfig& cfg);
Report run_bsdp_bench(const BenchConfig& cfg);
Report run_transfer_bench(const BenchConfig& cfg);
Report run_gemv_bench(const BenchConfig& cfg);
Report run_bench(const BenchConfig& cfg);

/// Parses sizes such as "4096", "64M", "1G" (binary multiples).
std::uint64_t parse_size(const std::string& s);

void write_report(std::ostream& os, const Report& r, OutputFormat f);
nlohmann::ordered_json to_json(const Report& r);

}  // namespace dpusim::bench

#include "dpusim/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

namespace dpusim {

namespace {

std::string fmt(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

template <class T>
std::string fmt(T v) {
  return std::to_string(v);
}

template <class T>
bool parse_num(const std::string& s, T& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

struct Field {
  const char* key;
  std::function<std::string(const ModelConfig&)> get;
  std::function<bool(ModelConfig&, const std::string&)> set;
};

template <class M>
Field field(const char* key, M ModelConfig::*section, auto member) {
  return {key, [=](const ModelConfig& c) { return fmt((c.*section).*member); },
          [=](ModelConfig& c, const std::string& v) { return parse_num(v, (c.*section).*member); }};
}

Field dir_field(const char* key, DirectionCalibration TransferCalibration::*dir, double DirectionCalibration::*member) {
  return {key, [=](const ModelConfig& c) { return fmt((c.transfer.*dir).*member); },
          [=](ModelConfig& c, const std::string& v) { return parse_num(v, (c.transfer.*dir).*member); }};
}

const std::vector<Field>& schema() {
  using MC = ModelConfig;
  using DC = DirectionCalibration;
  using TC = TransferCalibration;
  static const std::vector<Field> fields = {
      field("pipeline.stages", &MC::pipeline, &PipelineConfig::stages),
      field("pipeline.saturation_tasklets", &MC::pipeline, &PipelineConfig::saturation_tasklets),
      field("pipeline.max_tasklets", &MC::pipeline, &PipelineConfig::max_tasklets),
      field("pipeline.frequency_hz", &MC::pipeline, &PipelineConfig::frequency_hz),
      field("memory.mram_bytes", &MC::memory, &MemoryConfig::mram_bytes),
      field("memory.wram_bytes", &MC::memory, &MemoryConfig::wram_bytes),
      field("memory.iram_bytes", &MC::memory, &MemoryConfig::iram_bytes),
      field("memory.instruction_size_bytes", &MC::memory, &MemoryConfig::instruction_size_bytes),
      field("topology.sockets", &MC::topology, &ServerTopology::sockets),
      field("topology.dram_channels_per_socket", &MC::topology, &ServerTopology::dram_channels_per_socket),
      field("topology.pim_channels_per_socket", &MC::topology, &ServerTopology::pim_channels_per_socket),
      field("topology.dimms_per_channel", &MC::topology, &ServerTopology::dimms_per_channel),
      field("topology.ranks_per_dimm", &MC::topology, &ServerTopology::ranks_per_dimm),
      field("topology.dpus_per_rank", &MC::topology, &ServerTopology::dpus_per_rank),
      field("topology.disabled_dpus", &MC::topology, &ServerTopology::disabled_dpus),
      field("transfer.channel_cap_gbps", &MC::transfer, &TC::channel_cap_gbps),
      field("transfer.channel_efficiency", &MC::transfer, &TC::channel_efficiency),
      field("transfer.block_bytes", &MC::transfer, &TC::block_bytes),
      dir_field("transfer.write.dimm_rate_gbps", &TC::write, &DC::dimm_rate_gbps),
      dir_field("transfer.write.socket_cap_gbps", &TC::write, &DC::socket_cap_gbps),
      dir_field("transfer.write.aggregate_cap_gbps", &TC::write, &DC::aggregate_cap_gbps),
      dir_field("transfer.write.cross_numa_penalty", &TC::write, &DC::cross_numa_penalty),
      dir_field("transfer.write.dram_cap_gbps", &TC::write, &DC::dram_cap_gbps),
      dir_field("transfer.read.dimm_rate_gbps", &TC::read, &DC::dimm_rate_gbps),
      dir_field("transfer.read.socket_cap_gbps", &TC::read, &DC::socket_cap_gbps),
      dir_field("transfer.read.aggregate_cap_gbps", &TC::read, &DC::aggregate_cap_gbps),
      dir_field("transfer.read.cross_numa_penalty", &TC::read, &DC::cross_numa_penalty),
      dir_field("transfer.read.dram_cap_gbps", &TC::read, &DC::dram_cap_gbps),
  };
  return fields;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void ModelConfig::validate() const {
  pipeline.validate();
  memory.validate();
  topology.validate();
  transfer.validate();
}

std::vector<std::pair<std::string, std::string>> ModelConfig::entries() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : schema()) out.emplace_back(f.key, f.get(*this));
  return out;
}

ModelConfig parse_model_config(const std::string& text, const std::string& origin) {
  ModelConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto where = origin + ":" + std::to_string(lineno) + ": ";
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ContractViolation(where + "expected key = value");
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    const Field* f = nullptr;
    for (const auto& cand : schema())
      if (key == cand.key) f = &cand;
    if (!f) throw ContractViolation(where + "unknown key '" + key + "'");
    if (!f->set(cfg, value)) throw ContractViolation(where + "bad value '" + value + "' for " + key);
  }
  cfg.validate();
  return cfg;
}

ModelConfig load_model_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ContractViolation("cannot open config file " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_model_config(ss.str(), path.string());
}

}  // namespace dpusim

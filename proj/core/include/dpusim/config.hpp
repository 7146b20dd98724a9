#pragma once

// Model configuration file: `key = value` lines, `#` starts a comment.
//
//   pipeline.{stages,saturation_tasklets,max_tasklets,frequency_hz}
//   memory.{mram_bytes,wram_bytes,iram_bytes,instruction_size_bytes}
//   topology.{sockets,dram_channels_per_socket,pim_channels_per_socket,
//             dimms_per_channel,ranks_per_dimm,dpus_per_rank,disabled_dpus}
//   transfer.{channel_cap_gbps,channel_efficiency,block_bytes}
//   transfer.{write,read}.{dimm_rate_gbps,socket_cap_gbps,aggregate_cap_gbps,
//                          cross_numa_penalty,dram_cap_gbps}
//
// Unknown keys are an error; omitted keys keep their defaults.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "dpusim/cycle_model.hpp"
#include "dpusim/isa.hpp"
#include "dpusim/transfer_model.hpp"

namespace dpusim {

struct ModelConfig {
  PipelineConfig pipeline{};
  MemoryConfig memory{};
  ServerTopology topology{};
  TransferCalibration transfer{};

  void validate() const;
  /// Every key with its current value, in schema order.
  std::vector<std::pair<std::string, std::string>> entries() const;
};

ModelConfig parse_model_config(const std::string& text, const std::string& origin = "<string>");
ModelConfig load_model_config(const std::filesystem::path& path);

}  // namespace dpusim

#pragma once

// Host <-> PIM transfer model for a dual-socket server with UPMEM DIMMs.

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dpusim/error.hpp"

namespace dpusim {

struct ServerTopology {
  unsigned sockets = 2;
  unsigned dram_channels_per_socket = 1;
  unsigned pim_channels_per_socket = 5;
  unsigned dimms_per_channel = 2;
  unsigned ranks_per_dimm = 2;
  unsigned dpus_per_rank = 64;
  unsigned disabled_dpus = 9;

  void validate() const;
  unsigned ranks_per_channel() const noexcept { return dimms_per_channel * ranks_per_dimm; }
  unsigned ranks_per_socket() const noexcept { return pim_channels_per_socket * ranks_per_channel(); }
  unsigned total_ranks() const noexcept { return sockets * ranks_per_socket(); }
  unsigned total_dpus() const noexcept { return total_ranks() * dpus_per_rank - disabled_dpus; }
};

struct RankCoord {
  unsigned socket = 0;
  unsigned channel = 0;
  unsigned dimm = 0;
  unsigned rank = 0;

  friend auto operator<=>(const RankCoord&, const RankCoord&) = default;
};

struct RankSet {
  std::vector<RankCoord> ranks;

  std::size_t size() const noexcept { return ranks.size(); }
  bool empty() const noexcept { return ranks.empty(); }
  /// Throws ContractViolation on duplicates or coordinates outside `topo`.
  void validate(const ServerTopology& topo) const;
};

/// Fixed device-list order: socket, channel, DIMM, rank (rank varies fastest).
std::vector<RankCoord> device_order(const ServerTopology& topo);

/// Usable DPUs in `ranks`. Disabled DPUs sit one per rank on the last ranks
/// of the device order.
unsigned usable_dpus(const RankSet& ranks, const ServerTopology& topo);

enum class PolicyKind : std::uint8_t { BaselineSequential, NumaChannelBalanced };

struct AllocationPolicy {
  PolicyKind kind = PolicyKind::NumaChannelBalanced;
  std::optional<unsigned> node_constraint;
  /// Per-channel rank counts; one entry per PIM channel of the constrained
  /// socket, or one per PIM channel of every socket (socket-major).
  std::optional<std::vector<unsigned>> channel_distribution;
};

std::vector<unsigned> equal_channel_distribution(unsigned n, unsigned socket, const ServerTopology& topo = {});

RankSet allocate_ranks(unsigned n, const AllocationPolicy& policy, const ServerTopology& topo = {});

enum class Direction : std::uint8_t { HostToPim, PimToHost };

/// NUMA node that holds the host-side buffer.
class BufferPlacement {
 public:
  enum class Kind : std::uint8_t { Node, Local, Unpinned };

  static BufferPlacement node(unsigned n) { return BufferPlacement(Kind::Node, n); }
  /// One buffer per socket, each next to the ranks it feeds.
  static BufferPlacement local() { return BufferPlacement(Kind::Local, 0); }
  /// Buffer placed by the OS; modeled as equally likely on either node.
  static BufferPlacement unpinned() { return BufferPlacement(Kind::Unpinned, 0); }
  /// "0", "1", ..., "local" or "unpinned".
  static BufferPlacement parse(std::string_view s);

  Kind kind() const noexcept { return kind_; }
  unsigned node_id() const noexcept { return node_; }
  std::string label() const;

 private:
  BufferPlacement(Kind k, unsigned n) : kind_(k), node_(n) {}
  Kind kind_;
  unsigned node_;
};

struct DirectionCalibration {
  double dimm_rate_gbps = 0;       // one UPMEM DIMM streaming alone
  double socket_cap_gbps = 0;      // CPU-side limit of one socket's PIM traffic
  double aggregate_cap_gbps = 0;   // whole-host limit
  double cross_numa_penalty = 1;   // factor on traffic whose buffer is on the other node
  double dram_cap_gbps = 0;        // host DRAM bandwidth on the buffer's node
};

struct TransferCalibration {
  double channel_cap_gbps = 19.2;
  double channel_efficiency = 0.675;
  DirectionCalibration write{12.0, 16.35, 36.0, 0.74, 30.0};
  DirectionCalibration read{6.0, 15.0, 22.0, 0.75, 20.0};
  std::uint64_t block_bytes = 32ull << 20;

  void validate() const;
  const DirectionCalibration& of(Direction d) const noexcept { return d == Direction::HostToPim ? write : read; }
  double host_write_agg_cap_gbps() const noexcept { return write.aggregate_cap_gbps; }
  double host_read_agg_cap_gbps() const noexcept { return read.aggregate_cap_gbps; }
};

double estimate_throughput(const RankSet& ranks, Direction direction, BufferPlacement placement,
                           const TransferCalibration& cal = {}, const ServerTopology& topo = {});

/// Seconds to move `bytes`, rounded up to whole transfer blocks.
double transfer_time(std::uint64_t bytes, const RankSet& ranks, Direction direction, BufferPlacement placement,
                     const TransferCalibration& cal = {}, const ServerTopology& topo = {});

std::string_view to_string(PolicyKind k) noexcept;
std::string_view to_string(Direction d) noexcept;
PolicyKind parse_policy(std::string_view s);

}  // namespace dpusim

#include "dpusim/transfer_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <set>

namespace dpusim {

void ServerTopology::validate() const {
  detail::require(sockets >= 1 && pim_channels_per_socket >= 1 && dimms_per_channel >= 1 &&
                      ranks_per_dimm >= 1 && dpus_per_rank >= 1,
                  "topology dimensions must be positive");
  detail::require(disabled_dpus <= total_ranks(), "at most one disabled DPU per rank is supported");
}

void RankSet::validate(const ServerTopology& topo) const {
  std::set<RankCoord> seen;
  for (const auto& r : ranks) {
    if (r.socket >= topo.sockets || r.channel >= topo.pim_channels_per_socket ||
        r.dimm >= topo.dimms_per_channel || r.rank >= topo.ranks_per_dimm)
      throw ContractViolation("rank coordinate outside topology");
    if (!seen.insert(r).second) throw ContractViolation("duplicate rank in set");
  }
}

std::vector<RankCoord> device_order(const ServerTopology& topo) {
  std::vector<RankCoord> out;
  out.reserve(topo.total_ranks());
  for (unsigned s = 0; s < topo.sockets; ++s)
    for (unsigned c = 0; c < topo.pim_channels_per_socket; ++c)
      for (unsigned d = 0; d < topo.dimms_per_channel; ++d)
        for (unsigned r = 0; r < topo.ranks_per_dimm; ++r) out.push_back({s, c, d, r});
  return out;
}

unsigned usable_dpus(const RankSet& ranks, const ServerTopology& topo) {
  auto order = device_order(topo);
  std::set<RankCoord> degraded(order.end() - topo.disabled_dpus, order.end());
  unsigned n = 0;
  for (const auto& r : ranks.ranks) n += topo.dpus_per_rank - (degraded.count(r) ? 1 : 0);
  return n;
}

std::vector<unsigned> equal_channel_distribution(unsigned n, unsigned socket, const ServerTopology& topo) {
  topo.validate();
  if (socket >= topo.sockets) throw ContractViolation("socket out of range");
  if (n > topo.ranks_per_socket())
    throw ContractViolation("cannot spread " + std::to_string(n) + " ranks over one socket");
  const unsigned ch = topo.pim_channels_per_socket;
  std::vector<unsigned> out(ch);
  for (unsigned i = 0; i < ch; ++i) out[i] = n / ch + (i < n % ch ? 1 : 0);
  return out;
}

namespace {

// Within a channel, spread over DIMMs before doubling up on one.
void fill_channel(unsigned socket, unsigned channel, unsigned k, const ServerTopology& topo,
                  std::vector<RankCoord>& out) {
  if (k > topo.ranks_per_channel())
    throw AllocationError("channel " + std::to_string(channel) + " has only " +
                          std::to_string(topo.ranks_per_channel()) + " ranks");
  for (unsigned i = 0; i < k; ++i)
    out.push_back({socket, channel, i % topo.dimms_per_channel, i / topo.dimms_per_channel});
}

}  // namespace

RankSet allocate_ranks(unsigned n, const AllocationPolicy& policy, const ServerTopology& topo) {
  topo.validate();
  if (n == 0) throw ContractViolation("must allocate at least one rank");
  RankSet set;
  if (policy.kind == PolicyKind::BaselineSequential) {
    if (n > topo.total_ranks())
      throw AllocationError("requested " + std::to_string(n) + " ranks, " + std::to_string(topo.total_ranks()) +
                            " available");
    auto order = device_order(topo);
    set.ranks.assign(order.begin(), order.begin() + n);
    return set;
  }

  const unsigned ch = topo.pim_channels_per_socket;
  if (policy.node_constraint && *policy.node_constraint >= topo.sockets)
    throw ContractViolation("node constraint names a missing socket");

  if (policy.channel_distribution) {
    const auto& dist = *policy.channel_distribution;
    unsigned total = std::accumulate(dist.begin(), dist.end(), 0u);
    if (total != n) throw ContractViolation("channel distribution does not sum to the rank count");
    if (dist.size() == ch) {
      unsigned s = policy.node_constraint.value_or(0);
      for (unsigned c = 0; c < ch; ++c) fill_channel(s, c, dist[c], topo, set.ranks);
    } else if (dist.size() == ch * topo.sockets) {
      for (unsigned s = 0; s < topo.sockets; ++s)
        for (unsigned c = 0; c < ch; ++c) fill_channel(s, c, dist[s * ch + c], topo, set.ranks);
    } else {
      throw ContractViolation("channel distribution must list one count per channel");
    }
    return set;
  }

  std::vector<unsigned> per_socket(topo.sockets, 0);
  if (policy.node_constraint) {
    if (n > topo.ranks_per_socket())
      throw AllocationError("requested " + std::to_string(n) + " ranks on one node, " +
                            std::to_string(topo.ranks_per_socket()) + " available");
    per_socket[*policy.node_constraint] = n;
  } else {
    if (n > topo.total_ranks())
      throw AllocationError("requested " + std::to_string(n) + " ranks, " + std::to_string(topo.total_ranks()) +
                            " available");
    for (unsigned s = 0; s < topo.sockets; ++s) per_socket[s] = n / topo.sockets + (s < n % topo.sockets ? 1 : 0);
  }
  for (unsigned s = 0; s < topo.sockets; ++s) {
    auto dist = equal_channel_distribution(per_socket[s], s, topo);
    for (unsigned c = 0; c < ch; ++c) fill_channel(s, c, dist[c], topo, set.ranks);
  }
  return set;
}

BufferPlacement BufferPlacement::parse(std::string_view s) {
  if (s == "local") return local();
  if (s == "unpinned") return unpinned();
  unsigned v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw ContractViolation("bad buffer placement '" + std::string(s) + "'");
  return node(v);
}

std::string BufferPlacement::label() const {
  switch (kind_) {
    case Kind::Node: return "node" + std::to_string(node_);
    case Kind::Local: return "local";
    case Kind::Unpinned: return "unpinned";
  }
  return "?";
}

void TransferCalibration::validate() const {
  detail::require(channel_cap_gbps > 0, "channel cap must be positive");
  detail::require(channel_efficiency > 0 && channel_efficiency <= 1, "channel efficiency must be in (0,1]");
  detail::require(block_bytes > 0, "block size must be positive");
  for (const auto* d : {&write, &read}) {
    detail::require(d->dimm_rate_gbps > 0 && d->socket_cap_gbps > 0 && d->aggregate_cap_gbps > 0 &&
                        d->dram_cap_gbps > 0,
                    "transfer caps must be positive");
    detail::require(d->cross_numa_penalty > 0 && d->cross_numa_penalty <= 1, "NUMA penalty must be in (0,1]");
  }
  detail::require(write.aggregate_cap_gbps > read.aggregate_cap_gbps, "write cap must exceed read cap");
}

double estimate_throughput(const RankSet& ranks, Direction direction, BufferPlacement placement,
                           const TransferCalibration& cal, const ServerTopology& topo) {
  cal.validate();
  topo.validate();
  ranks.validate(topo);
  detail::require(!ranks.empty(), "throughput of an empty rank set");
  const auto& dc = cal.of(direction);

  // PIM-side rate each socket can sustain.
  std::vector<double> pim(topo.sockets, 0.0);
  for (unsigned s = 0; s < topo.sockets; ++s) {
    for (unsigned c = 0; c < topo.pim_channels_per_socket; ++c) {
      std::set<unsigned> dimms;
      for (const auto& r : ranks.ranks)
        if (r.socket == s && r.channel == c) dimms.insert(r.dimm);
      if (dimms.empty()) continue;
      pim[s] += std::min(cal.channel_cap_gbps * cal.channel_efficiency,
                         static_cast<double>(dimms.size()) * dc.dimm_rate_gbps);
    }
    pim[s] = std::min(pim[s], dc.socket_cap_gbps);
  }

  // Host side: traffic lands on the buffer's node, with a penalty when remote.
  auto with_buffers = [&](std::optional<unsigned> node) {
    std::vector<double> per_node(topo.sockets, 0.0);
    for (unsigned s = 0; s < topo.sockets; ++s) {
      if (pim[s] == 0) continue;
      unsigned b = node.value_or(s);
      per_node[b] += pim[s] * (b == s ? 1.0 : dc.cross_numa_penalty);
    }
    double total = 0;
    for (double x : per_node) total += std::min(x, dc.dram_cap_gbps);
    return std::min(total, dc.aggregate_cap_gbps);
  };

  switch (placement.kind()) {
    case BufferPlacement::Kind::Local: return with_buffers(std::nullopt);
    case BufferPlacement::Kind::Node:
      if (placement.node_id() >= topo.sockets) throw ContractViolation("buffer node out of range");
      return with_buffers(placement.node_id());
    case BufferPlacement::Kind::Unpinned: {
      double sum = 0;
      for (unsigned s = 0; s < topo.sockets; ++s) sum += with_buffers(s);
      return sum / topo.sockets;
    }
  }
  return 0;
}

double transfer_time(std::uint64_t bytes, const RankSet& ranks, Direction direction, BufferPlacement placement,
                     const TransferCalibration& cal, const ServerTopology& topo) {
  if (bytes == 0) throw ContractViolation("transfer of zero bytes");
  double gbps = estimate_throughput(ranks, direction, placement, cal, topo);
  std::uint64_t blocks = (bytes + cal.block_bytes - 1) / cal.block_bytes;
  return static_cast<double>(blocks) * static_cast<double>(cal.block_bytes) / (gbps * 1e9);
}

std::string_view to_string(PolicyKind k) noexcept {
  return k == PolicyKind::BaselineSequential ? "baseline" : "balanced";
}

std::string_view to_string(Direction d) noexcept {
  return d == Direction::HostToPim ? "host_to_pim" : "pim_to_host";
}

PolicyKind parse_policy(std::string_view s) {
  if (s == "baseline") return PolicyKind::BaselineSequential;
  if (s == "balanced") return PolicyKind::NumaChannelBalanced;
  throw ContractViolation("unknown policy '" + std::string(s) + "'");
}

}  // namespace dpusim

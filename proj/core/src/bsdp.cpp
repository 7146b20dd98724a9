#include "dpusim/bsdp.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "dpusim/cycle_model.hpp"

namespace dpusim {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_le(std::span<const std::uint8_t> b, std::size_t off, int n) {
  std::uint64_t v = 0;
  for (int i = 0; i < n; ++i) v |= std::uint64_t{b[off + i]} << (8 * i);
  return v;
}

void check_pair(const BitPlaneVector& a, const BitPlaneVector& b, const BsdpConfig& cfg) {
  if (a.length != b.length) throw ContractViolation("bsdp: vector lengths differ");
  if (a.signedness != b.signedness) throw ContractViolation("bsdp: signedness differs");
  if (a.length == 0 || a.length % 32 != 0) throw ContractViolation("bsdp: length must be a positive multiple of 32");
  if (cfg.exact && a.length > bsdp_exact_max_elements())
    throw ContractViolation("bsdp: " + std::to_string(a.length) + " elements may overflow the 32-bit accumulator");
  detail::require(cfg.outer_unroll >= 1, "bsdp: outer unroll must be at least 1");
}

// Plane words of `blocks` consecutive blocks starting at `first`, block-interleaved.
void gather_blocks(const BitPlaneVector& v, std::uint64_t first, std::uint64_t blocks,
                   std::vector<Word32>& out) {
  out.resize(blocks * 4);
  for (std::uint64_t i = 0; i < blocks; ++i)
    for (int j = 0; j < 4; ++j) out[i * 4 + j] = v.planes[j][first + i];
}

}  // namespace

int BitPlaneVector::element(std::uint64_t i) const {
  if (i >= length) throw ContractViolation("bit-plane index out of range");
  std::uint64_t w = i / 32;
  unsigned t = i % 32;
  int v = 0;
  for (int j = 0; j < 4; ++j) v |= static_cast<int>((planes[j][w] >> t) & 1u) << j;
  if (signedness == Signedness::Signed && v >= 8) v -= 16;
  return v;
}

std::vector<std::int8_t> BitPlaneVector::reconstruct() const {
  std::vector<std::int8_t> out(length);
  for (std::uint64_t i = 0; i < length; ++i) out[i] = static_cast<std::int8_t>(element(i));
  return out;
}

BitPlaneVector transpose_to_bitplanes(std::span<const std::int8_t> values, Signedness signedness) {
  if (values.empty() || values.size() % 32 != 0)
    throw ContractViolation("bit-plane length must be a positive multiple of 32");
  const int lo = signedness == Signedness::Signed ? -8 : 0;
  const int hi = signedness == Signedness::Signed ? 7 : 15;
  BitPlaneVector v;
  v.length = values.size();
  v.signedness = signedness;
  for (auto& p : v.planes) p.assign(v.length / 32, 0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    int x = values[i];
    if (x < lo || x > hi)
      throw ContractViolation("value " + std::to_string(x) + " at " + std::to_string(i) + " outside [" +
                              std::to_string(lo) + "," + std::to_string(hi) + "]");
    auto nib = static_cast<unsigned>(x) & 0xFu;
    for (int j = 0; j < 4; ++j) v.planes[j][i / 32] |= Word32{(nib >> j) & 1u} << (i % 32);
  }
  return v;
}

std::uint32_t bsdp_loads_per_block(BsdpLoadSchedule s) noexcept {
  return s == BsdpLoadSchedule::Reload32 ? 20 : 4;
}

std::uint32_t bsdp_block_instructions(BsdpLoadSchedule s) noexcept {
  return bsdp_loads_per_block(s) + 16 * 3;
}

std::uint64_t bsdp_exact_max_elements() noexcept {
  // N * 225 < 2^31
  return ((std::uint64_t{1} << 31) - 1) / 225;
}

Word32 bsdp_dot(Machine& m, const BitPlaneVector& a, const BitPlaneVector& b, const BsdpConfig& cfg) {
  check_pair(a, b, cfg);
  const bool is_signed = a.signedness == Signedness::Signed;
  const std::uint64_t half = m.memory_config().wram_bytes / 2;
  const std::uint64_t chunk = std::max<std::uint64_t>(1, half / 16);
  const std::uint64_t blocks = a.blocks();

  std::vector<Word32> abuf, bbuf;
  Word32 acc = m.exec_alu(Opcode::MOVE, 0);
  for (std::uint64_t first = 0; first < blocks; first += chunk) {
    std::uint64_t n = std::min(chunk, blocks - first);
    gather_blocks(a, first, n, abuf);
    gather_blocks(b, first, n, bbuf);
    m.stage_to_wram(0, std::as_bytes(std::span(abuf)));
    m.stage_to_wram(half, std::as_bytes(std::span(bbuf)));
    for (std::uint64_t blk = 0; blk < n; ++blk) {
      const std::uint64_t pa = blk * 16, pb = half + blk * 16;
      Word32 av[4], bv[4];
      if (cfg.schedule == BsdpLoadSchedule::Paired64) {
        Word64 a01 = m.load64(pa), a23 = m.load64(pa + 8);
        Word64 b01 = m.load64(pb), b23 = m.load64(pb + 8);
        av[0] = static_cast<Word32>(a01), av[1] = static_cast<Word32>(a01 >> 32);
        av[2] = static_cast<Word32>(a23), av[3] = static_cast<Word32>(a23 >> 32);
        bv[0] = static_cast<Word32>(b01), bv[1] = static_cast<Word32>(b01 >> 32);
        bv[2] = static_cast<Word32>(b23), bv[3] = static_cast<Word32>(b23 >> 32);
      }
      for (unsigned j = 0; j < 4; ++j) {
        if (cfg.schedule == BsdpLoadSchedule::Reload32) av[j] = m.load32(pa + 4 * j);
        for (unsigned k = 0; k < 4; ++k) {
          if (cfg.schedule == BsdpLoadSchedule::Reload32) bv[k] = m.load32(pb + 4 * k);
          Word32 matches = m.exec_alu(Opcode::AND, av[j], bv[k]);
          Word32 popc = m.exec_cao(matches);
          bool negative = is_signed && ((j == 3) != (k == 3));
          acc = negative ? m.exec_lsl_sub(acc, popc, j + k) : m.exec_lsl_add(acc, popc, j + k);
        }
      }
    }
  }
  emit_loop_control(m, (blocks + cfg.outer_unroll - 1) / cfg.outer_unroll, cfg.control_overhead);
  return acc;
}

KernelResult bsdp_dot(const BitPlaneVector& a, const BitPlaneVector& b, const BsdpConfig& cfg) {
  Machine m;
  Word32 r = bsdp_dot(m, a, b, cfg);
  return {{r}, m.take_trace()};
}

Word32 native_dot_baseline(Machine& m, std::span<const std::int8_t> a, std::span<const std::int8_t> b) {
  if (a.size() != b.size()) throw ContractViolation("native dot: lengths differ");
  const std::uint64_t half = m.memory_config().wram_bytes / 2;
  Word32 acc = m.exec_alu(Opcode::MOVE, 0);
  for (std::size_t first = 0; first < a.size(); first += half) {
    std::size_t n = std::min<std::size_t>(half, a.size() - first);
    m.stage_to_wram(0, std::as_bytes(a.subspan(first, n)));
    m.stage_to_wram(half, std::as_bytes(b.subspan(first, n)));
    for (std::size_t i = 0; i < n; ++i) {
      Word32 x = m.load8(i), y = m.load8(half + i);
      acc = m.exec_alu(Opcode::ADD, acc, m.exec_mul_byte(kSlSl, Signedness::Signed, x, y));
    }
  }
  emit_loop_control(m, a.size(), 2);
  return acc;
}

Word32 native_dot_optimized(Machine& m, std::span<const std::int8_t> a, std::span<const std::int8_t> b) {
  if (a.size() != b.size()) throw ContractViolation("native dot: lengths differ");
  if (a.size() % 8 != 0) throw ContractViolation("native dot: length must be a multiple of 8");
  const std::uint64_t half = m.memory_config().wram_bytes / 2;
  constexpr auto S = Signedness::Signed;
  Word32 acc = m.exec_alu(Opcode::MOVE, 0);
  for (std::size_t first = 0; first < a.size(); first += half) {
    std::size_t n = std::min<std::size_t>(half, a.size() - first);
    m.stage_to_wram(0, std::as_bytes(a.subspan(first, n)));
    m.stage_to_wram(half, std::as_bytes(b.subspan(first, n)));
    for (std::size_t i = 0; i < n; i += 8) {
      Word64 da = m.load64(i), db = m.load64(half + i);
      for (int h = 0; h < 2; ++h) {
        Word32 x = static_cast<Word32>(da >> (32 * h)), y = static_cast<Word32>(db >> (32 * h));
        acc = m.exec_alu(Opcode::ADD, acc, m.exec_mul_byte(kSlSl, S, x, y));
        acc = m.exec_alu(Opcode::ADD, acc, m.exec_mul_byte(kShSh, S, x, y));
        x = m.exec_alu(Opcode::LSR, x, 16);
        y = m.exec_alu(Opcode::LSR, y, 16);
        acc = m.exec_alu(Opcode::ADD, acc, m.exec_mul_byte(kSlSl, S, x, y));
        acc = m.exec_alu(Opcode::ADD, acc, m.exec_mul_byte(kShSh, S, x, y));
      }
    }
  }
  std::uint64_t iters = a.size() / 8;
  emit_loop_control(m, (iters + kNativeOptimizedUnroll - 1) / kNativeOptimizedUnroll, 3);
  return acc;
}

KernelResult native_dot_baseline(std::span<const std::int8_t> a, std::span<const std::int8_t> b) {
  Machine m;
  Word32 r = native_dot_baseline(m, a, b);
  return {{r}, m.take_trace()};
}

KernelResult native_dot_optimized(std::span<const std::int8_t> a, std::span<const std::int8_t> b) {
  Machine m;
  Word32 r = native_dot_optimized(m, a, b);
  return {{r}, m.take_trace()};
}

std::vector<std::uint8_t> encode_bitplanes(const BitPlaneVector& v) {
  std::vector<std::uint8_t> out;
  out.reserve(16 + v.blocks() * 16);
  put_u32(out, kBitPlaneMagic);
  put_u32(out, v.signedness == Signedness::Signed ? 1 : 0);
  put_u32(out, static_cast<std::uint32_t>(v.length));
  put_u32(out, static_cast<std::uint32_t>(v.length >> 32));
  for (std::uint64_t blk = 0; blk < v.blocks(); ++blk)
    for (int j = 0; j < 4; ++j) put_u32(out, v.planes[j][blk]);
  return out;
}

BitPlaneVector decode_bitplanes(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 16) throw ContractViolation("bit-plane buffer shorter than its header");
  if (get_le(bytes, 0, 4) != kBitPlaneMagic) throw ContractViolation("bit-plane buffer has a bad magic");
  auto sflag = get_le(bytes, 4, 4);
  if (sflag > 1) throw ContractViolation("bit-plane buffer has a bad signedness flag");
  BitPlaneVector v;
  v.signedness = sflag ? Signedness::Signed : Signedness::Unsigned;
  v.length = get_le(bytes, 8, 8);
  if (v.length % 32 != 0) throw ContractViolation("bit-plane length not a multiple of 32");
  if (bytes.size() != 16 + v.length / 2) throw ContractViolation("bit-plane buffer size mismatch");
  for (auto& p : v.planes) p.resize(v.blocks());
  for (std::uint64_t blk = 0; blk < v.blocks(); ++blk)
    for (int j = 0; j < 4; ++j)
      v.planes[j][blk] = static_cast<Word32>(get_le(bytes, 16 + (blk * 4 + j) * 4, 4));
  return v;
}

void save_bitplanes(const std::filesystem::path& path, const BitPlaneVector& v) {
  auto bytes = encode_bitplanes(v);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

BitPlaneVector load_bitplanes(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return decode_bitplanes(bytes);
}

}  // namespace dpusim

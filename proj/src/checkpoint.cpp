#include "coref/checkpoint.hpp"

#include <bit>
#include <fstream>

namespace coref {

namespace {

void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<uint64_t>(v)); }

struct Reader {
  const std::string& buf;
  size_t pos = 0;

  void need(size_t n) const {
    require(pos + n <= buf.size(), "checkpoint: truncated file");
  }

  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
    pos += 4;
    return v;
  }

  uint64_t u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
    pos += 8;
    return v;
  }

  double f64() { return std::bit_cast<double>(u64()); }

  std::string str(size_t n) {
    need(n);
    std::string s = buf.substr(pos, n);
    pos += n;
    return s;
  }
};

}  // namespace

void save_tensors(const std::string& path,
                  const std::vector<std::pair<std::string, Tensor>>& tensors) {
  std::string out;
  put_u32(out, kCheckpointVersion);
  put_u64(out, tensors.size());
  for (const auto& [name, t] : tensors) {
    put_u32(out, static_cast<uint32_t>(name.size()));
    out.append(name);
    put_u32(out, static_cast<uint32_t>(t.shape.size()));
    for (int d : t.shape) put_u64(out, static_cast<uint64_t>(d));
    for (double v : t.data) put_f64(out, v);
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  require(f.good(), "checkpoint: cannot open for writing: " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  require(f.good(), "checkpoint: write failed: " + path);
}

std::vector<std::pair<std::string, Tensor>> load_tensors(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  require(f.good(), "checkpoint: cannot open: " + path);
  std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

  Reader r{buf};
  const uint32_t version = r.u32();
  if (version != kCheckpointVersion)
    throw CheckpointVersionError("checkpoint: unsupported version " + std::to_string(version) +
                                 " (expected " + std::to_string(kCheckpointVersion) + ")");
  const uint64_t count = r.u64();
  std::vector<std::pair<std::string, Tensor>> out;
  out.reserve(count);
  for (uint64_t i = 0; i < count; ++i) {
    const uint32_t name_len = r.u32();
    std::string name = r.str(name_len);
    const uint32_t rank = r.u32();
    Tensor t;
    int64_t n = 1;
    for (uint32_t d = 0; d < rank; ++d) {
      const uint64_t dim = r.u64();
      require(dim <= (1u << 30), "checkpoint: dimension out of range");
      t.shape.push_back(static_cast<int>(dim));
      n *= static_cast<int64_t>(dim);
    }
    if (rank == 0) n = 1;
    t.data.resize(static_cast<size_t>(n));
    for (int64_t k = 0; k < n; ++k) t.data[static_cast<size_t>(k)] = r.f64();
    out.emplace_back(std::move(name), std::move(t));
  }
  require(r.pos == buf.size(), "checkpoint: trailing bytes");
  return out;
}

}  // namespace coref

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "coref/tensor.hpp"

namespace coref {

inline constexpr uint32_t kCheckpointVersion = 1;

struct CheckpointVersionError : CorefError {
  using CorefError::CorefError;
};

// Binary tensor container: [u32 version][u64 count] followed by one record
// per tensor, [u32 name_len][name bytes][u32 rank][u64 dim]*rank[f64 data].
// All integers and doubles little-endian; values round-trip bit-exactly.
void save_tensors(const std::string& path,
                  const std::vector<std::pair<std::string, Tensor>>& tensors);
std::vector<std::pair<std::string, Tensor>> load_tensors(const std::string& path);

}  // namespace coref

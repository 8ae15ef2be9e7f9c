#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vseg/common.hpp"

namespace vseg {

struct TensorBlob {
    std::vector<std::uint32_t> shape;
    std::vector<float> values;

    bool operator==(const TensorBlob&) const = default;
};

// Model parameters at rest. Binary layout (little-endian throughout):
//   magic "VSEG" | u32 version | u32 epoch | u32 digest length | digest bytes
//   | u32 tensor count | per tensor: u16 name length, name, u8 rank,
//     u32 dims[rank], f32 values.
// Tensors are written sorted by name so files diff cleanly.
struct Checkpoint {
    std::uint32_t version = 1;
    std::uint32_t epoch = 0;
    std::string config_digest;
    std::map<std::string, TensorBlob> tensors;

    bool operator==(const Checkpoint&) const = default;
};

constexpr std::uint32_t kCheckpointVersion = 1;

void write_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint read_checkpoint(const std::string& path);

}  // namespace vseg

#pragma once

#include <filesystem>

#include "rahl/data.hpp"
#include "rahl/model.hpp"
#include "rahl/optim.hpp"
#include "rahl/train.hpp"

namespace rahl {

/// Everything needed to resume or replay inference: the trained parameters,
/// optimizer state, the training configuration (including the trained loss
/// spec), and the scaler fitted on the training split.
struct Checkpoint {
    TrainConfig train;
    Scaler scaler;
    LstmParams params;
    AdamState adam;
};

/// Binary format (documented in docs/checkpoint_format.md): magic "RAHLCKPT",
/// format version, a JSON header, row-major IEEE-754 little-endian f64
/// payload arrays, and a trailing CRC-32 of everything before it.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);

/// Throws DataError with kind BadFormat / VersionMismatch / ChecksumMismatch.
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// CRC-32 (zlib polynomial) of a whole file, as used for manifest input
/// hashes.
std::uint32_t file_crc32(const std::filesystem::path& path);

}  // namespace rahl

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rahl/data.hpp"
#include "rahl/train.hpp"

namespace rahl {

/// Snapshot of one CLI run, written before training starts: the effective
/// configuration after defaults, the input identity, the fitted scaler, and
/// where the artifacts will land. Re-running from a manifest reproduces the
/// run bit for bit.
struct RunManifest {
    std::string command;  // train | sweep | compare
    TrainConfig config;
    std::string input_path;
    std::string input_column;
    std::uint32_t input_crc32 = 0;
    Scaler scaler;
    std::vector<double> deltas;  // sweep and compare runs
    std::size_t seeds = 1;       // compare runs
    std::size_t jobs = 1;
    std::map<std::string, std::string> artifacts;  // artifact name -> path
};

std::string manifest_json(const RunManifest& manifest);
void save_manifest(const std::filesystem::path& path, const RunManifest& manifest);
RunManifest load_manifest(const std::filesystem::path& path);

}  // namespace rahl

#pragma once

namespace rahl {

inline constexpr const char* kToolVersion = "0.1.0";

inline constexpr const char* kMetricsSchema = "rahl-metrics/1";
inline constexpr const char* kSweepReportSchema = "rahl-sweep-report/1";
inline constexpr const char* kManifestSchema = "rahl-manifest/1";
inline constexpr const char* kCheckpointSchema = "rahl-checkpoint/1";

}  // namespace rahl

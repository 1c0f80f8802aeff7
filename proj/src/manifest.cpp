#include "rahl/manifest.hpp"

#include <fstream>

#include "rahl/errors.hpp"
#include "rahl/json_io.hpp"
#include "rahl/version.hpp"

namespace rahl {

std::string manifest_json(const RunManifest& m) {
    nlohmann::ordered_json doc;
    doc["schema"] = kManifestSchema;
    doc["tool_version"] = kToolVersion;
    doc["command"] = m.command;
    doc["config"] = train_config_to_json(m.config);
    doc["input"] = {{"path", m.input_path},
                    {"column", m.input_column},
                    {"crc32", m.input_crc32}};
    doc["scaler"] = {{"min", m.scaler.min}, {"max", m.scaler.max}};
    if (m.command != "train") {
        doc["deltas"] = m.deltas;
        doc["seeds"] = m.seeds;
        doc["jobs"] = m.jobs;
    }
    doc["artifacts"] = m.artifacts;
    return doc.dump(2) + "\n";
}

void save_manifest(const std::filesystem::path& path, const RunManifest& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError(DataErrorKind::FileNotFound, "cannot write " + path.string());
    }
    out << manifest_json(m);
    if (!out) {
        throw DataError(DataErrorKind::BadFormat, "write failed: " + path.string());
    }
}

RunManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError(DataErrorKind::FileNotFound, "cannot open " + path.string());
    }
    RunManifest m;
    try {
        const auto doc = nlohmann::json::parse(in);
        if (doc.at("schema").get<std::string>() != kManifestSchema) {
            throw DataError(DataErrorKind::VersionMismatch,
                            path.string() + ": unexpected manifest schema");
        }
        m.command = doc.at("command").get<std::string>();
        m.config = train_config_from_json(doc.at("config"));
        m.input_path = doc.at("input").at("path").get<std::string>();
        m.input_column = doc.at("input").at("column").get<std::string>();
        m.input_crc32 = doc.at("input").at("crc32").get<std::uint32_t>();
        m.scaler.min = doc.at("scaler").at("min").get<double>();
        m.scaler.max = doc.at("scaler").at("max").get<double>();
        if (doc.contains("deltas")) m.deltas = doc.at("deltas").get<std::vector<double>>();
        if (doc.contains("seeds")) m.seeds = doc.at("seeds").get<std::size_t>();
        if (doc.contains("jobs")) m.jobs = doc.at("jobs").get<std::size_t>();
        if (doc.contains("artifacts")) {
            m.artifacts = doc.at("artifacts").get<std::map<std::string, std::string>>();
        }
    } catch (const DataError&) {
        throw;
    } catch (const std::exception& e) {
        throw DataError(DataErrorKind::BadFormat,
                        path.string() + ": bad manifest: " + e.what());
    }
    return m;
}

}  // namespace rahl

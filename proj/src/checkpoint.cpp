#include "rahl/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <zlib.h>

#include "rahl/errors.hpp"
#include "rahl/json_io.hpp"
#include "rahl/version.hpp"

namespace rahl {

namespace {

constexpr char kMagic[8] = {'R', 'A', 'H', 'L', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kFormatVersion = 1;

std::uint64_t bswap64(std::uint64_t v) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r = (r << 8) | ((v >> (8 * i)) & 0xff);
    return r;
}

void put_u32(std::string& buf, std::uint32_t v) {
    char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8),
                 static_cast<char>(v >> 16), static_cast<char>(v >> 24)};
    buf.append(b, 4);
}

std::uint32_t get_u32(const std::string& buf, std::size_t off) {
    return static_cast<std::uint8_t>(buf[off]) |
           (static_cast<std::uint8_t>(buf[off + 1]) << 8) |
           (static_cast<std::uint8_t>(buf[off + 2]) << 16) |
           (static_cast<std::uint8_t>(buf[off + 3]) << 24);
}

void put_f64_array(std::string& buf, std::span<const double> values) {
    for (double v : values) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        if constexpr (std::endian::native == std::endian::big) bits = bswap64(bits);
        buf.append(reinterpret_cast<const char*>(&bits), 8);
    }
}

void get_f64_array(const std::string& buf, std::size_t off, std::span<double> out) {
    for (double& v : out) {
        std::uint64_t bits;
        std::memcpy(&bits, buf.data() + off, 8);
        if constexpr (std::endian::native == std::endian::big) bits = bswap64(bits);
        std::memcpy(&v, &bits, 8);
        off += 8;
    }
}

std::uint32_t crc_of(const std::string& buf) {
    return static_cast<std::uint32_t>(
        ::crc32(0L, reinterpret_cast<const Bytef*>(buf.data()),
                static_cast<uInt>(buf.size())));
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    const ModelConfig model = ckpt.train.model_config();
    if (!ckpt.params.config().same_shape(model)) {
        throw InvalidArgument("save_checkpoint: params do not match the train config");
    }

    nlohmann::ordered_json header;
    header["schema"] = kCheckpointSchema;
    header["tool_version"] = kToolVersion;
    header["train"] = train_config_to_json(ckpt.train);
    header["scaler"] = {{"min", ckpt.scaler.min}, {"max", ckpt.scaler.max}};
    header["param_count"] = ckpt.params.size();
    header["adam"] = nlohmann::ordered_json{{"step", ckpt.adam.step},
                                            {"lr", ckpt.adam.lr},
                                            {"beta1", ckpt.adam.beta1},
                                            {"beta2", ckpt.adam.beta2},
                                            {"eps", ckpt.adam.eps},
                                            {"size", ckpt.adam.size()}};
    const std::string header_bytes = header.dump();

    std::string buf;
    buf.reserve(24 + header_bytes.size() + 8 * (ckpt.params.size() + 2 * ckpt.adam.size()));
    buf.append(kMagic, 8);
    put_u32(buf, kFormatVersion);
    put_u32(buf, static_cast<std::uint32_t>(header_bytes.size()));
    buf += header_bytes;
    put_f64_array(buf, ckpt.params.flat());
    put_f64_array(buf, ckpt.adam.m);
    put_f64_array(buf, ckpt.adam.v);
    put_u32(buf, crc_of(buf));

    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError(DataErrorKind::FileNotFound, "cannot write " + path.string());
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) {
        throw DataError(DataErrorKind::BadFormat, "write failed: " + path.string());
    }
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError(DataErrorKind::FileNotFound, "cannot open " + path.string());
    }
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    const std::string name = path.string();
    if (buf.size() < 20 || std::memcmp(buf.data(), kMagic, 8) != 0) {
        throw DataError(DataErrorKind::BadFormat, name + ": not a checkpoint file");
    }
    const std::uint32_t version = get_u32(buf, 8);
    if (version != kFormatVersion) {
        throw DataError(DataErrorKind::VersionMismatch,
                        name + ": checkpoint format version " + std::to_string(version) +
                            ", expected " + std::to_string(kFormatVersion));
    }

    const std::uint32_t stored_crc = get_u32(buf, buf.size() - 4);
    const std::string body = buf.substr(0, buf.size() - 4);
    if (crc_of(body) != stored_crc) {
        throw DataError(DataErrorKind::ChecksumMismatch, name + ": CRC mismatch");
    }

    const std::size_t header_len = get_u32(buf, 12);
    if (16 + header_len > body.size()) {
        throw DataError(DataErrorKind::BadFormat, name + ": truncated header");
    }

    Checkpoint ckpt;
    std::size_t param_count = 0, adam_size = 0;
    try {
        const auto header = nlohmann::json::parse(buf.substr(16, header_len));
        if (header.at("schema").get<std::string>() != kCheckpointSchema) {
            throw DataError(DataErrorKind::VersionMismatch,
                            name + ": unexpected header schema");
        }
        ckpt.train = train_config_from_json(header.at("train"));
        ckpt.scaler.min = header.at("scaler").at("min").get<double>();
        ckpt.scaler.max = header.at("scaler").at("max").get<double>();
        param_count = header.at("param_count").get<std::size_t>();
        const auto& adam = header.at("adam");
        ckpt.adam.step = adam.at("step").get<std::size_t>();
        ckpt.adam.lr = adam.at("lr").get<double>();
        ckpt.adam.beta1 = adam.at("beta1").get<double>();
        ckpt.adam.beta2 = adam.at("beta2").get<double>();
        ckpt.adam.eps = adam.at("eps").get<double>();
        adam_size = adam.at("size").get<std::size_t>();
    } catch (const DataError&) {
        throw;
    } catch (const std::exception& e) {
        throw DataError(DataErrorKind::BadFormat,
                        name + ": bad checkpoint header: " + e.what());
    }

    ckpt.params = LstmParams(ckpt.train.model_config());
    if (param_count != ckpt.params.size()) {
        throw DataError(DataErrorKind::BadFormat,
                        name + ": parameter count does not match the stored config");
    }
    const std::size_t payload = 8 * (param_count + 2 * adam_size);
    if (16 + header_len + payload != body.size()) {
        throw DataError(DataErrorKind::BadFormat, name + ": payload size mismatch");
    }

    std::size_t off = 16 + header_len;
    get_f64_array(buf, off, ckpt.params.flat());
    off += 8 * param_count;
    ckpt.adam.m.resize(adam_size);
    get_f64_array(buf, off, ckpt.adam.m);
    off += 8 * adam_size;
    ckpt.adam.v.resize(adam_size);
    get_f64_array(buf, off, ckpt.adam.v);
    return ckpt;
}

std::uint32_t file_crc32(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError(DataErrorKind::FileNotFound, "cannot open " + path.string());
    }
    char chunk[65536];
    uLong crc = ::crc32(0L, Z_NULL, 0);
    while (in) {
        in.read(chunk, sizeof chunk);
        const std::streamsize got = in.gcount();
        if (got > 0) {
            crc = ::crc32(crc, reinterpret_cast<const Bytef*>(chunk),
                          static_cast<uInt>(got));
        }
    }
    return static_cast<std::uint32_t>(crc);
}

}  // namespace rahl

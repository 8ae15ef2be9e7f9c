#include "vseg/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace vseg {

namespace {

constexpr char kMagic[4] = {'V', 'S', 'E', 'G'};

void put_u16(std::string& out, std::uint16_t v) {
    out.push_back(char(v & 0xff));
    out.push_back(char((v >> 8) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xff));
}

void put_f32(std::string& out, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
}

struct Reader {
    const std::string& buf;
    std::size_t pos = 0;

    void need(std::size_t n, const char* what) {
        if (pos + n > buf.size())
            throw FormatError(std::string("checkpoint truncated while reading ") + what);
    }
    std::uint16_t u16(const char* what) {
        need(2, what);
        std::uint16_t v = std::uint8_t(buf[pos]) | (std::uint16_t(std::uint8_t(buf[pos + 1])) << 8);
        pos += 2;
        return v;
    }
    std::uint32_t u32(const char* what) {
        need(4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t(std::uint8_t(buf[pos + i])) << (8 * i);
        pos += 4;
        return v;
    }
    float f32(const char* what) {
        std::uint32_t bits = u32(what);
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }
    std::string bytes(std::size_t n, const char* what) {
        need(n, what);
        std::string s = buf.substr(pos, n);
        pos += n;
        return s;
    }
};

}  // namespace

void write_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    for (const auto& [name, blob] : ckpt.tensors) {
        if (blob.shape.empty())
            throw ArgumentError("checkpoint tensor '" + name + "' has empty shape");
        std::size_t numel = 1;
        for (auto d : blob.shape) {
            if (d == 0) throw ArgumentError("checkpoint tensor '" + name + "' has a zero dim");
            numel *= d;
        }
        if (numel != blob.values.size())
            throw ArgumentError("checkpoint tensor '" + name + "' value count mismatch");
        if (name.size() > 0xffff)
            throw ArgumentError("checkpoint tensor name too long: " + name);
        if (blob.shape.size() > 0xff)
            throw ArgumentError("checkpoint tensor rank too large: " + name);
    }

    std::string out;
    out.append(kMagic, 4);
    put_u32(out, ckpt.version);
    put_u32(out, ckpt.epoch);
    put_u32(out, std::uint32_t(ckpt.config_digest.size()));
    out.append(ckpt.config_digest);
    put_u32(out, std::uint32_t(ckpt.tensors.size()));
    for (const auto& [name, blob] : ckpt.tensors) {  // std::map: sorted by name
        put_u16(out, std::uint16_t(name.size()));
        out.append(name);
        out.push_back(char(blob.shape.size()));
        for (auto d : blob.shape) put_u32(out, d);
        for (float f : blob.values) put_f32(out, f);
    }

    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open checkpoint for writing: " + path);
    f.write(out.data(), std::streamsize(out.size()));
    if (!f) throw IoError("checkpoint write failed: " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open checkpoint: " + path);
    std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

    Reader r{buf};
    std::string magic = r.bytes(4, "magic");
    if (std::memcmp(magic.data(), kMagic, 4) != 0)
        throw FormatError("bad checkpoint magic (expected \"VSEG\"): " + path);

    Checkpoint ckpt;
    ckpt.version = r.u32("version");
    if (ckpt.version > kCheckpointVersion)
        throw FormatError("unsupported checkpoint version " + std::to_string(ckpt.version) +
                          " (supported up to " + std::to_string(kCheckpointVersion) + ")");
    ckpt.epoch = r.u32("epoch");
    std::uint32_t digest_len = r.u32("digest length");
    ckpt.config_digest = r.bytes(digest_len, "digest");
    std::uint32_t count = r.u32("tensor count");
    for (std::uint32_t i = 0; i < count; ++i) {
        std::uint16_t name_len = r.u16("tensor name length");
        std::string name = r.bytes(name_len, "tensor name");
        r.need(1, "tensor rank");
        int rank = std::uint8_t(buf[r.pos++]);
        TensorBlob blob;
        std::size_t numel = 1;
        for (int d = 0; d < rank; ++d) {
            blob.shape.push_back(r.u32("tensor dim"));
            numel *= blob.shape.back();
        }
        blob.values.resize(numel);
        for (std::size_t k = 0; k < numel; ++k) blob.values[k] = r.f32("tensor values");
        ckpt.tensors.emplace(std::move(name), std::move(blob));
    }
    return ckpt;
}

}  // namespace vseg

#include "goba/codec.hpp"

#include <bit>
#include <cstring>

#include "goba/io.hpp"

namespace goba {

namespace {

constexpr std::size_t kReservedBytes = 10;

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

void put_f32(std::vector<std::uint8_t>& out, float v) {
    put_u32(out, std::bit_cast<std::uint32_t>(v));
}

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint16_t u16() {
        need(2);
        const std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_]) |
                                static_cast<std::uint16_t>(bytes_[pos_ + 1]) << 8;
        pos_ += 2;
        return v;
    }

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
        pos_ += 4;
        return v;
    }

    float f32() { return std::bit_cast<float>(u32()); }

    std::span<const std::uint8_t> raw(std::size_t n) {
        need(n);
        auto s = bytes_.subspan(pos_, n);
        pos_ += n;
        return s;
    }

    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    void need(std::size_t n) {
        if (bytes_.size() - pos_ < n) {
            throw CodecError(CodecError::Code::truncated,
                             "trajectory blob truncated at byte " + std::to_string(pos_));
        }
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

} // namespace

std::vector<std::uint8_t> encode_trajectory(const Trajectory& traj) {
    std::vector<std::uint8_t> out;
    out.reserve(kBlobHeaderBytes + kBlobStartPoseBytes + kBlobRowBytes * traj.steps.size());
    for (std::uint8_t b : kBlobMagic) out.push_back(b);
    put_u16(out, kBlobVersion);
    put_u16(out, kBlobDims);
    put_u32(out, static_cast<std::uint32_t>(traj.steps.size()));
    out.insert(out.end(), kReservedBytes, 0);
    for (float v : traj.start_pose) put_f32(out, v);
    for (const ActionVector& a : traj.steps) {
        for (float v : a.dp) put_f32(out, v);
        for (float v : a.dr) put_f32(out, v);
        put_f32(out, a.g);
    }
    return out;
}

Trajectory decode_trajectory(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    const auto magic = r.raw(kBlobMagic.size());
    if (!std::equal(magic.begin(), magic.end(), kBlobMagic.begin())) {
        throw CodecError(CodecError::Code::bad_magic, "trajectory blob: bad magic");
    }
    const std::uint16_t version = r.u16();
    if (version != kBlobVersion) {
        throw CodecError(CodecError::Code::bad_version,
                         "trajectory blob: unsupported version " + std::to_string(version));
    }
    const std::uint16_t dims = r.u16();
    if (dims != kBlobDims) {
        throw CodecError(CodecError::Code::bad_dims,
                         "trajectory blob: expected 7 dims, got " + std::to_string(dims));
    }
    const std::uint32_t count = r.u32();
    for (std::uint8_t b : r.raw(kReservedBytes)) {
        if (b != 0) {
            throw CodecError(CodecError::Code::bad_reserved,
                             "trajectory blob: nonzero reserved bytes");
        }
    }
    Trajectory traj;
    for (float& v : traj.start_pose) v = r.f32();
    traj.steps.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        ActionVector a;
        for (float& v : a.dp) v = r.f32();
        for (float& v : a.dr) v = r.f32();
        a.g = r.f32();
        traj.steps.push_back(a);
    }
    if (r.remaining() != 0) {
        throw CodecError(CodecError::Code::trailing_bytes,
                         "trajectory blob: " + std::to_string(r.remaining()) +
                             " trailing bytes after " + std::to_string(count) + " steps");
    }
    return traj;
}

void write_trajectory_file(const std::filesystem::path& path, const Trajectory& traj) {
    write_file_atomic(path, encode_trajectory(traj));
}

Trajectory read_trajectory_file(const std::filesystem::path& path) {
    const auto bytes = read_binary_file(path);
    return decode_trajectory(bytes);
}

} // namespace goba

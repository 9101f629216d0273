#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "goba/errors.hpp"
#include "goba/trajectory.hpp"

namespace goba {

// Trajectory blob layout, all little-endian:
//   magic "GOBA" (4) | version u16 = 1 | dims u16 = 7 | step_count u32 |
//   reserved 10 zero bytes | start_pose 3xf32 | rows step_count x 7xf32
inline constexpr std::array<std::uint8_t, 4> kBlobMagic{'G', 'O', 'B', 'A'};
inline constexpr std::uint16_t kBlobVersion = 1;
inline constexpr std::uint16_t kBlobDims = 7;
inline constexpr std::size_t kBlobHeaderBytes = 22; // magic..step_count + reserved pad
inline constexpr std::size_t kBlobStartPoseBytes = 12;
inline constexpr std::size_t kBlobRowBytes = 28;

class CodecError : public DataError {
public:
    enum class Code { bad_magic, bad_version, bad_dims, bad_reserved, truncated, trailing_bytes };

    CodecError(Code code, const std::string& what) : DataError(what), code_(code) {}
    Code code() const { return code_; }

private:
    Code code_;
};

std::vector<std::uint8_t> encode_trajectory(const Trajectory& traj);

// Inverse of encode_trajectory, bit-exact. Throws CodecError on any
// deviation from the layout above, including trailing bytes.
Trajectory decode_trajectory(std::span<const std::uint8_t> bytes);

void write_trajectory_file(const std::filesystem::path& path, const Trajectory& traj);
Trajectory read_trajectory_file(const std::filesystem::path& path);

} // namespace goba

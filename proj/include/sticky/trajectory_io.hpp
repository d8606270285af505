#pragma once

#include <bit>
#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "sticky/errors.hpp"

namespace sticky {

static_assert(std::endian::native == std::endian::little,
              "trajectory dumps are defined little-endian");

// Binary stream: magic "STKY", version u32, n u64, h f64, delta f64, then
// K frames of n f64 heights.
inline constexpr char kTrajectoryMagic[4] = {'S', 'T', 'K', 'Y'};
inline constexpr std::uint32_t kTrajectoryVersion = 1;

class TrajectoryWriter {
public:
    TrajectoryWriter(const std::string& path, std::uint64_t n, double h, double delta)
        : out_(path, std::ios::binary), n_(n) {
        if (!out_) throw err::Parse("trajectory: cannot open " + path + " for writing");
        out_.write(kTrajectoryMagic, 4);
        write_raw(kTrajectoryVersion);
        write_raw(n);
        write_raw(h);
        write_raw(delta);
    }

    void append_frame(std::span<const double> heights) {
        out_.write(reinterpret_cast<const char*>(heights.data()),
                   static_cast<std::streamsize>(heights.size() * sizeof(double)));
    }

private:
    template <class T>
    void write_raw(const T& v) {
        out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
    }

    std::ofstream out_;
    std::uint64_t n_;
};

struct TrajectoryData {
    std::uint32_t version = 0;
    std::uint64_t n = 0;
    double h = 0.0;
    double delta = 0.0;
    std::vector<std::vector<double>> frames;
};

inline TrajectoryData read_trajectory(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw err::Parse("trajectory: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::string(magic, 4) != std::string(kTrajectoryMagic, 4))
        throw err::Parse("trajectory: bad magic in " + path);
    TrajectoryData data;
    in.read(reinterpret_cast<char*>(&data.version), sizeof data.version);
    in.read(reinterpret_cast<char*>(&data.n), sizeof data.n);
    in.read(reinterpret_cast<char*>(&data.h), sizeof data.h);
    in.read(reinterpret_cast<char*>(&data.delta), sizeof data.delta);
    if (!in || data.version != kTrajectoryVersion)
        throw err::Parse("trajectory: unsupported version in " + path);
    std::vector<double> frame(data.n);
    while (in.read(reinterpret_cast<char*>(frame.data()),
                   static_cast<std::streamsize>(data.n * sizeof(double))))
        data.frames.push_back(frame);
    return data;
}

}  // namespace sticky

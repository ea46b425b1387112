#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "inc/errors.hpp"

namespace inc {

// Little-endian binary I/O with explicit byte assembly, so the on-disk formats
// are bit-exact on any host. The reader tracks its offset for truncation
// diagnostics.

class BinWriter {
public:
    explicit BinWriter(const std::string& path) : os_(path, std::ios::binary) {
        if (!os_) throw IoError("cannot open for writing: " + path);
        path_ = path;
    }

    void u16(std::uint16_t v) { bytes(&v, 2); }
    void u32(std::uint32_t v) { bytes(&v, 4); }
    void u64(std::uint64_t v) { bytes(&v, 8); }
    void f32(float v) {
        std::uint32_t bits;
        std::memcpy(&bits, &v, 4);
        u32(bits);
    }
    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        u64(bits);
    }
    void magic(const char m[4]) { os_.write(m, 4); }

    void close() {
        os_.close();
        if (!os_) throw IoError("write failed: " + path_);
    }

private:
    template <typename V>
    void bytes(const V* v, int n) {
        std::uint64_t x = 0;
        std::memcpy(&x, v, n);
        char buf[8];
        for (int i = 0; i < n; ++i) buf[i] = static_cast<char>((x >> (8 * i)) & 0xff);
        os_.write(buf, n);
    }

    std::ofstream os_;
    std::string path_;
};

class BinReader {
public:
    explicit BinReader(const std::string& path) : is_(path, std::ios::binary), path_(path) {
        if (!is_) throw IoError("cannot open for reading: " + path);
    }

    std::uint16_t u16() { return static_cast<std::uint16_t>(raw(2)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(raw(4)); }
    std::uint64_t u64() { return raw(8); }
    float f32() {
        const std::uint32_t bits = u32();
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }
    double f64() {
        const std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }

    void expect_magic(const char m[4], const char* format_name) {
        char buf[4];
        is_.read(buf, 4);
        if (is_.gcount() != 4) throw truncated();
        offset_ += 4;
        if (std::memcmp(buf, m, 4) != 0)
            throw IoError(std::string("bad magic for ") + format_name + " file: " + path_);
    }

    std::size_t offset() const { return offset_; }

private:
    std::uint64_t raw(int n) {
        char buf[8];
        is_.read(buf, n);
        if (is_.gcount() != n) throw truncated();
        std::uint64_t x = 0;
        for (int i = 0; i < n; ++i)
            x |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[i])) << (8 * i);
        offset_ += static_cast<std::size_t>(n);
        return x;
    }

    IoError truncated() const {
        return IoError("truncated file at byte offset " + std::to_string(offset_) + ": " + path_);
    }

    std::ifstream is_;
    std::string path_;
    std::size_t offset_ = 0;
};

} // namespace inc

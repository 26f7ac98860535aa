#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "csc/array.hpp"

namespace csc::io {

// CDICT1: "CDICT1\0\0", u32 LE filter_h, filter_w, num_filters, flags
// (bit 0: filters normalized), then float64 LE values filter-major,
// row-major within each filter.
std::vector<std::uint8_t> encode_dictionary(const Dictionary& d);
Dictionary decode_dictionary(const std::vector<std::uint8_t>& bytes);
void write_dictionary(const std::filesystem::path& path, const Dictionary& d);
Dictionary read_dictionary(const std::filesystem::path& path);

// CIMG1: "CIMG1\0\0\0" magic (8 bytes), u32 LE height, u32 LE width, float64 LE
// samples row-major.
std::vector<std::uint8_t> encode_cimg(const Image& img);
Image decode_cimg(const std::vector<std::uint8_t>& bytes);
void write_cimg(const std::filesystem::path& path, const Image& img);
Image read_cimg(const std::filesystem::path& path);

// Binary PGM, maxval 255.  Writing clamps to [0,1] and rounds to nearest.
std::vector<std::uint8_t> encode_pgm(const Image& img);
Image decode_pgm(const std::vector<std::uint8_t>& bytes);
void write_pgm(const std::filesystem::path& path, const Image& img);
Image read_pgm(const std::filesystem::path& path);

// Dispatches on content: PGM (P5) or CIMG1.
Image read_image(const std::filesystem::path& path);
// Dispatches on extension: .pgm writes PGM, anything else CIMG1.
void write_image(const std::filesystem::path& path, const Image& img);

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);
void write_text(const std::filesystem::path& path, const std::string& text);

// FNV-1a 64-bit, hex encoded; used for manifest checksums.
std::string checksum(const std::vector<std::uint8_t>& bytes);
std::string file_checksum(const std::filesystem::path& path);

}  // namespace csc::io

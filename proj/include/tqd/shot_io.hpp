#pragma once

#include "tqd/readout.hpp"

#include <iosfwd>
#include <string>

namespace tqd {

// CSV: header "label,decayed,I1,Q1,...,ID,QD"; label is empty for unlabelled
// records and decayed is 0/1.
void write_shots_csv(std::ostream& os, const ShotSet& shots);
ShotSet read_shots_csv(std::istream& is);

// Binary manifest: 8-byte magic "TQDSHOT\0", uint32 format version,
// uint64 metadata length, metadata JSON (tones, T, sigma, seed, shape),
// then per record int32 label (-1 if none), uint8 decayed and 2D doubles.
// All integers and doubles little-endian.
inline constexpr unsigned kShotFormatVersion = 1;
void write_shots_binary(std::ostream& os, const ShotSet& shots);
ShotSet read_shots_binary(std::istream& is);

void save_shots(const std::string& path, const ShotSet& shots);  // by extension: .csv or binary
ShotSet load_shots(const std::string& path);

}  // namespace tqd

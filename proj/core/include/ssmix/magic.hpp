#pragma once

#include <array>
#include <string>

#include "ssmix/dataset.hpp"

namespace ssmix {

// Column order of the UCI MAGIC Gamma Telescope file (10 features + class).
inline constexpr std::array<const char*, 10> kMagicColumns = {
    "fLength", "fWidth", "fSize", "fConc", "fConc1",
    "fAsym",   "fM3Long", "fM3Trans", "fAlpha", "fDist"};

inline constexpr long kMagicExpectedRows = 19020;

// The four variables retained for modeling, in this order.
inline constexpr std::array<const char*, 4> kMagicModelColumns = {"fAlpha", "fLength",
                                                                  "fM3Long", "fSize"};

// Reads the comma-separated MAGIC file: 10 numeric fields plus a g/h class
// (g -> 1, h -> 2). An optional header line is auto-detected by a
// non-numeric first field. Emits a warning (not an error) to stderr when
// the row count differs from 19,020; malformed rows raise DataError with
// the line number.
Dataset load_magic_csv(const std::string& path);

// Selects fAlpha, fLength, fM3Long, fSize in that order and standardizes
// each to zero mean and unit population variance. The affine transform is
// stored on the returned dataset.
Dataset preprocess_magic(const Dataset& dataset);

}  // namespace ssmix

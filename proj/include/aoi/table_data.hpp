#pragma once

#include <array>
#include <cstdint>

namespace aoi::reference_tables {

// Published reference ratios for the homogeneous systems, used by the
// `tables --check` mode and the acceptance suite. Values are percentages
// quoted to two decimals; checks compare at 5e-4 absolute on the fractional
// scale, which absorbs the quoting precision.

// Ratio of the N-sensor homogeneous system's average age to the single
// sensor's, fixed per-device rate.
struct BasicRatioCell {
  std::int64_t n;
  double percent;
};
inline constexpr std::array<BasicRatioCell, 8> kBasicRatios{{
    {1, 100.0},
    {2, 62.5},
    {3, 48.15},
    {4, 40.23},
    {10, 23.30},
    {100, 6.61},
    {1000, 2.02},
    {10000, 0.63},
}};

// Ratio of the (N sensors, M feeders) homogeneous system's average age to
// the (1, 1) system's, with unit per-device rates on both sides.
inline constexpr std::array<std::int64_t, 5> kHybridRatioN{1, 10, 100, 500,
                                                           1000};
inline constexpr std::array<std::int64_t, 5> kHybridRatioM{1, 5, 10, 20, 30};
inline constexpr double kHybridRatios[5][5] = {
    {100.0, 25.93, 13.22, 6.65, 4.43},
    {46.70, 21.66, 12.39, 6.52, 4.40},
    {16.20, 12.05, 8.91, 5.66, 4.08},
    {7.38, 6.42, 5.49, 4.18, 3.32},
    {5.24, 4.75, 4.23, 3.43, 2.86},
};

inline constexpr double kCheckToleranceFraction = 5e-4;

}  // namespace aoi::reference_tables

#pragma once

// Physical constants. IAU nominal values; lengths in meters, GM in m^3/s^2.

namespace deflect::constants {

inline constexpr double kAstronomicalUnitM = 1.495978707e11;  // IAU 2012
inline constexpr double kGmSun = 1.3271244e20;                // IAU 2015 nominal
inline constexpr double kGmEarth = 3.986004e14;               // IAU 2015 nominal
inline constexpr double kGmMoon = 4.9028e12;
inline constexpr double kEarthRadiusM = 6.371e6;
inline constexpr double kSoiRadiusM = 9.31e8;                 // Earth sphere of influence
inline constexpr double kMoonSmaKm = 0.3844e6;
inline constexpr double kMoonEcc = 0.0549;
inline constexpr double kSecondsPerDay = 86400.0;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kDegToRad = kPi / 180.0;
inline constexpr double kRadToDeg = 180.0 / kPi;

}  // namespace deflect::constants

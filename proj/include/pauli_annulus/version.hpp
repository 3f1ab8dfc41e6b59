#pragma once

namespace pauli_annulus {

inline constexpr const char* kSoftwareName = "pauli-annulus";
inline constexpr const char* kSoftwareVersion = "0.1.0";
/// Bumped whenever a CSV column order or a summary.json key changes.
inline constexpr int kFormatVersion = 1;

}  // namespace pauli_annulus

#pragma once

// File formats.
//
// Near-field matrix (.nfm): text header lines "key value", starting with
// "roughlsm-nearfield <version>" and ending with "END", then N*N complex
// entries as little-endian float64 (re, im) pairs in row-major order.
// Reals are printed with 17 significant digits, so files round-trip exactly.
//
// Indicator field (.csv): '#' header lines with the grid, alpha, variant and
// cutoff, a column header, then rows x1,x2,nind,raw_norm with x fastest.
//
// Heatmap (.pgm): binary 8-bit PGM, one pixel per grid node, top row is the
// largest x2, pixel = round(255 * NInd).

#include <filesystem>
#include <optional>

#include "roughlsm/forward.hpp"
#include "roughlsm/inversion.hpp"

namespace roughlsm {

inline constexpr int kMatrixFormatVersion = 1;
inline constexpr int kIndicatorFormatVersion = 1;

void write_matrix(const NearFieldMatrix& matrix, const std::filesystem::path& path);
NearFieldMatrix read_matrix(const std::filesystem::path& path);

/// Rows p,q,re,im with zero-based indices.
void write_matrix_csv(const NearFieldMatrix& matrix, const std::filesystem::path& path);

void write_indicator(const IndicatorField& field, double cutoff, const std::filesystem::path& path);
IndicatorField read_indicator(const std::filesystem::path& path);

void write_heatmap(const IndicatorField& field, const std::filesystem::path& path);

/// Rows x1,estimate,truth: the upper envelope of the kept set per column
/// (empty when nothing survives) and the true profile when known.
void write_overlay(const InterfaceEstimate& estimate, const InterfaceProfile* truth,
                   const std::filesystem::path& path);

}  // namespace roughlsm

#pragma once

#include <string>

#include "gcce/cce.hpp"

namespace gcce {

inline constexpr const char* kCurveCsvHeader = "time_ms,coh_re,coh_im,coh_abs";

// Header plus one row per grid point, 17 significant digits, LF endings.
std::string format_curve_csv(const CoherenceCurve& curve);
void write_curve_csv(const std::string& path, const CoherenceCurve& curve);

// Accepts files written by write_curve_csv; coh_abs is ignored on input.
CoherenceCurve parse_curve_csv(const std::string& text);
CoherenceCurve read_curve_csv(const std::string& path);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

} // namespace gcce

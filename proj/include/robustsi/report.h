#pragma once

#include <string>
#include <vector>

#include "robustsi/inference.h"

namespace robustsi {

enum class ReportFormat { Json, Csv };

// Serializes per-outlier reports. JSON: an array of objects with keys
// index, z_obs, naive_p, bonferroni_p, selective_p, ci_lo, ci_hi,
// truncation (array of [lo, hi] pairs), mass_outside_window_bound.
// CSV: the same columns in that order, truncation as "lo:hi;lo:hi".
// Numbers carry 17 significant digits, so output is byte-stable and doubles
// round-trip exactly.
std::string emit_report(const std::vector<SelectiveReport>& reports,
                        ReportFormat format);

}  // namespace robustsi

#pragma once

#include <string>

#include "adtree/scenario.hpp"
#include "adtree/scoring.hpp"

namespace adtree {

enum class OutputFormat { Table, Csv, Json, Svg };

struct RenderOptions {
    OutputFormat format = OutputFormat::Table;
    int precision = 4;       // decimal places for vulnerability values, 0..9
    int chart_width = 800;   // SVG user units
    int chart_height = 400;
};

/// Fixed-point decimal text, rounded half-up on the decimal representation.
/// Internal values keep full precision; rounding happens only here.
std::string format_fixed(double value, int precision);

/// Per-leaf scores plus the root value. CSV columns are exactly
/// `leaf_id,label,n,alpha,beta,nu`; JSON is one object with a `leaves`
/// array and a `root` value; the table is aligned monospace text.
std::string render_evaluation(const TreeEvaluation& evaluation, const RenderOptions& options);

/// Before/after rows. CSV columns are exactly
/// `leaf_id,nu_before,nu_after,improvement_pct`; improvement percentages
/// render with two decimal places in every format.
std::string render_comparison(const ComparisonReport& report, const RenderOptions& options);

/// Standalone SVG 1.1 with one before/after bar pair per leaf (axis fixed
/// to [0,1]) and a second panel of improvement-percent bars. Byte-identical
/// output for identical inputs. Throws DomainError("E_EMPTY_REPORT") when
/// the report has no rows.
std::string render_comparison_chart(const ComparisonReport& report,
                                    const RenderOptions& options);

}  // namespace adtree

#include "adtree/report.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>
#include <vector>

namespace adtree {

namespace {

void check_options(const RenderOptions& options) {
    if (options.precision < 0 || options.precision > 9) {
        throw std::invalid_argument("precision must be in [0, 9]");
    }
    if (options.chart_width <= 0 || options.chart_height <= 0) {
        throw std::invalid_argument("chart dimensions must be positive");
    }
}

// Improvement percentages always render with two decimals.
constexpr int kPercentPrecision = 2;

std::string csv_quoted(const std::string& text) {
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') {
            out += "\"\"";
        } else {
            out.push_back(c);
        }
    }
    out += "\"";
    return out;
}

std::string json_quoted(const std::string& text) {
    std::string out = "\"";
    for (unsigned char c : text) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\b': out += "\\b"; break;
            case '\f': out += "\\f"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out.push_back(static_cast<char>(c));
                }
        }
    }
    out += "\"";
    return out;
}

std::string xml_escaped(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

enum class Align { Left, Right };

// Monospace table: columns padded to content width, two spaces between.
std::string layout_table(const std::vector<std::vector<std::string>>& rows,
                         const std::vector<Align>& aligns) {
    std::vector<std::size_t> widths(aligns.size(), 0);
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            widths[c] = std::max(widths[c], row[c].size());
        }
    }
    std::string out;
    for (const auto& row : rows) {
        std::string line;
        for (std::size_t c = 0; c < row.size(); ++c) {
            std::string cell = row[c];
            std::size_t pad = widths[c] - cell.size();
            if (aligns[c] == Align::Right) {
                cell.insert(0, pad, ' ');
            } else if (c + 1 < row.size()) {
                cell.append(pad, ' ');
            }
            if (c > 0) {
                line += "  ";
            }
            line += cell;
        }
        while (!line.empty() && line.back() == ' ') {
            line.pop_back();
        }
        out += line + "\n";
    }
    return out;
}

}  // namespace

std::string format_fixed(double value, int precision) {
    if (precision < 0 || precision > 9) {
        throw std::invalid_argument("precision must be in [0, 9]");
    }
    // Three or more guard digits beyond the highest supported precision.
    // The buffer covers the full fixed rendering of any finite double.
    constexpr int kGuardDigits = 12;
    char buf[512];
    std::snprintf(buf, sizeof buf, "%.*f", kGuardDigits, value);
    std::string text(buf);
    bool negative = !text.empty() && text.front() == '-';
    if (negative) {
        text.erase(0, 1);
    }
    std::size_t dot = text.find('.');
    if (dot == std::string::npos) {
        return std::string(buf);  // non-finite input
    }
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    std::size_t integer_len = dot;
    std::size_t keep = integer_len + static_cast<std::size_t>(precision);
    bool round_up = digits[keep] >= '5';
    digits.resize(keep);
    if (round_up) {
        int i = static_cast<int>(digits.size()) - 1;
        for (; i >= 0; --i) {
            if (digits[i] != '9') {
                ++digits[i];
                break;
            }
            digits[i] = '0';
        }
        if (i < 0) {
            digits.insert(digits.begin(), '1');
            ++integer_len;
        }
    }
    std::string out = digits.substr(0, integer_len);
    if (precision > 0) {
        out += "." + digits.substr(integer_len);
    }
    if (negative && out.find_first_of("123456789") != std::string::npos) {
        out.insert(out.begin(), '-');
    }
    return out;
}

std::string render_evaluation(const TreeEvaluation& evaluation, const RenderOptions& options) {
    check_options(options);
    int p = options.precision;

    if (options.format == OutputFormat::Csv) {
        std::string out = "leaf_id,label,n,alpha,beta,nu\n";
        for (const LeafScore& leaf : evaluation.leaves) {
            out += leaf.leaf_id + "," + csv_quoted(leaf.label) + "," + std::to_string(leaf.n) +
                   "," + format_fixed(leaf.alpha, p) + "," + format_fixed(leaf.beta, p) + "," +
                   format_fixed(leaf.nu, p) + "\n";
        }
        return out;
    }

    if (options.format == OutputFormat::Json) {
        std::string out = "{\n  \"leaves\": [";
        for (std::size_t i = 0; i < evaluation.leaves.size(); ++i) {
            const LeafScore& leaf = evaluation.leaves[i];
            out += i == 0 ? "\n" : ",\n";
            out += "    {\n";
            out += "      \"leaf_id\": " + json_quoted(leaf.leaf_id) + ",\n";
            out += "      \"label\": " + json_quoted(leaf.label) + ",\n";
            out += "      \"n\": " + std::to_string(leaf.n) + ",\n";
            out += "      \"alpha\": " + format_fixed(leaf.alpha, p) + ",\n";
            out += "      \"beta\": " + format_fixed(leaf.beta, p) + ",\n";
            out += "      \"nu\": " + format_fixed(leaf.nu, p) + "\n";
            out += "    }";
        }
        out += evaluation.leaves.empty() ? "],\n" : "\n  ],\n";
        out += "  \"root\": " + format_fixed(evaluation.root, p) + "\n";
        out += "}\n";
        return out;
    }

    if (options.format == OutputFormat::Table) {
        std::vector<std::vector<std::string>> rows;
        rows.push_back({"leaf_id", "label", "n", "alpha", "beta", "nu"});
        for (const LeafScore& leaf : evaluation.leaves) {
            rows.push_back({leaf.leaf_id, leaf.label, std::to_string(leaf.n),
                            format_fixed(leaf.alpha, p), format_fixed(leaf.beta, p),
                            format_fixed(leaf.nu, p)});
        }
        std::string out = layout_table(
            rows, {Align::Left, Align::Left, Align::Right, Align::Right, Align::Right,
                   Align::Right});
        out += "root = " + format_fixed(evaluation.root, p) + "\n";
        return out;
    }

    throw DomainError("E_BAD_FORMAT", "evaluation reports render as table, csv or json");
}

std::string render_comparison(const ComparisonReport& report, const RenderOptions& options) {
    check_options(options);
    int p = options.precision;

    if (options.format == OutputFormat::Svg) {
        return render_comparison_chart(report, options);
    }

    if (options.format == OutputFormat::Csv) {
        std::string out = "leaf_id,nu_before,nu_after,improvement_pct\n";
        for (const ComparisonRow& row : report.rows) {
            out += row.leaf_id + "," + format_fixed(row.nu_before, p) + "," +
                   format_fixed(row.nu_after, p) + "," +
                   format_fixed(row.improvement_percent, kPercentPrecision) + "\n";
        }
        return out;
    }

    if (options.format == OutputFormat::Json) {
        std::string out = "{\n  \"rows\": [";
        for (std::size_t i = 0; i < report.rows.size(); ++i) {
            const ComparisonRow& row = report.rows[i];
            out += i == 0 ? "\n" : ",\n";
            out += "    {\n";
            out += "      \"leaf_id\": " + json_quoted(row.leaf_id) + ",\n";
            out += "      \"nu_before\": " + format_fixed(row.nu_before, p) + ",\n";
            out += "      \"nu_after\": " + format_fixed(row.nu_after, p) + ",\n";
            out += "      \"improvement_pct\": " +
                   format_fixed(row.improvement_percent, kPercentPrecision) + ",\n";
            out += std::string("      \"zero_baseline\": ") +
                   (row.zero_baseline ? "true" : "false") + "\n";
            out += "    }";
        }
        out += report.rows.empty() ? "],\n" : "\n  ],\n";
        out += "  \"root_before\": " + format_fixed(report.root_before, p) + ",\n";
        out += "  \"root_after\": " + format_fixed(report.root_after, p) + "\n";
        out += "}\n";
        return out;
    }

    std::vector<std::vector<std::string>> rows;
    rows.push_back({"leaf_id", "nu_before", "nu_after", "improvement_pct"});
    for (const ComparisonRow& row : report.rows) {
        rows.push_back({row.leaf_id, format_fixed(row.nu_before, p),
                        format_fixed(row.nu_after, p),
                        format_fixed(row.improvement_percent, kPercentPrecision)});
    }
    std::string out =
        layout_table(rows, {Align::Left, Align::Right, Align::Right, Align::Right});
    out += "root_before = " + format_fixed(report.root_before, p) + "\n";
    out += "root_after = " + format_fixed(report.root_after, p) + "\n";
    return out;
}

std::string render_comparison_chart(const ComparisonReport& report,
                                    const RenderOptions& options) {
    check_options(options);
    if (report.rows.empty()) {
        throw DomainError("E_EMPTY_REPORT", "cannot chart an empty comparison report");
    }

    double width = options.chart_width;
    double height = options.chart_height;
    double plot_top = 32.0;
    double plot_bottom = height - 44.0;
    double plot_h = plot_bottom - plot_top;
    double left_x0 = 48.0;
    double left_x1 = width / 2.0 - 28.0;
    double right_x0 = width / 2.0 + 52.0;
    double right_x1 = width - 16.0;
    std::size_t leaf_count = report.rows.size();

    auto num = [](double v) { return format_fixed(v, 2); };

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + num(width) +
           "\" height=\"" + num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) +
           "\">\n";
    svg +=
        "<style>\n"
        ".bar-before { fill: #39648c; }\n"
        ".bar-after { fill: #4f9d4f; }\n"
        ".bar-improvement { fill: #a9742c; }\n"
        ".axis { stroke: #333333; stroke-width: 1; }\n"
        "text { font-family: monospace; font-size: 11px; fill: #222222; }\n"
        ".title { font-size: 13px; }\n"
        ".value { font-size: 9px; }\n"
        ".legend-before { fill: #39648c; }\n"
        ".legend-after { fill: #4f9d4f; }\n"
        "</style>\n";

    svg += "<text class=\"title\" x=\"" + num(left_x0) + "\" y=\"18\">Vulnerability by attack leaf</text>\n";
    svg += "<text class=\"legend-before\" x=\"" + num(left_x1 - 96.0) + "\" y=\"18\">before</text>\n";
    svg += "<text class=\"legend-after\" x=\"" + num(left_x1 - 44.0) + "\" y=\"18\">after</text>\n";
    svg += "<text class=\"title\" x=\"" + num(right_x0) + "\" y=\"18\">Improvement (%)</text>\n";

    auto axis = [&](double x0, double x1) {
        std::string out;
        out += "<line class=\"axis\" x1=\"" + num(x0) + "\" y1=\"" + num(plot_top) + "\" x2=\"" +
               num(x0) + "\" y2=\"" + num(plot_bottom) + "\"/>\n";
        out += "<line class=\"axis\" x1=\"" + num(x0) + "\" y1=\"" + num(plot_bottom) +
               "\" x2=\"" + num(x1) + "\" y2=\"" + num(plot_bottom) + "\"/>\n";
        return out;
    };
    svg += axis(left_x0, left_x1);
    svg += axis(right_x0, right_x1);

    auto ticks = [&](double x0, double axis_max, int tick_precision) {
        std::string out;
        for (int t = 0; t <= 4; ++t) {
            double fraction = t / 4.0;
            double y = plot_bottom - fraction * plot_h;
            out += "<line class=\"axis\" x1=\"" + num(x0 - 4.0) + "\" y1=\"" + num(y) +
                   "\" x2=\"" + num(x0) + "\" y2=\"" + num(y) + "\"/>\n";
            out += "<text text-anchor=\"end\" x=\"" + num(x0 - 7.0) + "\" y=\"" + num(y + 4.0) +
                   "\">" + format_fixed(fraction * axis_max, tick_precision) + "</text>\n";
        }
        return out;
    };
    svg += ticks(left_x0, 1.0, 2);    // nu axis fixed to [0, 1]
    svg += ticks(right_x0, 100.0, 0); // improvement axis fixed to [0, 100]

    double left_slot = (left_x1 - left_x0) / static_cast<double>(leaf_count);
    double right_slot = (right_x1 - right_x0) / static_cast<double>(leaf_count);

    for (std::size_t i = 0; i < leaf_count; ++i) {
        const ComparisonRow& row = report.rows[i];
        double slot_x = left_x0 + static_cast<double>(i) * left_slot;

        auto bar = [&](const char* cls, double x, double bar_w, double value_fraction) {
            double h = value_fraction * plot_h;
            return "<rect class=\"" + std::string(cls) + "\" x=\"" + num(x) + "\" y=\"" +
                   num(plot_bottom - h) + "\" width=\"" + num(bar_w) + "\" height=\"" + num(h) +
                   "\"/>\n";
        };
        svg += bar("bar-before", slot_x + left_slot * 0.14, left_slot * 0.32, row.nu_before);
        svg += bar("bar-after", slot_x + left_slot * 0.54, left_slot * 0.32, row.nu_after);
        svg += "<text text-anchor=\"middle\" x=\"" + num(slot_x + left_slot / 2.0) + "\" y=\"" +
               num(plot_bottom + 16.0) + "\">" + xml_escaped(row.leaf_id) + "</text>\n";

        double clamped = std::clamp(row.improvement_percent, 0.0, 100.0);
        double islot_x = right_x0 + static_cast<double>(i) * right_slot;
        svg += bar("bar-improvement", islot_x + right_slot * 0.25, right_slot * 0.5,
                   clamped / 100.0);
        svg += "<text class=\"value\" text-anchor=\"middle\" x=\"" +
               num(islot_x + right_slot / 2.0) + "\" y=\"" +
               num(plot_bottom - clamped / 100.0 * plot_h - 4.0) + "\">" +
               format_fixed(row.improvement_percent, kPercentPrecision) + "</text>\n";
        svg += "<text text-anchor=\"middle\" x=\"" + num(islot_x + right_slot / 2.0) + "\" y=\"" +
               num(plot_bottom + 16.0) + "\">" + xml_escaped(row.leaf_id) + "</text>\n";
    }

    svg += "</svg>\n";
    return svg;
}

}  // namespace adtree

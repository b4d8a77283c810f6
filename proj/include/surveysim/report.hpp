#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "surveysim/agreement.hpp"
#include "surveysim/coefficients.hpp"
#include "surveysim/countries.hpp"
#include "surveysim/errors.hpp"
#include "surveysim/experiments.hpp"

namespace surveysim {

// Percentages use the results tables' mixed precision: one decimal below
// 10%, integer otherwise ("1.6%", "76%").
inline std::string format_percent(double probability) {
    const double p100 = probability * 100.0;
    char buffer[16];
    if (p100 < 9.95) {
        std::snprintf(buffer, sizeof(buffer), "%.1f%%", p100);
    } else {
        std::snprintf(buffer, sizeof(buffer), "%.0f%%", p100);
    }
    return buffer;
}

struct ComparisonTable {
    std::string text;
    std::string csv;
};

namespace detail {

inline std::string format_estimate(const CoefficientEstimate& e) {
    char buffer[48];
    std::snprintf(buffer, sizeof(buffer), "%+.3f (%.3f)", e.value, e.se);
    return buffer;
}

inline std::string csv_double(double x) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", x);
    return buffer;
}

} // namespace detail

// Side-by-side table of reference vs fitted coefficients with per-row sign
// agreements and pooled subtotals; framing/deprivation terms first, then the
// country block. Pooled rows marked '*' are significantly greater than
// chance (stored permutation p-value < 0.05).
inline ComparisonTable render_comparison_table(const CoefficientTable& reference,
                                               const CoefficientTable& fitted,
                                               const SignAgreementReport& agreements) {
    {
        std::set<std::string> expected(coefficient_term_keys().begin(),
                                       coefficient_term_keys().end());
        std::set<std::string> got;
        for (const auto& [key, value] : agreements.per_coefficient) got.insert(key);
        if (expected != got) {
            std::string message = "comparison table: agreement terms do not match:";
            for (const std::string& key : expected) {
                if (!got.contains(key)) message += " -" + key;
            }
            for (const std::string& key : got) {
                if (!expected.contains(key)) message += " +" + key;
            }
            throw StructuralError(message);
        }
    }

    struct Row {
        std::string label;
        std::string key_p;
        std::string key_m;
        const CoefficientEstimate *ref_p, *fit_p, *ref_m, *fit_m;
    };
    std::vector<Row> rows;
    for (std::string_view term : kFramingTerms) {
        Row row;
        row.label = std::string(term);
        row.key_p = detail::framing_term_key(term, Outcome::Persuasion);
        row.key_m = detail::framing_term_key(term, Outcome::Mobilization);
        row.ref_p = &reference.persuasion.framing_term(term);
        row.fit_p = &fitted.persuasion.framing_term(term);
        row.ref_m = &reference.mobilization.framing_term(term);
        row.fit_m = &fitted.mobilization.framing_term(term);
        rows.push_back(row);
    }
    for (Country c : kCountries) {
        Row row;
        row.label = std::string(country_code(c));
        row.key_p = "C_" + row.label + "_P";
        row.key_m = "C_" + row.label + "_M";
        row.ref_p = &reference.persuasion.country.at(c);
        row.fit_p = &fitted.persuasion.country.at(c);
        row.ref_m = &reference.mobilization.country.at(c);
        row.fit_m = &fitted.mobilization.country.at(c);
        rows.push_back(row);
    }

    auto agree = [&](const std::string& key) { return agreements.per_coefficient.at(key); };
    auto pooled = [&](const std::string& key) { return agreements.pooled.at(key); };
    auto mark = [&](const std::string& key) {
        return agreements.significant(key) ? std::string("*") : std::string();
    };

    std::string text;
    char line[256];
    std::snprintf(line, sizeof(line), "%-8s %-18s %-18s %-9s %-18s %-18s %-9s %-9s\n", "term",
                  "reference P", "model P", "agree P", "reference M", "model M", "agree M",
                  "agree PM");
    text += line;
    std::string csv =
        "term,reference_P_value,reference_P_se,model_P_value,model_P_se,agree_P,"
        "reference_M_value,reference_M_se,model_M_value,model_M_se,agree_M,agree_PM,"
        "significant_P,significant_M,significant_PM\n";

    auto emit_pooled = [&](const std::string& label, const std::string& prefix) {
        const PooledRate& p = pooled(prefix + "_P");
        const PooledRate& m = pooled(prefix + "_M");
        const PooledRate& pm = pooled(prefix);
        std::snprintf(line, sizeof(line), "%-8s %-18s %-18s %-9s %-18s %-18s %-9s %-9s\n",
                      label.c_str(), "", "", (format_percent(p.rate) + mark(prefix + "_P")).c_str(),
                      "", "", (format_percent(m.rate) + mark(prefix + "_M")).c_str(),
                      (format_percent(pm.rate) + mark(prefix)).c_str());
        text += line;
        csv += "pooled_" + prefix + ",,,,," + detail::csv_double(p.rate) + ",,,,," +
               detail::csv_double(m.rate) + "," + detail::csv_double(pm.rate) + "," +
               (agreements.significant(prefix + "_P") ? "1" : "0") + "," +
               (agreements.significant(prefix + "_M") ? "1" : "0") + "," +
               (agreements.significant(prefix) ? "1" : "0") + "\n";
    };

    std::size_t emitted = 0;
    for (const Row& row : rows) {
        const double ap = agree(row.key_p);
        const double am = agree(row.key_m);
        const double apm = (ap + am) / 2.0;
        std::snprintf(line, sizeof(line), "%-8s %-18s %-18s %-9s %-18s %-18s %-9s %-9s\n",
                      row.label.c_str(), detail::format_estimate(*row.ref_p).c_str(),
                      detail::format_estimate(*row.fit_p).c_str(), format_percent(ap).c_str(),
                      detail::format_estimate(*row.ref_m).c_str(),
                      detail::format_estimate(*row.fit_m).c_str(), format_percent(am).c_str(),
                      format_percent(apm).c_str());
        text += line;
        csv += row.label + "," + detail::csv_double(row.ref_p->value) + "," +
               detail::csv_double(row.ref_p->se) + "," + detail::csv_double(row.fit_p->value) +
               "," + detail::csv_double(row.fit_p->se) + "," + detail::csv_double(ap) + "," +
               detail::csv_double(row.ref_m->value) + "," + detail::csv_double(row.ref_m->se) +
               "," + detail::csv_double(row.fit_m->value) + "," + detail::csv_double(row.fit_m->se) +
               "," + detail::csv_double(am) + "," + detail::csv_double(apm) + ",,,\n";
        ++emitted;
        if (emitted == kFramingTerms.size()) emit_pooled("subtotal", "framing_deprivation");
        if (emitted == kFramingTerms.size() + kCountryCount) emit_pooled("subtotal", "country");
    }
    emit_pooled("all", "all");
    text += "* pooled agreement significantly (p < 0.05) greater than chance\n";

    return {text, csv};
}

struct ChartBar {
    std::string group;  // language code or plan mode
    std::string metric; // "country" or "framing_deprivation"
    double rate = 0.0;
    double sd = 0.0; // whisker half-length; 0 = no whisker
    bool significant = false;
    std::optional<double> p_value;
};

struct ChartData {
    nlohmann::json data;
    std::string svg;
};

namespace detail {

inline constexpr std::array<std::string_view, 2> kChartMetrics = {"country",
                                                                  "framing_deprivation"};

inline nlohmann::json bars_to_json(const std::string& kind, const std::vector<ChartBar>& bars) {
    nlohmann::json out = {{"v", 1}, {"kind", kind}, {"bars", nlohmann::json::array()}};
    for (const ChartBar& bar : bars) {
        nlohmann::json entry = {{"group", bar.group},
                                {"metric", bar.metric},
                                {"rate", bar.rate},
                                {"sd", bar.sd},
                                {"significant", bar.significant}};
        if (bar.p_value) entry["p_value"] = *bar.p_value;
        out["bars"].push_back(entry);
    }
    return out;
}

// Static grouped-bar SVG with optional +/- 1 sd whiskers; shading is pale
// when the bar's agreement is not significantly greater than chance.
inline std::string bars_to_svg(const std::string& title, const std::vector<ChartBar>& bars) {
    std::set<std::string> group_set;
    std::vector<std::string> groups;
    for (const ChartBar& bar : bars) {
        if (group_set.insert(bar.group).second) groups.push_back(bar.group);
    }
    const double bar_width = 28;
    const double group_gap = 26;
    const double group_width = 2 * bar_width + group_gap;
    const double margin_left = 52;
    const double margin_top = 42;
    const double plot_height = 260;
    const double width = margin_left + static_cast<double>(groups.size()) * group_width + 30;
    const double height = margin_top + plot_height + 60;

    std::string svg;
    char buffer[512];
    std::snprintf(buffer, sizeof(buffer),
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
                  "viewBox=\"0 0 %.0f %.0f\" font-family=\"sans-serif\" font-size=\"11\">\n",
                  width, height, width, height);
    svg += buffer;
    std::snprintf(buffer, sizeof(buffer), "<text x=\"%.0f\" y=\"20\" font-size=\"14\">%s</text>\n",
                  margin_left, title.c_str());
    svg += buffer;
    for (int grid = 0; grid <= 4; ++grid) {
        const double value = grid * 0.25;
        const double y = margin_top + plot_height * (1.0 - value);
        std::snprintf(buffer, sizeof(buffer),
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ccc\"/>"
                      "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%.2f</text>\n",
                      margin_left, y, width - 20, y, margin_left - 6, y + 4, value);
        svg += buffer;
    }
    for (const ChartBar& bar : bars) {
        const auto group_index = static_cast<double>(
            std::find(groups.begin(), groups.end(), bar.group) - groups.begin());
        const bool second = bar.metric == detail::kChartMetrics[1];
        const double x = margin_left + group_index * group_width + (second ? bar_width + 2 : 0) + 6;
        const double h = plot_height * std::clamp(bar.rate, 0.0, 1.0);
        const double y = margin_top + plot_height - h;
        const char* fill = second ? "#e08214" : "#2166ac";
        std::snprintf(buffer, sizeof(buffer),
                      "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"%s\" "
                      "fill-opacity=\"%.2f\"/>\n",
                      x, y, bar_width, h, fill, bar.significant ? 1.0 : 0.35);
        svg += buffer;
        if (bar.sd > 0) {
            const double y_lo = margin_top + plot_height * (1.0 - std::clamp(bar.rate - bar.sd, 0.0, 1.0));
            const double y_hi = margin_top + plot_height * (1.0 - std::clamp(bar.rate + bar.sd, 0.0, 1.0));
            const double cx = x + bar_width / 2;
            std::snprintf(buffer, sizeof(buffer),
                          "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#333\"/>"
                          "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#333\"/>"
                          "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#333\"/>\n",
                          cx, y_lo, cx, y_hi, cx - 5, y_lo, cx + 5, y_lo, cx - 5, y_hi, cx + 5,
                          y_hi);
            svg += buffer;
        }
    }
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const double x = margin_left + static_cast<double>(g) * group_width + bar_width + 4;
        std::snprintf(buffer, sizeof(buffer),
                      "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%s</text>\n", x,
                      margin_top + plot_height + 16, groups[g].c_str());
        svg += buffer;
    }
    std::snprintf(buffer, sizeof(buffer),
                  "<rect x=\"%.0f\" y=\"%.0f\" width=\"12\" height=\"12\" fill=\"#2166ac\"/>"
                  "<text x=\"%.0f\" y=\"%.0f\">country terms</text>"
                  "<rect x=\"%.0f\" y=\"%.0f\" width=\"12\" height=\"12\" fill=\"#e08214\"/>"
                  "<text x=\"%.0f\" y=\"%.0f\">framing and deprivation</text>\n",
                  margin_left, margin_top + plot_height + 28, margin_left + 16,
                  margin_top + plot_height + 38, margin_left + 150, margin_top + plot_height + 28,
                  margin_left + 166, margin_top + plot_height + 38);
    svg += buffer;
    svg += "</svg>\n";
    return svg;
}

inline bool summary_significant(const MetricSummary& metric) {
    if (metric.p_values.empty()) return false;
    std::vector<double> sorted = metric.p_values;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    return median < 0.05;
}

} // namespace detail

// Chart data for the monolingual sweep: one group per language, two bars per
// group. Expects exactly the twelve languages.
inline ChartData emit_chart_data_exp2(const std::vector<SignAgreementReport>& reports) {
    if (reports.empty()) throw StructuralError("exp2 chart: no reports");
    std::map<std::string, const SignAgreementReport*> by_language;
    for (const SignAgreementReport& report : reports) {
        if (report.language_code.empty()) {
            throw StructuralError("exp2 chart: report without language code");
        }
        if (!by_language.emplace(report.language_code, &report).second) {
            throw StructuralError("exp2 chart: duplicate language " + report.language_code);
        }
    }
    std::string missing;
    for (std::string_view code : kLanguageCodes) {
        if (!by_language.contains(std::string(code))) missing += " " + std::string(code);
    }
    if (!missing.empty()) throw StructuralError("exp2 chart: missing language(s):" + missing);

    std::vector<ChartBar> bars;
    for (std::string_view code : kLanguageCodes) {
        const SignAgreementReport& report = *by_language.at(std::string(code));
        for (std::string_view metric : detail::kChartMetrics) {
            ChartBar bar;
            bar.group = std::string(code);
            bar.metric = std::string(metric);
            const PooledRate& rate = report.pooled.at(std::string(metric));
            bar.rate = rate.rate;
            bar.p_value = rate.p_value;
            bar.significant = report.significant(std::string(metric));
            bars.push_back(bar);
        }
    }
    return {detail::bars_to_json("exp2", bars),
            detail::bars_to_svg("Sign agreement by prompting language", bars)};
}

// Chart data comparing monolingual, native and the two shuffle controls;
// shuffled bars carry +/- 1 sd whiskers across repetitions.
inline ChartData emit_chart_data_exp3(const SignAgreementReport& monolingual,
                                      const SignAgreementReport& native,
                                      const RepetitionSummary& country_shuffled,
                                      const RepetitionSummary& full_shuffled) {
    std::vector<ChartBar> bars;
    auto push_report = [&](const std::string& group, const SignAgreementReport& report) {
        for (std::string_view metric : detail::kChartMetrics) {
            const auto it = report.pooled.find(std::string(metric));
            if (it == report.pooled.end()) {
                throw StructuralError("exp3 chart: report for " + group + " lacks metric " +
                                      std::string(metric));
            }
            ChartBar bar;
            bar.group = group;
            bar.metric = std::string(metric);
            bar.rate = it->second.rate;
            bar.p_value = it->second.p_value;
            bar.significant = report.significant(std::string(metric));
            bars.push_back(bar);
        }
    };
    auto push_summary = [&](const std::string& group, const RepetitionSummary& summary) {
        for (std::string_view metric : detail::kChartMetrics) {
            const auto it = summary.metrics.find(std::string(metric));
            if (it == summary.metrics.end()) {
                throw StructuralError("exp3 chart: summary for " + group + " lacks metric " +
                                      std::string(metric));
            }
            ChartBar bar;
            bar.group = group;
            bar.metric = std::string(metric);
            bar.rate = it->second.mean;
            bar.sd = it->second.sd;
            bar.significant = detail::summary_significant(it->second);
            bars.push_back(bar);
        }
    };
    push_report("monolingual", monolingual);
    push_report("native", native);
    push_summary("country_shuffled", country_shuffled);
    push_summary("full_shuffled", full_shuffled);
    return {detail::bars_to_json("exp3", bars),
            detail::bars_to_svg("Sign agreement by prompting scheme", bars)};
}

} // namespace surveysim

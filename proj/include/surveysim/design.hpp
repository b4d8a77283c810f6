#pragma once

#include <Eigen/Dense>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "surveysim/countries.hpp"
#include "surveysim/errors.hpp"
#include "surveysim/scores.hpp"

namespace surveysim {

// The three nested models: A = countries + D + E + I; B adds the two-way
// interactions EI, DE, DI; C adds the three-way DEI.
enum class Model { A, B, C };

enum class Outcome { Persuasion, Mobilization };

inline std::string_view outcome_suffix(Outcome o) {
    return o == Outcome::Persuasion ? "P" : "M";
}

struct DesignMatrix {
    Eigen::MatrixXd x;
    std::vector<std::string> labels;
    Eigen::VectorXd y;
    // Countries present in the data, in code order; the last is the dropped
    // contrast level whose effect is recovered as minus the sum of the rest.
    std::vector<Country> countries;
};

// Build the fixed-effects design. Country enters through sum-to-zero
// (effects) coding: one column per country except the last present level,
// whose rows carry -1 in every country column. E and I are 0/1; interaction
// columns are elementwise products.
inline DesignMatrix build_design_matrix(const std::vector<ScoreRecord>& scores, Model model,
                                        Outcome outcome) {
    if (scores.empty()) throw std::invalid_argument("build_design_matrix: no score records");

    std::set<Country> present;
    for (const ScoreRecord& s : scores) present.insert(s.country);
    if (present.size() < 2) {
        throw std::invalid_argument("build_design_matrix: need at least 2 countries, found " +
                                    std::to_string(present.size()));
    }

    DesignMatrix design;
    design.countries.assign(present.begin(), present.end());
    const std::size_t n_contrast = design.countries.size() - 1;

    design.labels.push_back("intercept");
    for (std::size_t j = 0; j < n_contrast; ++j) {
        design.labels.push_back("C_" + std::string(country_code(design.countries[j])));
    }
    design.labels.insert(design.labels.end(), {"D", "E", "I"});
    if (model != Model::A) design.labels.insert(design.labels.end(), {"ExI", "DxE", "DxI"});
    if (model == Model::C) design.labels.push_back("DxExI");

    const auto n = static_cast<Eigen::Index>(scores.size());
    const auto p = static_cast<Eigen::Index>(design.labels.size());
    design.x = Eigen::MatrixXd::Zero(n, p);
    design.y = Eigen::VectorXd::Zero(n);

    for (Eigen::Index row = 0; row < n; ++row) {
        const ScoreRecord& s = scores[static_cast<std::size_t>(row)];
        Eigen::Index col = 0;
        design.x(row, col++) = 1.0;
        const auto level = static_cast<std::size_t>(
            std::lower_bound(design.countries.begin(), design.countries.end(), s.country) -
            design.countries.begin());
        if (level == n_contrast) {
            for (std::size_t j = 0; j < n_contrast; ++j) design.x(row, col + static_cast<Eigen::Index>(j)) = -1.0;
        } else {
            design.x(row, col + static_cast<Eigen::Index>(level)) = 1.0;
        }
        col += static_cast<Eigen::Index>(n_contrast);
        const double d = s.d;
        const double e = s.e ? 1.0 : 0.0;
        const double i = s.i ? 1.0 : 0.0;
        design.x(row, col++) = d;
        design.x(row, col++) = e;
        design.x(row, col++) = i;
        if (model != Model::A) {
            design.x(row, col++) = e * i;
            design.x(row, col++) = d * e;
            design.x(row, col++) = d * i;
        }
        if (model == Model::C) design.x(row, col++) = d * e * i;
        design.y(row) = outcome == Outcome::Persuasion ? s.p : s.m;
    }

    // Cheap degeneracy screen: a constant non-intercept column can only be
    // collinear with the intercept, so name it now rather than at fit time.
    std::vector<std::string> constant_columns;
    for (Eigen::Index col = 1; col < p; ++col) {
        const double first = design.x(0, col);
        bool constant = true;
        for (Eigen::Index row = 1; row < n && constant; ++row) {
            constant = design.x(row, col) == first;
        }
        if (constant) constant_columns.push_back(design.labels[static_cast<std::size_t>(col)]);
    }
    if (!constant_columns.empty()) {
        std::string message = "singular design: constant column(s)";
        for (const std::string& label : constant_columns) message += " " + label;
        throw SingularDesignError(message);
    }

    return design;
}

} // namespace surveysim

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <stdexcept>
#include <vector>

#include "surveysim/agreement.hpp"
#include "surveysim/coefficients.hpp"
#include "surveysim/design.hpp"
#include "surveysim/ols.hpp"
#include "surveysim/rng.hpp"
#include "surveysim/scores.hpp"

namespace surveysim {

struct PermutationConfig {
    int n_perm = 999;
    std::uint64_t seed = 0;
};

struct AnalysisResult {
    CoefficientTable coefficients;
    SignAgreementReport report;
    int redrawn_permutations = 0;
};

namespace detail {

// The six prefactored designs (models A, B, C for each outcome) plus the
// response vectors; permutations reuse the factorizations.
struct FittedDesigns {
    std::vector<Country> countries;
    PrefactoredDesign pa, pb, pc; // persuasion designs
    Eigen::VectorXd yp;
    Eigen::VectorXd ym;

    explicit FittedDesigns(const std::vector<ScoreRecord>& scores)
        : countries(), pa(make(scores, Model::A)), pb(make(scores, Model::B)),
          pc(make(scores, Model::C)) {
        DesignMatrix da = build_design_matrix(scores, Model::A, Outcome::Persuasion);
        countries = da.countries;
        yp = da.y;
        DesignMatrix dm = build_design_matrix(scores, Model::A, Outcome::Mobilization);
        ym = dm.y;
    }

    static PrefactoredDesign make(const std::vector<ScoreRecord>& scores, Model model) {
        DesignMatrix d = build_design_matrix(scores, model, Outcome::Persuasion);
        return PrefactoredDesign(std::move(d.x), std::move(d.labels));
    }

    CoefficientTable fit_table(const Eigen::VectorXd& persuasion,
                               const Eigen::VectorXd& mobilization) const {
        CoefficientTable table;
        table.persuasion =
            extract_coefficients(pa.fit(persuasion), pb.fit(persuasion), pc.fit(persuasion),
                                 countries);
        table.mobilization =
            extract_coefficients(pa.fit(mobilization), pb.fit(mobilization), pc.fit(mobilization),
                                 countries);
        return table;
    }
};

} // namespace detail

// Fit the three models for both outcomes, compute sign agreement against the
// reference, then assess each pooled rate against rates from permuted data.
// A permutation shuffles the (P, M) response pairs across participants while
// all features stay put, and uses the add-one convention
// p = (1 + #{shuffled >= observed}) / (1 + n_perm).
inline AnalysisResult analyze_scores(const std::vector<ScoreRecord>& scores,
                                     const CoefficientTable& reference,
                                     const PermutationConfig& config) {
    if (config.n_perm < 99) {
        throw std::invalid_argument("permutation test: n_perm must be >= 99, got " +
                                    std::to_string(config.n_perm));
    }

    const detail::FittedDesigns designs(scores);
    AnalysisResult result;
    result.coefficients = designs.fit_table(designs.yp, designs.ym);
    result.report = compute_sign_agreement(result.coefficients, reference);
    result.report.n_perm = config.n_perm;

    std::map<std::string, int> exceed_counts;
    for (const std::string& key : pooled_metric_keys()) exceed_counts[key] = 0;

    const auto n = static_cast<std::size_t>(designs.yp.size());
    std::vector<std::size_t> order(n);
    Eigen::VectorXd yp(designs.yp.size());
    Eigen::VectorXd ym(designs.ym.size());

    for (int perm = 0; perm < config.n_perm; ++perm) {
        // A singular refit (cannot happen while the design is fixed, but the
        // contract calls for it) redraws the permutation with a fresh stream.
        for (int redraw = 0;; ++redraw) {
            if (redraw > 100) {
                throw SingularDesignError("permutation test: designs singular after 100 redraws");
            }
            SplitMix64 rng(derive_seed(config.seed, "perm",
                                       static_cast<std::uint64_t>(perm) +
                                           (static_cast<std::uint64_t>(redraw) << 32)));
            for (std::size_t i = 0; i < n; ++i) order[i] = i;
            deterministic_shuffle(order, rng);
            for (std::size_t i = 0; i < n; ++i) {
                yp(static_cast<Eigen::Index>(i)) = designs.yp(static_cast<Eigen::Index>(order[i]));
                ym(static_cast<Eigen::Index>(i)) = designs.ym(static_cast<Eigen::Index>(order[i]));
            }
            try {
                const CoefficientTable permuted = designs.fit_table(yp, ym);
                const SignAgreementReport shuffled = compute_sign_agreement(permuted, reference);
                for (const std::string& key : pooled_metric_keys()) {
                    if (shuffled.pooled.at(key).rate >= result.report.pooled.at(key).rate) {
                        ++exceed_counts[key];
                    }
                }
                break;
            } catch (const SingularDesignError&) {
                ++result.redrawn_permutations;
            }
        }
    }

    for (const std::string& key : pooled_metric_keys()) {
        result.report.pooled.at(key).p_value =
            (1.0 + exceed_counts.at(key)) / (1.0 + config.n_perm);
    }
    return result;
}

// Operation-level wrapper: the permutation p-value for one pooled metric.
inline double permutation_significance(const std::vector<ScoreRecord>& scores,
                                       const CoefficientTable& reference,
                                       const std::string& pooled_metric, int n_perm,
                                       std::uint64_t seed) {
    bool known = false;
    for (const std::string& key : pooled_metric_keys()) known = known || key == pooled_metric;
    if (!known) {
        throw std::invalid_argument("permutation test: unknown pooled metric '" + pooled_metric +
                                    "'");
    }
    const AnalysisResult result = analyze_scores(scores, reference, {n_perm, seed});
    return *result.report.pooled.at(pooled_metric).p_value;
}

} // namespace surveysim

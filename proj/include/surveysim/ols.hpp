#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "surveysim/errors.hpp"

namespace surveysim {

struct OlsFit {
    Eigen::VectorXd coefficients;
    Eigen::VectorXd standard_errors;
    double residual_variance = 0.0; // RSS / (n - p)
    Eigen::MatrixXd covariance;     // residual_variance * (X'X)^-1
    Eigen::Index n = 0;
    Eigen::Index p = 0;
    std::vector<std::string> labels;

    Eigen::Index column(const std::string& label) const {
        for (std::size_t j = 0; j < labels.size(); ++j) {
            if (labels[j] == label) return static_cast<Eigen::Index>(j);
        }
        throw std::invalid_argument("fit has no column '" + label + "'");
    }

    bool has_column(const std::string& label) const {
        for (const std::string& l : labels) {
            if (l == label) return true;
        }
        return false;
    }
};

// A design factored once and reused across many response vectors, which is
// what makes permutation refits cheap: the rank-revealing QR, (X'X)^-1 and
// the residual projection all depend on X alone.
class PrefactoredDesign {
public:
    PrefactoredDesign(Eigen::MatrixXd x, std::vector<std::string> labels = {})
        : x_(std::move(x)), labels_(std::move(labels)), qr_(x_) {
        const Eigen::Index n = x_.rows();
        const Eigen::Index p = x_.cols();
        if (n <= p) {
            throw std::invalid_argument("fit_ols: need more rows than columns (n=" +
                                        std::to_string(n) + ", p=" + std::to_string(p) + ")");
        }
        if (labels_.empty()) {
            for (Eigen::Index j = 0; j < p; ++j) labels_.push_back("x" + std::to_string(j));
        }
        if (qr_.rank() < p) {
            // The pivoted columns beyond the numerical rank are the dependent ones.
            std::string message = "singular design: dependent column(s)";
            const auto& perm = qr_.colsPermutation().indices();
            for (Eigen::Index k = qr_.rank(); k < p; ++k) {
                message += " " + labels_[static_cast<std::size_t>(perm(k))];
            }
            throw SingularDesignError(message);
        }
        // (X'X)^-1 = P R^-1 R^-T P' from the pivoted factorization X P = Q R.
        const Eigen::MatrixXd r = qr_.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
        const Eigen::MatrixXd r_inv =
            r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
        const Eigen::MatrixXd unpivoted = r_inv * r_inv.transpose();
        xtx_inverse_ = qr_.colsPermutation() * unpivoted * qr_.colsPermutation().transpose();
    }

    OlsFit fit(const Eigen::VectorXd& y) const {
        if (y.size() != x_.rows()) {
            throw std::invalid_argument("fit_ols: response length does not match design rows");
        }
        OlsFit out;
        out.n = x_.rows();
        out.p = x_.cols();
        out.labels = labels_;
        out.coefficients = qr_.solve(y);
        const Eigen::VectorXd residuals = y - x_ * out.coefficients;
        const double rss = residuals.squaredNorm();
        out.residual_variance = rss / static_cast<double>(out.n - out.p);
        out.covariance = out.residual_variance * xtx_inverse_;
        out.standard_errors = out.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
        return out;
    }

    const std::vector<std::string>& labels() const { return labels_; }
    const Eigen::MatrixXd& xtx_inverse() const { return xtx_inverse_; }
    Eigen::Index rows() const { return x_.rows(); }

private:
    Eigen::MatrixXd x_;
    std::vector<std::string> labels_;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_;
    Eigen::MatrixXd xtx_inverse_;
};

// Least-squares fit via rank-revealing Householder QR (never by inverting the
// normal equations). se_j = sqrt(residual_variance * [(X'X)^-1]_jj).
inline OlsFit fit_ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                      std::vector<std::string> labels = {}) {
    return PrefactoredDesign(x, std::move(labels)).fit(y);
}

} // namespace surveysim

#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "regionlab/error.hpp"
#include "regionlab/ingest.hpp"

namespace regionlab {

/// Z-scores each column: mean 0, sample standard deviation 1 (divisor
/// n-1). Column names are only used to identify a zero-variance column in
/// the error message.
inline Eigen::MatrixXd standardize(const Eigen::MatrixXd& x,
                                   const std::vector<std::string>* names = nullptr) {
    require(x.rows() >= 2, "standardization needs at least 2 rows");
    Eigen::MatrixXd out(x.rows(), x.cols());
    const double n = static_cast<double>(x.rows());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double m = x.col(j).mean();
        const double var = (x.col(j).array() - m).square().sum() / (n - 1.0);
        if (!(var > 0.0)) {
            const std::string name = names != nullptr
                                         ? (*names)[static_cast<std::size_t>(j)]
                                         : "column " + std::to_string(j);
            fail("cannot standardize zero-variance column '", name, "'");
        }
        out.col(j) = (x.col(j).array() - m) / std::sqrt(var);
    }
    return out;
}

inline Eigen::MatrixXd standardize(const FeatureTable& table) {
    std::vector<std::string> names;
    for (const Factor& factor : table.factors)
        names.push_back(factor.name);
    return standardize(table.values, &names);
}

struct PcaResult {
    Eigen::MatrixXd loadings; // p x p, orthonormal columns, descending eigenvalue order
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd scores; // n x p, standardized data projected on the loadings
    std::vector<double> explained_variance_ratio;
    std::vector<double> cumulative;
};

/// Principal components via eigendecomposition of the sample correlation
/// matrix of the standardized data. Components are ordered by descending
/// eigenvalue; each loading column is flipped so its largest-magnitude
/// entry is positive, fixing the eigenvector sign ambiguity.
inline PcaResult pca(const Eigen::MatrixXd& standardized) {
    const Eigen::Index n = standardized.rows();
    const Eigen::Index p = standardized.cols();
    require(n >= 2, "need at least 2 rows");
    require(p >= 1, "need at least 1 column");

    const Eigen::MatrixXd corr =
        (standardized.transpose() * standardized) / static_cast<double>(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(corr);
    require(solver.info() == Eigen::Success, "eigendecomposition failed");

    PcaResult result;
    result.loadings.resize(p, p);
    result.eigenvalues.resize(p);
    // Solver returns ascending eigenvalues; reverse to descending.
    for (Eigen::Index c = 0; c < p; ++c) {
        result.eigenvalues(c) = solver.eigenvalues()(p - 1 - c);
        result.loadings.col(c) = solver.eigenvectors().col(p - 1 - c);
        Eigen::Index arg = 0;
        result.loadings.col(c).cwiseAbs().maxCoeff(&arg);
        if (result.loadings(arg, c) < 0.0)
            result.loadings.col(c) = -result.loadings.col(c);
    }
    result.scores = standardized * result.loadings;

    const double total = result.eigenvalues.sum();
    require(total > 0.0, "correlation matrix has no positive eigenvalues");
    double running = 0.0;
    for (Eigen::Index c = 0; c < p; ++c) {
        const double ratio = result.eigenvalues(c) / total;
        result.explained_variance_ratio.push_back(ratio);
        running += ratio;
        result.cumulative.push_back(running);
    }
    return result;
}

struct RegionProfile {
    std::vector<std::string> factor_names;
    Eigen::MatrixXd means;      // n_regions x p, raw per-region factor means
    Eigen::MatrixXd normalized; // min-max scaled across regions per factor
};

/// Per-region factor means, min-max normalized across regions so each
/// factor axis spans [0,1]. A factor with zero range across regions maps
/// to 0.5 everywhere, keeping the axis plottable.
inline RegionProfile region_profile(const FeatureTable& table, const std::vector<int>& labels,
                                    int n_regions) {
    require(labels.size() == table.provinces.size(), "label/province count mismatch");
    require(n_regions >= 1, "need at least one region");
    const Eigen::Index p = table.values.cols();

    RegionProfile profile;
    for (const Factor& factor : table.factors)
        profile.factor_names.push_back(factor.name);
    profile.means = Eigen::MatrixXd::Zero(n_regions, p);
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(n_regions);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        require(labels[i] >= 0 && labels[i] < n_regions, "label out of range");
        profile.means.row(labels[i]) += table.values.row(static_cast<Eigen::Index>(i));
        counts(labels[i]) += 1.0;
    }
    for (int r = 0; r < n_regions; ++r) {
        require(counts(r) > 0.0, "region ", r, " is empty");
        profile.means.row(r) /= counts(r);
    }

    profile.normalized.resize(n_regions, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        const double lo = profile.means.col(j).minCoeff();
        const double hi = profile.means.col(j).maxCoeff();
        if (hi > lo)
            profile.normalized.col(j) = (profile.means.col(j).array() - lo) / (hi - lo);
        else
            profile.normalized.col(j).setConstant(0.5);
    }
    return profile;
}

} // namespace regionlab

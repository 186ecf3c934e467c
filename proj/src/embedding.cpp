#include "keystep/embedding.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "keystep/error.hpp"

namespace keystep {

std::vector<EmbeddedPoint> project_2d(std::span<const LatentCode> codes, std::size_t first_frame) {
    const auto n = static_cast<Eigen::Index>(codes.size());
    if (n < 3) throw BoundsError("projection needs at least 3 codes");
    const auto d = static_cast<Eigen::Index>(codes.front().dims());
    Eigen::MatrixXd X(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(codes[static_cast<std::size_t>(i)].dims()) != d) {
            throw InvalidCodeError("code dims differ within one projection");
        }
        X.row(i) = Eigen::Map<const Eigen::RowVectorXd>(codes[static_cast<std::size_t>(i)].values.data(), d);
    }
    X.rowwise() -= X.colwise().mean();

    // Leading principal axes (loadings, d x 2) from whichever scatter matrix is smaller.
    Eigen::MatrixXd axes = Eigen::MatrixXd::Zero(d, 2);
    Eigen::Vector2d variance = Eigen::Vector2d::Zero();
    if (d <= n) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(X.transpose() * X);
        const auto& vals = eig.eigenvalues();
        for (int c = 0; c < 2 && c < d; ++c) {
            variance[c] = vals[d - 1 - c];
            axes.col(c) = eig.eigenvectors().col(d - 1 - c);
        }
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(X * X.transpose());
        const auto& vals = eig.eigenvalues();
        for (int c = 0; c < 2; ++c) {
            variance[c] = vals[n - 1 - c];
            if (variance[c] > 0.0) {
                axes.col(c) = (X.transpose() * eig.eigenvectors().col(n - 1 - c)).normalized();
            }
        }
    }

    const double top = std::max(variance[0], 0.0);
    for (int c = 0; c < 2; ++c) {
        if (!(variance[c] > 1e-12 * top) || !(top > 0.0)) {
            axes.col(c).setZero();
            continue;
        }
        Eigen::Index arg = 0;
        axes.col(c).cwiseAbs().maxCoeff(&arg);
        if (axes(arg, c) < 0.0) axes.col(c) *= -1.0;
    }

    const Eigen::MatrixXd proj = X * axes;
    const double scale = proj.size() > 0 ? proj.cwiseAbs().maxCoeff() : 0.0;
    std::vector<EmbeddedPoint> out(codes.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        auto& p = out[static_cast<std::size_t>(i)];
        p.frame = first_frame + static_cast<std::size_t>(i);
        if (scale > 0.0) {
            p.x = proj(i, 0) / scale;
            p.y = proj(i, 1) / scale;
        }
    }
    return out;
}

void sample_for_display(std::vector<EmbeddedPoint>& points, const std::set<std::size_t>& salient, std::size_t cap) {
    const std::size_t n = points.size();
    const std::size_t stride = (cap == 0 || n <= cap) ? 1 : (n + cap - 1) / cap;
    for (std::size_t i = 0; i < n; ++i) {
        auto& p = points[i];
        p.salient = salient.count(p.frame) > 0;
        p.sampled_out = cap == 0 ? !p.salient : (i % stride != 0 && !p.salient);
    }
}

}  // namespace keystep

#pragma once

#include <array>
#include <cstdint>

#include "harmlab/sphere.hpp"

namespace harmlab {

using Mat5 = std::array<std::array<double, 5>, 5>;

// Joint covariance of (grad f, vec Hess f) at a point; block diagonal with
// a_ell = diag(lambda/2, lambda/2) and the 3x3 Hessian block c_ell.
struct Sigma5 {
    Mat5 m;
};

// Lower-triangular Cholesky factor of Sigma5; only five distinct nonzero
// entries tau1..tau5 (tau1 twice on the gradient block).
struct Lambda5 {
    double tau1, tau2, tau3, tau4, tau5;
    Mat5 matrix() const;
};

// Closed forms; requires ell >= 2 (tau4 needs lambda >= 2... strictly > 2).
std::pair<Sigma5, Lambda5> sigma_and_cholesky(int ell);

struct JetCovarianceEstimate {
    Mat5 cov;       // sample covariance of (g1, g2, h11, h12, h22)
    Mat5 whitened;  // sample covariance of Lambda^{-1} * jet (should be I)
    int n = 0;
};

JetCovarianceEstimate empirical_jet_covariance(int ell, int n_replicates,
                                               std::uint64_t seed,
                                               const SpherePoint& base);

}  // namespace harmlab

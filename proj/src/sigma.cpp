#include "harmlab/sigma.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "harmlab/field.hpp"
#include "harmlab/rng.hpp"

namespace harmlab {

Mat5 Lambda5::matrix() const {
    Mat5 L{};
    L[0][0] = tau1;
    L[1][1] = tau1;
    L[2][2] = tau3;
    L[3][3] = tau4;
    L[4][2] = tau2;
    L[4][4] = tau5;
    return L;
}

std::pair<Sigma5, Lambda5> sigma_and_cholesky(int ell) {
    if (ell < 2) throw std::domain_error("sigma_and_cholesky: ell must be >= 2");
    const double lam = static_cast<double>(ell) * (ell + 1.0);

    Sigma5 sig{};
    sig.m[0][0] = sig.m[1][1] = lam / 2.0;
    const double f = lam * lam / 8.0;
    sig.m[2][2] = f * (3.0 - 2.0 / lam);
    sig.m[2][4] = sig.m[4][2] = f * (1.0 + 2.0 / lam);
    sig.m[3][3] = f * (1.0 - 2.0 / lam);
    sig.m[4][4] = f * (3.0 - 2.0 / lam);

    Lambda5 L;
    const double sl = std::sqrt(lam);
    L.tau1 = sl / std::sqrt(2.0);
    L.tau3 = sl * std::sqrt(3.0 * lam - 2.0) / (2.0 * std::sqrt(2.0));
    L.tau4 = sl * std::sqrt(lam - 2.0) / (2.0 * std::sqrt(2.0));
    L.tau2 = sl * (lam + 2.0) / (2.0 * std::sqrt(2.0) * std::sqrt(3.0 * lam - 2.0));
    L.tau5 = lam * std::sqrt(lam - 2.0) / std::sqrt(3.0 * lam - 2.0);
    return {sig, L};
}

JetCovarianceEstimate empirical_jet_covariance(int ell, int n_replicates,
                                               std::uint64_t seed,
                                               const SpherePoint& base) {
    if (n_replicates < 2) throw std::domain_error("empirical_jet_covariance: need n >= 2");
    const auto [sig, L] = sigma_and_cholesky(ell);

    JetCovarianceEstimate est;
    est.n = n_replicates;
    std::array<double, 5> mean{};
    std::array<double, 5> wmean{};
    Mat5 acc{};
    Mat5 wacc{};
    std::vector<std::array<double, 5>> jets(n_replicates);
    std::vector<std::array<double, 5>> whit(n_replicates);

    for (int r = 0; r < n_replicates; ++r) {
        const auto field = HarmonicField::sample(
            ell, replicate_seed(seed, static_cast<std::uint64_t>(ell), static_cast<std::uint64_t>(r)));
        const Jet2 j = field.jet(base);
        const std::array<double, 5> v{j.g1, j.g2, j.h11, j.h12, j.h22};
        // forward substitution with the sparse Lambda
        std::array<double, 5> w{};
        w[0] = v[0] / L.tau1;
        w[1] = v[1] / L.tau1;
        w[2] = v[2] / L.tau3;
        w[3] = v[3] / L.tau4;
        w[4] = (v[4] - L.tau2 * w[2]) / L.tau5;
        jets[r] = v;
        whit[r] = w;
        for (int i = 0; i < 5; ++i) {
            mean[i] += v[i];
            wmean[i] += w[i];
        }
    }
    for (int i = 0; i < 5; ++i) {
        mean[i] /= n_replicates;
        wmean[i] /= n_replicates;
    }
    for (int r = 0; r < n_replicates; ++r) {
        for (int i = 0; i < 5; ++i) {
            for (int k = 0; k < 5; ++k) {
                acc[i][k] += (jets[r][i] - mean[i]) * (jets[r][k] - mean[k]);
                wacc[i][k] += (whit[r][i] - wmean[i]) * (whit[r][k] - wmean[k]);
            }
        }
    }
    for (int i = 0; i < 5; ++i) {
        for (int k = 0; k < 5; ++k) {
            est.cov[i][k] = acc[i][k] / (n_replicates - 1);
            est.whitened[i][k] = wacc[i][k] / (n_replicates - 1);
        }
    }
    return est;
}

}  // namespace harmlab

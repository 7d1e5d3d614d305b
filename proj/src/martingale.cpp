#include "sdlab/martingale.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "sdlab/errors.hpp"

namespace sdlab::martingale {

double truncation_level(double n) {
    if (!(n >= 1.0)) throw InvalidParameterError("truncation_level: n must be >= 1");
    const double ll = std::log(std::log(std::max(n, 3.0)));
    return std::sqrt(n * std::max(1.0, ll));
}

double DoobDecomposition::S() const {
    double s = 0.0;
    for (std::size_t k = 1; k < X.size(); ++k) s += X[k];
    return s;
}

double DoobDecomposition::M() const {
    double s = 0.0;
    for (std::size_t k = 1; k < Z.size(); ++k) s += Z[k];
    return s;
}

double DoobDecomposition::identity_residual() const {
    const std::size_t n = this->n();
    double e = 0.0;
    for (std::size_t k = 0; k < n; ++k) e += E[k];
    return (1.0 - theta) * S() - (M() + theta * (X[0] - X[n]) + e);
}

double DoobDecomposition::reconstruction_error() const {
    double worst = 0.0;
    for (std::size_t k = 1; k < X.size(); ++k) {
        worst = std::max(worst, std::abs(X[k] - Z[k] - Y[k]));
    }
    return worst;
}

DoobDecomposition doob_decompose_chain(const chain::SpreadingKernel& kernel,
                                       std::span<const chain::Cell> trajectory, double c,
                                       double center) {
    if (trajectory.size() < 2) {
        throw InvalidParameterError("doob_decompose_chain: need at least two states");
    }
    if (!(c > 0.0)) throw InvalidParameterError("doob_decompose_chain: c must be > 0");
    // Cells n with |n - a| < c.
    const auto lo = static_cast<chain::Cell>(std::floor(center - c)) + 1;
    const auto hi = static_cast<chain::Cell>(std::ceil(center + c)) - 1;
    auto truncated = [&](chain::Cell m) {
        const double x = static_cast<double>(m) - center;
        return std::abs(x) < c ? x : 0.0;
    };
    auto predicted = [&](chain::Cell m) {
        const auto mom = kernel.partial_moments(m, lo, hi);
        return mom.first - center * mom.mass;
    };
    DoobDecomposition d;
    d.theta = kernel.theta();
    d.center = center;
    d.c = c;
    const std::size_t n = trajectory.size() - 1;
    d.X.resize(n + 1);
    d.Y.assign(n + 1, 0.0);
    d.Z.assign(n + 1, 0.0);
    d.E.assign(n, 0.0);
    for (std::size_t k = 0; k <= n; ++k) {
        const chain::Cell m = trajectory[k];
        if (m < 1 || m > kernel.m_max()) {
            throw InvalidParameterError("doob_decompose_chain: state outside the kernel's range");
        }
        d.X[k] = truncated(m);
        if (k > 0) {
            const auto [a, b] = kernel.support(trajectory[k - 1]);
            if (m < a || m > b) {
                throw InvalidParameterError(
                    "doob_decompose_chain: transition outside the kernel support");
            }
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        const double y = predicted(trajectory[k]);
        d.Y[k + 1] = y;
        d.Z[k + 1] = d.X[k + 1] - y;
        d.E[k] = y - d.theta * d.X[k];
    }
    return d;
}

McLeishSums mcleish_sums(const DoobDecomposition& d) {
    McLeishSums s;
    s.n = d.n();
    for (std::size_t k = 1; k < d.Z.size(); ++k) {
        const double z2 = d.Z[k] * d.Z[k];
        s.sum_z2 += z2;
        s.max_z2 = std::max(s.max_z2, z2);
    }
    return s;
}

McLeishDiagnostics mcleish_diagnostics(const DoobDecomposition& d, double H_cn) {
    return mcleish_diagnostics(std::vector<McLeishSums>{mcleish_sums(d)}, d.theta, H_cn);
}

McLeishDiagnostics mcleish_diagnostics(const std::vector<McLeishSums>& runs, double theta,
                                       double H_cn) {
    if (runs.empty()) throw InvalidParameterError("mcleish_diagnostics: no runs");
    if (!(H_cn > 0.0)) throw InvalidParameterError("mcleish_diagnostics: H(c_n) must be > 0");
    McLeishDiagnostics out;
    for (const auto& r : runs) {
        const double denom = static_cast<double>(r.n) * H_cn;
        out.max_term += r.max_z2 / denom;
        out.sum_squares += r.sum_z2 / denom;
    }
    out.max_term /= static_cast<double>(runs.size());
    out.sum_squares /= static_cast<double>(runs.size());
    out.limit = 1.0 - theta * theta;
    return out;
}

std::vector<double> xi_residual(std::span<const double> f_tilde,
                                std::span<const std::uint64_t> R) {
    if (f_tilde.size() != R.size()) {
        throw InvalidParameterError("xi_residual: series lengths differ");
    }
    auto cell = [](std::uint64_t r) -> std::int64_t {
        if (r < 50) return static_cast<std::int64_t>(r);
        return 50 + static_cast<std::int64_t>(std::floor(std::log(r / 50.0) / std::log(1.1)));
    };
    std::map<std::int64_t, std::pair<double, std::size_t>> sums;
    for (std::size_t i = 0; i < R.size(); ++i) {
        auto& s = sums[cell(R[i])];
        s.first += f_tilde[i];
        s.second += 1;
    }
    std::vector<double> out(R.size());
    for (std::size_t i = 0; i < R.size(); ++i) {
        const auto& s = sums[cell(R[i])];
        out[i] = f_tilde[i] - s.first / static_cast<double>(s.second);
    }
    return out;
}

}  // namespace sdlab::martingale

#include "gapmodes/fd_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace gapmodes {
namespace {

constexpr int kl = 2;       // lower bandwidth
constexpr int ku = 2;       // upper bandwidth
constexpr int kv = kl + ku; // fill bandwidth after pivoting
constexpr int ldab = 2 * kl + ku + 1;

double vec_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double vec_dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// y = A x for the pentadiagonal operator
void apply(const FdOperator& op, const std::vector<double>& x,
           std::vector<double>& y) {
    const std::size_t n = op.size();
    for (std::size_t i = 0; i < n; ++i) {
        double s = op.diag[i] * x[i];
        if (i >= 1) s += op.off1[i - 1] * x[i - 1];
        if (i + 1 < n) s += op.off1[i] * x[i + 1];
        if (i >= 2) s += op.off2[i - 2] * x[i - 2];
        if (i + 2 < n) s += op.off2[i] * x[i + 2];
        y[i] = s;
    }
}

struct BandLU {
    int n = 0;
    std::vector<double> ab;  // LAPACK band layout, ldab x n, column-major
    std::vector<int> piv;
};

// LU with partial pivoting of (A - sigma I) in band storage
BandLU band_factor(const FdOperator& op, double sigma) {
    const int n = static_cast<int>(op.size());
    BandLU lu;
    lu.n = n;
    lu.ab.assign(static_cast<std::size_t>(ldab) * n, 0.0);
    lu.piv.resize(n);
    auto at = [&](int r, int j) -> double& {
        return lu.ab[static_cast<std::size_t>(j) * ldab + r];
    };
    for (int j = 0; j < n; ++j) {
        at(kv, j) = op.diag[j] - sigma;
        if (j + 1 < n) {
            at(kv + 1, j) = op.off1[j];
            at(kv - 1, j + 1) = op.off1[j];
        }
        if (j + 2 < n) {
            at(kv + 2, j) = op.off2[j];
            at(kv - 2, j + 2) = op.off2[j];
        }
    }
    for (int j = 0; j < n; ++j) {
        const int km = std::min(kl, n - 1 - j);
        int p = 0;
        double best = std::abs(at(kv, j));
        for (int k = 1; k <= km; ++k) {
            const double v = std::abs(at(kv + k, j));
            if (v > best) {
                best = v;
                p = k;
            }
        }
        lu.piv[j] = j + p;
        if (best == 0.0) at(kv + p, j) = 1e-300;  // exact-singularity guard
        const int jmax = std::min(j + kv, n - 1);
        if (p > 0) {
            for (int jj = j; jj <= jmax; ++jj) {
                std::swap(at(kv + j - jj, jj), at(kv + j - jj + p, jj));
            }
        }
        const double pivval = at(kv, j);
        for (int k = 1; k <= km; ++k) at(kv + k, j) /= pivval;
        for (int jj = j + 1; jj <= jmax; ++jj) {
            const double u = at(kv + j - jj, jj);
            if (u != 0.0) {
                for (int k = 1; k <= km; ++k) {
                    at(kv + j - jj + k, jj) -= at(kv + k, j) * u;
                }
            }
        }
    }
    return lu;
}

void band_solve(const BandLU& lu, std::vector<double>& b) {
    const int n = lu.n;
    auto at = [&](int r, int j) {
        return lu.ab[static_cast<std::size_t>(j) * ldab + r];
    };
    for (int j = 0; j < n; ++j) {
        if (lu.piv[j] != j) std::swap(b[j], b[lu.piv[j]]);
        const int km = std::min(kl, n - 1 - j);
        for (int k = 1; k <= km; ++k) b[j + k] -= at(kv + k, j) * b[j];
    }
    for (int j = n - 1; j >= 0; --j) {
        const int jmax = std::min(j + kv, n - 1);
        double s = b[j];
        for (int jj = j + 1; jj <= jmax; ++jj) s -= at(kv + j - jj, jj) * b[jj];
        b[j] = s / at(kv, j);
    }
}

}  // namespace

FdOperator assemble(const InterfaceProblem& prob, double half_width,
                    double step) {
    if (!(half_width > 0.0) || !std::isfinite(half_width) || !(step > 0.0) ||
        !std::isfinite(step)) {
        throw std::invalid_argument("assemble: bad window or step");
    }
    const double ratio = half_width / step;
    const long long m = std::llround(ratio);
    if (m < 3 || std::abs(ratio - static_cast<double>(m)) > 1e-9 * ratio) {
        throw std::invalid_argument(
            "assemble: half_width must be an integer multiple (>= 3) of step");
    }
    const std::size_t n = static_cast<std::size_t>(2 * m - 1);
    FdOperator op;
    op.half_width = half_width;
    op.step = step;
    op.diag.resize(n);
    op.off1.assign(n - 1, -16.0 / (12.0 * step * step));
    op.off2.assign(n - 2, 1.0 / (12.0 * step * step));

    const PeriodicPotential left = prob.left();
    const PeriodicPotential right = prob.right();
    const std::size_t mid = static_cast<std::size_t>(m - 1);  // node at x = 0
    const double c_diag = 30.0 / (12.0 * step * step);
    const double c_wall = 29.0 / (12.0 * step * step);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = op.node(i);
        double v;
        if (i == mid) {
            v = 0.5 * (left(0.0) + right(0.0));
        } else {
            v = (x < 0.0) ? left(x) : right(x);
        }
        op.diag[i] = ((i == 0 || i + 1 == n) ? c_wall : c_diag) + v;
    }
    return op;
}

int eigenvalue_count_below(const FdOperator& op, double sigma) {
    const std::size_t n = op.size();
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        scale = std::max(scale, std::abs(op.diag[i] - sigma));
    }
    if (n > 1) scale = std::max(scale, 2.0 * std::abs(op.off1[0]));
    const double pivmin = std::max(1e-14 * scale, 1e-300);

    int count = 0;
    double d1 = 1.0, d2 = 1.0;    // d[i-1], d[i-2]
    double l1p = 0.0, l2p = 0.0;  // l1[i-1], l2[i-1]
    double l2pp = 0.0;            // l2[i-2]
    for (std::size_t i = 0; i < n; ++i) {
        double d = (op.diag[i] - sigma);
        if (i >= 1) d -= d1 * l1p * l1p;
        if (i >= 2) d -= d2 * l2pp * l2pp;
        if (std::abs(d) < pivmin) d = -pivmin;
        if (d < 0.0) ++count;
        double l1 = 0.0, l2 = 0.0;
        if (i + 1 < n) l1 = (op.off1[i] - (i >= 1 ? d1 * l1p * l2p : 0.0)) / d;
        if (i + 2 < n) l2 = op.off2[i] / d;
        d2 = d1;
        d1 = d;
        l2pp = l2p;
        l1p = l1;
        l2p = l2;
    }
    return count;
}

std::vector<FdEigenvalue> eigenvalues_in_window(const FdOperator& op, double lo,
                                                double hi, const Tolerances& tol,
                                                std::uint64_t seed) {
    tol.validate();
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw std::invalid_argument("eigenvalues_in_window: bad interval");
    }
    const int clo = eigenvalue_count_below(op, lo);
    const int chi = eigenvalue_count_below(op, hi);

    std::vector<FdEigenvalue> out;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    for (int k = clo; k < chi; ++k) {
        double a = lo, b = hi;
        while (b - a > tol.fd_bisect_width * std::max(1.0, std::abs(b))) {
            const double m = 0.5 * (a + b);
            if (m <= a || m >= b) break;
            if (eigenvalue_count_below(op, m) > k) {
                b = m;
            } else {
                a = m;
            }
        }
        double lambda = 0.5 * (a + b);

        const BandLU lu = band_factor(op, lambda);
        std::vector<double> v(op.size());
        for (double& x : v) x = gauss(rng);
        for (int it = 0; it < 3; ++it) {
            band_solve(lu, v);
            // deflate against already-computed members of a close cluster
            for (const auto& prev : out) {
                if (std::abs(prev.lambda - lambda) <
                    1e-4 * std::max(1.0, std::abs(lambda))) {
                    const double dot = vec_dot(prev.vector, v);
                    for (std::size_t i = 0; i < v.size(); ++i) {
                        v[i] -= dot * prev.vector[i];
                    }
                }
            }
            const double norm = vec_norm(v);
            if (!(norm > 0.0) || !std::isfinite(norm)) {
                throw std::runtime_error(
                    "eigenvalues_in_window: inverse iteration failed");
            }
            for (double& x : v) x /= norm;
        }
        // Rayleigh quotient polish, accepted only inside the bracket
        std::vector<double> av(v.size());
        apply(op, v, av);
        const double rq = vec_dot(v, av);
        const double slack = b - a;
        if (rq > a - slack && rq < b + slack) lambda = rq;

        FdEigenvalue e;
        e.lambda = lambda;
        e.vector = std::move(v);
        out.push_back(std::move(e));
    }
    return out;
}

double outer_mass_fraction(const FdOperator& op, const std::vector<double>& v,
                           double fraction) {
    if (v.size() != op.size()) {
        throw std::invalid_argument("outer_mass_fraction: size mismatch");
    }
    const double cut = (1.0 - fraction) * op.half_width;
    double outer = 0.0, total = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double w = v[i] * v[i];
        total += w;
        if (std::abs(op.node(i)) >= cut) outer += w;
    }
    if (!(total > 0.0)) return 1.0;
    return std::sqrt(outer / total);
}

OracleResult oracle_window(const InterfaceProblem& prob, double lo, double hi,
                           double half_width, double step, const Tolerances& tol,
                           std::uint64_t seed) {
    const FdOperator coarse = assemble(prob, half_width, step);
    const FdOperator fine = assemble(prob, half_width, 0.5 * step);
    const auto ec = eigenvalues_in_window(coarse, lo, hi, tol, seed);
    auto ef = eigenvalues_in_window(fine, lo, hi, tol, seed);

    OracleResult res;
    res.half_width = half_width;
    res.step = step;
    std::vector<bool> coarse_used(ec.size(), false);

    for (auto& e : ef) {
        int best = -1;
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < ec.size(); ++i) {
            if (coarse_used[i]) continue;
            const double dist = std::abs(ec[i].lambda - e.lambda);
            if (dist < best_dist) {
                best_dist = dist;
                best = static_cast<int>(i);
            }
        }
        const double match_tol = 1e-3 * std::max(1.0, std::abs(e.lambda));
        OracleMode m;
        m.lambda_fine = e.lambda;
        m.x.resize(fine.size());
        for (std::size_t i = 0; i < fine.size(); ++i) m.x[i] = fine.node(i);
        if (best >= 0 && best_dist <= match_tol) {
            coarse_used[static_cast<std::size_t>(best)] = true;
            m.lambda_coarse = ec[static_cast<std::size_t>(best)].lambda;
            m.lambda = (4.0 * e.lambda - m.lambda_coarse) / 3.0;
            m.richardson_gap = best_dist;
            m.localized =
                outer_mass_fraction(fine, e.vector) < tol.localized_mass &&
                outer_mass_fraction(
                    coarse, ec[static_cast<std::size_t>(best)].vector) <
                    tol.localized_mass;
        } else {
            m.lambda_coarse = e.lambda;
            m.lambda = e.lambda;
            m.richardson_gap = -1.0;  // unmatched across resolutions
            m.localized = false;
        }
        m.psi = std::move(e.vector);
        if (m.localized) {
            res.kept.push_back(std::move(m));
        } else {
            res.discarded.push_back(std::move(m));
        }
    }
    for (std::size_t i = 0; i < ec.size(); ++i) {
        if (coarse_used[i]) continue;
        OracleMode m;  // coarse-only value: a wall artifact of that grid
        m.lambda = ec[i].lambda;
        m.lambda_coarse = ec[i].lambda;
        m.lambda_fine = ec[i].lambda;
        m.richardson_gap = -1.0;
        m.localized = false;
        res.discarded.push_back(std::move(m));
    }
    auto by_lambda = [](const OracleMode& a, const OracleMode& b) {
        return a.lambda < b.lambda;
    };
    std::sort(res.kept.begin(), res.kept.end(), by_lambda);
    std::sort(res.discarded.begin(), res.discarded.end(), by_lambda);
    return res;
}

}  // namespace gapmodes

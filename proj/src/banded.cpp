#include "thinfilm/banded.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <utility>

#include "thinfilm/errors.hpp"

namespace thinfilm {

BandedMatrix::BandedMatrix(int n, int kl, int ku) : n_(n), kl_(kl), ku_(ku) {
    assert(n > 0 && kl >= 0 && ku >= 0);
    a_.assign(static_cast<std::size_t>(2 * kl_ + ku_ + 1) * n_, 0.0);
}

std::size_t BandedMatrix::index(int i, int j) const {
    assert(i >= 0 && i < n_ && j >= 0 && j < n_);
    const int d = kl_ + ku_ + i - j;
    assert(d >= 0 && d <= 2 * kl_ + ku_);
    return static_cast<std::size_t>(d) * n_ + j;
}

double BandedMatrix::get(int i, int j) const {
    const int d = i - j;
    if (d > kl_ || d < -(kl_ + ku_))
        return 0.0;
    return a_[index(i, j)];
}

void BandedMatrix::set_zero() { std::fill(a_.begin(), a_.end(), 0.0); }

BandedLU::BandedLU(BandedMatrix m) : a_(std::move(m)), pivot_(a_.n_) {
    const int n = a_.n_;
    const int kl = a_.kl_;
    const int ku = a_.ku_;

    for (int j = 0; j < n; ++j) {
        // Partial pivot within the column's band.
        const int i_max = std::min(j + kl, n - 1);
        int p = j;
        double best = std::abs(a_(j, j));
        for (int i = j + 1; i <= i_max; ++i) {
            const double v = std::abs(a_(i, j));
            if (v > best) {
                best = v;
                p = i;
            }
        }
        if (best == 0.0)
            throw NumericalError("singular banded factorization at column " + std::to_string(j));
        pivot_[j] = p;

        const int k_max = std::min(j + kl + ku, n - 1);
        if (p != j) {
            for (int k = j; k <= k_max; ++k)
                std::swap(a_(j, k), a_(p, k));
        }

        const double inv_piv = 1.0 / a_(j, j);
        for (int i = j + 1; i <= i_max; ++i) {
            const double l = a_(i, j) * inv_piv;
            a_(i, j) = l;
            for (int k = j + 1; k <= k_max; ++k)
                a_(i, k) -= l * a_(j, k);
        }
    }
}

void BandedLU::solve_in_place(std::span<double> b) const {
    const int n = a_.n_;
    const int kl = a_.kl_;
    const int ku = a_.ku_;
    assert(static_cast<int>(b.size()) == n);

    for (int j = 0; j < n; ++j) {
        if (pivot_[j] != j)
            std::swap(b[j], b[pivot_[j]]);
        const int i_max = std::min(j + kl, n - 1);
        for (int i = j + 1; i <= i_max; ++i)
            b[i] -= a_.a_[a_.index(i, j)] * b[j];
    }

    for (int j = n - 1; j >= 0; --j) {
        b[j] /= a_.a_[a_.index(j, j)];
        const int i_min = std::max(0, j - kl - ku);
        for (int i = i_min; i < j; ++i)
            b[i] -= a_.a_[a_.index(i, j)] * b[j];
    }
}

std::vector<double> BandedLU::solve(std::span<const double> b) const {
    std::vector<double> x(b.begin(), b.end());
    solve_in_place(x);
    return x;
}

} // namespace thinfilm

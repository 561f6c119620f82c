#pragma once

#include <span>
#include <vector>

namespace thinfilm {

/// General band matrix in LAPACK-style band storage with room for the
/// fill-in produced by partial pivoting (kl extra superdiagonals).
class BandedMatrix {
public:
    BandedMatrix(int n, int kl, int ku);

    int size() const { return n_; }
    int lower() const { return kl_; }
    int upper() const { return ku_; }

    /// Mutable access; (i, j) must satisfy -(ku+kl) <= i - j <= kl.
    double& operator()(int i, int j) { return a_[index(i, j)]; }

    /// Value with zero outside the stored band.
    double get(int i, int j) const;

    void set_zero();

private:
    friend class BandedLU;

    std::size_t index(int i, int j) const;

    int n_, kl_, ku_;
    std::vector<double> a_; // (2*kl + ku + 1) rows by n columns, row = kl + ku + i - j
};

/// LU factorization with partial pivoting of a band matrix (the unblocked
/// dgbtrf/dgbtrs pair). Throws NumericalError on an exactly singular pivot.
class BandedLU {
public:
    explicit BandedLU(BandedMatrix m);

    void solve_in_place(std::span<double> b) const;
    std::vector<double> solve(std::span<const double> b) const;

private:
    BandedMatrix a_;
    std::vector<int> pivot_;
};

} // namespace thinfilm

#pragma once

#include <complex>
#include <vector>

namespace lcnls {

using cplx = std::complex<double>;

/// Banded complex matrix stored diagonal-major with pre-allocated room for
/// the fill-in produced by row pivoting.
///
/// A matrix of order n with lower bandwidth kl and upper bandwidth ku keeps,
/// for each row i, the columns [i-kl, i+ku+kl]. The extra kl upper diagonals
/// start out zero and are written only during factorization: partial pivoting
/// can swap a row downward by at most kl positions, which widens the upper
/// band by at most kl. No storage is ever grown after construction.
class BandMatrix {
public:
    BandMatrix(int order, int lower_bandwidth, int upper_bandwidth);

    int order() const { return n_; }
    int lower_bandwidth() const { return kl_; }
    int upper_bandwidth() const { return ku_; }

    /// Mutable access inside the declared band; throws std::out_of_range
    /// for any (i, j) with j - i outside [-kl, ku]. The fill-in diagonals are
    /// intentionally not addressable through this accessor.
    cplx& at(int i, int j);

    /// Read access over the whole matrix: entries outside the declared band
    /// read as zero, indices outside the matrix throw.
    cplx get(int i, int j) const;

    /// y = A * x, using only declared-band entries.
    std::vector<cplx> apply(const std::vector<cplx>& x) const;

    /// Reset all entries (including fill-in room) to zero, keeping the shape.
    void clear();

    int storage_width() const { return 2 * kl_ + ku_ + 1; }
    const std::vector<cplx>& storage() const { return w_; }

private:
    friend class BandFactorization;
    int n_, kl_, ku_;
    std::vector<cplx> w_; // row-major, row i at offset i*storage_width()
};

/// Pivoted LU-style factorization of a BandMatrix, reusable across
/// right-hand sides. Multipliers overwrite the sub-diagonal positions of a
/// private copy of the band storage; row swaps are recorded in a pivot index
/// array and replayed during the forward pass of solve().
class BandFactorization {
public:
    /// Solve A x = rhs for the factored A. Throws DimensionMismatch when the
    /// length of rhs differs from the matrix order. Safe to call concurrently
    /// from several threads: solving only reads the factorization.
    std::vector<cplx> solve(std::vector<cplx> rhs) const;

    int order() const { return n_; }

private:
    friend BandFactorization factor(const BandMatrix&, double);
    BandFactorization() = default;

    int n_ = 0, kl_ = 0, ku_ = 0, width_ = 0;
    std::vector<cplx> w_;
    std::vector<int> pivot_;
};

/// Factor a banded complex matrix with partial (row) pivoting by modulus.
///
/// Throws SingularMatrix when the selected pivot modulus falls below
/// pivot_rel_tol times the largest entry modulus of the input matrix.
BandFactorization factor(const BandMatrix& a, double pivot_rel_tol = 1e-14);

} // namespace lcnls

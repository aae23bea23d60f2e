#include "lcnls/band.hpp"
#include "lcnls/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace lcnls {

BandMatrix::BandMatrix(int order, int lower_bandwidth, int upper_bandwidth)
    : n_(order), kl_(lower_bandwidth), ku_(upper_bandwidth) {
    if (order < 1 || lower_bandwidth < 0 || upper_bandwidth < 0)
        throw std::invalid_argument("BandMatrix: order must be >= 1 and bandwidths >= 0");
    if (lower_bandwidth + upper_bandwidth + 1 > 2 * order - 1)
        throw std::invalid_argument("BandMatrix: bandwidths exceed matrix order");
    w_.assign(static_cast<size_t>(n_) * storage_width(), cplx(0.0, 0.0));
}

cplx& BandMatrix::at(int i, int j) {
    if (i < 0 || i >= n_ || j < 0 || j >= n_)
        throw std::out_of_range("BandMatrix::at: index outside matrix");
    const int d = j - i;
    if (d < -kl_ || d > ku_)
        throw std::out_of_range("BandMatrix::at: index outside declared band");
    return w_[static_cast<size_t>(i) * storage_width() + (d + kl_)];
}

cplx BandMatrix::get(int i, int j) const {
    if (i < 0 || i >= n_ || j < 0 || j >= n_)
        throw std::out_of_range("BandMatrix::get: index outside matrix");
    const int d = j - i;
    if (d < -kl_ || d > ku_) return cplx(0.0, 0.0);
    return w_[static_cast<size_t>(i) * storage_width() + (d + kl_)];
}

std::vector<cplx> BandMatrix::apply(const std::vector<cplx>& x) const {
    if (static_cast<int>(x.size()) != n_)
        throw DimensionMismatch("BandMatrix::apply: vector length " + std::to_string(x.size()) +
                                " vs order " + std::to_string(n_));
    std::vector<cplx> y(n_, cplx(0.0, 0.0));
    for (int i = 0; i < n_; ++i) {
        const int jlo = std::max(0, i - kl_);
        const int jhi = std::min(n_ - 1, i + ku_);
        cplx acc(0.0, 0.0);
        const cplx* row = &w_[static_cast<size_t>(i) * storage_width()];
        for (int j = jlo; j <= jhi; ++j) acc += row[j - i + kl_] * x[j];
        y[i] = acc;
    }
    return y;
}

void BandMatrix::clear() {
    std::fill(w_.begin(), w_.end(), cplx(0.0, 0.0));
}

BandFactorization factor(const BandMatrix& a, double pivot_rel_tol) {
    BandFactorization f;
    f.n_ = a.order();
    f.kl_ = a.lower_bandwidth();
    f.ku_ = a.upper_bandwidth();
    f.width_ = a.storage_width();
    f.w_ = a.storage();
    f.pivot_.resize(f.n_);

    const int n = f.n_, kl = f.kl_, ku = f.ku_, width = f.width_;
    auto entry = [&](int i, int j) -> cplx& {
        return f.w_[static_cast<size_t>(i) * width + (j - i + kl)];
    };

    double amax = 0.0;
    for (const cplx& v : f.w_) amax = std::max(amax, std::abs(v));
    const double tol = pivot_rel_tol * (amax > 0.0 ? amax : 1.0);

    for (int k = 0; k < n; ++k) {
        // candidate pivot rows are the only ones with a nonzero in column k
        const int rmax = std::min(n - 1, k + kl);
        int piv = k;
        double best = std::abs(entry(k, k));
        for (int r = k + 1; r <= rmax; ++r) {
            const double m = std::abs(entry(r, k));
            if (m > best) { best = m; piv = r; }
        }
        if (best <= tol)
            throw SingularMatrix("factor: pivot modulus " + std::to_string(best) +
                                 " at column " + std::to_string(k) +
                                 " below threshold " + std::to_string(tol));
        f.pivot_[k] = piv;

        // the active part of any candidate row lies in columns [k, k+ku+kl],
        // which both rows' storage covers, so a swap stays inside the band
        const int jhi = std::min(n - 1, k + ku + kl);
        if (piv != k) {
            for (int j = k; j <= jhi; ++j) std::swap(entry(k, j), entry(piv, j));
        }

        const cplx pv = entry(k, k);
        for (int r = k + 1; r <= rmax; ++r) {
            const cplx m = entry(r, k) / pv;
            entry(r, k) = m; // keep the multiplier where the zero would be
            if (m == cplx(0.0, 0.0)) continue;
            for (int j = k + 1; j <= jhi; ++j) entry(r, j) -= m * entry(k, j);
        }
    }
    return f;
}

std::vector<cplx> BandFactorization::solve(std::vector<cplx> rhs) const {
    if (static_cast<int>(rhs.size()) != n_)
        throw DimensionMismatch("solve: rhs length " + std::to_string(rhs.size()) +
                                " vs matrix order " + std::to_string(n_));
    const int n = n_, kl = kl_, ku = ku_, width = width_;
    auto entry = [&](int i, int j) -> const cplx& {
        return w_[static_cast<size_t>(i) * width + (j - i + kl)];
    };

    // forward pass: replay row swaps, then apply stored multipliers
    for (int k = 0; k < n; ++k) {
        if (pivot_[k] != k) std::swap(rhs[k], rhs[pivot_[k]]);
        const int rmax = std::min(n - 1, k + kl);
        for (int r = k + 1; r <= rmax; ++r) rhs[r] -= entry(r, k) * rhs[k];
    }
    // back substitution over the widened band
    for (int k = n - 1; k >= 0; --k) {
        const int jhi = std::min(n - 1, k + ku + kl);
        cplx acc = rhs[k];
        for (int j = k + 1; j <= jhi; ++j) acc -= entry(k, j) * rhs[j];
        rhs[k] = acc / entry(k, k);
    }
    return rhs;
}

} // namespace lcnls

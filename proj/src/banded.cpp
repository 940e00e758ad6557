#include "curveflow/banded.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace curveflow {

BandedMatrix::BandedMatrix(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), rows_(2 * kl + ku + 1),
      ab_(static_cast<std::size_t>(rows_) * n, 0.0), ipiv_(n, 0) {
    if (n <= 0 || kl < 0 || ku < 0)
        throw std::invalid_argument("BandedMatrix: bad dimensions");
}

double& BandedMatrix::at(int i, int j) {
    if (i < 0 || j < 0 || i >= n_ || j >= n_ || i - j > kl_ || j - i > ku_)
        throw std::out_of_range("BandedMatrix::at outside band");
    factored_ = false;
    return slot(i, j);
}

double BandedMatrix::get(int i, int j) const {
    if (i < 0 || j < 0 || i >= n_ || j >= n_) return 0.0;
    // after factorization the upper band widens to ku + kl
    int up = factored_ ? ku_ + kl_ : ku_;
    if (i - j > kl_ || j - i > up) return 0.0;
    return slot(i, j);
}

void BandedMatrix::clear() {
    std::fill(ab_.begin(), ab_.end(), 0.0);
    factored_ = false;
}

bool BandedMatrix::factor() {
    // unblocked band LU with partial pivoting (dgbtf2-style)
    const int upw = ku_ + kl_;  // working upper bandwidth
    for (int j = 0; j < n_; ++j) {
        int imax = j;
        double amax = std::fabs(slot(j, j));
        int ilast = std::min(j + kl_, n_ - 1);
        for (int i = j + 1; i <= ilast; ++i) {
            double v = std::fabs(slot(i, j));
            if (v > amax) { amax = v; imax = i; }
        }
        ipiv_[j] = imax;
        if (amax == 0.0) { factored_ = false; return false; }
        if (imax != j) {
            int clast = std::min(j + upw, n_ - 1);
            for (int c = j; c <= clast; ++c)
                std::swap(slot(j, c), slot(imax, c));
        }
        double piv = slot(j, j);
        for (int i = j + 1; i <= ilast; ++i) {
            double m = slot(i, j) / piv;
            slot(i, j) = m;
            int clast = std::min(j + upw, n_ - 1);
            for (int c = j + 1; c <= clast; ++c)
                slot(i, c) -= m * slot(j, c);
        }
    }
    factored_ = true;
    return true;
}

void BandedMatrix::solve(std::vector<double>& b) const {
    if (!factored_) throw std::logic_error("BandedMatrix::solve before factor");
    if (static_cast<int>(b.size()) != n_)
        throw std::invalid_argument("BandedMatrix::solve size mismatch");
    const int upw = ku_ + kl_;
    for (int j = 0; j < n_; ++j) {
        if (ipiv_[j] != j) std::swap(b[j], b[ipiv_[j]]);
        int ilast = std::min(j + kl_, n_ - 1);
        for (int i = j + 1; i <= ilast; ++i) b[i] -= slot(i, j) * b[j];
    }
    for (int i = n_ - 1; i >= 0; --i) {
        int clast = std::min(i + upw, n_ - 1);
        double s = b[i];
        for (int c = i + 1; c <= clast; ++c) s -= slot(i, c) * b[c];
        b[i] = s / slot(i, i);
    }
}

} // namespace curveflow

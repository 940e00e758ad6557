#ifndef CURVEFLOW_BANDED_HPP
#define CURVEFLOW_BANDED_HPP

#include <cstddef>
#include <vector>

namespace curveflow {

// General banded matrix with kl subdiagonals and ku superdiagonals,
// LAPACK-style band storage with room for pivoting fill-in.
class BandedMatrix {
public:
    BandedMatrix(int n, int kl, int ku);

    int size() const { return n_; }
    int lower() const { return kl_; }
    int upper() const { return ku_; }

    // Entry access; (i, j) must satisfy |i - j| within the band.
    double& at(int i, int j);
    double get(int i, int j) const;  // 0 outside the band

    void clear();

    // In-place LU with partial pivoting. Returns false if singular.
    bool factor();
    bool factored() const { return factored_; }

    // Solve A x = b using the stored factorization (factor() first).
    void solve(std::vector<double>& b) const;

private:
    int n_, kl_, ku_;
    int rows_;                 // 2*kl + ku + 1
    std::vector<double> ab_;   // row-major: rows_ x n_
    std::vector<int> ipiv_;
    bool factored_ = false;

    double& slot(int i, int j) { return ab_[(kl_ + ku_ + i - j) * n_ + j]; }
    double slot(int i, int j) const { return ab_[(kl_ + ku_ + i - j) * n_ + j]; }
};

} // namespace curveflow

#endif

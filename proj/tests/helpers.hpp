#pragma once

#include <random>

#include "qst/analytic.hpp"
#include "qst/linalg.hpp"

namespace qst::testing {

inline double max_amp_diff(const Ket& a, const Ket& b) {
    return (a.amplitudes - b.amplitudes).cwiseAbs().maxCoeff();
}

inline Ket basis_ket(Basis basis, int index) {
    Vector amp = Vector::Zero(basis_dim(basis));
    amp[index] = 1.0;
    return Ket(basis, std::move(amp));
}

inline Ket random_ket(std::mt19937& rng, Basis basis) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector amp(basis_dim(basis));
    for (int i = 0; i < amp.size(); ++i) {
        amp[i] = Complex(gauss(rng), gauss(rng));
    }
    amp /= amp.norm();
    return Ket(basis, std::move(amp));
}

// Random operator with Frobenius norm capped at norm_cap; hermitian on request.
inline Operator random_operator(std::mt19937& rng, int dim, bool hermitian,
                                double norm_cap) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix m(dim, dim);
    for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) {
            m(r, c) = Complex(gauss(rng), gauss(rng));
        }
    }
    if (hermitian) {
        m = ((m + m.adjoint()) / 2.0).eval();
    }
    const double norm = m.norm();
    if (norm > norm_cap) {
        m *= norm_cap / norm;
    }
    return Operator(std::move(m), hermitian);
}

// Embeddings of the two 3-dim driven subspaces into the full basis.
inline Ket lossless_to_full(const SubspaceCoefficients& c) {
    Vector amp = Vector::Zero(8);
    amp[6] = c.c1;  // |eeg>
    amp[4] = c.c2;  // |egg>
    amp[2] = c.c3;  // |geg>
    return Ket(Basis::Full8, std::move(amp));
}

inline Ket damped_to_full(const SubspaceCoefficients& c) {
    Vector amp = Vector::Zero(8);
    amp[5] = c.c1;  // |ege>
    amp[4] = c.c2;  // |egg>
    amp[1] = c.c3;  // |gge>
    return Ket(Basis::Full8, std::move(amp));
}

}  // namespace qst::testing

// Copyright 2026 The qmanizk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file
 * Exact small-scale statevector engine: Pauli-basis and Bell-basis
 * measurements, Pauli frames, partial traces and the Bell-outcome
 * enumeration backend used by the protocol distribution tests.
 *
 * Conventions, fixed repo-wide:
 *   - qubit 0 is the least significant bit of the amplitude index,
 *   - states are compared through fidelity or density matrices, never by
 *     amplitude equality (Pauli products carry phases, Y = iXZ),
 *   - a Pauli frame applies Z before X on each qubit, matching the written
 *     conjugation X^x Z^z rho Z^z X^x.
 */

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qmanizk/common.hpp"

namespace qmanizk {

using cplx = std::complex<double>;

constexpr double kNormTolerance = 1e-9;
constexpr double kPsdTolerance = 1e-8;

enum class PauliBasis : std::uint8_t { X, Y, Z };

inline char pauli_char(PauliBasis w) {
    switch (w) {
        case PauliBasis::X: return 'X';
        case PauliBasis::Y: return 'Y';
        case PauliBasis::Z: return 'Z';
    }
    return '?';
}

inline PauliBasis pauli_from_char(char c) {
    switch (c) {
        case 'X': return PauliBasis::X;
        case 'Y': return PauliBasis::Y;
        case 'Z': return PauliBasis::Z;
        default: throw std::invalid_argument(std::string("unknown Pauli basis '") + c + "'");
    }
}

/// V(W)|m> is the eigenvector of W with eigenvalue (-1)^m.
inline std::array<cplx, 4> v_matrix(PauliBasis w) {
    const double r = 1.0 / std::sqrt(2.0);
    switch (w) {
        case PauliBasis::Z: return {cplx(1), cplx(0), cplx(0), cplx(1)};
        case PauliBasis::X: return {cplx(r), cplx(r), cplx(r), cplx(-r)};
        case PauliBasis::Y: return {cplx(r), cplx(r), cplx(0, r), cplx(0, -r)};
    }
    return {};
}

/// U(X) = V(X), U(Y) = V(Y)X, U(Z) = I.
inline std::array<cplx, 4> u_matrix(PauliBasis w) {
    switch (w) {
        case PauliBasis::Z: return v_matrix(PauliBasis::Z);
        case PauliBasis::X: return v_matrix(PauliBasis::X);
        case PauliBasis::Y: {
            auto v = v_matrix(PauliBasis::Y);
            // column swap = right-multiplication by X
            return {v[1], v[0], v[3], v[2]};
        }
    }
    return {};
}

struct PauliFrame {
    Bits x;
    Bits z;

    static PauliFrame zero(std::size_t n) { return PauliFrame{Bits(n, 0), Bits(n, 0)}; }

    static PauliFrame random(std::size_t n, Rng& rng) {
        return PauliFrame{rand_bits(rng, n), rand_bits(rng, n)};
    }

    std::size_t size() const {
        if (x.size() != z.size()) throw std::invalid_argument("PauliFrame: length mismatch");
        return x.size();
    }
};

class QuantumState {
  public:
    static constexpr int kMaxQubits = 24;

    explicit QuantumState(int num_qubits) : num_qubits_(check_size(num_qubits)) {
        amps_.assign(std::size_t{1} << num_qubits_, cplx(0));
        amps_[0] = cplx(1);
    }

    QuantumState(int num_qubits, std::vector<cplx> amplitudes)
        : num_qubits_(check_size(num_qubits)), amps_(std::move(amplitudes)) {
        if (amps_.size() != (std::size_t{1} << num_qubits_)) {
            throw std::invalid_argument("QuantumState: amplitude vector has wrong length");
        }
        if (std::abs(norm() - 1.0) > 1e-6) {
            throw std::invalid_argument("QuantumState: amplitudes are not normalized");
        }
        renormalize();
    }

    int num_qubits() const { return num_qubits_; }
    std::size_t dim() const { return amps_.size(); }
    const std::vector<cplx>& amplitudes() const { return amps_; }
    cplx amplitude(std::size_t i) const { return amps_[i]; }

    double norm() const {
        double s = 0;
        for (const auto& a : amps_) s += std::norm(a);
        return std::sqrt(s);
    }

    void renormalize() {
        double n = norm();
        if (n < 1e-300) throw std::runtime_error("QuantumState: zero-norm state");
        double inv = 1.0 / n;
        for (auto& a : amps_) a *= inv;
    }

    void apply_x(int q) {
        check_qubit(q);
        const std::size_t bit = std::size_t{1} << q;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if (!(i & bit)) std::swap(amps_[i], amps_[i | bit]);
        }
    }

    void apply_z(int q) {
        check_qubit(q);
        const std::size_t bit = std::size_t{1} << q;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if (i & bit) amps_[i] = -amps_[i];
        }
    }

    /// Apply a 2x2 matrix {u00, u01, u10, u11} to one qubit.
    void apply_single(int q, const std::array<cplx, 4>& u) {
        check_qubit(q);
        const std::size_t bit = std::size_t{1} << q;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if (i & bit) continue;
            cplx a0 = amps_[i];
            cplx a1 = amps_[i | bit];
            amps_[i] = u[0] * a0 + u[1] * a1;
            amps_[i | bit] = u[2] * a0 + u[3] * a1;
        }
    }

    void apply_cnot(int control, int target) {
        check_qubit(control);
        check_qubit(target);
        if (control == target) throw std::invalid_argument("CNOT: control equals target");
        const std::size_t cb = std::size_t{1} << control;
        const std::size_t tb = std::size_t{1} << target;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if ((i & cb) && !(i & tb)) std::swap(amps_[i], amps_[i | tb]);
        }
    }

    /// this (low qubits) tensored with other (high qubits).
    QuantumState tensor(const QuantumState& other) const {
        int n = num_qubits_ + other.num_qubits_;
        check_size(n);
        std::vector<cplx> out(std::size_t{1} << n);
        for (std::size_t hi = 0; hi < other.amps_.size(); ++hi) {
            for (std::size_t lo = 0; lo < amps_.size(); ++lo) {
                out[(hi << num_qubits_) | lo] = other.amps_[hi] * amps_[lo];
            }
        }
        return QuantumState(n, std::move(out));
    }

    /// |<other|this>|^2, insensitive to global phase.
    double fidelity_with(const QuantumState& other) const {
        if (other.num_qubits_ != num_qubits_) {
            throw std::invalid_argument("fidelity: dimension mismatch");
        }
        cplx inner(0);
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            inner += std::conj(other.amps_[i]) * amps_[i];
        }
        return std::norm(inner);
    }

    std::vector<cplx>& mutable_amplitudes() { return amps_; }

  private:
    static int check_size(int n) {
        if (n < 0 || n > kMaxQubits) {
            throw std::invalid_argument("QuantumState: qubit count out of range (max 24)");
        }
        return n;
    }
    void check_qubit(int q) const {
        if (q < 0 || q >= num_qubits_) throw std::invalid_argument("qubit index out of range");
    }

    int num_qubits_;
    std::vector<cplx> amps_;
};

class DensityMatrix {
  public:
    explicit DensityMatrix(const QuantumState& psi)
        : num_qubits_(psi.num_qubits()), m_(psi.dim(), psi.dim()) {
        for (std::size_t r = 0; r < psi.dim(); ++r) {
            for (std::size_t c = 0; c < psi.dim(); ++c) {
                m_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    psi.amplitude(r) * std::conj(psi.amplitude(c));
            }
        }
    }

    DensityMatrix(int num_qubits, Eigen::MatrixXcd m) : num_qubits_(num_qubits), m_(std::move(m)) {
        const Eigen::Index d = Eigen::Index{1} << num_qubits_;
        if (m_.rows() != d || m_.cols() != d) {
            throw std::invalid_argument("DensityMatrix: wrong dimensions");
        }
    }

    int num_qubits() const { return num_qubits_; }
    Eigen::Index dim() const { return m_.rows(); }
    const Eigen::MatrixXcd& matrix() const { return m_; }
    Eigen::MatrixXcd& mutable_matrix() { return m_; }
    cplx entry(Eigen::Index r, Eigen::Index c) const { return m_(r, c); }

    double trace() const { return m_.trace().real(); }

    bool is_hermitian(double tol = kNormTolerance) const {
        return (m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= tol;
    }

    double min_eigenvalue() const {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m_, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }

    bool is_valid_state(double tol = kNormTolerance) const {
        return is_hermitian(tol) && std::abs(trace() - 1.0) <= tol &&
               min_eigenvalue() >= -kPsdTolerance;
    }

    void apply_x(int q) { conjugate_single(q, {cplx(0), cplx(1), cplx(1), cplx(0)}); }
    void apply_z(int q) { conjugate_single(q, {cplx(1), cplx(0), cplx(0), cplx(-1)}); }

    /// rho -> U_q rho U_q^dagger
    void conjugate_single(int q, const std::array<cplx, 4>& u) {
        if (q < 0 || q >= num_qubits_) throw std::invalid_argument("qubit index out of range");
        const Eigen::Index bit = Eigen::Index{1} << q;
        // rows
        for (Eigen::Index c = 0; c < m_.cols(); ++c) {
            for (Eigen::Index r = 0; r < m_.rows(); ++r) {
                if (r & bit) continue;
                cplx a0 = m_(r, c), a1 = m_(r | bit, c);
                m_(r, c) = u[0] * a0 + u[1] * a1;
                m_(r | bit, c) = u[2] * a0 + u[3] * a1;
            }
        }
        // columns (with conjugated matrix)
        for (Eigen::Index r = 0; r < m_.rows(); ++r) {
            for (Eigen::Index c = 0; c < m_.cols(); ++c) {
                if (c & bit) continue;
                cplx a0 = m_(r, c), a1 = m_(r, c | bit);
                m_(r, c) = std::conj(u[0]) * a0 + std::conj(u[1]) * a1;
                m_(r, c | bit) = std::conj(u[2]) * a0 + std::conj(u[3]) * a1;
            }
        }
    }

    void conjugate_cnot(int control, int target) {
        if (control == target) throw std::invalid_argument("CNOT: control equals target");
        if (control < 0 || control >= num_qubits_ || target < 0 || target >= num_qubits_) {
            throw std::invalid_argument("qubit index out of range");
        }
        const Eigen::Index cb = Eigen::Index{1} << control;
        const Eigen::Index tb = Eigen::Index{1} << target;
        for (Eigen::Index r = 0; r < m_.rows(); ++r) {
            if ((r & cb) && !(r & tb)) m_.row(r).swap(m_.row(r | tb));
        }
        for (Eigen::Index c = 0; c < m_.cols(); ++c) {
            if ((c & cb) && !(c & tb)) m_.col(c).swap(m_.col(c | tb));
        }
    }

    DensityMatrix tensor(const DensityMatrix& other) const {
        int n = num_qubits_ + other.num_qubits_;
        if (n > QuantumState::kMaxQubits) throw std::invalid_argument("tensor: too many qubits");
        Eigen::Index d1 = dim(), d2 = other.dim();
        Eigen::MatrixXcd out(d1 * d2, d1 * d2);
        for (Eigen::Index r2 = 0; r2 < d2; ++r2) {
            for (Eigen::Index c2 = 0; c2 < d2; ++c2) {
                out.block(r2 * d1, c2 * d1, d1, d1) = other.m_(r2, c2) * m_;
            }
        }
        return DensityMatrix(n, std::move(out));
    }

    /// <psi|rho|psi>
    double fidelity_with(const QuantumState& psi) const {
        if (psi.num_qubits() != num_qubits_) throw std::invalid_argument("fidelity: dimension mismatch");
        Eigen::VectorXcd v(dim());
        for (Eigen::Index i = 0; i < dim(); ++i) v(i) = psi.amplitude(static_cast<std::size_t>(i));
        return (v.adjoint() * m_ * v)(0, 0).real();
    }

    static DensityMatrix maximally_mixed(int num_qubits) {
        const Eigen::Index d = Eigen::Index{1} << num_qubits;
        return DensityMatrix(num_qubits,
                             Eigen::MatrixXcd::Identity(d, d) / static_cast<double>(d));
    }

  private:
    int num_qubits_;
    Eigen::MatrixXcd m_;
};

/// tensor product of U(W_j)|m_j> across qubits.
inline QuantumState prepare_pauli_product(const std::vector<PauliBasis>& bases, const Bits& bits) {
    if (bases.size() != bits.size()) {
        throw std::invalid_argument("prepare_pauli_product: length mismatch");
    }
    QuantumState psi(static_cast<int>(bases.size()));
    std::size_t base_index = 0;
    for (std::size_t j = 0; j < bits.size(); ++j) {
        if (bits[j]) base_index |= std::size_t{1} << j;
    }
    psi.mutable_amplitudes()[0] = cplx(0);
    psi.mutable_amplitudes()[base_index] = cplx(1);
    for (std::size_t j = 0; j < bases.size(); ++j) {
        psi.apply_single(static_cast<int>(j), u_matrix(bases[j]));
    }
    return psi;
}

/// n Bell pairs; pair j spans qubits (j, n+j), register A = 0..n-1, B = n..2n-1.
inline QuantumState make_bell_pairs(int n) {
    if (n < 1) throw std::invalid_argument("make_bell_pairs: n must be >= 1");
    if (2 * n > QuantumState::kMaxQubits) throw std::invalid_argument("make_bell_pairs: too many qubits");
    QuantumState psi(2 * n);
    auto& a = psi.mutable_amplitudes();
    a[0] = cplx(0);
    const double w = std::pow(0.5, n * 0.5);
    for (std::size_t s = 0; s < (std::size_t{1} << n); ++s) {
        a[s | (s << n)] = cplx(w);
    }
    return psi;
}

/// Z before X on each qubit, so the state maps as X^x Z^z |psi>.
inline void apply_pauli_frame_in_place(QuantumState& psi, const PauliFrame& frame) {
    if (frame.size() != static_cast<std::size_t>(psi.num_qubits())) {
        throw std::invalid_argument("apply_pauli_frame: length mismatch");
    }
    for (std::size_t j = 0; j < frame.size(); ++j) {
        if (frame.z[j]) psi.apply_z(static_cast<int>(j));
        if (frame.x[j]) psi.apply_x(static_cast<int>(j));
    }
}

inline QuantumState apply_pauli_frame(QuantumState psi, const PauliFrame& frame) {
    apply_pauli_frame_in_place(psi, frame);
    return psi;
}

inline void apply_pauli_frame_in_place(DensityMatrix& rho, const PauliFrame& frame) {
    if (frame.size() != static_cast<std::size_t>(rho.num_qubits())) {
        throw std::invalid_argument("apply_pauli_frame: length mismatch");
    }
    for (std::size_t j = 0; j < frame.size(); ++j) {
        if (frame.z[j]) rho.apply_z(static_cast<int>(j));
        if (frame.x[j]) rho.apply_x(static_cast<int>(j));
    }
}

inline DensityMatrix apply_pauli_frame(DensityMatrix rho, const PauliFrame& frame) {
    apply_pauli_frame_in_place(rho, frame);
    return rho;
}

/// Measure one qubit in the W basis; outcome m has V(W)|m> as the post state
/// on that qubit. Collapses and renormalizes.
inline int measure_pauli(QuantumState& psi, int qubit, PauliBasis basis, Rng& rng) {
    if (qubit < 0 || qubit >= psi.num_qubits()) {
        throw std::invalid_argument("measure_pauli: qubit out of range");
    }
    auto v = v_matrix(basis);
    // V(W)^dagger rotates the W basis onto the computational one.
    std::array<cplx, 4> vdag = {std::conj(v[0]), std::conj(v[2]), std::conj(v[1]), std::conj(v[3])};
    psi.apply_single(qubit, vdag);
    const std::size_t bit = std::size_t{1} << qubit;
    double p1 = 0;
    for (std::size_t i = 0; i < psi.dim(); ++i) {
        if (i & bit) p1 += std::norm(psi.amplitude(i));
    }
    int outcome = (rand_unit(rng) < p1) ? 1 : 0;
    auto& a = psi.mutable_amplitudes();
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (((i & bit) != 0) != (outcome == 1)) a[i] = cplx(0);
    }
    psi.renormalize();
    psi.apply_single(qubit, v);
    return outcome;
}

/// Project one qubit onto a given single-qubit pure state (unnormalized
/// projection followed by renormalization). Throws if the projection has
/// zero probability.
inline void project_qubit(QuantumState& psi, int qubit, const std::array<cplx, 2>& onto) {
    if (qubit < 0 || qubit >= psi.num_qubits()) {
        throw std::invalid_argument("project_qubit: qubit out of range");
    }
    const std::size_t bit = std::size_t{1} << qubit;
    auto& a = psi.mutable_amplitudes();
    const cplx c0 = std::conj(onto[0]);
    const cplx c1 = std::conj(onto[1]);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (i & bit) continue;
        cplx inner = c0 * a[i] + c1 * a[i | bit];
        a[i] = inner * onto[0];
        a[i | bit] = inner * onto[1];
    }
    psi.renormalize();
}

namespace detail {

// The Bell basis |phi_{x,z}> = (X^x Z^z (x) I)(|00>+|11>)/sqrt(2) on a pair
// (a, b), Pauli acting on a, rotates onto computational bits by
// CNOT(a->b); H(a), after which bit a reads z and bit b reads x.
inline void bell_rotate(QuantumState& psi, int a, int b) {
    psi.apply_cnot(a, b);
    psi.apply_single(a, v_matrix(PauliBasis::X));
}

inline void bell_unrotate(QuantumState& psi, int a, int b) {
    psi.apply_single(a, v_matrix(PauliBasis::X));
    psi.apply_cnot(a, b);
}

inline void check_pairs(int num_qubits, const std::vector<std::pair<int, int>>& pairs) {
    std::vector<char> seen(static_cast<std::size_t>(num_qubits), 0);
    for (auto [a, b] : pairs) {
        if (a < 0 || b < 0 || a >= num_qubits || b >= num_qubits) {
            throw std::invalid_argument("bell pairs: qubit out of range");
        }
        if (a == b || seen[a] || seen[b]) {
            throw std::invalid_argument("bell pairs: overlapping pairs");
        }
        seen[a] = seen[b] = 1;
    }
}

}  // namespace detail

/// Bell-basis measurement of the pair (a, b); the Pauli of |phi_{x,z}>
/// acts on qubit a. Returns (x, z); collapses the state.
inline std::pair<int, int> measure_bell(QuantumState& psi, int qubit_a, int qubit_b, Rng& rng) {
    if (qubit_a == qubit_b) throw std::invalid_argument("measure_bell: qubits must differ");
    detail::bell_rotate(psi, qubit_a, qubit_b);
    const std::size_t abit = std::size_t{1} << qubit_a;
    const std::size_t bbit = std::size_t{1} << qubit_b;
    std::array<double, 4> p{0, 0, 0, 0};
    for (std::size_t i = 0; i < psi.dim(); ++i) {
        int z = (i & abit) ? 1 : 0;
        int x = (i & bbit) ? 1 : 0;
        p[static_cast<std::size_t>(x + 2 * z)] += std::norm(psi.amplitude(i));
    }
    double u = rand_unit(rng);
    int outcome = -1;
    double acc = 0;
    for (int k = 0; k < 4; ++k) {
        acc += p[static_cast<std::size_t>(k)];
        if (u < acc) {
            outcome = k;
            break;
        }
    }
    if (outcome < 0) {
        // rounding pushed the cumulative sum below u; take the modal cell
        outcome = static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
    }
    const int x = outcome & 1;
    const int z = outcome >> 1;
    auto& amps = psi.mutable_amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        int iz = (i & abit) ? 1 : 0;
        int ix = (i & bbit) ? 1 : 0;
        if (ix != x || iz != z) amps[i] = cplx(0);
    }
    psi.renormalize();
    detail::bell_unrotate(psi, qubit_a, qubit_b);
    return {x, z};
}

/// Reduced density matrix on `keep` (ascending original order preserved).
inline DensityMatrix partial_trace(const QuantumState& psi, const std::vector<int>& keep) {
    if (keep.empty()) throw std::invalid_argument("partial_trace: keep set must be nonempty");
    std::vector<int> k = keep;
    std::sort(k.begin(), k.end());
    if (std::adjacent_find(k.begin(), k.end()) != k.end()) {
        throw std::invalid_argument("partial_trace: duplicate keep index");
    }
    for (int q : k) {
        if (q < 0 || q >= psi.num_qubits()) throw std::invalid_argument("partial_trace: index out of range");
    }
    const int nk = static_cast<int>(k.size());
    std::vector<int> rest;
    for (int q = 0; q < psi.num_qubits(); ++q) {
        if (!std::binary_search(k.begin(), k.end(), q)) rest.push_back(q);
    }
    auto expand = [](const std::vector<int>& qs, std::size_t bits) {
        std::size_t out = 0;
        for (std::size_t i = 0; i < qs.size(); ++i) {
            if ((bits >> i) & 1) out |= std::size_t{1} << qs[i];
        }
        return out;
    };
    const Eigen::Index dk = Eigen::Index{1} << nk;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dk, dk);
    const std::size_t drest = std::size_t{1} << rest.size();
    for (std::size_t r = 0; r < static_cast<std::size_t>(dk); ++r) {
        const std::size_t rbase = expand(k, r);
        for (std::size_t c = 0; c < static_cast<std::size_t>(dk); ++c) {
            const std::size_t cbase = expand(k, c);
            cplx sum(0);
            for (std::size_t e = 0; e < drest; ++e) {
                const std::size_t env = expand(rest, e);
                sum += psi.amplitude(rbase | env) * std::conj(psi.amplitude(cbase | env));
            }
            rho(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = sum;
        }
    }
    return DensityMatrix(nk, std::move(rho));
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep) {
    if (keep.empty()) throw std::invalid_argument("partial_trace: keep set must be nonempty");
    std::vector<int> k = keep;
    std::sort(k.begin(), k.end());
    if (std::adjacent_find(k.begin(), k.end()) != k.end()) {
        throw std::invalid_argument("partial_trace: duplicate keep index");
    }
    for (int q : k) {
        if (q < 0 || q >= rho.num_qubits()) throw std::invalid_argument("partial_trace: index out of range");
    }
    const int nk = static_cast<int>(k.size());
    std::vector<int> rest;
    for (int q = 0; q < rho.num_qubits(); ++q) {
        if (!std::binary_search(k.begin(), k.end(), q)) rest.push_back(q);
    }
    auto expand = [](const std::vector<int>& qs, std::size_t bits) {
        std::size_t out = 0;
        for (std::size_t i = 0; i < qs.size(); ++i) {
            if ((bits >> i) & 1) out |= std::size_t{1} << qs[i];
        }
        return out;
    };
    const Eigen::Index dk = Eigen::Index{1} << nk;
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dk, dk);
    const std::size_t drest = std::size_t{1} << rest.size();
    for (std::size_t r = 0; r < static_cast<std::size_t>(dk); ++r) {
        const std::size_t rbase = expand(k, r);
        for (std::size_t c = 0; c < static_cast<std::size_t>(dk); ++c) {
            const std::size_t cbase = expand(k, c);
            cplx sum(0);
            for (std::size_t e = 0; e < drest; ++e) {
                const std::size_t env = expand(rest, e);
                sum += rho.entry(static_cast<Eigen::Index>(rbase | env),
                                 static_cast<Eigen::Index>(cbase | env));
            }
            out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = sum;
        }
    }
    return DensityMatrix(nk, std::move(out));
}

/// (1/2) sum |eigenvalues(a - b)|.
inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("trace_distance: dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a.matrix() - b.matrix(),
                                                       Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

/// Exact joint probability table of Bell outcomes over disjoint pairs.
/// Entry index: sum_k (x_k + 2 z_k) * 4^k for pair k in the given order.
/// Qubits outside the pairs are marginalized.
inline std::vector<double> bell_outcome_distribution(const QuantumState& joint,
                                                     const std::vector<std::pair<int, int>>& pairs) {
    detail::check_pairs(joint.num_qubits(), pairs);
    if (pairs.size() > 10) throw std::invalid_argument("bell_outcome_distribution: table too large");
    QuantumState psi = joint;
    for (auto [a, b] : pairs) detail::bell_rotate(psi, a, b);
    std::vector<double> table(std::size_t{1} << (2 * pairs.size()), 0.0);
    for (std::size_t i = 0; i < psi.dim(); ++i) {
        double p = std::norm(psi.amplitude(i));
        if (p == 0.0) continue;
        std::size_t key = 0;
        for (std::size_t kidx = 0; kidx < pairs.size(); ++kidx) {
            int z = (i >> pairs[kidx].first) & 1;
            int x = (i >> pairs[kidx].second) & 1;
            key |= static_cast<std::size_t>(x + 2 * z) << (2 * kidx);
        }
        table[key] += p;
    }
    return table;
}

inline std::vector<double> bell_outcome_distribution(const DensityMatrix& joint,
                                                     const std::vector<std::pair<int, int>>& pairs) {
    detail::check_pairs(joint.num_qubits(), pairs);
    if (pairs.size() > 10) throw std::invalid_argument("bell_outcome_distribution: table too large");
    DensityMatrix rho = joint;
    for (auto [a, b] : pairs) {
        rho.conjugate_cnot(a, b);
        rho.conjugate_single(a, v_matrix(PauliBasis::X));
    }
    std::vector<double> table(std::size_t{1} << (2 * pairs.size()), 0.0);
    for (Eigen::Index i = 0; i < rho.dim(); ++i) {
        double p = rho.entry(i, i).real();
        std::size_t key = 0;
        for (std::size_t kidx = 0; kidx < pairs.size(); ++kidx) {
            int z = (static_cast<std::size_t>(i) >> pairs[kidx].first) & 1;
            int x = (static_cast<std::size_t>(i) >> pairs[kidx].second) & 1;
            key |= static_cast<std::size_t>(x + 2 * z) << (2 * kidx);
        }
        table[key] += p;
    }
    return table;
}

/// Haar-ish random pure state (normalized complex Gaussian amplitudes).
inline QuantumState random_state(int num_qubits, Rng& rng) {
    std::vector<cplx> amps(std::size_t{1} << num_qubits);
    for (auto& a : amps) {
        // Box-Muller
        double u1 = std::max(rand_unit(rng), 1e-300);
        double u2 = rand_unit(rng);
        double u3 = std::max(rand_unit(rng), 1e-300);
        double u4 = rand_unit(rng);
        double g1 = std::sqrt(-2.0 * std::log(u1)) * std::cos(2 * M_PI * u2);
        double g2 = std::sqrt(-2.0 * std::log(u3)) * std::cos(2 * M_PI * u4);
        a = cplx(g1, g2);
    }
    double norm2 = 0;
    for (const auto& a : amps) norm2 += std::norm(a);
    double inv = 1.0 / std::sqrt(norm2);
    for (auto& a : amps) a *= inv;
    return QuantumState(num_qubits, std::move(amps));
}

/// Sample an index from a probability table (inverse CDF on stored order).
inline std::size_t sample_from_table(const std::vector<double>& table, Rng& rng) {
    double u = rand_unit(rng);
    double acc = 0;
    for (std::size_t i = 0; i < table.size(); ++i) {
        acc += table[i];
        if (u < acc) return i;
    }
    // rounding pushed the cumulative sum below u; take the modal cell
    return static_cast<std::size_t>(std::max_element(table.begin(), table.end()) - table.begin());
}

}  // namespace qmanizk

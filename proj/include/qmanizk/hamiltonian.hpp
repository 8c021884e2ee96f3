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
 * Normalized local Hamiltonians sum_i p_i (I + s_i P_i)/2 with promise
 * thresholds (alpha, beta), the unary-clock circuit-to-Hamiltonian
 * construction, history states, the stored-witness local simulator, a
 * handcrafted instance zoo, and the InstanceFileV1 JSON format.
 */

#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qmanizk/qsim.hpp"
#include "qmanizk/stats.hpp"

namespace qmanizk::ham {

struct PauliTerm {
    double weight = 0;                  // p_i > 0
    int sign = +1;                      // s_i in {+1, -1}
    std::map<int, PauliBasis> paulis;   // support -> basis, 1 <= |support| <= locality
};

struct LocalHamiltonian {
    int num_qubits = 0;
    std::vector<PauliTerm> terms;
    double alpha = 0;
    double beta = 0;
    int locality = 5;

    void validate() const {
        if (num_qubits < 1) throw std::invalid_argument("hamiltonian: n must be >= 1");
        if (terms.empty()) throw std::invalid_argument("hamiltonian: no terms");
        if (!(alpha >= 0.0 && alpha < beta && beta < 1.0)) {
            throw std::invalid_argument("hamiltonian: need 0 <= alpha < beta < 1");
        }
        double total = 0;
        for (std::size_t i = 0; i < terms.size(); ++i) {
            const auto& t = terms[i];
            std::string at = "terms[" + std::to_string(i) + "]";
            if (!(t.weight > 0)) throw std::invalid_argument(at + ".p: weight must be positive");
            if (t.sign != 1 && t.sign != -1) throw std::invalid_argument(at + ".s: sign must be +-1");
            if (t.paulis.empty() || static_cast<int>(t.paulis.size()) > locality) {
                throw std::invalid_argument(at + ".paulis: support size must be in [1, locality]");
            }
            for (const auto& [q, w] : t.paulis) {
                (void)w;
                if (q < 0 || q >= num_qubits) {
                    throw std::invalid_argument(at + ".paulis: index " + std::to_string(q) +
                                                " out of range");
                }
            }
            total += t.weight;
        }
        if (std::abs(total - 1.0) > 1e-9) {
            throw std::invalid_argument("hamiltonian: weights must sum to 1");
        }
    }

    std::vector<int> term_support(std::size_t i) const {
        std::vector<int> s;
        for (const auto& [q, w] : terms[i].paulis) {
            (void)w;
            s.push_back(q);
        }
        return s;
    }

    /// Inverse-CDF over the stored term order.
    std::size_t sample_term(Rng& rng) const {
        double u = rand_unit(rng);
        double acc = 0;
        for (std::size_t i = 0; i < terms.size(); ++i) {
            acc += terms[i].weight;
            if (u < acc) return i;
        }
        return terms.size() - 1;
    }
};

struct GateOp {
    enum class Kind : std::uint8_t { CNOT, T, H, X, Z };
    Kind kind = Kind::H;
    int target = 0;
    int control = -1;  // CNOT only
};

struct ToyCircuit {
    int num_qubits = 0;
    int num_witness_qubits = 0;  // leading data qubits carry the witness; the rest start |0>
    std::vector<GateOp> gates;

    void validate() const {
        if (num_qubits < 1) throw std::invalid_argument("circuit: need at least one qubit");
        if (num_witness_qubits < 1 || num_witness_qubits > num_qubits) {
            throw std::invalid_argument("circuit: witness qubits out of range");
        }
        if (gates.size() > 6) throw std::invalid_argument("circuit: at most 6 gates");
        for (const auto& g : gates) {
            if (g.target < 0 || g.target >= num_qubits) {
                throw std::invalid_argument("circuit: gate target out of range");
            }
            if (g.kind == GateOp::Kind::CNOT) {
                if (g.control < 0 || g.control >= num_qubits || g.control == g.target) {
                    throw std::invalid_argument("circuit: bad CNOT control");
                }
            }
        }
    }
};

struct Instance {
    LocalHamiltonian hamiltonian;
    std::optional<QuantumState> witness;  // yes-instances store the low-energy state to teleport
    bool is_yes = false;

    int num_qubits() const { return hamiltonian.num_qubits; }
};

// ---------------------------------------------------------------------------
// energy
// ---------------------------------------------------------------------------

namespace detail {

struct PauliStringMask {
    std::size_t xmask = 0;  // X and Y positions flip bits
    std::size_t zmask = 0;  // Z and Y positions contribute (-1)^bit
    int y_count = 0;
};

inline PauliStringMask string_mask(const std::map<int, PauliBasis>& paulis) {
    PauliStringMask m;
    for (const auto& [q, w] : paulis) {
        switch (w) {
            case PauliBasis::X: m.xmask |= std::size_t{1} << q; break;
            case PauliBasis::Z: m.zmask |= std::size_t{1} << q; break;
            case PauliBasis::Y:
                m.xmask |= std::size_t{1} << q;
                m.zmask |= std::size_t{1} << q;
                ++m.y_count;
                break;
        }
    }
    return m;
}

/// phase(i) with P|i> = phase(i)|i ^ xmask>
inline cplx string_phase(const PauliStringMask& m, std::size_t i) {
    int zpar = __builtin_popcountll(i & m.zmask) & 1;
    double re = zpar ? -1.0 : 1.0;
    cplx phase(re, 0);
    static const cplx ipow[4] = {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};
    return phase * ipow[m.y_count & 3];
}

}  // namespace detail

/// <psi| P |psi> for a Pauli string.
inline cplx expectation_pauli(const QuantumState& psi, const std::map<int, PauliBasis>& paulis) {
    auto m = detail::string_mask(paulis);
    cplx acc(0);
    for (std::size_t i = 0; i < psi.dim(); ++i) {
        acc += std::conj(psi.amplitude(i)) * detail::string_phase(m, i ^ m.xmask) *
               psi.amplitude(i ^ m.xmask);
    }
    return acc;
}

inline cplx expectation_pauli(const DensityMatrix& rho, const std::map<int, PauliBasis>& paulis) {
    auto m = detail::string_mask(paulis);
    cplx acc(0);
    for (Eigen::Index i = 0; i < rho.dim(); ++i) {
        std::size_t iu = static_cast<std::size_t>(i);
        acc += detail::string_phase(m, iu) * rho.entry(i, static_cast<Eigen::Index>(iu ^ m.xmask));
    }
    return acc;
}

template <typename StateT>
inline double energy(const StateT& rho, const LocalHamiltonian& h) {
    std::size_t dim = std::size_t{1} << h.num_qubits;
    if constexpr (std::is_same_v<StateT, QuantumState>) {
        if (rho.dim() != dim) throw std::invalid_argument("energy: dimension mismatch");
    } else {
        if (rho.dim() != static_cast<Eigen::Index>(dim)) {
            throw std::invalid_argument("energy: dimension mismatch");
        }
    }
    double e = 0;
    for (const auto& t : h.terms) {
        double ev = expectation_pauli(rho, t.paulis).real();
        e += t.weight * 0.5 * (1.0 + t.sign * ev);
    }
    return e;
}

/// Dense 2^N x 2^N matrix of H (sum of projector terms).
inline Eigen::MatrixXcd dense_matrix(const LocalHamiltonian& h) {
    if (h.num_qubits > 12) throw std::invalid_argument("dense_matrix: N too large");
    const Eigen::Index d = Eigen::Index{1} << h.num_qubits;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
    for (const auto& t : h.terms) {
        auto mask = detail::string_mask(t.paulis);
        for (Eigen::Index i = 0; i < d; ++i) {
            m(i, i) += t.weight * 0.5;
            std::size_t j = static_cast<std::size_t>(i) ^ mask.xmask;
            m(static_cast<Eigen::Index>(j), i) +=
                t.weight * 0.5 * static_cast<double>(t.sign) * detail::string_phase(mask, static_cast<std::size_t>(i));
        }
    }
    return m;
}

/// Minimal eigenvalue and an eigenvector, by dense eigendecomposition.
inline std::pair<double, QuantumState> ground_state(const LocalHamiltonian& h) {
    if (h.num_qubits > 12) throw std::invalid_argument("ground_state: N too large (max 12)");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense_matrix(h));
    double lambda = es.eigenvalues()(0);
    Eigen::VectorXcd v = es.eigenvectors().col(0);
    std::vector<cplx> amps(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) amps[static_cast<std::size_t>(i)] = v(i);
    return {lambda, QuantumState(h.num_qubits, std::move(amps))};
}

inline double min_eigenvalue(const LocalHamiltonian& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense_matrix(h), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

// ---------------------------------------------------------------------------
// circuit to Hamiltonian (unary clock)
// ---------------------------------------------------------------------------

namespace detail {

inline Eigen::MatrixXcd gate_matrix_1q(GateOp::Kind k) {
    Eigen::MatrixXcd m(2, 2);
    switch (k) {
        case GateOp::Kind::H: m << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0), 1 / std::sqrt(2.0), -1 / std::sqrt(2.0); break;
        case GateOp::Kind::X: m << 0, 1, 1, 0; break;
        case GateOp::Kind::Z: m << 1, 0, 0, -1; break;
        case GateOp::Kind::T: m << 1, 0, 0, std::exp(cplx(0, M_PI / 4)); break;
        default: throw std::invalid_argument("not a single-qubit gate");
    }
    return m;
}

inline void apply_gate(QuantumState& psi, const GateOp& g, int offset) {
    switch (g.kind) {
        case GateOp::Kind::CNOT: psi.apply_cnot(offset + g.control, offset + g.target); return;
        case GateOp::Kind::X: psi.apply_x(offset + g.target); return;
        case GateOp::Kind::Z: psi.apply_z(offset + g.target); return;
        case GateOp::Kind::H: psi.apply_single(offset + g.target, v_matrix(PauliBasis::X)); return;
        case GateOp::Kind::T: {
            psi.apply_single(offset + g.target,
                             {cplx(1), cplx(0), cplx(0), std::exp(cplx(0, M_PI / 4))});
            return;
        }
    }
}

// Local operator on an explicit, ascending support (little-endian within the
// support order).
struct LocalOp {
    std::vector<int> support;
    Eigen::MatrixXcd m;
};

inline Eigen::MatrixXcd kron_le(const Eigen::MatrixXcd& low, const Eigen::MatrixXcd& high) {
    Eigen::MatrixXcd out(low.rows() * high.rows(), low.cols() * high.cols());
    for (Eigen::Index r = 0; r < high.rows(); ++r) {
        for (Eigen::Index c = 0; c < high.cols(); ++c) {
            out.block(r * low.rows(), c * low.cols(), low.rows(), low.cols()) = high(r, c) * low;
        }
    }
    return out;
}

inline Eigen::MatrixXcd proj_bit(int value) {
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(2, 2);
    p(value, value) = 1;
    return p;
}

inline Eigen::MatrixXcd raise_bit() {  // |1><0|
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(2, 2);
    p(1, 0) = 1;
    return p;
}

// Gate as a dense matrix over its own sorted support.
inline std::pair<std::vector<int>, Eigen::MatrixXcd> gate_dense(const GateOp& g) {
    if (g.kind != GateOp::Kind::CNOT) {
        return {{g.target}, gate_matrix_1q(g.kind)};
    }
    int lo = std::min(g.control, g.target);
    int hi = std::max(g.control, g.target);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
    // bit0 = lo, bit1 = hi
    for (int idx = 0; idx < 4; ++idx) {
        int cbit = (g.control == lo) ? (idx & 1) : (idx >> 1);
        int out = idx;
        if (cbit) out ^= (g.target == lo) ? 1 : 2;
        m(out, idx) = 1;
    }
    return {{lo, hi}, m};
}

}  // namespace detail

/// (1/sqrt(T+1)) sum_t |clock_t> (x) U_t..U_1 (|witness> (x) |0...0>),
/// clock on qubits 0..T-1 in unary (qubit k set iff k < t), data after.
inline QuantumState history_state(const ToyCircuit& circuit, const QuantumState& witness) {
    circuit.validate();
    if (witness.num_qubits() != circuit.num_witness_qubits) {
        throw std::invalid_argument("history_state: witness size mismatch");
    }
    const int T = static_cast<int>(circuit.gates.size());
    const int n = circuit.num_qubits;
    if (T + n > 12) throw std::invalid_argument("history_state: clock + data exceeds 12 qubits");

    QuantumState data = witness;
    if (n > circuit.num_witness_qubits) {
        data = witness.tensor(QuantumState(n - circuit.num_witness_qubits));
    }
    if (T == 0) return data;

    std::vector<cplx> out(std::size_t{1} << (T + n), cplx(0));
    const double w = 1.0 / std::sqrt(static_cast<double>(T + 1));
    for (int t = 0; t <= T; ++t) {
        std::size_t clock = (std::size_t{1} << t) - 1;  // t low clock bits set
        for (std::size_t d = 0; d < data.dim(); ++d) {
            out[(d << T) | clock] += w * data.amplitude(d);
        }
        if (t < T) detail::apply_gate(data, circuit.gates[static_cast<std::size_t>(t)], 0);
    }
    return QuantumState(T + n, std::move(out));
}

/// Unary-clock Hamiltonian for the circuit, Pauli-decomposed and normalized
/// to sum_i p_i (I + s_i P_i)/2. The identity component of the decomposition
/// is dropped before normalizing (a pure shift; keeping it would break both
/// the nonempty-support term format and the exact acceptance law). alpha is
/// the recorded history-state energy of the normalized form.
inline LocalHamiltonian kitaev_hamiltonian(const ToyCircuit& circuit) {
    circuit.validate();
    const int T = static_cast<int>(circuit.gates.size());
    const int n = circuit.num_qubits;
    if (T < 1 || T > 4) throw std::invalid_argument("kitaev_hamiltonian: need 1 <= T <= 4");
    if (n > 3) throw std::invalid_argument("kitaev_hamiltonian: need n <= 3");
    const int total = T + n;

    std::vector<detail::LocalOp> ops;

    // H_in: ancilla data qubits must be |0> at clock 0 (clock qubit 0 clear).
    for (int a = circuit.num_witness_qubits; a < n; ++a) {
        detail::LocalOp op;
        op.support = {0, T + a};
        op.m = detail::kron_le(detail::proj_bit(0), detail::proj_bit(1));
        ops.push_back(std::move(op));
    }

    // H_clock: forbid 0 followed by 1 in the unary register.
    for (int k = 1; k < T; ++k) {
        detail::LocalOp op;
        op.support = {k - 1, k};
        op.m = detail::kron_le(detail::proj_bit(0), detail::proj_bit(1));
        ops.push_back(std::move(op));
    }

    // H_prop(t) = 1/2 (L^+L + LL^+) (x) I - 1/2 (L (x) U_t + h.c.)
    for (int t = 1; t <= T; ++t) {
        std::vector<int> clock_sup;
        Eigen::MatrixXcd L;
        if (T == 1) {
            clock_sup = {0};
            L = detail::raise_bit();
        } else if (t == 1) {
            clock_sup = {0, 1};
            L = detail::kron_le(detail::raise_bit(), detail::proj_bit(0));
        } else if (t == T) {
            clock_sup = {T - 2, T - 1};
            L = detail::kron_le(detail::proj_bit(1), detail::raise_bit());
        } else {
            clock_sup = {t - 2, t - 1, t};
            L = detail::kron_le(detail::kron_le(detail::proj_bit(1), detail::raise_bit()),
                                detail::proj_bit(0));
        }
        auto [gate_sup_local, U] = detail::gate_dense(circuit.gates[static_cast<std::size_t>(t - 1)]);
        std::vector<int> gate_sup;
        for (int q : gate_sup_local) gate_sup.push_back(T + q);

        detail::LocalOp op;
        op.support = clock_sup;
        op.support.insert(op.support.end(), gate_sup.begin(), gate_sup.end());
        Eigen::Index dg = U.rows();
        Eigen::MatrixXcd Ig = Eigen::MatrixXcd::Identity(dg, dg);
        Eigen::MatrixXcd M = detail::kron_le(L, U);  // clock low, gate high? support order is clock first
        // support order: clock indices then gate indices, both ascending and
        // clock < T <= gate, so clock occupies the low bits.
        Eigen::MatrixXcd QQ = detail::kron_le(
            Eigen::MatrixXcd(L.adjoint() * L + L * L.adjoint()), Ig);
        op.m = 0.5 * QQ - 0.5 * (M + Eigen::MatrixXcd(M.adjoint()));
        ops.push_back(std::move(op));
    }

    // Pauli-decompose every local operator and merge coefficients.
    std::map<std::map<int, PauliBasis>, double> coeff;
    double identity_coeff = 0;
    for (const auto& op : ops) {
        const int k = static_cast<int>(op.support.size());
        const Eigen::Index d = Eigen::Index{1} << k;
        for (std::size_t code = 0; code < (std::size_t{1} << (2 * k)); ++code) {
            // 0 = I, 1 = X, 2 = Y, 3 = Z per support position
            Eigen::MatrixXcd Q = Eigen::MatrixXcd::Identity(1, 1);
            std::map<int, PauliBasis> paulis;
            for (int pos = 0; pos < k; ++pos) {
                int c = (code >> (2 * pos)) & 3;
                Eigen::MatrixXcd p(2, 2);
                switch (c) {
                    case 0: p << 1, 0, 0, 1; break;
                    case 1: p << 0, 1, 1, 0; paulis[op.support[static_cast<std::size_t>(pos)]] = PauliBasis::X; break;
                    case 2: p << 0, cplx(0, -1), cplx(0, 1), 0; paulis[op.support[static_cast<std::size_t>(pos)]] = PauliBasis::Y; break;
                    case 3: p << 1, 0, 0, -1; paulis[op.support[static_cast<std::size_t>(pos)]] = PauliBasis::Z; break;
                }
                Q = detail::kron_le(Q, p);
            }
            cplx c = (Q.adjoint() * op.m).trace() / static_cast<double>(d);
            if (std::abs(c.imag()) > 1e-9) {
                throw std::runtime_error("kitaev_hamiltonian: non-Hermitian decomposition");
            }
            if (std::abs(c.real()) < 1e-12) continue;
            if (paulis.empty()) {
                identity_coeff += c.real();
            } else {
                coeff[paulis] += c.real();
            }
        }
    }

    LocalHamiltonian h;
    h.num_qubits = total;
    h.locality = 5;
    double scale = 0;
    for (const auto& [paulis, c] : coeff) {
        if (std::abs(c) < 1e-12) continue;
        if (static_cast<int>(paulis.size()) > 5) {
            throw std::invalid_argument("kitaev_hamiltonian: decomposed term exceeds locality 5");
        }
        scale += std::abs(c);
    }
    if (scale <= 0) throw std::runtime_error("kitaev_hamiltonian: empty decomposition");
    for (const auto& [paulis, c] : coeff) {
        if (std::abs(c) < 1e-12) continue;
        PauliTerm t;
        t.weight = std::abs(c) / scale;
        t.sign = c > 0 ? +1 : -1;
        t.paulis = paulis;
        h.terms.push_back(std::move(t));
    }
    // normalized form: 1/2 (I + (H_clock - c0 I)/scale); the history state
    // sits in the kernel of H_clock, at energy (1 - c0/scale)/2.
    h.alpha = 0.5 * (1.0 - identity_coeff / scale);
    h.beta = std::min(0.999, h.alpha + 0.25);
    h.validate();
    return h;
}

/// Exact |s|-qubit reduced density matrix of the stored witness state
/// (testing stand-in for the witness-free simulator).
inline DensityMatrix sim_hist(const Instance& inst, const std::vector<int>& s) {
    if (!inst.is_yes || !inst.witness.has_value()) {
        throw std::invalid_argument("sim_hist: yes-instance with stored witness required");
    }
    if (s.empty() || s.size() > 5) throw std::invalid_argument("sim_hist: |S| must be in [1, 5]");
    return partial_trace(*inst.witness, s);
}

// ---------------------------------------------------------------------------
// instance zoo
// ---------------------------------------------------------------------------

inline Instance make_handcrafted_instance(const std::string& kind, int n) {
    Instance inst;
    auto pair_term = [](int a, int b, PauliBasis w, int sign, double p) {
        PauliTerm t;
        t.weight = p;
        t.sign = sign;
        t.paulis[a] = w;
        t.paulis[b] = w;
        return t;
    };
    if (kind == "bell_stabilizer_yes") {
        if (n < 2 || n % 2 != 0) {
            throw std::invalid_argument("bell_stabilizer_yes: n must be even and >= 2");
        }
        LocalHamiltonian h;
        h.num_qubits = n;
        for (int i = 0; i + 1 < n; i += 2) {
            h.terms.push_back(pair_term(i, i + 1, PauliBasis::X, -1, 1.0 / n));
            h.terms.push_back(pair_term(i, i + 1, PauliBasis::Z, -1, 1.0 / n));
        }
        h.alpha = 0.0;
        h.beta = 1.0 / n;
        h.validate();
        QuantumState w(n);
        for (int i = 0; i + 1 < n; i += 2) {
            w.apply_single(i, v_matrix(PauliBasis::X));
            w.apply_cnot(i, i + 1);
        }
        inst = Instance{std::move(h), std::move(w), true};
    } else if (kind == "ghz_yes") {
        if (n < 2 || n > 5) throw std::invalid_argument("ghz_yes: need 2 <= n <= 5");
        LocalHamiltonian h;
        h.num_qubits = n;
        PauliTerm xall;
        xall.weight = 1.0 / n;
        xall.sign = -1;
        for (int q = 0; q < n; ++q) xall.paulis[q] = PauliBasis::X;
        h.terms.push_back(std::move(xall));
        for (int q = 0; q + 1 < n; ++q) {
            h.terms.push_back(pair_term(q, q + 1, PauliBasis::Z, -1, 1.0 / n));
        }
        h.alpha = 0.0;
        h.beta = 1.0 / n;
        h.validate();
        QuantumState w(n);
        w.apply_single(0, v_matrix(PauliBasis::X));
        for (int q = 0; q + 1 < n; ++q) w.apply_cnot(q, q + 1);
        inst = Instance{std::move(h), std::move(w), true};
    } else if (kind == "anti_stabilizer_no") {
        if (n < 1) throw std::invalid_argument("anti_stabilizer_no: n must be >= 1");
        LocalHamiltonian h;
        h.num_qubits = n;
        PauliTerm plus, minus;
        plus.weight = minus.weight = 0.5;
        plus.sign = +1;
        minus.sign = -1;
        plus.paulis[0] = PauliBasis::Z;
        minus.paulis[0] = PauliBasis::Z;
        h.terms.push_back(plus);
        h.terms.push_back(minus);
        // H = I/2 exactly
        double lambda = (n <= 8) ? min_eigenvalue(h) : 0.5;
        h.alpha = 0.25;
        h.beta = lambda - 1e-6;
        h.validate();
        inst = Instance{std::move(h), std::nullopt, false};
    } else if (kind == "anti_pair_no") {
        // paired ZZ/XX no-instance (H = I/2) usable by the CV-NIP lane
        if (n < 2) throw std::invalid_argument("anti_pair_no: n must be >= 2");
        LocalHamiltonian h;
        h.num_qubits = n;
        h.terms.push_back(pair_term(0, 1, PauliBasis::X, +1, 0.25));
        h.terms.push_back(pair_term(0, 1, PauliBasis::Z, +1, 0.25));
        h.terms.push_back(pair_term(0, 1, PauliBasis::X, -1, 0.25));
        h.terms.push_back(pair_term(0, 1, PauliBasis::Z, -1, 0.25));
        double lambda = (n <= 8) ? min_eigenvalue(h) : 0.5;
        h.alpha = 0.0;
        h.beta = lambda - 1e-6;
        h.validate();
        inst = Instance{std::move(h), std::nullopt, false};
    } else if (kind == "random_no") {
        if (n < 2 || n > 8) throw std::invalid_argument("random_no: need 2 <= n <= 8");
        Rng rng = make_rng(0x6e6f5f72616e64ULL ^ static_cast<std::uint64_t>(n));
        LocalHamiltonian h;
        h.num_qubits = n;
        PauliBasis w0 = static_cast<PauliBasis>(rand_below(rng, 3));
        PauliTerm plus, minus;
        plus.weight = minus.weight = 0.4;
        plus.sign = +1;
        minus.sign = -1;
        plus.paulis[0] = w0;
        minus.paulis[0] = w0;
        h.terms.push_back(plus);
        h.terms.push_back(minus);
        PauliTerm extra;
        extra.weight = 0.2;
        extra.sign = rand_bit(rng) ? +1 : -1;
        int qa = static_cast<int>(rand_below(rng, static_cast<std::uint64_t>(n)));
        int qb = static_cast<int>(rand_below(rng, static_cast<std::uint64_t>(n - 1)));
        if (qb >= qa) ++qb;
        extra.paulis[qa] = static_cast<PauliBasis>(rand_below(rng, 3));
        extra.paulis[qb] = static_cast<PauliBasis>(rand_below(rng, 3));
        h.terms.push_back(std::move(extra));
        double lambda = min_eigenvalue(h);  // 0.4: the projector part has a kernel
        h.alpha = 0.2;
        h.beta = lambda - 1e-6;
        h.validate();
        inst = Instance{std::move(h), std::nullopt, false};
    } else {
        throw std::invalid_argument(
            "unknown instance kind '" + kind +
            "' (known: bell_stabilizer_yes, ghz_yes, anti_stabilizer_no, anti_pair_no, random_no)");
    }
    if (!inst.is_yes) {
        double lambda = min_eigenvalue(inst.hamiltonian);
        if (lambda < inst.hamiltonian.beta - 1e-9) {
            throw std::runtime_error("no-instance violates its beta threshold");
        }
    }
    return inst;
}

/// Widen an instance to more qubits by appending |0> qubits to the witness.
inline Instance pad_instance(const Instance& inst, int new_n) {
    if (new_n < inst.num_qubits()) throw std::invalid_argument("pad_instance: cannot shrink");
    if (new_n == inst.num_qubits()) return inst;
    Instance out = inst;
    out.hamiltonian.num_qubits = new_n;
    if (out.witness.has_value()) {
        out.witness = out.witness->tensor(QuantumState(new_n - inst.num_qubits()));
    }
    return out;
}

// ---------------------------------------------------------------------------
// CV-NIP paired {ZZ, XX} form
// ---------------------------------------------------------------------------

struct NipPair {
    int j1 = 0;
    int j2 = 0;
    int sign = +1;
    double weight = 0;  // p_{j1,j2}; the two member terms carry p/2 each
};

/// Parses terms grouped as p/2 (I+s XX)/2 + p/2 (I+s ZZ)/2 per (pair, sign).
/// Throws if the instance is not in that shape.
inline std::vector<NipPair> paired_xxzz_form(const LocalHamiltonian& h) {
    std::map<std::tuple<int, int, int>, std::map<int, double>> groups;  // (j1,j2,s) -> basis kind -> weight
    for (const auto& t : h.terms) {
        if (t.paulis.size() != 2) {
            throw std::invalid_argument("instance not in paired ZZ/XX form: term is not 2-local");
        }
        auto it = t.paulis.begin();
        auto [q1, w1] = *it++;
        auto [q2, w2] = *it;
        if (w1 != w2 || w1 == PauliBasis::Y) {
            throw std::invalid_argument("instance not in paired ZZ/XX form: term is not XX or ZZ");
        }
        groups[{q1, q2, t.sign}][w1 == PauliBasis::X ? 0 : 1] += t.weight;
    }
    std::vector<NipPair> pairs;
    for (const auto& [key, parts] : groups) {
        auto [j1, j2, s] = key;
        if (parts.size() != 2 ||
            std::abs(parts.at(0) - parts.at(1)) > 1e-9) {
            throw std::invalid_argument(
                "instance not in paired ZZ/XX form: XX/ZZ weights do not match");
        }
        pairs.push_back(NipPair{j1, j2, s, parts.at(0) * 2.0});
    }
    return pairs;
}

// ---------------------------------------------------------------------------
// InstanceFileV1
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json instance_to_json(const Instance& inst) {
    nlohmann::ordered_json j;
    j["version"] = 1;
    j["n"] = inst.hamiltonian.num_qubits;
    j["locality"] = inst.hamiltonian.locality;
    j["alpha"] = inst.hamiltonian.alpha;
    j["beta"] = inst.hamiltonian.beta;
    j["terms"] = nlohmann::ordered_json::array();
    for (const auto& t : inst.hamiltonian.terms) {
        nlohmann::ordered_json jt;
        jt["p"] = t.weight;
        jt["s"] = t.sign;
        jt["paulis"] = nlohmann::ordered_json::object();
        for (const auto& [q, w] : t.paulis) {
            jt["paulis"][std::to_string(q)] = std::string(1, pauli_char(w));
        }
        j["terms"].push_back(std::move(jt));
    }
    if (inst.witness.has_value()) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& a : inst.witness->amplitudes()) {
            arr.push_back(nlohmann::ordered_json::array({a.real(), a.imag()}));
        }
        j["witness"] = std::move(arr);
    }
    j["label"] = inst.is_yes ? "yes" : "no";
    return j;
}

inline Instance instance_from_json(const nlohmann::json& j) {
    auto fail = [](const std::string& path, const std::string& what) {
        throw std::invalid_argument("instance file: " + path + ": " + what);
    };
    if (!j.contains("version") || j["version"] != 1) fail("version", "must be 1");
    Instance inst;
    auto& h = inst.hamiltonian;
    try {
        h.num_qubits = j.at("n").get<int>();
        h.locality = j.at("locality").get<int>();
        h.alpha = j.at("alpha").get<double>();
        h.beta = j.at("beta").get<double>();
    } catch (const nlohmann::json::exception& e) {
        fail("header", e.what());
    }
    if (!j.contains("terms") || !j["terms"].is_array()) fail("terms", "missing array");
    for (std::size_t i = 0; i < j["terms"].size(); ++i) {
        const auto& jt = j["terms"][i];
        std::string at = "terms[" + std::to_string(i) + "]";
        PauliTerm t;
        try {
            t.weight = jt.at("p").get<double>();
            t.sign = jt.at("s").get<int>();
        } catch (const nlohmann::json::exception& e) {
            fail(at, e.what());
        }
        if (!jt.contains("paulis") || !jt["paulis"].is_object()) fail(at + ".paulis", "missing object");
        for (const auto& [key, val] : jt["paulis"].items()) {
            int q = 0;
            try {
                q = std::stoi(key);
            } catch (...) {
                fail(at + ".paulis", "non-integer qubit index '" + key + "'");
            }
            std::string s = val.get<std::string>();
            if (s.size() != 1) fail(at + ".paulis." + key, "basis must be one of X, Y, Z");
            try {
                t.paulis[q] = pauli_from_char(s[0]);
            } catch (const std::invalid_argument&) {
                fail(at + ".paulis." + key, "basis must be one of X, Y, Z");
            }
        }
        h.terms.push_back(std::move(t));
    }
    std::string label = j.value("label", "");
    if (label != "yes" && label != "no") fail("label", "must be \"yes\" or \"no\"");
    inst.is_yes = label == "yes";
    try {
        h.validate();
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string("instance file: ") + e.what());
    }
    if (j.contains("witness")) {
        const auto& jw = j["witness"];
        if (!jw.is_array() || jw.size() != (std::size_t{1} << h.num_qubits)) {
            fail("witness", "must hold exactly 2^n [re, im] pairs");
        }
        std::vector<cplx> amps(jw.size());
        for (std::size_t i = 0; i < jw.size(); ++i) {
            if (!jw[i].is_array() || jw[i].size() != 2) fail("witness[" + std::to_string(i) + "]", "expected [re, im]");
            amps[i] = cplx(jw[i][0].get<double>(), jw[i][1].get<double>());
        }
        try {
            inst.witness = QuantumState(h.num_qubits, std::move(amps));
        } catch (const std::invalid_argument& e) {
            fail("witness", e.what());
        }
    }
    return inst;
}

inline void save_instance(const Instance& inst, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << instance_to_json(inst).dump(2) << "\n";
}

inline Instance load_instance(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open: " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("instance file: parse error: " + std::string(e.what()));
    }
    return instance_from_json(j);
}

}  // namespace qmanizk::ham

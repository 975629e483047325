#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qconcat/bitvec.hpp"

namespace qconcat {

// An n-qubit Pauli operator in binary symplectic form: qubit q carries X iff
// x[q], Z iff z[q], Y iff both. Global phases are not tracked; products are
// computed up to phase, which is all the decoding stack needs.
class Pauli {
  public:
    Pauli() = default;
    explicit Pauli(std::size_t n) : x_(n), z_(n) {}
    Pauli(BitVec x, BitVec z) : x_(std::move(x)), z_(std::move(z)) {
        if (x_.size() != z_.size()) throw std::invalid_argument("Pauli: x/z size mismatch");
    }

    static Pauli identity(std::size_t n) { return Pauli(n); }

    static Pauli single(std::size_t n, std::size_t qubit, char type) {
        Pauli p(n);
        switch (type) {
            case 'I': break;
            case 'X': p.x_.set(qubit); break;
            case 'Y': p.x_.set(qubit); p.z_.set(qubit); break;
            case 'Z': p.z_.set(qubit); break;
            default: throw std::invalid_argument(std::string("Pauli: unknown type '") + type + "'");
        }
        return p;
    }

    // Parse "IXYZ..." (one letter per qubit, qubit 0 first).
    static Pauli from_string(std::string_view s) {
        Pauli p(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            switch (s[i]) {
                case 'I': break;
                case 'X': p.x_.set(i); break;
                case 'Y': p.x_.set(i); p.z_.set(i); break;
                case 'Z': p.z_.set(i); break;
                default:
                    throw std::invalid_argument("Pauli: invalid character '" + std::string(1, s[i]) +
                                                "' at position " + std::to_string(i));
            }
        }
        return p;
    }

    std::string str() const {
        std::string s(size(), 'I');
        for (std::size_t i = 0; i < size(); ++i) {
            bool xb = x_.get(i), zb = z_.get(i);
            if (xb && zb)
                s[i] = 'Y';
            else if (xb)
                s[i] = 'X';
            else if (zb)
                s[i] = 'Z';
        }
        return s;
    }

    std::size_t size() const { return x_.size(); }
    const BitVec& x() const { return x_; }
    const BitVec& z() const { return z_; }
    BitVec& x() { return x_; }
    BitVec& z() { return z_; }

    bool is_identity() const { return !x_.any() && !z_.any(); }

    // Number of qubits acted on non-trivially.
    std::size_t weight() const { return BitVec::or_popcount(x_, z_); }

    // Product up to phase: symplectic (xor) composition.
    friend Pauli operator*(const Pauli& a, const Pauli& b) {
        if (a.size() != b.size())
            throw std::invalid_argument("Pauli: cannot multiply operators on " + std::to_string(a.size()) +
                                        " and " + std::to_string(b.size()) + " qubits");
        return Pauli(a.x_ ^ b.x_, a.z_ ^ b.z_);
    }
    Pauli& operator*=(const Pauli& o) { return *this = *this * o; }

    bool commutes_with(const Pauli& o) const {
        if (size() != o.size()) throw std::invalid_argument("Pauli: commutation needs equal sizes");
        return !(BitVec::and_parity(x_, o.z_) ^ BitVec::and_parity(z_, o.x_));
    }

    bool operator==(const Pauli& o) const { return x_ == o.x_ && z_ == o.z_; }
    bool operator!=(const Pauli& o) const { return !(*this == o); }

    // Order by (x, z) as little-endian integers; used for deterministic ties.
    bool operator<(const Pauli& o) const {
        int c = x_.cmp(o.x_);
        return c != 0 ? c < 0 : z_.cmp(o.z_) < 0;
    }

    // Restriction to the listed qubits (result qubit i = this qubit idx[i]).
    // Indices must be in range and distinct.
    Pauli restricted(std::span<const std::size_t> idx) const {
        check_indices(idx, size());
        Pauli p(idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i) {
            if (x_.get(idx[i])) p.x_.set(i);
            if (z_.get(idx[i])) p.z_.set(i);
        }
        return p;
    }

    // Embedding into n qubits: this qubit i lands on idx[i], identity elsewhere.
    Pauli embedded(std::size_t n, std::span<const std::size_t> idx) const {
        if (idx.size() != size()) throw std::invalid_argument("Pauli: embedding index count must equal size");
        check_indices(idx, n);
        Pauli p(n);
        for (std::size_t i = 0; i < size(); ++i) {
            if (x_.get(i)) p.x_.set(idx[i]);
            if (z_.get(i)) p.z_.set(idx[i]);
        }
        return p;
    }

  private:
    static void check_indices(std::span<const std::size_t> idx, std::size_t n) {
        std::vector<bool> seen(n, false);
        for (auto q : idx) {
            if (q >= n) throw std::out_of_range("Pauli: qubit index " + std::to_string(q) + " out of range");
            if (seen[q]) throw std::invalid_argument("Pauli: duplicate qubit index " + std::to_string(q));
            seen[q] = true;
        }
    }

    BitVec x_, z_;
};

}  // namespace qconcat

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qconcat/bitvec.hpp"

namespace qconcat {

// Dense GF(2) matrix with BitVec rows. Just enough linear algebra for code
// construction: reduced row echelon form, rank, null space, small inverses.
class Gf2Mat {
  public:
    Gf2Mat() = default;
    Gf2Mat(std::size_t rows, std::size_t cols) : cols_(cols), rows_(rows, BitVec(cols)) {}

    // Rows given as 0/1 strings, e.g. {"1100", "0011"}.
    static Gf2Mat from_strings(const std::vector<std::string>& rows) {
        if (rows.empty()) return Gf2Mat(0, 0);
        Gf2Mat m(rows.size(), rows[0].size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != m.cols_) throw std::invalid_argument("Gf2Mat: ragged rows");
            for (std::size_t c = 0; c < m.cols_; ++c) {
                if (rows[r][c] == '1')
                    m.rows_[r].set(c);
                else if (rows[r][c] != '0')
                    throw std::invalid_argument("Gf2Mat: rows must be over {0,1}");
            }
        }
        return m;
    }

    std::size_t rows() const { return rows_.size(); }
    std::size_t cols() const { return cols_; }
    const BitVec& row(std::size_t r) const { return rows_.at(r); }
    BitVec& row(std::size_t r) { return rows_.at(r); }
    void append_row(BitVec v) {
        if (v.size() != cols_) throw std::invalid_argument("Gf2Mat: row width mismatch");
        rows_.push_back(std::move(v));
    }

    bool get(std::size_t r, std::size_t c) const { return rows_.at(r).get(c); }
    void set(std::size_t r, std::size_t c, bool v = true) { rows_.at(r).set(c, v); }

    // Parity of M * v (as column vector), returned row by row.
    BitVec mul_vec(const BitVec& v) const {
        BitVec out(rows());
        for (std::size_t r = 0; r < rows(); ++r)
            if (BitVec::and_parity(rows_[r], v)) out.set(r);
        return out;
    }

    // In-place reduced row echelon form with leftmost-column pivoting.
    // Returns the pivot columns in order; deterministic for a given input.
    std::vector<std::size_t> rref() {
        std::vector<std::size_t> pivots;
        std::size_t r = 0;
        for (std::size_t c = 0; c < cols_ && r < rows(); ++c) {
            std::size_t sel = rows_.size();
            for (std::size_t i = r; i < rows(); ++i)
                if (rows_[i].get(c)) { sel = i; break; }
            if (sel == rows_.size()) continue;
            std::swap(rows_[r], rows_[sel]);
            for (std::size_t i = 0; i < rows(); ++i)
                if (i != r && rows_[i].get(c)) rows_[i] ^= rows_[r];
            pivots.push_back(c);
            ++r;
        }
        return pivots;
    }

    std::size_t rank() const {
        Gf2Mat tmp = *this;
        return tmp.rref().size();
    }

    // Basis of {v : M v = 0}, in deterministic (free-column) order.
    std::vector<BitVec> null_space() const {
        Gf2Mat red = *this;
        auto pivots = red.rref();
        std::vector<bool> is_pivot(cols_, false);
        for (auto c : pivots) is_pivot[c] = true;
        std::vector<BitVec> basis;
        for (std::size_t free_c = 0; free_c < cols_; ++free_c) {
            if (is_pivot[free_c]) continue;
            BitVec v(cols_);
            v.set(free_c);
            for (std::size_t pr = 0; pr < pivots.size(); ++pr)
                if (red.rows_[pr].get(free_c)) v.set(pivots[pr]);
            basis.push_back(std::move(v));
        }
        return basis;
    }

  private:
    std::size_t cols_ = 0;
    std::vector<BitVec> rows_;
};

namespace gf2 {

// Invert a k x k matrix given as packed rows (bit c of rows[r] = entry (r,c)).
// Throws if singular.
inline std::vector<std::uint64_t> invert(std::vector<std::uint64_t> rows) {
    const std::size_t k = rows.size();
    if (k > 64) throw std::invalid_argument("gf2::invert: dimension > 64");
    std::vector<std::uint64_t> inv(k);
    for (std::size_t i = 0; i < k; ++i) inv[i] = std::uint64_t{1} << i;
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t sel = k;
        for (std::size_t r = c; r < k; ++r)
            if ((rows[r] >> c) & 1) { sel = r; break; }
        if (sel == k) throw std::invalid_argument("gf2::invert: singular matrix");
        std::swap(rows[c], rows[sel]);
        std::swap(inv[c], inv[sel]);
        for (std::size_t r = 0; r < k; ++r) {
            if (r != c && ((rows[r] >> c) & 1)) {
                rows[r] ^= rows[c];
                inv[r] ^= inv[c];
            }
        }
    }
    return inv;
}

}  // namespace gf2
}  // namespace qconcat

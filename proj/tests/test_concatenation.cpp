#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "qconcat/concatenated.hpp"

using qconcat::BitVec;
using qconcat::ConcatenatedCode;
using qconcat::LogicalClass;
using qconcat::Pauli;
using qconcat::StabilizerCode;
using qconcat::SyndromeTree;

namespace {

Pauli random_x_error(std::mt19937& rng, std::size_t n, double p) {
    Pauli e(n);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t q = 0; q < n; ++q)
        if (u(rng) < p) e.x().set(q);
    return e;
}

// The global logical X for logical qubit `ell` = (top block j, local m),
// built recursively from the base logicals. Used as an independent oracle
// for the geometry: only CSS-style X logicals are needed here.
Pauli global_logical_x(const ConcatenatedCode& code, std::size_t levels, std::size_t ell) {
    const auto& base = code.base();
    const std::size_t n = base.n(), k = base.k();
    if (levels == 1) return base.logical_x()[ell];
    std::size_t j = ell / k, m = ell % k;
    std::size_t sub_n = 1;
    for (std::size_t i = 0; i + 1 < levels; ++i) sub_n *= n;
    Pauli out(sub_n * n);
    const BitVec& sym = base.logical_x()[m].x();
    for (std::size_t c = 0; c < n; ++c) {
        if (!sym.get(c)) continue;
        // copy c contributes its own logical X for logical qubit j
        Pauli sub = global_logical_x(code, levels - 1, j);
        for (std::size_t q = 0; q < sub_n; ++q)
            if (sub.x().get(q)) out.x().set(c * sub_n + q);
    }
    return out;
}

TEST(Geometry, BlockCounts) {
    ConcatenatedCode two(StabilizerCode::quantum_hamming_15_7_3(), 2);
    EXPECT_EQ(two.n_total(), 225u);
    EXPECT_EQ(two.k_total(), 49u);
    EXPECT_EQ(two.blocks_at(1), 15u);
    EXPECT_EQ(two.blocks_at(2), 7u);

    ConcatenatedCode three(StabilizerCode::quantum_hamming_15_7_3(), 3);
    EXPECT_EQ(three.n_total(), 3375u);
    EXPECT_EQ(three.k_total(), 343u);
    EXPECT_EQ(three.blocks_at(1), 225u);
    EXPECT_EQ(three.blocks_at(2), 105u);
    EXPECT_EQ(three.blocks_at(3), 49u);

    ConcatenatedCode small(StabilizerCode::code_422(), 3);
    EXPECT_EQ(small.n_total(), 64u);
    EXPECT_EQ(small.k_total(), 8u);
    EXPECT_EQ(small.blocks_at(1), 16u);
    EXPECT_EQ(small.blocks_at(2), 8u);
    EXPECT_EQ(small.blocks_at(3), 4u);

    EXPECT_THROW(ConcatenatedCode(StabilizerCode::code_422(), 0), std::invalid_argument);
}

TEST(Geometry, ParentChildRoundTrip) {
    for (auto [base, levels] : {std::pair{StabilizerCode::quantum_hamming_15_7_3(), std::size_t{3}},
                                std::pair{StabilizerCode::code_422(), std::size_t{4}}}) {
        ConcatenatedCode code(base, levels);
        const std::size_t k = base.k();
        for (std::size_t t = 1; t < levels; ++t) {
            for (std::size_t b = 0; b < code.blocks_at(t); ++b) {
                for (std::size_t j = 0; j < k; ++j) {
                    auto [pb, pos] = code.parent_slot(t, b, j);
                    EXPECT_LT(pb, code.blocks_at(t + 1));
                    EXPECT_LT(pos, base.n());
                    auto [cb, cj] = code.child_slot(t + 1, pb, pos);
                    EXPECT_EQ(cb, b);
                    EXPECT_EQ(cj, j);
                }
            }
        }
    }
}

TEST(Geometry, ParentSlotsPartitionTheNextLevel) {
    ConcatenatedCode code(StabilizerCode::quantum_hamming_15_7_3(), 3);
    for (std::size_t t = 1; t < 3; ++t) {
        std::set<std::pair<std::size_t, std::size_t>> seen;
        for (std::size_t b = 0; b < code.blocks_at(t); ++b)
            for (std::size_t j = 0; j < 7; ++j) {
                auto slot = code.parent_slot(t, b, j);
                EXPECT_TRUE(seen.insert(slot).second) << "duplicate slot at level " << t;
            }
        EXPECT_EQ(seen.size(), code.blocks_at(t + 1) * 15);
    }
}

TEST(Geometry, SlotBoundsChecked) {
    ConcatenatedCode code(StabilizerCode::code_422(), 2);
    EXPECT_THROW(code.parent_slot(2, 0, 0), std::invalid_argument);
    EXPECT_THROW(code.parent_slot(1, 4, 0), std::out_of_range);
    EXPECT_THROW(code.parent_slot(1, 0, 2), std::out_of_range);
    EXPECT_THROW(code.child_slot(1, 0, 0), std::out_of_range);
    EXPECT_THROW(code.child_slot(2, 0, 4), std::out_of_range);
}

TEST(Extraction, SingleXErrorIsLocalAtLevelOne) {
    ConcatenatedCode code(StabilizerCode::quantum_hamming_15_7_3(), 2);
    for (std::size_t q = 0; q < 225; ++q) {
        Pauli e(225);
        e.x().set(q);
        SyndromeTree tree = code.extract_syndromes(e);
        for (std::size_t b = 0; b < 15; ++b) {
            if (b == q / 15)
                EXPECT_NE(tree.at(1, b), 0u) << "qubit " << q;
            else
                EXPECT_EQ(tree.at(1, b), 0u) << "qubit " << q;
        }
        // A weight-1 error is fully corrected inside its block, so nothing
        // propagates upward.
        for (std::size_t b = 0; b < 7; ++b) EXPECT_EQ(tree.at(2, b), 0u) << "qubit " << q;
        EXPECT_TRUE(code.true_logical_class(e).is_trivial());
    }
}

TEST(Extraction, BaseStabilizerInABlockVanishes) {
    ConcatenatedCode code(StabilizerCode::quantum_hamming_15_7_3(), 2);
    std::vector<std::size_t> where(15);
    for (std::size_t b : {0u, 7u, 14u}) {
        for (std::size_t i = 0; i < 15; ++i) where[i] = b * 15 + i;
        for (const auto& g : code.base().stabilizers()) {
            Pauli e = g.embedded(225, where);
            EXPECT_TRUE(code.extract_syndromes(e).all_zero());
            EXPECT_TRUE(code.true_logical_class(e).is_trivial());
        }
    }
}

TEST(Extraction, EmbeddedBaseLogicalHitsTheRightParentSlot) {
    ConcatenatedCode code(StabilizerCode::quantum_hamming_15_7_3(), 2);
    std::vector<std::size_t> where(15);
    for (std::size_t b : {0u, 3u, 14u}) {
        for (std::size_t i = 0; i < 15; ++i) where[i] = b * 15 + i;
        for (std::size_t j = 0; j < 7; ++j) {
            Pauli e = code.base().logical_x()[j].embedded(225, where);
            SyndromeTree tree = code.extract_syndromes(e);
            for (std::size_t lb = 0; lb < 15; ++lb) EXPECT_EQ(tree.at(1, lb), 0u);
            auto [pb, pos] = code.parent_slot(1, b, j);
            for (std::size_t tb = 0; tb < 7; ++tb) {
                std::uint32_t expect = tb == pb ? code.base().synd_x(std::uint64_t{1} << pos) : 0;
                EXPECT_EQ(tree.at(2, tb), expect);
            }
        }
    }
}

TEST(Extraction, GlobalLogicalsHaveCleanSyndromeAndUnitClass) {
    for (auto [base, levels] : {std::pair{StabilizerCode::quantum_hamming_15_7_3(), std::size_t{2}},
                                std::pair{StabilizerCode::code_422(), std::size_t{3}}}) {
        ConcatenatedCode code(base, levels);
        for (std::size_t ell = 0; ell < code.k_total(); ++ell) {
            Pauli e = global_logical_x(code, levels, ell);
            EXPECT_TRUE(code.extract_syndromes(e).all_zero());
            LogicalClass cls = code.true_logical_class(e);
            for (std::size_t i = 0; i < code.k_total(); ++i) {
                EXPECT_EQ(cls.x_bit(i), i == ell);
                EXPECT_FALSE(cls.z_bit(i));
            }
        }
    }
}

TEST(Extraction, LevelOneIsLinear) {
    // Only the physical level is linear; higher levels go through the
    // recovery frame, which is not additive across different syndromes.
    ConcatenatedCode code(StabilizerCode::quantum_hamming_15_7_3(), 2);
    std::mt19937 rng(404);
    for (int it = 0; it < 25; ++it) {
        Pauli a = random_x_error(rng, 225, 0.05);
        Pauli b = random_x_error(rng, 225, 0.05);
        SyndromeTree ta = code.extract_syndromes(a), tb = code.extract_syndromes(b);
        SyndromeTree tab = code.extract_syndromes(a * b);
        for (std::size_t blk = 0; blk < code.blocks_at(1); ++blk)
            EXPECT_EQ(tab.at(1, blk), ta.at(1, blk) ^ tb.at(1, blk));
    }
}

TEST(Extraction, TrueClassIsInvariantUnderBlockStabilizers) {
    ConcatenatedCode code(StabilizerCode::code_422(), 2);
    std::mt19937 rng(555);
    std::vector<std::size_t> where(4);
    for (int it = 0; it < 1000; ++it) {
        Pauli e = random_x_error(rng, 16, 0.2);
        Pauli sigma = Pauli::identity(16);
        for (std::size_t b = 0; b < 4; ++b) {
            for (std::size_t i = 0; i < 4; ++i) where[i] = b * 4 + i;
            for (const auto& g : code.base().stabilizers())
                if (rng() & 1) sigma *= g.embedded(16, where);
        }
        EXPECT_EQ(code.true_logical_class(e * sigma), code.true_logical_class(e));
        EXPECT_EQ(code.extract_syndromes(e * sigma), code.extract_syndromes(e));
    }
}

TEST(Extraction, FastXPathMatchesGeneralPath) {
    for (auto [base, levels] : {std::pair{StabilizerCode::quantum_hamming_15_7_3(), std::size_t{3}},
                                std::pair{StabilizerCode::code_422(), std::size_t{3}}}) {
        ConcatenatedCode code(base, levels);
        auto work = code.make_xwork();
        SyndromeTree tree = code.empty_tree();
        std::vector<std::uint64_t> top_class;
        std::mt19937 rng(777);
        const std::size_t n = base.n();
        for (int it = 0; it < 30; ++it) {
            Pauli e = random_x_error(rng, code.n_total(), 0.04);
            std::vector<std::uint64_t> masks(code.blocks_at(1));
            for (std::size_t b = 0; b < masks.size(); ++b) masks[b] = e.x().extract_bits(b * n, n);
            code.reduce_x(masks, tree, top_class, work);
            EXPECT_EQ(tree, code.extract_syndromes(e));
            LogicalClass cls = code.true_logical_class(e);
            for (std::size_t i = 0; i < code.k_total(); ++i) {
                EXPECT_EQ((top_class[i / 64] >> (i % 64)) & 1, cls.x_bit(i) ? 1u : 0u);
                EXPECT_FALSE(cls.z_bit(i));
            }
        }
    }
}

}  // namespace

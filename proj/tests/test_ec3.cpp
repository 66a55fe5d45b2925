#include <gtest/gtest.h>

#include <set>

#include "quads/ec3.hpp"
#include "quads/io.hpp"

using namespace quads;
using namespace quads::ec3;

namespace {

Assignment bits(std::initializer_list<std::uint8_t> b) { return Assignment(std::vector<std::uint8_t>(b)); }

Ec3Instance random_instance(Rng& rng, int n, int clauses) {
    auto pool = all_clauses(n);
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(std::min<std::size_t>(pool.size(), static_cast<std::size_t>(clauses)));
    return Ec3Instance(n, pool);
}

}  // namespace

TEST(ClauseSatisfied, ExactlyOneBitSet) {
    const auto c = make_clause(1, 2, 3);
    EXPECT_TRUE(clause_satisfied(c, bits({1, 0, 0})));
    EXPECT_FALSE(clause_satisfied(c, bits({1, 1, 0})));
    EXPECT_FALSE(clause_satisfied(c, bits({0, 0, 0})));
}

TEST(ClauseSatisfied, IndexOutOfRangeIsInputError) {
    EXPECT_THROW(clause_satisfied(make_clause(1, 2, 4), bits({1, 0, 0})), InputError);
}

TEST(Clause, OrderingEnforced) {
    EXPECT_THROW(make_clause(2, 1, 3), InputError);
    EXPECT_THROW(make_clause(1, 1, 3), InputError);
    EXPECT_THROW(make_clause(0, 1, 3), InputError);
    EXPECT_NO_THROW(make_clause(1, 5, 9));
}

TEST(Ec3Instance, RejectsOutOfRangeAndDuplicates) {
    EXPECT_THROW(Ec3Instance(3, {Clause{1, 2, 4}}), InputError);
    EXPECT_THROW(Ec3Instance(4, {Clause{1, 2, 3}, Clause{1, 2, 3}}), InputError);
    EXPECT_THROW(Ec3Instance(4, {Clause{2, 1, 3}}), InputError);
}

TEST(ViolationCount, Examples) {
    EXPECT_EQ(violation_count(Ec3Instance(3, {Clause{1, 2, 3}}), bits({1, 0, 0})), 0U);
    // (1,2,3): 1+0+0 = 1 ok; (1,2,4): 1+0+0 = 1 ok.
    EXPECT_EQ(violation_count(Ec3Instance(4, {Clause{1, 2, 3}, Clause{1, 2, 4}}), bits({1, 0, 0, 0})), 0U);
    EXPECT_EQ(violation_count(Ec3Instance(3, {Clause{1, 2, 3}}), bits({1, 1, 1})), 1U);
}

TEST(ViolationCount, LengthMismatchIsInputError) {
    EXPECT_THROW(violation_count(Ec3Instance(4, {Clause{1, 2, 3}}), bits({1, 0, 0})), InputError);
}

TEST(EnumerateSolutions, EmptyInstanceHasAllAssignments) {
    const auto sols = enumerate_solutions(Ec3Instance(2, {}));
    ASSERT_EQ(sols.size(), 4U);
    for (std::uint64_t k = 0; k < 4; ++k) {
        EXPECT_EQ(sols[k].to_index(), k);
    }
}

TEST(EnumerateSolutions, SingleClause) {
    // Oracle: check all 8 assignments by hand-written bit sums.
    std::vector<Assignment> expected;
    for (int z1 = 0; z1 <= 1; ++z1)
        for (int z2 = 0; z2 <= 1; ++z2)
            for (int z3 = 0; z3 <= 1; ++z3)
                if (z1 + z2 + z3 == 1)
                    expected.push_back(bits({static_cast<std::uint8_t>(z1), static_cast<std::uint8_t>(z2),
                                             static_cast<std::uint8_t>(z3)}));
    std::sort(expected.begin(), expected.end(), [](auto& a, auto& b) { return a.to_index() < b.to_index(); });
    const auto sols = enumerate_solutions(Ec3Instance(3, {Clause{1, 2, 3}}));
    EXPECT_EQ(sols, expected);
    EXPECT_EQ(sols, (std::vector<Assignment>{bits({1, 0, 0}), bits({0, 1, 0}), bits({0, 0, 1})}));
}

TEST(EnumerateSolutions, CapExceededIsResourceError) {
    EXPECT_THROW(enumerate_solutions(Ec3Instance(25, {}), 24), ResourceError);
    EXPECT_THROW(enumerate_solutions(Ec3Instance(10, {}), 8), ResourceError);
}

TEST(EnumerateSolutions, ZeroViolationsIffListed) {
    Rng rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 3 + trial % 6;
        const auto inst = random_instance(rng, n, 1 + trial % 5);
        const auto sols = solution_indices(inst);
        const std::set<std::uint64_t> sol_set(sols.begin(), sols.end());
        EXPECT_TRUE(std::is_sorted(sols.begin(), sols.end()));
        for (std::uint64_t k = 0; k < (std::uint64_t{1} << n); ++k) {
            const auto z = Assignment::from_index(k, n);
            EXPECT_EQ(violation_count(inst, z) == 0, sol_set.count(k) == 1);
            EXPECT_EQ(violation_count(inst, z), violation_count(inst, k));
        }
    }
}

TEST(Assignment, IndexRoundTripWithLeastSignificantFirst) {
    const auto z = Assignment::from_index(0b0110, 4);
    EXPECT_EQ(z.bits(), (std::vector<std::uint8_t>{0, 1, 1, 0}));
    EXPECT_EQ(z.bit(2), 1);
    EXPECT_EQ(z.to_index(), 0b0110U);
}

TEST(GenerateUsa, ThreeBitsHasNoUniqueInstance) {
    // (1,2,3) is the only clause and has three solutions.
    EXPECT_EQ(enumerate_solutions(Ec3Instance(3, {Clause{1, 2, 3}})).size(), 3U);
    Rng rng(0);
    EXPECT_THROW(generate_usa_instance(3, rng), InputError);
}

TEST(GenerateUsa, SmallestFeasibleSizeIsUnique) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(seed);
        const auto inst = generate_usa_instance(4, rng);
        EXPECT_EQ(enumerate_solutions(inst).size(), 1U);
    }
}

TEST(GenerateUsa, DeterministicGivenSeed) {
    Rng a(12345), b(12345);
    const auto i1 = generate_usa_instance(7, a);
    const auto i2 = generate_usa_instance(7, b);
    EXPECT_EQ(i1, i2);
    const auto s1 = io::instance_to_json(io::make_instance_record(i1, 12345)).dump();
    const auto s2 = io::instance_to_json(io::make_instance_record(i2, 12345)).dump();
    EXPECT_EQ(s1, s2);
}

TEST(GenerateUsa, SeventyFiveInstancesAtTenBits) {
    for (std::uint64_t seed = 0; seed < 75; ++seed) {
        Rng rng(derive_seed(99, {seed}));
        const auto inst = generate_usa_instance(10, rng);
        EXPECT_EQ(enumerate_solutions(inst).size(), 1U) << "seed " << seed;
    }
}

TEST(GenerateUsa, UniqueAndOrderedAcrossSizes) {
    for (int n = 4; n <= 16; ++n) {
        for (std::uint64_t seed = 0; seed < (n <= 12 ? 6U : 2U); ++seed) {
            Rng rng(derive_seed(5, {static_cast<std::uint64_t>(n), seed}));
            const auto inst = generate_usa_instance(n, rng);
            EXPECT_EQ(solution_indices(inst).size(), 1U) << "n=" << n;
            for (const auto& c : inst.clauses()) {
                EXPECT_TRUE(1 <= c.a && c.a < c.b && c.b < c.c && c.c <= n);
            }
        }
    }
}

TEST(GenerateUsa, RejectsTooFewBits) {
    Rng rng(1);
    EXPECT_THROW(generate_usa_instance(2, rng), InputError);
}

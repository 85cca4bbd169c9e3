#include "oracles.hpp"

#include "dyadic/audit.hpp"
#include "dyadic/io.hpp"
#include "dyadic/search.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

using namespace dyadic;

namespace {

const AdmissibleTriple two_one_zero(2.0, 1.0, 0.0);

} // namespace

TEST(RandomTest, DeterministicAndInRange)
{
    Random a(99);
    Random b(99);
    for (int i = 0; i < 1000; ++i) {
        const double x = a.uniform();
        EXPECT_EQ(x, b.uniform());
        EXPECT_GE(x, 0.0);
        EXPECT_LT(x, 1.0);
        EXPECT_LT(a.index(7), 7u);
        (void)b.index(7);
    }
}

TEST(Sampler, TwoPiecesGivesExtremizer)
{
    for (std::uint64_t seed : {1u, 2u, 77u})
        EXPECT_EQ(sample_admissible(two_one_zero, 2, seed), two_level_extremizer(two_one_zero));
}

TEST(Sampler, SixteenPiecesSeedSeven)
{
    const StepFunction g = sample_admissible(two_one_zero, 16, 7);
    EXPECT_TRUE(check_admissible(g, two_one_zero, 1e-9));
    EXPECT_LE(g.pieces(), 16u);
    EXPECT_LT(hardy_integral(g), 1.0 + std::log(2.0));
}

TEST(Sampler, Deterministic)
{
    EXPECT_EQ(sample_admissible(two_one_zero, 16, 7), sample_admissible(two_one_zero, 16, 7));
    EXPECT_NE(sample_admissible(two_one_zero, 16, 7), sample_admissible(two_one_zero, 16, 8));
}

TEST(Sampler, AlwaysAdmissibleAndBelowBound)
{
    Random rng(51);
    for (int trial = 0; trial < 2000; ++trial) {
        const AdmissibleTriple c = random_triple(rng);
        const std::size_t pieces = 2 + rng.index(63);
        const StepFunction g = sample_admissible(c, pieces, rng.next());
        ASSERT_TRUE(check_admissible(g, c, 1e-9)) << to_string(check_admissible(g, c, 1e-9).issue);
        EXPECT_LE(g.pieces(), pieces);
        EXPECT_LE(hardy_integral(g), sharp_bound(c) + 1e-9);
    }
}

TEST(Sampler, RejectsTooFewPieces) { EXPECT_THROW((void)sample_admissible(two_one_zero, 1, 1), DomainError); }

TEST(Search, TwoPiecesConvergesImmediately)
{
    const SearchTrace trace = maximize_hardy_integral(two_one_zero, 2, 100, 3);
    ASSERT_EQ(trace.records.size(), 1u);
    EXPECT_EQ(trace.records[0].iteration, 0u);
    EXPECT_EQ(trace.best, two_level_extremizer(two_one_zero));
    EXPECT_NEAR(trace.records[0].gap, 0.0, 1e-15);
    EXPECT_EQ(trace.records[0].l1_distance, 0.0);
}

TEST(Search, TraceInvariants)
{
    const SearchTrace trace = maximize_hardy_integral(two_one_zero, 32, 20000, 5);
    EXPECT_EQ(trace.seed, 5u);
    EXPECT_DOUBLE_EQ(trace.bound, sharp_bound(two_one_zero));
    double previous = -1.0;
    std::size_t last_iteration = 0;
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
        const SearchRecord& r = trace.records[i];
        EXPECT_GT(r.value, previous);
        EXPECT_LE(r.value, trace.bound + 1e-9);
        EXPECT_NEAR(r.gap, trace.bound - r.value, 1e-15);
        if (i > 0)
            EXPECT_GT(r.iteration, last_iteration);
        previous = r.value;
        last_iteration = r.iteration;
    }
    EXPECT_TRUE(check_admissible(trace.best, two_one_zero, 1e-9));
    EXPECT_EQ(hardy_integral(trace.best), trace.records.back().value);
}

TEST(Search, TwoSeedsBothConverge)
{
    for (std::uint64_t seed : {1u, 2u}) {
        const SearchTrace trace = maximize_hardy_integral(two_one_zero, 64, 100000, seed);
        EXPECT_LE(trace.records.back().gap, 1e-3) << "seed " << seed;
        EXPECT_LE(trace.records.back().l1_distance, 0.05) << "seed " << seed;
        for (const SearchRecord& r : trace.records) {
            if (r.gap <= 1e-3)
                EXPECT_LE(r.l1_distance, 0.05);
            if (r.gap <= 1e-5)
                EXPECT_LE(r.l1_distance, 0.01);
        }
    }
}

TEST(Search, Deterministic)
{
    const SearchTrace a = maximize_hardy_integral(two_one_zero, 16, 3000, 9);
    const SearchTrace b = maximize_hardy_integral(two_one_zero, 16, 3000, 9);
    EXPECT_EQ(a.best, b.best);
    ASSERT_EQ(a.records.size(), b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i)
        EXPECT_EQ(a.records[i].value, b.records[i].value);
}

TEST(Search, ArgumentValidation)
{
    EXPECT_THROW((void)maximize_hardy_integral(two_one_zero, 1, 10, 1), DomainError);
    EXPECT_THROW((void)maximize_hardy_integral(two_one_zero, 8, 0, 1), DomainError);
}

TEST(Audit, DefaultPresetPasses)
{
    const AuditReport report = audit_bounds(AuditConfig::preset("default", 1));
    EXPECT_TRUE(report.complete);
    EXPECT_TRUE(report.passed());
    std::set<std::string> names;
    for (const SuiteResult& s : report.suites) {
        EXPECT_EQ(s.violations, 0u) << s.suite;
        EXPECT_GT(s.cases, 0u) << s.suite;
        names.insert(s.suite);
    }
    for (const char* expected : {"upper_bound", "hardy_domination", "local_bound_domination", "sandwich_optimality",
                                 "split_identity", "monotone_approximation", "conditioning_mass"})
        EXPECT_TRUE(names.count(expected)) << expected;
}

TEST(Audit, EmptyConfigPasses)
{
    AuditConfig config = AuditConfig::preset("quick", 4);
    config.triples = 0;
    config.samples_per_triple = 0;
    config.leaf_functions = 0;
    config.random_sets = 0;
    const AuditReport report = audit_bounds(config);
    EXPECT_TRUE(report.passed());
    for (const SuiteResult& s : report.suites)
        EXPECT_EQ(s.cases, 0u) << s.suite;
}

TEST(Audit, ReportsAreByteIdentical)
{
    const auto a = to_json(audit_bounds(AuditConfig::preset("quick", 17))).dump();
    const auto b = to_json(audit_bounds(AuditConfig::preset("quick", 17))).dump();
    EXPECT_EQ(a, b);
    EXPECT_NE(a, to_json(audit_bounds(AuditConfig::preset("quick", 18))).dump());
}

TEST(Audit, UnknownPreset) { EXPECT_THROW((void)AuditConfig::preset("huge", 1), ConstraintError); }

TEST(Audit, TimeLimitMarksIncomplete)
{
    AuditConfig config = AuditConfig::preset("acceptance", 1);
    config.time_limit_seconds = 1e-9;
    const AuditReport report = audit_bounds(config);
    EXPECT_FALSE(report.complete);
}

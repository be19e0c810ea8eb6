#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "generator.hpp"
#include "nave/interp.hpp"
#include "nave/ir.hpp"

using namespace nave;

namespace {

Assignment assign(const PrimeField& f, std::initializer_list<int> values) {
    Assignment a;
    for (int v : values) {
        a.values.push_back(f.reduce(v));
    }
    return a;
}

// x*(x - 1) = 0 as the expression x^2 - x
Circuit boolean_circuit(const BigInt& p) {
    Circuit c;
    c.modulus = p;
    c.num_witnesses = 1;
    PrimeField f = c.field();
    Expression e;
    e.quadratic.push_back({f.one(), {0}, {0}});
    e.linear.push_back({f.neg(f.one()), {0}});
    c.opcodes.push_back(AssertZero{e});
    return c;
}

}  // namespace

TEST_CASE("eval_expression computes the quadratic-linear-constant sum") {
    PrimeField f(BigInt(17));
    Expression e;
    e.quadratic.push_back({f.one(), {0}, {1}});
    e.constant = f.reduce(-1);
    Assignment a = assign(f, {3, 6});
    CHECK(eval_expression(e, a, f).is_zero());

    Expression zero;
    CHECK(eval_expression(zero, a, f).is_zero());
}

TEST_CASE("eval_expression matches term-by-term recomputation on random inputs") {
    PrimeField f(BigInt(13));
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> d(0, 12);
    for (int t = 0; t < 200; ++t) {
        Expression e;
        e.quadratic.push_back({f.reduce(d(rng)), {0}, {1}});
        e.quadratic.push_back({f.reduce(d(rng)), {1}, {1}});
        e.linear.push_back({f.reduce(d(rng)), {0}});
        e.constant = f.reduce(d(rng));
        Assignment a = assign(f, {d(rng), d(rng)});
        BigInt expect = (e.quadratic[0].coeff.value() * a.values[0].value() * a.values[1].value() +
                         e.quadratic[1].coeff.value() * a.values[1].value() * a.values[1].value() +
                         e.linear[0].coeff.value() * a.values[0].value() + e.constant.value()) %
                        13;
        CHECK(eval_expression(e, a, f).value() == expect);
    }
}

TEST_CASE("boolean circuit accepts 0 and 1, rejects 2") {
    Circuit c = boolean_circuit(bn254_modulus());
    PrimeField f = c.field();
    CHECK(check_assignment(c, assign(f, {1})).satisfied());
    CHECK(check_assignment(c, assign(f, {0})).satisfied());
    CheckResult r = check_assignment(c, assign(f, {2}));
    CHECK(r.status == CheckStatus::Violated);
    CHECK(r.opcode_index == 0);
}

TEST_CASE("range check compares the integer value") {
    Circuit c;
    c.modulus = 97;
    c.num_witnesses = 1;
    c.opcodes.push_back(RangeCheck{{0}, 4});
    PrimeField f = c.field();
    CHECK(check_assignment(c, assign(f, {15})).satisfied());
    CHECK(check_assignment(c, assign(f, {16})).status == CheckStatus::Violated);
}

TEST_CASE("memory write then read is order sensitive") {
    Circuit c;
    c.modulus = 7;
    c.num_witnesses = 3;
    PrimeField f = c.field();
    MemoryInit mi;
    mi.block_id = 0;
    mi.witnesses = {{0}};
    Expression index;  // constant 0
    Expression w1_value;
    w1_value.linear.push_back({f.one(), {1}});
    Expression w2_value;
    w2_value.linear.push_back({f.one(), {2}});
    MemoryOp write{0, MemoryOpKind::Write, index, w1_value};
    MemoryOp read{0, MemoryOpKind::Read, index, w2_value};

    c.opcodes = {mi, write, read};
    // cell starts at w0, write makes it w1, read requires w2 == w1
    CHECK(check_assignment(c, assign(f, {4, 5, 5})).satisfied());
    CHECK(check_assignment(c, assign(f, {4, 5, 4})).status == CheckStatus::Violated);

    c.opcodes = {mi, read, write};
    // read now sees the initial value, so w2 must equal w0
    CHECK(check_assignment(c, assign(f, {4, 5, 4})).satisfied());
    CHECK(check_assignment(c, assign(f, {4, 5, 5})).status == CheckStatus::Violated);
}

TEST_CASE("out-of-range memory access is a distinct verdict") {
    Circuit c;
    c.modulus = 7;
    c.num_witnesses = 2;
    PrimeField f = c.field();
    MemoryInit mi;
    mi.block_id = 0;
    mi.witnesses = {{0}};
    Expression index;
    index.constant = f.reduce(3);  // block has a single cell
    Expression value;
    value.linear.push_back({f.one(), {1}});
    c.opcodes = {mi, MemoryOp{0, MemoryOpKind::Read, index, value}};
    CheckResult r = check_assignment(c, assign(f, {0, 0}));
    CHECK(r.status == CheckStatus::OutOfRange);
    CHECK(r.opcode_index == 1);
}

TEST_CASE("violations win over out-of-range reporting") {
    Circuit c;
    c.modulus = 7;
    c.num_witnesses = 1;
    PrimeField f = c.field();
    MemoryInit mi;
    mi.block_id = 0;
    mi.witnesses = {{0}};
    Expression index;
    index.constant = f.reduce(5);
    Expression value;
    value.linear.push_back({f.one(), {0}});
    Expression one;
    one.constant = f.one();
    c.opcodes = {mi, MemoryOp{0, MemoryOpKind::Read, index, value}, AssertZero{one}};
    CHECK(check_assignment(c, assign(f, {0})).status == CheckStatus::Violated);
}

TEST_CASE("enumerate boolean circuit at p=7") {
    Circuit c = boolean_circuit(BigInt(7));
    EnumerationResult r = enumerate_satisfying(c);
    REQUIRE(r.satisfying.size() == 2);
    CHECK(r.satisfying[0].values[0].value() == 0);
    CHECK(r.satisfying[1].values[0].value() == 1);
    CHECK(r.out_of_range.empty());
}

TEST_CASE("enumerate inverse pairs at p=5") {
    Circuit c;
    c.modulus = 5;
    c.num_witnesses = 2;
    PrimeField f = c.field();
    Expression e;
    e.quadratic.push_back({f.one(), {0}, {1}});
    e.constant = f.reduce(-1);
    c.opcodes.push_back(AssertZero{e});
    EnumerationResult r = enumerate_satisfying(c);
    std::vector<std::pair<int, int>> pairs;
    for (const Assignment& a : r.satisfying) {
        pairs.emplace_back(static_cast<int>(a.values[0].value()),
                           static_cast<int>(a.values[1].value()));
    }
    std::vector<std::pair<int, int>> expect{{1, 1}, {3, 2}, {2, 3}, {4, 4}};
    std::sort(pairs.begin(), pairs.end());
    std::sort(expect.begin(), expect.end());
    CHECK(pairs == expect);
}

TEST_CASE("enumerate with no constraints lists the whole domain") {
    Circuit c;
    c.modulus = 3;
    c.num_witnesses = 1;
    EnumerationResult r = enumerate_satisfying(c);
    REQUIRE(r.satisfying.size() == 3);
}

TEST_CASE("enumeration agrees with check_assignment pointwise") {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 50; ++t) {
        Circuit c = navetest::random_circuit(rng);
        EnumerationResult r = enumerate_satisfying(c);
        for (const Assignment& a : r.satisfying) {
            CHECK(check_assignment(c, a).satisfied());
        }
        for (const Assignment& a : r.out_of_range) {
            CHECK(check_assignment(c, a).status == CheckStatus::OutOfRange);
        }
    }
}

TEST_CASE("enumeration over the budget throws") {
    Circuit c;
    c.modulus = bn254_modulus();
    c.num_witnesses = 1;
    CHECK_THROWS_AS(enumerate_satisfying(c), BudgetExceeded);
}

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "generator.hpp"
#include "nave/encode_ff.hpp"
#include "nave/encode_int.hpp"
#include "nave/interp.hpp"
#include "nave/smtsolve.hpp"

using namespace nave;
using smtsolve::Answer;

namespace {

const char* kBn254 =
    "21888242871839275222246405745257275088548364400416034343698204186575808495617";

std::string ff_header() {
    return std::string("(set-logic QF_FF)\n(define-sort F () (_ FiniteField ") + kBn254 +
           "))\n";
}

}  // namespace

TEST_CASE("boolean circuit with x in both roots verifies") {
    // x^2 - x = 0 and not(1 + x - x^2 = 1): contradiction
    std::string script =
        ff_header() +
        "(declare-const w0 F)\n"
        "(assert (= (ff.add (ff.mul (as ff1 F) w0 w0) (ff.mul "
        "(as ff21888242871839275222246405745257275088548364400416034343698204186575808495616 F) w0)) "
        "(as ff0 F)))\n"
        "(assert (not (= (ff.add (ff.mul "
        "(as ff21888242871839275222246405745257275088548364400416034343698204186575808495616 F)"
        " w0 w0) (ff.mul (as ff1 F) w0) (as ff1 F)) (as ff1 F))))\n"
        "(check-sat)\n";
    auto out = smtsolve::run_script(script);
    CHECK(out.result.answer == Answer::Unsat);
    CHECK(out.stdout_text == "unsat\n");
}

TEST_CASE("dropping the x=1 disjunct yields the x=1 model") {
    std::string script =
        ff_header() +
        "(declare-const w0 F)\n"
        "(assert (= (ff.add (ff.mul (as ff1 F) w0 w0) (ff.mul "
        "(as ff21888242871839275222246405745257275088548364400416034343698204186575808495616 F)"
        " w0)) (as ff0 F)))\n"
        "(assert (not (= (ff.add (ff.mul "
        "(as ff21888242871839275222246405745257275088548364400416034343698204186575808495616 F)"
        " w0) (as ff1 F)) (as ff1 F))))\n"
        "(check-sat)\n(get-value (w0))\n";
    auto out = smtsolve::run_script(script);
    REQUIRE(out.result.answer == Answer::Sat);
    CHECK(out.result.model.at("w0") == 1);
    CHECK(out.stdout_text == "sat\n((w0 (as ff1 F)))\n");
}

TEST_CASE("eight-bit bitsum accepts 255 and rejects 256") {
    Circuit c;
    c.modulus = bn254_modulus();
    c.num_witnesses = 1;
    c.opcodes.push_back(RangeCheck{{0}, 8});
    for (int pin : {255, 256}) {
        SmtScript script = encode_circuit_ff(c);
        script.assertions.push_back(
            Term::list({Term::sym("="), Term::sym("w0"), Term::ff(pin)}));
        auto out = smtsolve::run_script(to_smtlib2(script));
        CHECK(out.result.answer == (pin == 255 ? Answer::Sat : Answer::Unsat));
    }
}

TEST_CASE("free disequality at bn254 finds some witness") {
    std::string script = ff_header() +
                         "(declare-const w0 F)\n"
                         "(assert (not (= w0 (as ff5 F))))\n"
                         "(check-sat)\n(get-value (w0))\n";
    auto out = smtsolve::run_script(script);
    REQUIRE(out.result.answer == Answer::Sat);
    CHECK(out.result.model.at("w0") != 5);
}

TEST_CASE("integer chain propagates to a contradiction") {
    std::string script =
        "(set-logic QF_NIA)\n"
        "(declare-const w0 Int)\n(declare-const w1 Int)\n"
        "(assert (and (<= 0 w0) (< w0 13)))\n"
        "(assert (and (<= 0 w1) (< w1 13)))\n"
        "(assert (= (mod (+ (* 1 w0) 12) 13) 0))\n"   // w0 = 1
        "(assert (= (mod (+ (* 1 w1) (* 12 w0)) 13) 0))\n"  // w1 = w0
        "(assert (not (= w1 1)))\n"
        "(check-sat)\n";
    auto out = smtsolve::run_script(script);
    CHECK(out.result.answer == Answer::Unsat);
}

TEST_CASE("quadratic residues are found at a large prime") {
    // x^2 = 4 has roots {2, p-2}; excluding both is unsat, excluding one
    // leaves the other
    std::string base =
        ff_header() +
        "(declare-const w0 F)\n"
        "(assert (= (ff.add (ff.mul (as ff1 F) w0 w0) "
        "(as ff21888242871839275222246405745257275088548364400416034343698204186575808495613 F))"
        " (as ff0 F)))\n";
    auto sat_with = [&](const std::string& extra) {
        auto out = smtsolve::run_script(base + extra + "(check-sat)\n(get-value (w0))\n");
        return out;
    };
    auto both = sat_with("");
    REQUIRE(both.result.answer == Answer::Sat);
    BigInt root = both.result.model.at("w0");
    BigInt p(kBn254);
    CHECK((root == 2 || root == p - 2));

    auto one = sat_with("(assert (not (= w0 (as ff2 F))))\n");
    REQUIRE(one.result.answer == Answer::Sat);
    CHECK(one.result.model.at("w0") == p - 2);

    auto none = sat_with(
        "(assert (not (= w0 (as ff2 F))))\n(assert (not (= w0 "
        "(as ff21888242871839275222246405745257275088548364400416034343698204186575808495615 "
        "F))))\n");
    CHECK(none.result.answer == Answer::Unsat);
}

TEST_CASE("sat answers echo canonical residues for integer symbols") {
    std::string script =
        "(set-logic QF_NIA)\n"
        "(declare-const w0 Int)\n"
        "(assert (and (<= 0 w0) (< w0 17)))\n"
        "(assert (= (mod (+ (* 1 w0) 1) 17) 0))\n"
        "(check-sat)\n(get-value (w0))\n";
    auto out = smtsolve::run_script(script);
    REQUIRE(out.result.answer == Answer::Sat);
    CHECK(out.result.model.at("w0") == 16);
    CHECK(out.stdout_text == "sat\n((w0 16))\n");
}

TEST_CASE("unsupported constructs come back unknown, never a verdict") {
    auto out = smtsolve::run_script("(declare-const a Real)\n(check-sat)\n");
    CHECK(out.result.answer == Answer::Unknown);
    CHECK_FALSE(out.result.reason.empty());
    CHECK(out.stdout_text == "unknown\n");

    auto bad = smtsolve::run_script("(assert (= x");
    CHECK(bad.result.answer == Answer::Unknown);
}

TEST_CASE("empty script is unknown rather than a spurious verdict") {
    auto out = smtsolve::run_script("");
    CHECK(out.result.answer == Answer::Unknown);
}

TEST_CASE("differential: verdict equals brute force over generated circuits") {
    std::mt19937_64 rng(20260816);
    int checked = 0;
    for (int t = 0; t < 500; ++t) {
        Circuit c = navetest::random_circuit(rng);
        bool expect = enumerate_satisfying(c).any_model();
        auto ff = smtsolve::run_script(to_smtlib2(encode_circuit_ff(c)));
        auto iv = smtsolve::run_script(to_smtlib2(encode_circuit_int(c)));
        REQUIRE(ff.result.answer != Answer::Unknown);
        REQUIRE(iv.result.answer != Answer::Unknown);
        CHECK((ff.result.answer == Answer::Sat) == expect);
        CHECK((iv.result.answer == Answer::Sat) == expect);
        ++checked;
    }
    CHECK(checked == 500);
}

TEST_CASE("sat models satisfy the original assertions by interpretation") {
    std::mt19937_64 rng(101);
    for (int t = 0; t < 200; ++t) {
        Circuit c = navetest::random_circuit(rng);
        auto out = smtsolve::run_script(to_smtlib2(encode_circuit_ff(c)));
        if (out.result.answer != Answer::Sat) {
            continue;
        }
        PrimeField f = c.field();
        Assignment a;
        for (std::uint32_t w = 0; w < c.num_witnesses; ++w) {
            a.values.push_back(f.reduce(out.result.model.at(witness_symbol({w}))));
        }
        CheckResult r = check_assignment(c, a);
        bool ok = r.status == CheckStatus::Satisfied || r.status == CheckStatus::OutOfRange;
        CHECK(ok);
    }
}

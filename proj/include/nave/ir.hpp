#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nave/field.hpp"

namespace nave {

/// Index of a circuit witness (a field variable).
struct WitnessIndex {
    std::uint32_t index{0};

    friend bool operator==(const WitnessIndex&, const WitnessIndex&) = default;
    friend auto operator<=>(const WitnessIndex&, const WitnessIndex&) = default;
};

struct QuadTerm {
    FieldElement coeff;
    WitnessIndex left;
    WitnessIndex right;

    friend bool operator==(const QuadTerm&, const QuadTerm&) = default;
};

struct LinTerm {
    FieldElement coeff;
    WitnessIndex witness;

    friend bool operator==(const LinTerm&, const LinTerm&) = default;
};

/// Degree-<=2 polynomial over witnesses: sum of quadratic terms, linear terms
/// and a constant.
struct Expression {
    std::vector<QuadTerm> quadratic;
    std::vector<LinTerm> linear;
    FieldElement constant;

    bool is_constant() const { return quadratic.empty() && linear.empty(); }

    /// True when the expression is exactly one witness: a single linear term
    /// with coefficient 1, no quadratic part, zero constant.
    std::optional<WitnessIndex> as_single_witness() const {
        if (quadratic.empty() && linear.size() == 1 && linear[0].coeff.is_one() &&
            constant.is_zero()) {
            return linear[0].witness;
        }
        return std::nullopt;
    }

    friend bool operator==(const Expression&, const Expression&) = default;
};

struct AssertZero {
    Expression expr;

    friend bool operator==(const AssertZero&, const AssertZero&) = default;
};

struct RangeCheck {
    WitnessIndex witness;
    std::uint32_t bits{0};

    friend bool operator==(const RangeCheck&, const RangeCheck&) = default;
};

struct MemoryInit {
    std::uint32_t block_id{0};
    std::vector<WitnessIndex> witnesses;

    friend bool operator==(const MemoryInit&, const MemoryInit&) = default;
};

enum class MemoryOpKind { Read, Write };

struct MemoryOp {
    std::uint32_t block_id{0};
    MemoryOpKind kind{MemoryOpKind::Read};
    Expression index;
    Expression value;

    friend bool operator==(const MemoryOp&, const MemoryOp&) = default;
};

struct BrilligCall {
    std::string function;
    std::vector<Expression> inputs;
    std::vector<WitnessIndex> outputs;

    friend bool operator==(const BrilligCall&, const BrilligCall&) = default;
};

using Opcode = std::variant<AssertZero, RangeCheck, MemoryInit, MemoryOp, BrilligCall>;

/// Function name whose BrilligCalls carry verification conditions.
inline constexpr const char* kVerifyAssertName = "verify_assert";

struct Circuit {
    BigInt modulus;
    std::uint32_t num_witnesses{0};
    std::vector<std::uint32_t> public_inputs;  // sorted, deduplicated
    std::vector<Opcode> opcodes;

    PrimeField field() const { return PrimeField(modulus); }

    friend bool operator==(const Circuit&, const Circuit&) = default;
};

struct Diagnostic {
    std::optional<std::size_t> opcode_index;  // empty for circuit-level problems
    std::string message;
};

namespace detail {

inline void check_expression_witnesses(const Expression& e, std::uint32_t num_witnesses,
                                       std::size_t op_index, const char* what,
                                       std::vector<Diagnostic>& out) {
    auto bad = [&](WitnessIndex w) { return w.index >= num_witnesses; };
    for (const QuadTerm& t : e.quadratic) {
        if (bad(t.left) || bad(t.right)) {
            out.push_back({op_index, std::string(what) + ": witness index out of range"});
            return;
        }
    }
    for (const LinTerm& t : e.linear) {
        if (bad(t.witness)) {
            out.push_back({op_index, std::string(what) + ": witness index out of range"});
            return;
        }
    }
}

inline void check_expression_residues(const Expression& e, const BigInt& p, std::size_t op_index,
                                      const char* what, std::vector<Diagnostic>& out) {
    auto canonical = [&](const FieldElement& v) { return v.value() >= 0 && v.value() < p; };
    bool ok = canonical(e.constant);
    for (const QuadTerm& t : e.quadratic) {
        ok = ok && canonical(t.coeff);
    }
    for (const LinTerm& t : e.linear) {
        ok = ok && canonical(t.coeff);
    }
    if (!ok) {
        out.push_back({op_index, std::string(what) + ": coefficient not a canonical residue"});
    }
}

}  // namespace detail

/// Structural validation. Returns one diagnostic per violation; an empty list
/// means every type invariant holds and downstream modules accept the circuit.
inline std::vector<Diagnostic> validate(const Circuit& c) {
    std::vector<Diagnostic> out;

    if (c.modulus < 2) {
        out.push_back({std::nullopt, "modulus must be >= 2"});
        return out;  // nothing below is meaningful without a usable modulus
    }
    if (!is_probable_prime(c.modulus)) {
        out.push_back({std::nullopt, "modulus failed the primality test"});
    }

    PrimeField f(c.modulus);
    const unsigned p_bits = f.bit_length();

    for (std::size_t i = 0; i < c.public_inputs.size(); ++i) {
        if (c.public_inputs[i] >= c.num_witnesses) {
            out.push_back({std::nullopt, "public input index out of range"});
            break;
        }
        if (i > 0 && c.public_inputs[i] <= c.public_inputs[i - 1]) {
            out.push_back({std::nullopt, "public inputs must be strictly increasing"});
            break;
        }
    }

    // block id -> length, in program order
    std::map<std::uint32_t, std::size_t> blocks;

    for (std::size_t i = 0; i < c.opcodes.size(); ++i) {
        const Opcode& op = c.opcodes[i];
        if (const auto* az = std::get_if<AssertZero>(&op)) {
            detail::check_expression_witnesses(az->expr, c.num_witnesses, i, "assert_zero", out);
            detail::check_expression_residues(az->expr, c.modulus, i, "assert_zero", out);
        } else if (const auto* rc = std::get_if<RangeCheck>(&op)) {
            if (rc->witness.index >= c.num_witnesses) {
                out.push_back({i, "range: witness index out of range"});
            }
            if (rc->bits < 1) {
                out.push_back({i, "range: bits must be >= 1"});
            } else if (rc->bits >= p_bits) {
                out.push_back({i, "range: bits must be < bit-length of the modulus"});
            }
        } else if (const auto* mi = std::get_if<MemoryInit>(&op)) {
            if (blocks.count(mi->block_id)) {
                out.push_back({i, "mem_init: block id already initialized"});
            } else {
                blocks[mi->block_id] = mi->witnesses.size();
            }
            for (WitnessIndex w : mi->witnesses) {
                if (w.index >= c.num_witnesses) {
                    out.push_back({i, "mem_init: witness index out of range"});
                    break;
                }
            }
        } else if (const auto* mo = std::get_if<MemoryOp>(&op)) {
            if (!blocks.count(mo->block_id)) {
                out.push_back({i, "mem_op: uninitialized block"});
            }
            detail::check_expression_witnesses(mo->index, c.num_witnesses, i, "mem_op index", out);
            detail::check_expression_residues(mo->index, c.modulus, i, "mem_op index", out);
            detail::check_expression_witnesses(mo->value, c.num_witnesses, i, "mem_op value", out);
            detail::check_expression_residues(mo->value, c.modulus, i, "mem_op value", out);
            if (mo->kind == MemoryOpKind::Read && !mo->value.as_single_witness()) {
                out.push_back({i, "mem_op: read value must be a single witness"});
            }
        } else if (const auto* bc = std::get_if<BrilligCall>(&op)) {
            for (const Expression& e : bc->inputs) {
                detail::check_expression_witnesses(e, c.num_witnesses, i, "brillig input", out);
                detail::check_expression_residues(e, c.modulus, i, "brillig input", out);
            }
            for (WitnessIndex w : bc->outputs) {
                if (w.index >= c.num_witnesses) {
                    out.push_back({i, "brillig: output witness index out of range"});
                    break;
                }
            }
        }
    }
    return out;
}

/// Lengths of the memory blocks a valid circuit initializes.
inline std::map<std::uint32_t, std::size_t> block_lengths(const Circuit& c) {
    std::map<std::uint32_t, std::size_t> blocks;
    for (const Opcode& op : c.opcodes) {
        if (const auto* mi = std::get_if<MemoryInit>(&op)) {
            blocks.emplace(mi->block_id, mi->witnesses.size());
        }
    }
    return blocks;
}

}  // namespace nave

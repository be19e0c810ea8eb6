#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "nave/ir.hpp"

namespace nave {

/// Total witness assignment: values[i] is the value of witness i.
struct Assignment {
    std::vector<FieldElement> values;

    const FieldElement& operator[](WitnessIndex w) const { return values[w.index]; }

    friend bool operator==(const Assignment&, const Assignment&) = default;
    friend auto operator<=>(const Assignment&, const Assignment&) = default;
};

/// Concrete memory: block id -> cells. Lengths are fixed at mem_init.
struct MemoryState {
    std::map<std::uint32_t, std::vector<FieldElement>> blocks;
};

enum class CheckStatus {
    Satisfied,
    Violated,
    /// Every constraint held, but some memory index evaluated outside its
    /// block. The SMT encodings leave that access unconstrained (the access
    /// implications are all vacuous), so the assignment still satisfies the
    /// encoded formula; it is reported distinctly because it marks a hazard.
    OutOfRange,
};

struct CheckResult {
    CheckStatus status{CheckStatus::Satisfied};
    std::optional<std::size_t> opcode_index;  // first violation / first hazard

    bool satisfied() const { return status == CheckStatus::Satisfied; }
};

inline FieldElement eval_expression(const Expression& e, const Assignment& a,
                                    const PrimeField& f) {
    FieldElement acc = e.constant;
    for (const QuadTerm& t : e.quadratic) {
        acc = f.add(acc, f.mul(t.coeff, f.mul(a[t.left], a[t.right])));
    }
    for (const LinTerm& t : e.linear) {
        acc = f.add(acc, f.mul(t.coeff, a[t.witness]));
    }
    return acc;
}

/// Execute the opcodes in order against a concrete memory state.
///
/// Out-of-range accesses mirror the encoding semantics: a read checks
/// nothing, a write mutates nothing, and execution continues. A constraint
/// violation anywhere yields Violated; otherwise a touched hazard yields
/// OutOfRange; otherwise Satisfied.
inline CheckResult check_assignment(const Circuit& c, const Assignment& a) {
    if (a.values.size() != c.num_witnesses) {
        throw std::invalid_argument("assignment must cover every witness");
    }
    PrimeField f = c.field();
    MemoryState mem;
    std::optional<std::size_t> first_out_of_range;

    for (std::size_t i = 0; i < c.opcodes.size(); ++i) {
        const Opcode& op = c.opcodes[i];
        if (const auto* az = std::get_if<AssertZero>(&op)) {
            if (!eval_expression(az->expr, a, f).is_zero()) {
                return {CheckStatus::Violated, i};
            }
        } else if (const auto* rc = std::get_if<RangeCheck>(&op)) {
            if (a[rc->witness].value() >= (BigInt(1) << rc->bits)) {
                return {CheckStatus::Violated, i};
            }
        } else if (const auto* mi = std::get_if<MemoryInit>(&op)) {
            std::vector<FieldElement> cells;
            cells.reserve(mi->witnesses.size());
            for (WitnessIndex w : mi->witnesses) {
                cells.push_back(a[w]);
            }
            mem.blocks[mi->block_id] = std::move(cells);
        } else if (const auto* mo = std::get_if<MemoryOp>(&op)) {
            std::vector<FieldElement>& cells = mem.blocks.at(mo->block_id);
            BigInt index = eval_expression(mo->index, a, f).value();
            if (index >= cells.size()) {
                if (!first_out_of_range) {
                    first_out_of_range = i;
                }
                continue;
            }
            std::size_t k = static_cast<std::size_t>(index);
            FieldElement value = eval_expression(mo->value, a, f);
            if (mo->kind == MemoryOpKind::Read) {
                if (value != cells[k]) {
                    return {CheckStatus::Violated, i};
                }
            } else {
                cells[k] = value;
            }
        }
        // BrilligCall: no constraint.
    }

    if (first_out_of_range) {
        return {CheckStatus::OutOfRange, *first_out_of_range};
    }
    return {CheckStatus::Satisfied, std::nullopt};
}

class BudgetExceeded : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Result of exhaustive enumeration. `satisfying` holds the clean satisfying
/// assignments; `out_of_range` holds assignments that satisfy every constraint
/// but touch an out-of-range memory access. Their union is exactly the model
/// set of the SMT encodings projected onto the witnesses.
struct EnumerationResult {
    std::vector<Assignment> satisfying;
    std::vector<Assignment> out_of_range;

    bool any_model() const { return !satisfying.empty() || !out_of_range.empty(); }
};

/// Brute-force every assignment in lexicographic order (witness 0 fastest).
/// Requires p^num_witnesses <= budget.
inline EnumerationResult enumerate_satisfying(const Circuit& c, std::uint64_t budget = 1000000) {
    BigInt total = 1;
    for (std::uint32_t i = 0; i < c.num_witnesses; ++i) {
        total *= c.modulus;
        if (total > budget) {
            throw BudgetExceeded("p^num_witnesses exceeds the enumeration budget");
        }
    }

    PrimeField f = c.field();
    EnumerationResult result;
    Assignment a;
    a.values.assign(c.num_witnesses, f.zero());

    while (true) {
        CheckResult r = check_assignment(c, a);
        if (r.status == CheckStatus::Satisfied) {
            result.satisfying.push_back(a);
        } else if (r.status == CheckStatus::OutOfRange) {
            result.out_of_range.push_back(a);
        }
        // odometer increment
        std::uint32_t i = 0;
        for (; i < c.num_witnesses; ++i) {
            a.values[i] = f.add(a.values[i], f.one());
            if (!a.values[i].is_zero()) {
                break;
            }
        }
        if (i == c.num_witnesses) {
            break;
        }
    }
    return result;
}

}  // namespace nave

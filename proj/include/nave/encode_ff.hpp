#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nave/encode_common.hpp"
#include "nave/ir.hpp"
#include "nave/smt.hpp"

namespace nave {

/// Translate an Expression into a field term: an n-ary ff.add over ff.mul
/// products and the constant. A single summand is emitted bare; no summands
/// collapse to the zero constant.
inline Term encode_expression_ff(const Expression& e, const PrimeField&,
                                 const EncodeOptions& opts = {}) {
    std::vector<Term> summands;
    for (const QuadTerm& t : e.quadratic) {
        if (opts.simplify && t.coeff.is_zero()) {
            continue;
        }
        std::vector<Term> args;
        if (!(opts.simplify && t.coeff.is_one())) {
            args.push_back(Term::ff(t.coeff.value()));
        }
        args.push_back(Term::sym(witness_symbol(t.left)));
        args.push_back(Term::sym(witness_symbol(t.right)));
        summands.push_back(Term::list({Term::sym("ff.mul")}));
        for (Term& a : args) {
            summands.back().append(std::move(a));
        }
    }
    for (const LinTerm& t : e.linear) {
        if (opts.simplify && t.coeff.is_zero()) {
            continue;
        }
        if (opts.simplify && t.coeff.is_one()) {
            summands.push_back(Term::sym(witness_symbol(t.witness)));
        } else {
            summands.push_back(Term::list(
                {Term::sym("ff.mul"), Term::ff(t.coeff.value()), Term::sym(witness_symbol(t.witness))}));
        }
    }
    if (!e.constant.is_zero()) {
        summands.push_back(Term::ff(e.constant.value()));
    }

    if (summands.empty()) {
        return Term::ff(0);
    }
    if (summands.size() == 1) {
        return summands[0];
    }
    Term add = Term::list({Term::sym("ff.add")});
    for (Term& s : summands) {
        add.append(std::move(s));
    }
    return add;
}

/// AssertZero(exp): the encoded expression equals the zero constant.
inline Term encode_assert_zero_ff(const Expression& e, const PrimeField& f,
                                  const EncodeOptions& opts = {}) {
    return Term::list({Term::sym("="), encode_expression_ff(e, f, opts), Term::ff(0)});
}

struct FfOpcodeEncoding {
    std::vector<Declaration> declarations;
    std::vector<Term> assertions;
};

/// Range(x, n): n fresh bits, a bitsum equality and one booleanity constraint
/// per bit (bit * (bit - 1) = 0, with -1 as the canonical residue p-1).
inline FfOpcodeEncoding encode_range_ff(WitnessIndex w, std::uint32_t bits,
                                        std::size_t opcode_index, const PrimeField& f,
                                        const EncodeOptions& = {}) {
    FfOpcodeEncoding out;
    Term bitsum = Term::list({Term::sym("ff.bitsum")});
    for (std::uint32_t j = 0; j < bits; ++j) {
        std::string bit = range_bit_symbol(opcode_index, j);
        out.declarations.push_back({bit, "F"});
        bitsum.append(Term::sym(bit));
    }
    out.assertions.push_back(
        Term::list({Term::sym("="), std::move(bitsum), Term::sym(witness_symbol(w))}));
    const BigInt minus_one = f.modulus() - 1;
    for (std::uint32_t j = 0; j < bits; ++j) {
        Term bit = Term::sym(range_bit_symbol(opcode_index, j));
        Term decrement = Term::list({Term::sym("ff.add"), bit, Term::ff(minus_one)});
        Term product = Term::list({Term::sym("ff.mul"), bit, std::move(decrement)});
        out.assertions.push_back(Term::list({Term::sym("="), std::move(product), Term::ff(0)}));
    }
    return out;
}

/// MemoryInit(id, xs): generation-0 cells, each pinned to its source witness.
inline FfOpcodeEncoding encode_memory_init_ff(std::uint32_t block_id,
                                              const std::vector<WitnessIndex>& witnesses,
                                              MutationIndexMap& mi) {
    FfOpcodeEncoding out;
    for (std::size_t i = 0; i < witnesses.size(); ++i) {
        std::string cell = memory_cell_symbol(block_id, i, 0);
        out.declarations.push_back({cell, "F"});
        out.assertions.push_back(Term::list(
            {Term::sym("="), Term::sym(cell), Term::sym(witness_symbol(witnesses[i]))}));
    }
    mi.counts[block_id] = 0;
    return out;
}

/// Read: per cell k, (index = k) implies the current-generation cell equals
/// the value expression. The generation is unchanged.
inline FfOpcodeEncoding encode_memory_read_ff(std::uint32_t block_id, const Expression& index,
                                              const Expression& value, std::size_t block_length,
                                              const MutationIndexMap& mi, const PrimeField& f,
                                              const EncodeOptions& opts = {}) {
    FfOpcodeEncoding out;
    const std::uint32_t gen = mi.at(block_id);
    Term index_term = encode_expression_ff(index, f, opts);
    Term value_term = encode_expression_ff(value, f, opts);
    for (std::size_t k = 0; k < block_length; ++k) {
        Term antecedent = Term::list({Term::sym("="), index_term, Term::ff(k)});
        Term consequent = Term::list(
            {Term::sym("="), Term::sym(memory_cell_symbol(block_id, k, gen)), value_term});
        out.assertions.push_back(
            Term::list({Term::sym("=>"), std::move(antecedent), std::move(consequent)}));
    }
    return out;
}

/// Write: a full next generation of cells; the addressed cell takes the value
/// expression, every other cell keeps its previous value.
inline FfOpcodeEncoding encode_memory_write_ff(std::uint32_t block_id, const Expression& index,
                                               const Expression& value, std::size_t block_length,
                                               MutationIndexMap& mi, const PrimeField& f,
                                               const EncodeOptions& opts = {}) {
    FfOpcodeEncoding out;
    const std::uint32_t gen = mi.at(block_id);
    const std::uint32_t next = gen + 1;
    Term index_term = encode_expression_ff(index, f, opts);
    Term value_term = encode_expression_ff(value, f, opts);
    for (std::size_t k = 0; k < block_length; ++k) {
        out.declarations.push_back({memory_cell_symbol(block_id, k, next), "F"});
    }
    for (std::size_t k = 0; k < block_length; ++k) {
        Term antecedent = Term::list({Term::sym("="), index_term, Term::ff(k)});
        Term consequent = Term::list(
            {Term::sym("="), Term::sym(memory_cell_symbol(block_id, k, next)), value_term});
        out.assertions.push_back(
            Term::list({Term::sym("=>"), std::move(antecedent), std::move(consequent)}));
    }
    for (std::size_t k = 0; k < block_length; ++k) {
        Term antecedent = Term::list(
            {Term::sym("not"), Term::list({Term::sym("="), index_term, Term::ff(k)})});
        Term consequent = Term::list({Term::sym("="),
                                      Term::sym(memory_cell_symbol(block_id, k, next)),
                                      Term::sym(memory_cell_symbol(block_id, k, gen))});
        out.assertions.push_back(
            Term::list({Term::sym("=>"), std::move(antecedent), std::move(consequent)}));
    }
    mi.counts[block_id] = next;
    return out;
}

/// Translate a whole circuit: one field symbol per witness, then the opcodes
/// in program order, threading the mutation index map. BrilligCall
/// contributes nothing.
inline SmtScript encode_circuit_ff(const Circuit& c, const EncodeOptions& opts = {}) {
    PrimeField f = c.field();
    SmtScript script;
    script.logic = opts.logic.empty() ? "QF_FF" : opts.logic;
    script.field_modulus = c.modulus;
    script.value_modulus = c.modulus;

    for (std::uint32_t i = 0; i < c.num_witnesses; ++i) {
        script.declarations.push_back({witness_symbol({i}), "F"});
        script.goal_symbols.push_back(witness_symbol({i}));
    }

    std::map<std::uint32_t, std::size_t> lengths;
    MutationIndexMap mi;
    for (std::size_t i = 0; i < c.opcodes.size(); ++i) {
        const Opcode& op = c.opcodes[i];
        FfOpcodeEncoding enc;
        if (const auto* az = std::get_if<AssertZero>(&op)) {
            enc.assertions.push_back(encode_assert_zero_ff(az->expr, f, opts));
        } else if (const auto* rc = std::get_if<RangeCheck>(&op)) {
            enc = encode_range_ff(rc->witness, rc->bits, i, f, opts);
        } else if (const auto* init = std::get_if<MemoryInit>(&op)) {
            lengths[init->block_id] = init->witnesses.size();
            enc = encode_memory_init_ff(init->block_id, init->witnesses, mi);
        } else if (const auto* mo = std::get_if<MemoryOp>(&op)) {
            if (mo->kind == MemoryOpKind::Read) {
                enc = encode_memory_read_ff(mo->block_id, mo->index, mo->value,
                                            lengths.at(mo->block_id), mi, f, opts);
            } else {
                enc = encode_memory_write_ff(mo->block_id, mo->index, mo->value,
                                             lengths.at(mo->block_id), mi, f, opts);
            }
        }
        for (Declaration& d : enc.declarations) {
            script.declarations.push_back(std::move(d));
        }
        for (Term& a : enc.assertions) {
            script.assertions.push_back(std::move(a));
        }
    }
    return script;
}

}  // namespace nave

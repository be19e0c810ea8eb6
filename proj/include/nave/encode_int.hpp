#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nave/encode_common.hpp"
#include "nave/ir.hpp"
#include "nave/smt.hpp"

namespace nave {

/// Translate an Expression into an integer term reduced into the field's
/// residue range: (mod (+ products... constant) p). A single summand skips
/// the addition; no summands collapse to (mod 0 p).
inline Term encode_expression_int(const Expression& e, const PrimeField& f,
                                  const EncodeOptions& opts = {}) {
    std::vector<Term> summands;
    for (const QuadTerm& t : e.quadratic) {
        if (opts.simplify && t.coeff.is_zero()) {
            continue;
        }
        Term prod = Term::list({Term::sym("*")});
        if (!(opts.simplify && t.coeff.is_one())) {
            prod.append(Term::num(t.coeff.value()));
        }
        prod.append(Term::sym(witness_symbol(t.left)));
        prod.append(Term::sym(witness_symbol(t.right)));
        summands.push_back(std::move(prod));
    }
    for (const LinTerm& t : e.linear) {
        if (opts.simplify && t.coeff.is_zero()) {
            continue;
        }
        if (opts.simplify && t.coeff.is_one()) {
            summands.push_back(Term::sym(witness_symbol(t.witness)));
        } else {
            summands.push_back(Term::list(
                {Term::sym("*"), Term::num(t.coeff.value()), Term::sym(witness_symbol(t.witness))}));
        }
    }
    if (!e.constant.is_zero()) {
        summands.push_back(Term::num(e.constant.value()));
    }

    Term body;
    if (summands.empty()) {
        body = Term::num(0);
    } else if (summands.size() == 1) {
        body = std::move(summands[0]);
    } else {
        body = Term::list({Term::sym("+")});
        for (Term& s : summands) {
            body.append(std::move(s));
        }
    }
    return Term::list({Term::sym("mod"), std::move(body), Term::num(f.modulus())});
}

/// AssertZero(exp): the reduced expression equals 0.
inline Term encode_assert_zero_int(const Expression& e, const PrimeField& f,
                                   const EncodeOptions& opts = {}) {
    return Term::list({Term::sym("="), encode_expression_int(e, f, opts), Term::num(0)});
}

/// 0 <= x < p, asserted once per declared integer symbol.
inline Term int_domain_assertion(const std::string& symbol, const BigInt& modulus) {
    Term lower = Term::list({Term::sym("<="), Term::num(0), Term::sym(symbol)});
    Term upper = Term::list({Term::sym("<"), Term::sym(symbol), Term::num(modulus)});
    return Term::list({Term::sym("and"), std::move(lower), std::move(upper)});
}

/// Range(x, n): x < 2^n. The lower bound is already part of x's domain
/// assertion, and no fresh bit symbols are needed.
inline Term encode_range_int(WitnessIndex w, std::uint32_t bits) {
    return Term::list(
        {Term::sym("<"), Term::sym(witness_symbol(w)), Term::num(BigInt(1) << bits)});
}

struct IntOpcodeEncoding {
    std::vector<Declaration> declarations;
    std::vector<Term> assertions;
};

/// MemoryInit(id, xs): generation-0 cells with their domain assertions, each
/// pinned to its source witness.
inline IntOpcodeEncoding encode_memory_init_int(std::uint32_t block_id,
                                                const std::vector<WitnessIndex>& witnesses,
                                                MutationIndexMap& mi, const PrimeField& f) {
    IntOpcodeEncoding out;
    for (std::size_t i = 0; i < witnesses.size(); ++i) {
        std::string cell = memory_cell_symbol(block_id, i, 0);
        out.declarations.push_back({cell, "Int"});
        out.assertions.push_back(int_domain_assertion(cell, f.modulus()));
    }
    for (std::size_t i = 0; i < witnesses.size(); ++i) {
        out.assertions.push_back(
            Term::list({Term::sym("="), Term::sym(memory_cell_symbol(block_id, i, 0)),
                        Term::sym(witness_symbol(witnesses[i]))}));
    }
    mi.counts[block_id] = 0;
    return out;
}

/// Read: per cell k, (index = k) implies the current-generation cell equals
/// the value expression.
inline IntOpcodeEncoding encode_memory_read_int(std::uint32_t block_id, const Expression& index,
                                                const Expression& value, std::size_t block_length,
                                                const MutationIndexMap& mi, const PrimeField& f,
                                                const EncodeOptions& opts = {}) {
    IntOpcodeEncoding out;
    const std::uint32_t gen = mi.at(block_id);
    Term index_term = encode_expression_int(index, f, opts);
    Term value_term = encode_expression_int(value, f, opts);
    for (std::size_t k = 0; k < block_length; ++k) {
        Term antecedent = Term::list({Term::sym("="), index_term, Term::num(k)});
        Term consequent = Term::list(
            {Term::sym("="), Term::sym(memory_cell_symbol(block_id, k, gen)), value_term});
        out.assertions.push_back(
            Term::list({Term::sym("=>"), std::move(antecedent), std::move(consequent)}));
    }
    return out;
}

/// Write: a full next generation of cells with domain assertions; the
/// addressed cell takes the value expression, the rest carry over.
inline IntOpcodeEncoding encode_memory_write_int(std::uint32_t block_id, const Expression& index,
                                                 const Expression& value, std::size_t block_length,
                                                 MutationIndexMap& mi, const PrimeField& f,
                                                 const EncodeOptions& opts = {}) {
    IntOpcodeEncoding out;
    const std::uint32_t gen = mi.at(block_id);
    const std::uint32_t next = gen + 1;
    Term index_term = encode_expression_int(index, f, opts);
    Term value_term = encode_expression_int(value, f, opts);
    for (std::size_t k = 0; k < block_length; ++k) {
        std::string cell = memory_cell_symbol(block_id, k, next);
        out.declarations.push_back({cell, "Int"});
        out.assertions.push_back(int_domain_assertion(cell, f.modulus()));
    }
    for (std::size_t k = 0; k < block_length; ++k) {
        Term antecedent = Term::list({Term::sym("="), index_term, Term::num(k)});
        Term consequent = Term::list(
            {Term::sym("="), Term::sym(memory_cell_symbol(block_id, k, next)), value_term});
        out.assertions.push_back(
            Term::list({Term::sym("=>"), std::move(antecedent), std::move(consequent)}));
    }
    for (std::size_t k = 0; k < block_length; ++k) {
        Term antecedent = Term::list(
            {Term::sym("not"), Term::list({Term::sym("="), index_term, Term::num(k)})});
        Term consequent = Term::list({Term::sym("="),
                                      Term::sym(memory_cell_symbol(block_id, k, next)),
                                      Term::sym(memory_cell_symbol(block_id, k, gen))});
        out.assertions.push_back(
            Term::list({Term::sym("=>"), std::move(antecedent), std::move(consequent)}));
    }
    mi.counts[block_id] = next;
    return out;
}

/// Translate a whole circuit over the integers: one Int symbol per witness,
/// a domain assertion for every symbol (witnesses and memory cells alike),
/// then the opcodes in program order. BrilligCall contributes nothing.
inline SmtScript encode_circuit_int(const Circuit& c, const EncodeOptions& opts = {}) {
    PrimeField f = c.field();
    SmtScript script;
    script.logic = opts.logic.empty() ? "QF_NIA" : opts.logic;
    script.value_modulus = c.modulus;

    for (std::uint32_t i = 0; i < c.num_witnesses; ++i) {
        script.declarations.push_back({witness_symbol({i}), "Int"});
        script.goal_symbols.push_back(witness_symbol({i}));
    }
    for (std::uint32_t i = 0; i < c.num_witnesses; ++i) {
        script.assertions.push_back(int_domain_assertion(witness_symbol({i}), f.modulus()));
    }

    std::map<std::uint32_t, std::size_t> lengths;
    MutationIndexMap mi;
    for (std::size_t i = 0; i < c.opcodes.size(); ++i) {
        const Opcode& op = c.opcodes[i];
        IntOpcodeEncoding enc;
        if (const auto* az = std::get_if<AssertZero>(&op)) {
            enc.assertions.push_back(encode_assert_zero_int(az->expr, f, opts));
        } else if (const auto* rc = std::get_if<RangeCheck>(&op)) {
            enc.assertions.push_back(encode_range_int(rc->witness, rc->bits));
        } else if (const auto* init = std::get_if<MemoryInit>(&op)) {
            lengths[init->block_id] = init->witnesses.size();
            enc = encode_memory_init_int(init->block_id, init->witnesses, mi, f);
        } else if (const auto* mo = std::get_if<MemoryOp>(&op)) {
            if (mo->kind == MemoryOpKind::Read) {
                enc = encode_memory_read_int(mo->block_id, mo->index, mo->value,
                                             lengths.at(mo->block_id), mi, f, opts);
            } else {
                enc = encode_memory_write_int(mo->block_id, mo->index, mo->value,
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

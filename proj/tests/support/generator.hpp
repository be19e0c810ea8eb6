#pragma once

// Seeded random circuits for differential testing. Every circuit passes
// validate() by construction: witness indices stay in range, memory ops
// only target initialized blocks, range widths stay below the modulus
// bit-length, and coefficients are canonical residues.

#include <cstdint>
#include <random>
#include <vector>

#include "nave/field.hpp"
#include "nave/ir.hpp"

namespace navetest {

struct GeneratorConfig {
    std::vector<nave::BigInt> moduli{7, 13};
    std::uint32_t max_witnesses{3};
    std::size_t max_opcodes{4};
};

namespace detail {

inline std::uint64_t pick(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
    return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
}

inline nave::WitnessIndex pick_witness(std::mt19937_64& rng, std::uint32_t n) {
    return {static_cast<std::uint32_t>(pick(rng, 0, n - 1))};
}

inline nave::FieldElement pick_coeff(std::mt19937_64& rng, const nave::PrimeField& f,
                                     const nave::BigInt& p) {
    return f.reduce(nave::BigInt(pick(rng, 0, static_cast<std::uint64_t>(p) - 1)));
}

inline nave::Expression random_expression(std::mt19937_64& rng, const nave::PrimeField& f,
                                          const nave::BigInt& p, std::uint32_t witnesses) {
    nave::Expression e;
    std::size_t quads = pick(rng, 0, 2);
    std::size_t lins = pick(rng, 0, 2);
    for (std::size_t i = 0; i < quads; ++i) {
        e.quadratic.push_back(
            {pick_coeff(rng, f, p), pick_witness(rng, witnesses), pick_witness(rng, witnesses)});
    }
    for (std::size_t i = 0; i < lins; ++i) {
        e.linear.push_back({pick_coeff(rng, f, p), pick_witness(rng, witnesses)});
    }
    e.constant = pick_coeff(rng, f, p);
    return e;
}

}  // namespace detail

inline nave::Circuit random_circuit(std::mt19937_64& rng, const GeneratorConfig& cfg = {}) {
    using namespace nave;
    using detail::pick;

    Circuit c;
    c.modulus = cfg.moduli[pick(rng, 0, cfg.moduli.size() - 1)];
    c.num_witnesses = static_cast<std::uint32_t>(pick(rng, 1, cfg.max_witnesses));
    PrimeField f = c.field();
    unsigned max_bits = f.bit_length() - 1;

    std::uint32_t next_block = 0;
    std::size_t count = pick(rng, 1, cfg.max_opcodes);
    for (std::size_t i = 0; i < count; ++i) {
        switch (pick(rng, 0, 4)) {
            case 0: {
                c.opcodes.push_back(
                    AssertZero{detail::random_expression(rng, f, c.modulus, c.num_witnesses)});
                break;
            }
            case 1: {
                RangeCheck rc;
                rc.witness = detail::pick_witness(rng, c.num_witnesses);
                rc.bits = static_cast<std::uint32_t>(pick(rng, 1, max_bits));
                c.opcodes.push_back(rc);
                break;
            }
            case 2: {
                MemoryInit mi;
                mi.block_id = next_block++;
                std::size_t cells = pick(rng, 1, 2);
                for (std::size_t k = 0; k < cells; ++k) {
                    mi.witnesses.push_back(detail::pick_witness(rng, c.num_witnesses));
                }
                c.opcodes.push_back(std::move(mi));
                break;
            }
            case 3: {
                if (next_block == 0) {
                    MemoryInit mi;
                    mi.block_id = next_block++;
                    mi.witnesses.push_back(detail::pick_witness(rng, c.num_witnesses));
                    c.opcodes.push_back(std::move(mi));
                    break;
                }
                MemoryOp mo;
                mo.block_id = static_cast<std::uint32_t>(pick(rng, 0, next_block - 1));
                mo.kind = pick(rng, 0, 1) ? MemoryOpKind::Write : MemoryOpKind::Read;
                mo.index = detail::random_expression(rng, f, c.modulus, c.num_witnesses);
                if (mo.kind == MemoryOpKind::Read) {
                    Expression value;
                    value.linear.push_back({f.one(), detail::pick_witness(rng, c.num_witnesses)});
                    mo.value = std::move(value);
                } else {
                    mo.value = detail::random_expression(rng, f, c.modulus, c.num_witnesses);
                }
                c.opcodes.push_back(std::move(mo));
                break;
            }
            default: {
                BrilligCall bc;
                if (pick(rng, 0, 1)) {
                    bc.function = kVerifyAssertName;
                    bc.inputs.push_back(
                        detail::random_expression(rng, f, c.modulus, c.num_witnesses));
                } else {
                    bc.function = "helper";
                    std::size_t ins = pick(rng, 0, 2);
                    for (std::size_t k = 0; k < ins; ++k) {
                        bc.inputs.push_back(
                            detail::random_expression(rng, f, c.modulus, c.num_witnesses));
                    }
                    if (pick(rng, 0, 1)) {
                        bc.outputs.push_back(detail::pick_witness(rng, c.num_witnesses));
                    }
                }
                c.opcodes.push_back(std::move(bc));
                break;
            }
        }
    }
    return c;
}

}  // namespace navetest

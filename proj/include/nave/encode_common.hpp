#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "nave/ir.hpp"

namespace nave {

/// Options shared by both encoders.
struct EncodeOptions {
    /// Overrides the default logic name (QF_FF / QF_NIA).
    std::string logic;
    /// Drop identity coefficients from product terms. The default emits the
    /// unsimplified rule shape, which the golden files pin.
    bool simplify{false};
};

/// Per-block mutation counter; generation g of block id is the cell set
/// m_<id>_<i>_<g>. A block appears when its mem_init is translated.
struct MutationIndexMap {
    std::map<std::uint32_t, std::uint32_t> counts;

    std::uint32_t at(std::uint32_t block_id) const { return counts.at(block_id); }
};

inline std::string witness_symbol(WitnessIndex w) {
    return "w" + std::to_string(w.index);
}

inline std::string range_bit_symbol(std::size_t opcode_index, std::uint32_t bit) {
    return "rb_" + std::to_string(opcode_index) + "_" + std::to_string(bit);
}

inline std::string memory_cell_symbol(std::uint32_t block_id, std::size_t cell,
                                      std::uint32_t generation) {
    return "m_" + std::to_string(block_id) + "_" + std::to_string(cell) + "_" +
           std::to_string(generation);
}

}  // namespace nave

#pragma once
// Primitive polynomials over GF(2) and initial direction numbers for the
// Sobol sequence, dimensions 1..64, from the Joe--Kuo "new-joe-kuo-6" table.
// Dimension 1 is the van der Corput sequence in base 2.

#include <array>
#include <cstdint>

namespace spectro::detail {

inline constexpr int sobol_max_dim = 64;

struct SobolPoly {
  int degree;
  std::uint32_t poly;       // full binary encoding, e.g. x^3+x+1 -> 0b1011
  std::array<std::uint32_t, 18> m;  // initial odd direction integers m_1..m_degree
};

inline constexpr std::array<SobolPoly, 64> sobol_polys = {{
    {0, 1u, {{1u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {1, 3u, {{1u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {2, 7u, {{1u, 3u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {3, 11u, {{1u, 3u, 1u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {3, 13u, {{1u, 1u, 1u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {4, 19u, {{1u, 1u, 3u, 3u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {4, 25u, {{1u, 3u, 5u, 13u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {5, 37u, {{1u, 1u, 5u, 5u, 17u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {5, 41u, {{1u, 1u, 5u, 5u, 5u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {5, 47u, {{1u, 1u, 7u, 11u, 19u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {5, 55u, {{1u, 1u, 5u, 1u, 1u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {5, 59u, {{1u, 1u, 1u, 3u, 11u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {5, 61u, {{1u, 3u, 5u, 5u, 31u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {6, 67u, {{1u, 3u, 3u, 9u, 7u, 49u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {6, 91u, {{1u, 1u, 1u, 15u, 21u, 21u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {6, 97u, {{1u, 3u, 1u, 13u, 27u, 49u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {6, 103u, {{1u, 1u, 1u, 15u, 7u, 5u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {6, 109u, {{1u, 3u, 1u, 15u, 13u, 25u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {6, 115u, {{1u, 1u, 5u, 5u, 19u, 61u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {7, 131u, {{1u, 3u, 7u, 11u, 23u, 15u, 103u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {7, 137u, {{1u, 3u, 7u, 13u, 13u, 15u, 69u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {7, 143u, {{1u, 1u, 3u, 13u, 7u, 35u, 63u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {7, 145u, {{1u, 3u, 5u, 9u, 1u, 25u, 53u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {7, 157u, {{1u, 3u, 1u, 13u, 9u, 35u, 107u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {7, 167u, {{1u, 3u, 1u, 5u, 27u, 61u, 31u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {7, 171u, {{1u, 1u, 5u, 11u, 19u, 41u, 61u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {7, 185u, {{1u, 3u, 5u, 3u, 3u, 13u, 69u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {7, 191u, {{1u, 1u, 7u, 13u, 1u, 19u, 1u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {7, 193u, {{1u, 3u, 7u, 5u, 13u, 19u, 59u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {7, 203u, {{1u, 1u, 3u, 9u, 25u, 29u, 41u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {7, 211u, {{1u, 3u, 5u, 13u, 23u, 1u, 55u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {7, 213u, {{1u, 3u, 7u, 3u, 13u, 59u, 17u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {7, 229u, {{1u, 3u, 1u, 3u, 5u, 53u, 69u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {7, 239u, {{1u, 1u, 5u, 5u, 23u, 33u, 13u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {7, 241u, {{1u, 1u, 7u, 7u, 1u, 61u, 123u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {7, 247u, {{1u, 1u, 7u, 9u, 13u, 61u, 49u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {7, 253u, {{1u, 3u, 3u, 5u, 3u, 55u, 33u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {8, 285u, {{1u, 3u, 1u, 15u, 31u, 13u, 49u, 245u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {8, 299u, {{1u, 3u, 5u, 15u, 31u, 59u, 63u, 97u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {8, 301u, {{1u, 3u, 1u, 11u, 11u, 11u, 77u, 249u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {8, 333u, {{1u, 3u, 1u, 11u, 27u, 43u, 71u, 9u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {8, 351u, {{1u, 1u, 7u, 15u, 21u, 11u, 81u, 45u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {8, 355u, {{1u, 3u, 7u, 3u, 25u, 31u, 65u, 79u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {8, 357u, {{1u, 3u, 1u, 1u, 19u, 11u, 3u, 205u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {8, 361u, {{1u, 1u, 5u, 9u, 19u, 21u, 29u, 157u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {8, 369u, {{1u, 3u, 7u, 11u, 1u, 33u, 89u, 185u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {8, 391u, {{1u, 3u, 3u, 3u, 15u, 9u, 79u, 71u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {8, 397u, {{1u, 3u, 7u, 11u, 15u, 39u, 119u, 27u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {8, 425u, {{1u, 1u, 3u, 1u, 11u, 31u, 97u, 225u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {8, 451u, {{1u, 1u, 1u, 3u, 23u, 43u, 57u, 177u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {8, 463u, {{1u, 3u, 7u, 7u, 17u, 17u, 37u, 71u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {8, 487u, {{1u, 3u, 1u, 5u, 27u, 63u, 123u, 213u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {8, 501u, {{1u, 1u, 3u, 5u, 11u, 43u, 53u, 133u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {9, 529u, {{1u, 3u, 5u, 5u, 29u, 17u, 47u, 173u, 479u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {9, 539u, {{1u, 3u, 3u, 11u, 3u, 1u, 109u, 9u, 69u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {9, 545u, {{1u, 1u, 1u, 5u, 17u, 39u, 23u, 5u, 343u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {9, 557u, {{1u, 3u, 1u, 5u, 25u, 15u, 31u, 103u, 499u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {9, 563u, {{1u, 1u, 1u, 11u, 11u, 17u, 63u, 105u, 183u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {9, 601u, {{1u, 1u, 5u, 11u, 9u, 29u, 97u, 231u, 363u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {9, 607u, {{1u, 1u, 5u, 15u, 19u, 45u, 41u, 7u, 383u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {9, 617u, {{1u, 3u, 7u, 7u, 31u, 19u, 83u, 137u, 221u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {9, 623u, {{1u, 1u, 1u, 3u, 23u, 15u, 111u, 223u, 83u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {9, 631u, {{1u, 1u, 5u, 13u, 31u, 15u, 55u, 25u, 161u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
    {9, 637u, {{1u, 1u, 3u, 13u, 25u, 47u, 39u, 87u, 257u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u, 0u}}},
}};

}  // namespace spectro::detail

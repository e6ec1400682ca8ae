#pragma once

// Generated by tools/gen_triple_table.cpp; do not edit by hand.

#include <knncp/edge_configurations.hpp>

#include <array>

namespace knncp {

// {label, distinct nodes, isolated third edge num, den}
inline constexpr std::array<configs::TripleConfigInfo, 24> kTripleConfigTable{{
    {1, 2, 0, 1},
    {2, 2, 0, 1},
    {3, 3, 0, 1},
    {4, 3, 0, 1},
    {5, 3, 0, 1},
    {6, 3, 0, 1},
    {7, 3, 0, 1},
    {8, 3, 0, 1},
    {9, 3, 0, 1},
    {10, 3, 0, 1},
    {11, 4, 1, 3},
    {12, 4, 1, 3},
    {13, 4, 0, 1},
    {14, 4, 0, 1},
    {15, 4, 0, 1},
    {16, 4, 0, 1},
    {17, 4, 0, 1},
    {18, 4, 0, 1},
    {19, 4, 0, 1},
    {20, 4, 0, 1},
    {21, 5, 1, 3},
    {22, 5, 1, 3},
    {23, 5, 1, 3},
    {24, 6, 1, 1},
}};

} // namespace knncp

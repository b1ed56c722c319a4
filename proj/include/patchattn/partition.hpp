#pragma once

#include <vector>

#include "patchattn/rng.hpp"

namespace patchattn {

// Disjoint cover of the patch indices {0..D-1} by L sets of size C.
struct Partition {
  int D = 0;
  int C = 0;
  int L = 0;
  std::vector<int> membership;         // patch index -> set index
  std::vector<std::vector<int>> sets;  // L sorted lists of C patch indices

  const std::vector<int>& set_of(int patch) const { return sets[membership[patch]]; }
};

// Throws std::invalid_argument if sizes, membership and sets are inconsistent.
void validate(const Partition& part);

// Sets are contiguous blocks of a row-major grid, e.g. a 4x4 grid with 2x2
// blocks gives {0,1,4,5}, {2,3,6,7}, {8,9,12,13}, {10,11,14,15}.
Partition make_localized_partition(int grid_rows, int grid_cols,
                                   int block_rows, int block_cols);

// Uniformly random disjoint C-sets covering {0..D-1}.
Partition make_random_partition(int D, int C, Rng& rng);

}  // namespace patchattn

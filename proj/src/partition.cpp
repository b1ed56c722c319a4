#include "patchattn/partition.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace patchattn {

void validate(const Partition& part) {
  if (part.D <= 0 || part.C <= 0 || part.L <= 0)
    throw std::invalid_argument("partition: sizes must be positive");
  if (part.L * part.C != part.D)
    throw std::invalid_argument("partition: L*C != D");
  if (static_cast<int>(part.membership.size()) != part.D)
    throw std::invalid_argument("partition: membership size != D");
  if (static_cast<int>(part.sets.size()) != part.L)
    throw std::invalid_argument("partition: set count != L");
  std::vector<int> seen(part.D, 0);
  for (int l = 0; l < part.L; ++l) {
    if (static_cast<int>(part.sets[l].size()) != part.C)
      throw std::invalid_argument("partition: set " + std::to_string(l) +
                                  " has size != C");
    for (int j : part.sets[l]) {
      if (j < 0 || j >= part.D)
        throw std::invalid_argument("partition: patch index out of range");
      if (seen[j]++)
        throw std::invalid_argument("partition: sets are not disjoint");
      if (part.membership[j] != l)
        throw std::invalid_argument("partition: membership/sets mismatch");
    }
  }
}

Partition make_localized_partition(int grid_rows, int grid_cols,
                                   int block_rows, int block_cols) {
  if (grid_rows <= 0 || grid_cols <= 0 || block_rows <= 0 || block_cols <= 0)
    throw std::invalid_argument("localized partition: dims must be positive");
  if (grid_rows % block_rows != 0 || grid_cols % block_cols != 0)
    throw std::invalid_argument(
        "localized partition: block dims must divide grid dims (" +
        std::to_string(block_rows) + "x" + std::to_string(block_cols) +
        " does not tile " + std::to_string(grid_rows) + "x" +
        std::to_string(grid_cols) + ")");
  Partition part;
  part.D = grid_rows * grid_cols;
  part.C = block_rows * block_cols;
  part.L = part.D / part.C;
  part.membership.assign(part.D, -1);
  part.sets.assign(part.L, {});
  const int blocks_per_row = grid_cols / block_cols;
  for (int r = 0; r < grid_rows; ++r) {
    for (int c = 0; c < grid_cols; ++c) {
      const int patch = r * grid_cols + c;
      const int l = (r / block_rows) * blocks_per_row + (c / block_cols);
      part.membership[patch] = l;
      part.sets[l].push_back(patch);
    }
  }
  for (auto& s : part.sets) std::sort(s.begin(), s.end());
  validate(part);
  return part;
}

Partition make_random_partition(int D, int C, Rng& rng) {
  if (D <= 0 || C <= 0) throw std::invalid_argument("random partition: D, C must be positive");
  if (D % C != 0)
    throw std::invalid_argument("random partition: C=" + std::to_string(C) +
                                " does not divide D=" + std::to_string(D));
  std::vector<int> perm(D);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = D - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.below(i + 1));
    std::swap(perm[i], perm[j]);
  }
  Partition part;
  part.D = D;
  part.C = C;
  part.L = D / C;
  part.membership.assign(D, -1);
  part.sets.assign(part.L, {});
  for (int l = 0; l < part.L; ++l) {
    for (int k = 0; k < C; ++k) {
      const int patch = perm[l * C + k];
      part.membership[patch] = l;
      part.sets[l].push_back(patch);
    }
    std::sort(part.sets[l].begin(), part.sets[l].end());
  }
  validate(part);
  return part;
}

}  // namespace patchattn

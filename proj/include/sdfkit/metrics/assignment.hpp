#pragma once
#include <vector>

namespace sdfkit {

// Exact minimum-cost perfect matching on a dense n x n matrix (row-major),
// via successive shortest augmenting paths over reduced costs. Returns the
// column matched to each row. All costs must be finite and non-negative.
// O(n^3) worst case; the column-reduction warm start makes geometric
// instances far cheaper in practice.
std::vector<int> solve_assignment(const double* cost, int n);
std::vector<int> solve_assignment(const float* cost, int n);

} // namespace sdfkit

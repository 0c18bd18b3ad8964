#include "sdfkit/metrics/assignment.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sdfkit {

namespace {

// Successive shortest augmenting paths with row/column potentials (u, v).
// Invariants between augmentations: reduced cost C - u - v >= 0 everywhere
// (modulo float rounding) and exactly 0 on matched pairs.
template <typename TC>
std::vector<int> assign_impl(const TC* C, int n) {
    if (n < 1) throw std::invalid_argument("assignment: n must be >= 1");
    const std::size_t N = std::size_t(n);
    for (std::size_t i = 0; i < N * N; ++i)
        if (!std::isfinite(double(C[i])) || C[i] < TC(0))
            throw std::invalid_argument("assignment: costs must be finite and non-negative");

    std::vector<double> u(N, 0.0), v(N, 0.0);
    std::vector<int> row_of(N, -1), col_of(N, -1);

    // warm start: v = column minima, then hand each row its cheapest free column
    for (int c = 0; c < n; ++c) {
        double m = double(C[c]);
        for (int r = 1; r < n; ++r) m = std::min(m, double(C[std::size_t(r) * N + c]));
        v[std::size_t(c)] = m;
    }
    for (int r = 0; r < n; ++r) {
        const TC* row = C + std::size_t(r) * N;
        int best = 0;
        double bestrc = double(row[0]) - v[0];
        for (int c = 1; c < n; ++c) {
            const double rc = double(row[std::size_t(c)]) - v[std::size_t(c)];
            if (rc < bestrc) {
                bestrc = rc;
                best = c;
            }
        }
        u[std::size_t(r)] = bestrc;
        if (row_of[std::size_t(best)] == -1) {
            row_of[std::size_t(best)] = r;
            col_of[std::size_t(r)] = best;
        }
    }

    std::vector<double> dist(N);
    std::vector<int> pred(N);
    std::vector<char> done(N);
    std::vector<int> settled;
    settled.reserve(N);

    for (int f = 0; f < n; ++f) {
        if (col_of[std::size_t(f)] != -1) continue;

        const TC* frow = C + std::size_t(f) * N;
        for (int c = 0; c < n; ++c) {
            dist[std::size_t(c)] = double(frow[std::size_t(c)]) - u[std::size_t(f)] - v[std::size_t(c)];
            pred[std::size_t(c)] = f;
            done[std::size_t(c)] = 0;
        }
        settled.clear();

        int sink = -1;
        double D = 0.0;
        for (;;) {
            int jmin = -1;
            double dmin = std::numeric_limits<double>::infinity();
            for (int c = 0; c < n; ++c)
                if (!done[std::size_t(c)] && dist[std::size_t(c)] < dmin) {
                    dmin = dist[std::size_t(c)];
                    jmin = c;
                }
            if (jmin < 0) throw std::logic_error("assignment: search exhausted without a free column");
            done[std::size_t(jmin)] = 1;
            settled.push_back(jmin);
            if (row_of[std::size_t(jmin)] == -1) {
                sink = jmin;
                D = dmin;
                break;
            }
            const int r = row_of[std::size_t(jmin)];
            const TC* rrow = C + std::size_t(r) * N;
            for (int c = 0; c < n; ++c) {
                if (done[std::size_t(c)]) continue;
                const double nd =
                    dmin + double(rrow[std::size_t(c)]) - u[std::size_t(r)] - v[std::size_t(c)];
                if (nd < dist[std::size_t(c)]) {
                    dist[std::size_t(c)] = nd;
                    pred[std::size_t(c)] = r;
                }
            }
        }

        for (int c : settled) {
            if (c == sink) continue;
            const double delta = D - dist[std::size_t(c)];
            v[std::size_t(c)] -= delta;
            u[std::size_t(row_of[std::size_t(c)])] += delta;
        }
        u[std::size_t(f)] += D;

        for (int c = sink; c != -1;) {  // flip the augmenting path back to f
            const int r = pred[std::size_t(c)];
            row_of[std::size_t(c)] = r;
            const int prev = col_of[std::size_t(r)];
            col_of[std::size_t(r)] = c;
            c = prev;
        }
    }
    return col_of;
}

} // namespace

std::vector<int> solve_assignment(const double* cost, int n) { return assign_impl(cost, n); }
std::vector<int> solve_assignment(const float* cost, int n) { return assign_impl(cost, n); }

} // namespace sdfkit

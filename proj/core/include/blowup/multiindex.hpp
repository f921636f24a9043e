#pragma once

// Dense graded-lex enumeration of multi-indices.  Within a total degree
// the order is lexicographic with the first variable decreasing, so for
// m=2 the flat position of (a1,a2) is tri(a1+a2) + a2.

#include <cstdint>
#include <vector>

#include "blowup/errors.hpp"

namespace blowup {

using MultiIndex = std::vector<int>;

// Number of multi-indices in m variables with total degree <= N.
std::size_t mi_count_upto(int m, int N);

// Immutable lookup table for fixed (m, maxdeg); shared via mi_table().
class MultiIndexTable {
  public:
    MultiIndexTable(int m, int maxdeg);

    int m() const { return m_; }
    int maxdeg() const { return maxdeg_; }
    std::size_t size() const { return exps_.size(); }

    const MultiIndex& exponents(std::size_t flat) const { return exps_[flat]; }
    int degree(std::size_t flat) const { return degs_[flat]; }

    std::size_t flat_index(const MultiIndex& alpha) const;

    // Flat index of the sum of the multi-indices at i and j.
    std::size_t sum_index(std::size_t i, std::size_t j) const;

    // First flat index of the given total degree.
    std::size_t degree_begin(int deg) const { return deg_begin_[deg]; }
    std::size_t degree_end(int deg) const { return deg_begin_[deg + 1]; }

  private:
    int m_;
    int maxdeg_;
    std::vector<MultiIndex> exps_;
    std::vector<int> degs_;
    std::vector<int> last_; // last variable exponent, drives m=2 sum_index
    std::vector<std::size_t> deg_begin_;
};

// Process-wide cache of tables (tables are immutable once built).
const MultiIndexTable& mi_table(int m, int maxdeg);

} // namespace blowup

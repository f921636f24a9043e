#include "blowup/multiindex.hpp"

#include <map>
#include <memory>
#include <mutex>

namespace blowup {

std::size_t mi_count_upto(int m, int N) {
    // C(N+m, m)
    unsigned long long r = 1;
    for (int i = 1; i <= m; ++i) r = r * (N + i) / i;
    return static_cast<std::size_t>(r);
}

MultiIndexTable::MultiIndexTable(int m, int maxdeg) : m_(m), maxdeg_(maxdeg) {
    if (m < 1) throw ShapeError("MultiIndexTable: m < 1");
    exps_.reserve(mi_count_upto(m, maxdeg));
    deg_begin_.assign(maxdeg + 2, 0);
    MultiIndex cur(m, 0);
    for (int d = 0; d <= maxdeg; ++d) {
        deg_begin_[d] = exps_.size();
        // compositions of d into m parts, first part decreasing
        std::vector<int> rem(m, 0);
        MultiIndex a(m, 0);
        // recursive enumeration without recursion: odometer over (a1..a_{m-1})
        // generic but cheap; m is tiny.
        struct Frame {
            int var;
            int left;
            int next;
        };
        std::vector<Frame> stack;
        stack.push_back({0, d, d});
        while (!stack.empty()) {
            Frame& f = stack.back();
            if (f.var == m - 1) {
                a[f.var] = f.left;
                exps_.push_back(a);
                degs_.push_back(d);
                last_.push_back(a[m - 1]);
                stack.pop_back();
                continue;
            }
            if (f.next < 0) {
                stack.pop_back();
                continue;
            }
            a[f.var] = f.next;
            int left = f.left - f.next;
            --f.next;
            stack.push_back({f.var + 1, left, left});
        }
    }
    deg_begin_[maxdeg + 1] = exps_.size();
}

std::size_t MultiIndexTable::flat_index(const MultiIndex& alpha) const {
    if (static_cast<int>(alpha.size()) != m_) throw ShapeError("flat_index: wrong arity");
    int d = 0;
    for (int v : alpha) d += v;
    if (d > maxdeg_) throw ShapeError("flat_index: degree above table range");
    if (m_ == 1) return static_cast<std::size_t>(d);
    if (m_ == 2) return deg_begin_[d] + alpha[1];
    for (std::size_t i = deg_begin_[d]; i < deg_begin_[d + 1]; ++i)
        if (exps_[i] == alpha) return i;
    throw ShapeError("flat_index: not found");
}

std::size_t MultiIndexTable::sum_index(std::size_t i, std::size_t j) const {
    if (m_ == 1) return i + j;
    if (m_ == 2) return deg_begin_[degs_[i] + degs_[j]] + last_[i] + last_[j];
    MultiIndex s = exps_[i];
    const MultiIndex& o = exps_[j];
    for (int v = 0; v < m_; ++v) s[v] += o[v];
    return flat_index(s);
}

const MultiIndexTable& mi_table(int m, int maxdeg) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<MultiIndexTable>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(m, maxdeg);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, std::make_unique<MultiIndexTable>(m, maxdeg)).first;
    return *it->second;
}

} // namespace blowup

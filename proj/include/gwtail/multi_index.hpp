#pragma once

// Multi-index exponent vectors and the enumerated index sets used by the
// Taylor / Fourier tables. Entries are packed 8 bits per component into a
// uint64 key, so component sums never carry as long as the degree cap stays
// below 256 and N <= 8.

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "gwtail/types.hpp"

namespace gwtail {

struct MultiIndex {
    std::vector<int> entries;

    int degree() const {
        int d = 0;
        for (int e : entries) d += e;
        return d;
    }
};

class MultiIndexSet {
public:
    static constexpr int kMaxComponents = 8;
    static constexpr int kMaxDegree = 255;

    MultiIndexSet() = default;

    // Enumerates every multi-index with 0 <= degree <= cap, grouped by degree
    // (ascending) and lexicographically ordered within each degree.
    MultiIndexSet(int n, int cap) : n_(n), cap_(cap) {
        if (n < 1 || n > kMaxComponents)
            throw ValidationError("MultiIndexSet: component count out of range [1,8]");
        if (cap < 0 || cap > kMaxDegree)
            throw ValidationError("MultiIndexSet: degree cap out of range");
        degree_begin_.assign(std::size_t(cap) + 2, 0);
        std::vector<int> m(n, 0);
        for (int d = 0; d <= cap; ++d) {
            degree_begin_[d] = int(entries_.size());
            enumerate(m, 0, d);
        }
        degree_begin_[cap + 1] = int(entries_.size());
        for (int id = 0; id < int(entries_.size()); ++id)
            lookup_.emplace(keys_[id], id);
    }

    int components() const { return n_; }
    int cap() const { return cap_; }
    int size() const { return int(entries_.size()); }

    const std::vector<int>& entries(int id) const { return entries_[id]; }
    int degree(int id) const { return degrees_[id]; }
    std::uint64_t key(int id) const { return keys_[id]; }

    int degree_begin(int d) const { return degree_begin_[d]; }
    int degree_end(int d) const { return degree_begin_[d + 1]; }

    // id of the component-wise sum of two indices; degrees must stay <= cap.
    int sum_id(int ida, int idb) const {
        return lookup_.at(keys_[ida] + keys_[idb]);
    }

    int find(const std::vector<int>& m) const {
        const auto it = lookup_.find(pack(m));
        return it == lookup_.end() ? -1 : it->second;
    }

    int unit_id(int j) const {
        std::vector<int> m(n_, 0);
        m[j] = 1;
        return find(m);
    }

    // id of the index with permuted components, m'[i] = m[perm[i]].
    int permuted_id(int id, const std::vector<int>& perm) const {
        std::vector<int> out(n_);
        for (int i = 0; i < n_; ++i) out[i] = entries_[id][perm[i]];
        return find(out);
    }

    static std::uint64_t pack(const std::vector<int>& m) {
        std::uint64_t k = 0;
        for (std::size_t i = 0; i < m.size(); ++i)
            k |= std::uint64_t(std::uint8_t(m[i])) << (8 * i);
        return k;
    }

private:
    void enumerate(std::vector<int>& m, int pos, int remaining) {
        if (pos == n_ - 1) {
            m[pos] = remaining;
            entries_.push_back(m);
            degrees_.push_back(int(degree_of(m)));
            keys_.push_back(pack(m));
            m[pos] = 0;
            return;
        }
        for (int e = 0; e <= remaining; ++e) {
            m[pos] = e;
            enumerate(m, pos + 1, remaining - e);
        }
        m[pos] = 0;
    }

    static int degree_of(const std::vector<int>& m) {
        int d = 0;
        for (int e : m) d += e;
        return d;
    }

    int n_ = 0;
    int cap_ = 0;
    std::vector<std::vector<int>> entries_;
    std::vector<int> degrees_;
    std::vector<std::uint64_t> keys_;
    std::vector<int> degree_begin_;
    std::unordered_map<std::uint64_t, int> lookup_;
};

}  // namespace gwtail

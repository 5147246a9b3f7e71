#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

namespace isg {

// Fixed 128-bit vertex set. All solvers work on graphs with at most
// kMaxSetVertices vertices, which keeps sets trivially copyable and hashable.
inline constexpr int kMaxSetVertices = 128;

class VertexSet {
public:
    constexpr VertexSet() = default;
    VertexSet(std::initializer_list<int> vs) {
        for (int v : vs) insert(v);
    }

    static VertexSet range(int n) {
        VertexSet s;
        if (n >= 64) {
            s.w_[0] = ~std::uint64_t{0};
            s.w_[1] = n >= 128 ? ~std::uint64_t{0} : ((std::uint64_t{1} << (n - 64)) - 1);
        } else {
            s.w_[0] = n == 0 ? 0 : (n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1);
        }
        return s;
    }
    static VertexSet single(int v) {
        VertexSet s;
        s.insert(v);
        return s;
    }
    static VertexSet from_words(std::uint64_t lo, std::uint64_t hi) {
        VertexSet s;
        s.w_[0] = lo;
        s.w_[1] = hi;
        return s;
    }
    template <class It>
    static VertexSet from_range(It first, It last) {
        VertexSet s;
        for (; first != last; ++first) s.insert(*first);
        return s;
    }

    void insert(int v) { w_[v >> 6] |= std::uint64_t{1} << (v & 63); }
    void erase(int v) { w_[v >> 6] &= ~(std::uint64_t{1} << (v & 63)); }
    bool contains(int v) const { return (w_[v >> 6] >> (v & 63)) & 1U; }

    int size() const { return std::popcount(w_[0]) + std::popcount(w_[1]); }
    bool empty() const { return (w_[0] | w_[1]) == 0; }
    bool any() const { return !empty(); }

    // Smallest member, or -1 when empty.
    int first() const {
        if (w_[0]) return std::countr_zero(w_[0]);
        if (w_[1]) return 64 + std::countr_zero(w_[1]);
        return -1;
    }
    int last() const {
        if (w_[1]) return 127 - std::countl_zero(w_[1]);
        if (w_[0]) return 63 - std::countl_zero(w_[0]);
        return -1;
    }
    // Smallest member strictly greater than v, or -1.
    int next(int v) const {
        ++v;
        if (v >= 128) return -1;
        int wi = v >> 6;
        std::uint64_t word = w_[wi] & (~std::uint64_t{0} << (v & 63));
        if (word) return (wi << 6) + std::countr_zero(word);
        if (wi == 0 && w_[1]) return 64 + std::countr_zero(w_[1]);
        return -1;
    }

    bool intersects(const VertexSet& o) const {
        return ((w_[0] & o.w_[0]) | (w_[1] & o.w_[1])) != 0;
    }
    bool subset_of(const VertexSet& o) const {
        return (w_[0] & ~o.w_[0]) == 0 && (w_[1] & ~o.w_[1]) == 0;
    }

    VertexSet& operator|=(const VertexSet& o) { w_[0] |= o.w_[0]; w_[1] |= o.w_[1]; return *this; }
    VertexSet& operator&=(const VertexSet& o) { w_[0] &= o.w_[0]; w_[1] &= o.w_[1]; return *this; }
    VertexSet& operator-=(const VertexSet& o) { w_[0] &= ~o.w_[0]; w_[1] &= ~o.w_[1]; return *this; }
    VertexSet& operator^=(const VertexSet& o) { w_[0] ^= o.w_[0]; w_[1] ^= o.w_[1]; return *this; }
    friend VertexSet operator|(VertexSet a, const VertexSet& b) { return a |= b; }
    friend VertexSet operator&(VertexSet a, const VertexSet& b) { return a &= b; }
    friend VertexSet operator-(VertexSet a, const VertexSet& b) { return a -= b; }
    friend VertexSet operator^(VertexSet a, const VertexSet& b) { return a ^= b; }

    friend bool operator==(const VertexSet& a, const VertexSet& b) = default;
    // Orders by the bitmask read as a 128-bit integer; used only for
    // deterministic container ordering, not for the solution tie-break.
    friend bool operator<(const VertexSet& a, const VertexSet& b) {
        return a.w_[1] != b.w_[1] ? a.w_[1] < b.w_[1] : a.w_[0] < b.w_[0];
    }

    std::uint64_t word(int i) const { return w_[i]; }

    std::vector<int> to_vector() const {
        std::vector<int> out;
        out.reserve(size());
        for (int v = first(); v >= 0; v = next(v)) out.push_back(v);
        return out;
    }
    std::string to_string() const;

    class iterator {
    public:
        using value_type = int;
        using difference_type = std::ptrdiff_t;
        iterator() = default;
        iterator(const VertexSet* s, int v) : s_(s), v_(v) {}
        int operator*() const { return v_; }
        iterator& operator++() { v_ = s_->next(v_); return *this; }
        iterator operator++(int) { auto c = *this; ++*this; return c; }
        bool operator==(const iterator& o) const { return v_ == o.v_; }
    private:
        const VertexSet* s_ = nullptr;
        int v_ = -1;
    };
    iterator begin() const { return {this, first()}; }
    iterator end() const { return {this, -1}; }

private:
    std::uint64_t w_[2] = {0, 0};
};

// Preferred-set relation used to break weight ties everywhere: S wins over T
// when the smallest element of the symmetric difference lies in S. For sets
// of positive-weight vertices with equal weight this coincides with picking
// the lexicographically smallest sorted vertex list, and it only depends on
// S \ T and T \ S, so comparisons of extensions of a common partial
// solution can ignore the common part.
inline bool preferred_on_tie(const VertexSet& s, const VertexSet& t) {
    VertexSet diff = s ^ t;
    int m = diff.first();
    return m >= 0 && s.contains(m);
}

}  // namespace isg

template <>
struct std::hash<isg::VertexSet> {
    std::size_t operator()(const isg::VertexSet& s) const noexcept {
        std::uint64_t h = s.word(0) * 0x9E3779B97F4A7C15ULL;
        h ^= (s.word(1) + 0x632BE59BD9B4E019ULL + (h << 6) + (h >> 2));
        return static_cast<std::size_t>(h ^ (h >> 31));
    }
};

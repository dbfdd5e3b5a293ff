// Generators and independent oracles shared by the test suites.
#pragma once

#include <numeric>
#include <random>
#include <vector>

#include "lamlab/builder.hpp"
#include "lamlab/twistlat.hpp"

namespace testing {

using namespace lamlab;

inline std::mt19937_64& rng() {
    static std::mt19937_64 g(20240611);
    return g;
}

inline int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng()); }

/// a random valid lamination with angles in (1/q)Z: a random noncrossing partition
/// of q equally spaced points, keeping a few blocks
inline Lamination random_lamination(int q) {
    std::vector<std::vector<int>> blocks;
    // recursive noncrossing split of [lo, hi)
    std::function<void(int, int)> split = [&](int lo, int hi) {
        if (hi - lo < 2) return;
        int a = uniform(lo, hi - 1);
        std::vector<int> block{a};
        int next = a + 1;
        while (next < hi && uniform(0, 2) == 0) {
            int b = uniform(next, hi - 1);
            split(next, b);
            block.push_back(b);
            next = b + 1;
        }
        split(next, hi);
        split(lo, a);
        if (block.size() >= 2) blocks.push_back(block);
    };
    split(0, q);
    Lamination lam;
    for (const auto& b : blocks) {
        std::vector<Angle> c;
        for (int x : b) c.push_back(Rational(x, q));
        lam.classes.push_back(c);
    }
    lam.normalize();
    return lam;
}

/// criticality of a cover computed from lengths alone: a class of n points over an
/// image class of m points has degree n/m; a gap has degree d*len/len(image gap)
inline int criticality_oracle(const LamCover& cov) {
    Lamination img = cover_image(cov);
    int total = 0;
    for (const auto& c : cov.domain.classes) {
        std::set<Angle> im;
        for (const auto& x : c) im.insert(cov.map(x));
        total += (int)c.size() / (int)im.size() - 1;
    }
    auto igs = gaps(img);
    for (const auto& g : gaps(cov.domain)) {
        const Arc& a = g.arcs.front();
        Angle x = mod1(a.start + arc_length(a.start, a.end) / Rational(997));
        int k = gap_index(igs, cov.map(x));
        Rational deg = Rational(cov.degree) * g.length / igs.at(k).length;
        total += (int)deg.num() - 1;
    }
    return total;
}

/// all admissible tau sequences of length L
inline std::vector<TauSequence> all_taus(int L, int fund = 2) {
    std::vector<TauSequence> out;
    TauSequence t;
    t.fund_edges = fund;
    std::function<void()> grow = [&]() {
        if (t.length() == L) {
            out.push_back(t);
            return;
        }
        int n = t.length() + 1;
        int hi = n == 1 ? 0 : t(n - 1) + 1;
        for (int v = 0; v <= hi && v < n; ++v) {
            t.values.push_back(v);
            grow();
            t.values.pop_back();
        }
    };
    grow();
    return out;
}

/// a realizable-in-form descriptor: trivial fundamental symmetry, and each weight in
/// (1/d_v)Z so that twists act on gluings by rotations
inline SpineDescriptor random_descriptor() {
    SpineDescriptor d;
    d.degree = uniform(2, 6);
    int n = uniform(1, 3);
    d.fund_symmetries.assign(n, 1);
    d.name = "random";
    int levels = uniform(1, 4);
    for (int i = 0; i < levels; ++i) {
        LevelRecords lr;
        int records = uniform(1, 3);
        for (int r = 0; r < records; ++r) {
            OrbitRecord o;
            o.local_degree = uniform(2, d.degree);
            o.local_symmetry = uniform(1, 2 * o.local_degree);
            for (int j = 0; j < n; ++j) o.weight.push_back(Rational(uniform(0, 3 * o.local_degree), o.local_degree));
            lr.push_back(o);
        }
        d.levels.push_back(lr);
    }
    return d;
}

inline std::vector<TruncatedSpine> census(int L, int fund) {
    CensusOptions o;
    o.fund_edges = fund;
    return enumerate_cubic_spines(L, o);
}

}  // namespace testing

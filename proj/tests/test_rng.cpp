#include <algorithm>
#include <numeric>
#include <set>
#include <vector>

#include "doctest.h"
#include "qawa/rng.hpp"

using namespace qawa;

TEST_CASE("rng is deterministic for a given seed") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("rng derive gives independent streams") {
    Rng a = Rng::derive(42, 1);
    Rng b = Rng::derive(42, 2);
    Rng a2 = Rng::derive(42, 1);
    bool all_equal = true;
    for (int i = 0; i < 16; ++i) {
        const uint64_t x = a.next_u64(), y = b.next_u64();
        CHECK(x == a2.next_u64());
        if (x != y) all_equal = false;
    }
    CHECK_FALSE(all_equal);
}

TEST_CASE("rng below stays in range and covers it") {
    Rng rng(7);
    CHECK(rng.below(1) == 0);
    std::set<uint64_t> seen;
    for (int i = 0; i < 2000; ++i) {
        const uint64_t v = rng.below(5);
        CHECK(v < 5);
        seen.insert(v);
    }
    CHECK(seen.size() == 5);
}

TEST_CASE("rng unit is in the half-open interval") {
    Rng rng(11);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 5000; ++i) {
        const double u = rng.unit();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo < 0.1);
    CHECK(hi > 0.9);
}

TEST_CASE("rng range respects bounds") {
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
        const double v = rng.range(0.85, 1.15);
        CHECK(v >= 0.85);
        CHECK(v < 1.15);
    }
}

TEST_CASE("rng shuffle is a deterministic permutation") {
    std::vector<int> v(20);
    std::iota(v.begin(), v.end(), 0);
    std::vector<int> w = v;

    Rng a(9);
    a.shuffle(v);
    Rng b(9);
    b.shuffle(w);
    CHECK(v == w);

    std::vector<int> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> expect(20);
    std::iota(expect.begin(), expect.end(), 0);
    CHECK(sorted == expect);

    std::vector<int> u(20);
    std::iota(u.begin(), u.end(), 0);
    CHECK(v != u);  // 20 elements, identity permutation is vanishingly unlikely
}

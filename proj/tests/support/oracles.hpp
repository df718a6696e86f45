#pragma once

#include <array>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace testutil {

// Textbook Levenshtein via memoized recursion. Structured unlike the
// iterative production matrix on purpose.
int edit_distance_ref(const std::vector<std::string>& a,
                      const std::vector<std::string>& b);

// O(n^2) DFT magnitude spectrum, bins 0..n/2.
std::vector<double> naive_dft_mag(const std::vector<double>& x);

// Modified Kneser-Ney estimator recomputed from scratch: own counting, own
// discounts, recursive conditional probability. Used to cross-check the
// table-building code path.
class KnOracle {
  public:
    KnOracle(const std::vector<std::string>& sentences, int order);

    double cond(const std::vector<std::string>& context, const std::string& word) const;

    const std::set<std::string>& vocab() const { return vocab_; }
    // Every context (length 0..order-1) with at least one event under it.
    std::vector<std::vector<std::string>> contexts() const;

  private:
    using Key = std::vector<std::string>;

    int order_;
    size_t v_events_ = 0;
    std::set<std::string> vocab_;
    std::vector<std::map<Key, long long>> raw_;
    std::vector<std::map<Key, long long>> events_;
    std::vector<std::array<double, 3>> discounts_;

    double discount_for(int k, long long count) const;
};

}  // namespace testutil

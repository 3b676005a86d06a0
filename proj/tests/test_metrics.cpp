#include "doctest.h"

#include <algorithm>
#include <random>

#include "ngc/metrics.hpp"

using namespace ngc;

namespace {

// Trapezoidal area under the ROC curve, the oracle for the rank-based
// computation. Thresholds sweep the union of observed scores.
double trapezoid_auroc(const std::vector<double>& ind, const std::vector<double>& ood) {
    std::vector<double> thresholds = ind;
    thresholds.insert(thresholds.end(), ood.begin(), ood.end());
    std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

    auto rate_at = [](const std::vector<double>& scores, double t) {
        int count = 0;
        for (double s : scores) count += s >= t;
        return static_cast<double>(count) / scores.size();
    };

    double area = 0.0, prev_fpr = 0.0, prev_tpr = 0.0;
    for (double t : thresholds) {
        const double fpr = rate_at(ood, t);
        const double tpr = rate_at(ind, t);
        area += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
        prev_fpr = fpr;
        prev_tpr = tpr;
    }
    area += (1.0 - prev_fpr) * (1.0 + prev_tpr) / 2.0;
    return area;
}

std::vector<double> random_scores(int n, std::mt19937_64& rng, bool with_ties) {
    std::vector<double> scores(n);
    if (with_ties) {
        std::uniform_int_distribution<int> grid(0, 19);
        for (double& s : scores) s = grid(rng) / 19.0;
    } else {
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        for (double& s : scores) s = uni(rng);
    }
    return scores;
}

}  // namespace

TEST_CASE("accuracy over in-distribution truth") {
    SUBCASE("all correct") { CHECK(accuracy({0, 1, 2}, {0, 1, 2}) == 1.0); }
    SUBCASE("all wrong") { CHECK(accuracy({1, 2, 0}, {0, 1, 2}) == 0.0); }
    SUBCASE("three of four") { CHECK(accuracy({0, 1, 2, 2}, {0, 1, 2, 1}) == 0.75); }
    SUBCASE("OOD truth is excluded") {
        CHECK(accuracy({0, 1, 0}, {0, 1, kOodLabel}) == 1.0);
    }
    SUBCASE("no in-distribution samples is an error") {
        CHECK_THROWS_AS(accuracy({0}, {kOodLabel}), std::invalid_argument);
    }
}

TEST_CASE("auroc basics") {
    SUBCASE("perfect separation") { CHECK(auroc({0.9, 0.8}, {0.1, 0.2}) == 1.0); }
    SUBCASE("identical distributions score half") {
        CHECK(auroc({0.5, 0.5}, {0.5, 0.5}) == 0.5);
    }
    SUBCASE("three of four pairs") { CHECK(auroc({0.9, 0.4}, {0.5, 0.1}) == 0.75); }
    SUBCASE("empty sets are errors") {
        CHECK_THROWS_AS(auroc({}, {0.5}), std::invalid_argument);
        CHECK_THROWS_AS(auroc({0.5}, {}), std::invalid_argument);
    }
}

TEST_CASE("auroc flips exactly under score negation") {
    std::mt19937_64 rng(83);
    for (int trial = 0; trial < 20; ++trial) {
        const auto ind = random_scores(40, rng, trial % 2 == 0);
        const auto ood = random_scores(30, rng, trial % 2 == 0);
        std::vector<double> neg_ind(ind.size()), neg_ood(ood.size());
        std::transform(ind.begin(), ind.end(), neg_ind.begin(), std::negate<>());
        std::transform(ood.begin(), ood.end(), neg_ood.begin(), std::negate<>());
        CHECK(auroc(ind, ood) + auroc(neg_ind, neg_ood) == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("auroc is invariant under strictly monotone transforms") {
    std::mt19937_64 rng(89);
    const auto ind = random_scores(50, rng, true);
    const auto ood = random_scores(50, rng, true);
    auto warp = [](const std::vector<double>& v) {
        std::vector<double> out(v.size());
        std::transform(v.begin(), v.end(), out.begin(),
                       [](double s) { return std::exp(3.0 * s) - 7.0; });
        return out;
    };
    CHECK(auroc(ind, ood) == auroc(warp(ind), warp(ood)));
}

TEST_CASE("rank-based auroc equals the trapezoid oracle with ties") {
    std::mt19937_64 rng(97);
    for (int trial = 0; trial < 50; ++trial) {
        const int n1 = 1 + static_cast<int>(rng() % 200);
        const int n2 = 1 + static_cast<int>(rng() % 200);
        const auto ind = random_scores(n1, rng, trial % 3 != 0);
        const auto ood = random_scores(n2, rng, trial % 3 != 0);
        CHECK(std::abs(auroc(ind, ood) - trapezoid_auroc(ind, ood)) < 1e-12);
    }
}

TEST_CASE("f_measure follows the per-class contingency rules") {
    SUBCASE("symmetric precision and recall collapse to their value") {
        // Class 0: Tp=2, Fp=1, Fn=1 so p = r = 2/3 and F = 2/3.
        const std::vector<Verdict> verdicts{
            {false, 0}, {false, 0}, {false, 0}, {false, 1}};
        const std::vector<int> truth{0, 0, 1, 0};
        // Class 1: Tp=0 (sample 2 predicted 0), Fp=1, Fn=1.
        const double f = f_measure(verdicts, truth, 2);
        CHECK(f == doctest::Approx((2.0 / 3.0 + 0.0) / 2.0).epsilon(1e-12));
    }
    SUBCASE("direct evaluation of Tp=2 Fp=1 Fn=1") {
        // Single class in play: truth {0,0,0,1}, predictions {0,0,1,0}.
        const std::vector<Verdict> verdicts{{false, 0}, {false, 0}, {false, 1}, {false, 0}};
        const std::vector<int> truth{0, 0, 0, kOodLabel};
        // Class 0: Tp=2, Fn=1, Fp=1 (the accepted OOD sample) -> F = 2/3.
        // Class 1: Fp=1 only -> F = 0.
        CHECK(f_measure(verdicts, truth, 2) == doctest::Approx((2.0 / 3.0) / 2.0));
    }
    SUBCASE("a perfect open-set classifier scores one") {
        const std::vector<Verdict> verdicts{{false, 0}, {false, 1}, {true, 0}, {true, 1}};
        const std::vector<int> truth{0, 1, kOodLabel, kOodLabel};
        CHECK(f_measure(verdicts, truth, 2) == 1.0);
    }
    SUBCASE("rejected in-distribution samples are false negatives") {
        const std::vector<Verdict> verdicts{{true, 0}, {false, 0}};
        const std::vector<int> truth{0, 0};
        // Tp=1, Fn=1, Fp=0: p=1, r=1/2, F=2/3.
        CHECK(f_measure(verdicts, truth, 1) == doctest::Approx(2.0 / 3.0));
    }
    SUBCASE("classes absent from truth and predictions are skipped") {
        const std::vector<Verdict> verdicts{{false, 0}};
        const std::vector<int> truth{0};
        CHECK(f_measure(verdicts, truth, 5) == 1.0);
    }
}

TEST_CASE("f_measure stays within [0,1]") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 50);
        const int k = 2 + static_cast<int>(rng() % 4);
        std::vector<Verdict> verdicts(n);
        std::vector<int> truth(n);
        for (int i = 0; i < n; ++i) {
            verdicts[i] = {rng() % 4 == 0, static_cast<int>(rng() % k)};
            truth[i] = rng() % 5 == 0 ? kOodLabel : static_cast<int>(rng() % k);
        }
        const double f = f_measure(verdicts, truth, k);
        CHECK(f >= 0.0);
        CHECK(f <= 1.0);
    }
}

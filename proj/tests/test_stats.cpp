#include <doctest.h>

#include <cmath>
#include <random>

#include "wxmood/stats.hpp"

using namespace wxmood;

namespace {

struct Fixture {
    std::size_t n;
    double r;
    double p; // 2 * upper tail of Student's t, integrated at 40 digits
};

const Fixture kFixtures[] = {
    {20, 0.5, 0.024769558804109692574},    {3, 0.9, 0.28713258625741250907},
    {4, -0.3, 0.7000000000000000111},      {5, 0.99, 0.0011986195114020064524},
    {10, 0.1, 0.78342440624999998822},     {12, -0.7, 0.011257326210937507394},
    {30, 0.3, 0.10724594805795436374},     {50, 0.05, 0.73022457310064085656},
    {100, -0.25, 0.012123198389913776057}, {27, 0.776, 1.9716023101110101624e-6},
};

// 1 - 2 * integral of the t density over [0, |t|], composite Simpson in long double.
double simpson_p(std::size_t n, double r) {
    const long double df = static_cast<long double>(n) - 2;
    const long double t = std::fabs(r) * std::sqrt(df / (1 - static_cast<long double>(r) * r));
    const long double c = std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2)) / std::sqrt(df * M_PI);
    auto f = [&](long double x) { return c * std::pow(1 + x * x / df, -(df + 1) / 2); };
    const int m = 200'000;
    const long double h = t / m;
    long double s = f(0) + f(t);
    for (int i = 1; i < m; ++i)
        s += f(i * h) * (i % 2 ? 4 : 2);
    return static_cast<double>(1 - 2 * s * h / 3);
}

// Data with an exact sample correlation r: y = r * x + sqrt(1 - r^2) * e with
// x and e centred, equal-norm and orthogonal.
std::pair<std::vector<double>, std::vector<double>> with_correlation(std::size_t n, double r) {
    std::vector<double> x(n), e(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = std::cos(2 * M_PI * i / n);
        e[i] = std::sin(2 * M_PI * i / n);
    }
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i)
        y[i] = r * x[i] + std::sqrt(1 - r * r) * e[i];
    return {x, y};
}

} // namespace

TEST_CASE("p-values match the integration oracles") {
    for (const auto& f : kFixtures) {
        CAPTURE(f.n);
        CAPTURE(f.r);
        CHECK(std::fabs(correlation_p_value(f.r, f.n) - f.p) < 1e-8);
        CHECK(std::fabs(simpson_p(f.n, f.r) - f.p) < 1e-8);
        if (f.n >= 3) {
            const auto [x, y] = with_correlation(f.n, f.r);
            const auto c = pearson_r_p(x, y);
            REQUIRE(c);
            CHECK(c->r == doctest::Approx(f.r).epsilon(1e-12));
            CHECK(std::fabs(c->p - f.p) < 1e-8);
        }
    }
}

TEST_CASE("perfect and degenerate correlations") {
    const std::vector<double> x{1, 2, 3, 4, 5};
    std::vector<double> y, neg, flat(5, 2.0);
    for (double v : x) {
        y.push_back(2 * v + 1);
        neg.push_back(-v);
    }
    const auto up = pearson_r_p(x, y);
    REQUIRE(up);
    CHECK(up->r == 1.0);
    CHECK(up->p == 0.0);
    const auto down = pearson_r_p(x, neg);
    REQUIRE(down);
    CHECK(down->r == -1.0);
    CHECK(down->p == 0.0);

    CHECK_FALSE(pearson_r_p(x, flat));
    CHECK_FALSE(pearson_r_p(std::vector<double>{1, 2}, std::vector<double>{3, 4}));
    CHECK_FALSE(pearson_r_p(x, std::vector<double>{1, 2, 3}));
}

TEST_CASE("correlation is symmetric and affine invariant") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> nd;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 3 + rng() % 40;
        std::vector<double> x(n), y(n), xa(n), yb(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = nd(rng);
            y[i] = 0.5 * x[i] + nd(rng);
            xa[i] = 3.0 * x[i] - 7.0;
            yb[i] = 0.25 * y[i] + 100.0;
        }
        const auto a = pearson_r_p(x, y);
        const auto b = pearson_r_p(y, x);
        const auto c = pearson_r_p(xa, yb);
        REQUIRE(a);
        CHECK(a->r == b->r);
        CHECK(a->p == b->p);
        CHECK(c->r == doctest::Approx(a->r).epsilon(1e-12));
        CHECK(a->r >= -1.0);
        CHECK(a->r <= 1.0);
        CHECK(a->p >= 0.0);
        CHECK(a->p <= 1.0);
    }
}

TEST_CASE("ranks and Spearman") {
    CHECK(average_ranks(std::vector<double>{10, 20, 20, 5}) == std::vector<double>{2, 3.5, 3.5, 1});
    CHECK(average_ranks(std::vector<double>{}).empty());

    const std::vector<double> x{1, 2, 3, 4, 5, 6};
    const std::vector<double> cubic{1, 8, 27, 64, 125, 216};
    CHECK(spearman(x, cubic)->r == doctest::Approx(1.0));
    const std::vector<double> tied{1, 1, 2, 2, 3, 3};
    // Pearson on ranks {1..6} vs {1.5,1.5,3.5,3.5,5.5,5.5}.
    CHECK(spearman(x, tied)->r == doctest::Approx(0.9561828874675149).epsilon(1e-12));
    CHECK_FALSE(spearman(x, std::vector<double>(6, 1.0)));
}

TEST_CASE("mean and population sd") {
    const auto m = mean_sd(std::vector<double>{0.1, 0.3});
    CHECK(m.mean == doctest::Approx(0.2));
    CHECK(m.sd == doctest::Approx(0.1));
    CHECK(mean_sd(std::vector<double>{}).sd == 0.0);
}

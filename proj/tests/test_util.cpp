#include <doctest.h>

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "cst/parallel.hpp"
#include "cst/random.hpp"
#include "cst/timeutil.hpp"

using namespace cst;

TEST_CASE("timestamps parse and format both separators") {
    const auto a = parse_timestamp("2020-01-31T13:30");
    const auto b = parse_timestamp("2020-01-31 13:30:00");
    REQUIRE(a);
    REQUIRE(b);
    CHECK(*a == *b);
    CHECK(format_timestamp(*a) == "2020-01-31T13:30:00");
    CHECK(hour_of_day(*a) == 13.5);
    CHECK(month_of(*a) == 1);
    CHECK(format_date(date_of(add_hours(*a, 12.0))) == "2020-02-01");
}

TEST_CASE("malformed timestamps are rejected") {
    CHECK_FALSE(parse_timestamp(""));
    CHECK_FALSE(parse_timestamp("2020-01-31"));
    CHECK_FALSE(parse_timestamp("2020-01-31T25:00"));
    CHECK_FALSE(parse_timestamp("2020-02-30T10:00"));
    CHECK_FALSE(parse_timestamp("2020-01-31X10:00"));
    CHECK_FALSE(parse_timestamp("2020-01-31T10:00Z"));
    CHECK_FALSE(parse_date("2021-02-29"));
    CHECK(parse_date("2020-02-29"));
}

TEST_CASE("rng is reproducible and in range") {
    Rng a(123), b(123), c(124);
    bool differs = false;
    for (int i = 0; i < 1000; ++i) {
        const auto x = a.next_u64();
        CHECK(x == b.next_u64());
        differs = differs || x != c.next_u64();
    }
    CHECK(differs);

    Rng r(1);
    std::vector<int> hist(7, 0);
    for (int i = 0; i < 70000; ++i) {
        const double u = r.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        ++hist[r.below(7)];
    }
    for (int h : hist) CHECK(std::abs(h - 10000) < 500);
    CHECK(r.below(0) == 0);
    CHECK(r.below(1) == 0);
}

TEST_CASE("normal draws have roughly unit moments") {
    Rng r(77);
    double sum = 0, sq = 0;
    const int n = 50000;
    for (int i = 0; i < n; ++i) {
        const double x = r.normal();
        sum += x;
        sq += x * x;
    }
    CHECK(std::abs(sum / n) < 0.03);
    CHECK(std::abs(sq / n - 1.0) < 0.03);
}

TEST_CASE("parallel_for runs every index once") {
    for (unsigned jobs : {1u, 3u, 8u}) {
        std::vector<std::atomic<int>> hits(101);
        parallel_for(hits.size(), jobs, [&](std::size_t i) { ++hits[i]; });
        for (auto& h : hits) CHECK(h.load() == 1);
    }
    parallel_for(0, 4, [](std::size_t) { FAIL("no work expected"); });
}

TEST_CASE("parallel_for rethrows the lowest failing index after finishing") {
    std::atomic<int> ran{0};
    try {
        parallel_for(20, 4, [&](std::size_t i) {
            ++ran;
            if (i == 7 || i == 13) throw std::runtime_error("fail " + std::to_string(i));
        });
        FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "fail 7");
    }
    CHECK(ran.load() == 20);
    CHECK(default_jobs() >= 1);
}

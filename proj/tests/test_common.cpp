#include <doctest.h>

#include <algorithm>
#include <threatkg/rng.hpp>
#include <threatkg/text.hpp>

using namespace tkg;

TEST_CASE("rng is deterministic under seed") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    CHECK(a.uniform_real() == b.uniform_real());
    CHECK(a.normal() == b.normal());
}

TEST_CASE("uniform_index stays in bounds and covers the range") {
    Rng rng(7);
    std::vector<int> seen(5, 0);
    for (int i = 0; i < 5000; ++i) {
        const auto x = rng.uniform_index(5);
        REQUIRE(x < 5);
        ++seen[x];
    }
    for (const int c : seen) CHECK(c > 800);  // ~1000 expected
}

TEST_CASE("shuffle produces a permutation, deterministic per seed") {
    std::vector<int> v(50);
    for (int i = 0; i < 50; ++i) v[i] = i;
    std::vector<int> w = v;
    Rng a(3), b(3);
    a.shuffle(v);
    b.shuffle(w);
    CHECK(v == w);
    std::sort(w.begin(), w.end());
    for (int i = 0; i < 50; ++i) CHECK(w[i] == i);
}

TEST_CASE("trim and split") {
    CHECK(trim("  x \t") == "x");
    CHECK(trim("\r\n") == "");
    CHECK(trim("intel-update[.]com") == "intel-update[.]com");
    const auto f = split("a\tb\t", '\t');
    REQUIRE(f.size() == 3);
    CHECK(f[0] == "a");
    CHECK(f[1] == "b");
    CHECK(f[2] == "");
}

TEST_CASE("split_lines handles CRLF and missing final newline") {
    const auto lines = split_lines("a\r\nb\nc");
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "a");
    CHECK(lines[1] == "b");
    CHECK(lines[2] == "c");
}

TEST_CASE("levenshtein distances") {
    CHECK(levenshtein("Stealer", "Stealer") == 0);
    CHECK(levenshtein("Stealer", "stealer") == 1);
    CHECK(levenshtein("DUSTMAN", "DUSTMEN") == 1);
    CHECK(levenshtein("abc", "") == 3);
}

TEST_CASE("nearest_strings caps distance and count") {
    const std::vector<std::string> pool{"DUSTMAN", "ZeroCleare", "DUSTMEN", "dust"};
    const auto near = nearest_strings("DUSTMAN", pool, 2, 5);
    REQUIRE(near.size() == 2);
    CHECK(near[0] == "DUSTMAN");
    CHECK(near[1] == "DUSTMEN");
}

TEST_CASE("fixed-point formatting rounds at the display precision") {
    CHECK(format_fixed(3027.0 / 5741.0, 4) == "0.5273");
    CHECK(format_fixed(40000.0 / 27354.0, 2) == "1.46");
    CHECK(format_fixed(3027.0 / (5741.0 * 5741.0), 5) == "0.00009");
}

TEST_CASE("scientific formatting truncates the mantissa to two decimals") {
    CHECK(format_sci_trunc2(40000.0 / (27354.0 * 27354.0)) == "5.34e-05");
    CHECK(format_sci_trunc2(3027.0 / (5741.0 * 5741.0)) == "9.18e-05");
    CHECK(format_sci_trunc2(0.0) == "0.00e+00");
    CHECK(format_sci_trunc2(1.0) == "1.00e+00");
    CHECK(format_sci_trunc2(-0.025) == "-2.50e-02");
}

TEST_CASE("json escaping") {
    CHECK(json_escape("a\"b\\c\nd") == "a\\\"b\\\\c\\nd");
    CHECK(json_escape("intel-update[.]com") == "intel-update[.]com");
}

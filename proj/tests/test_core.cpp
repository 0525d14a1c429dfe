#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "illumwave/csv.hpp"
#include "illumwave/lp.hpp"
#include "illumwave/sha256.hpp"
#include "illumwave/threading.hpp"

using namespace ilw;

TEST_CASE("sha256 known vectors") {
    CHECK(sha256_hex("") ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(sha256_hex("abc") ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("The quick brown fox jumps over the lazy dog") ==
          "d7a8fbb307d7809469ca9abcb0082e4f8d5651e46d3cdb762d02d0bf37c9e592");
    // long input exercises multi-block updates
    std::string many(1000, 'a');
    Sha256 h;
    for (int i = 0; i < 1000; ++i) h.update(many.data(), 1);
    CHECK(h.hex_digest() == sha256_hex(std::string(1000, 'a')));
}

TEST_CASE("csv round trip preserves doubles exactly") {
    CsvTable t;
    t.add_column("a");
    t.add_column("b");
    t.append_row({1.0 / 3.0, -2.5e-17});
    t.append_row({6.02214076e23, 0.0});
    auto path = std::filesystem::temp_directory_path() / "illumwave_csv_test.csv";
    t.write(path.string());
    CsvTable r = CsvTable::read(path.string());
    REQUIRE(r.rows() == 2);
    CHECK(r.col("a")[0] == 1.0 / 3.0);
    CHECK(r.col("a")[1] == 6.02214076e23);
    CHECK(r.col("b")[0] == -2.5e-17);
    std::filesystem::remove(path);
}

TEST_CASE("simplex covering LP") {
    // min x1 + x2 s.t. x1 + 2 x2 >= 4, 3 x1 + x2 >= 6: optimum at (1.6, 1.2)
    LpResult r = lp_min({1.0, 1.0}, {{1.0, 2.0}, {3.0, 1.0}}, {4.0, 6.0});
    REQUIRE(r.feasible);
    CHECK(r.x[0] == doctest::Approx(1.6).epsilon(1e-9));
    CHECK(r.x[1] == doctest::Approx(1.2).epsilon(1e-9));
    CHECK(r.objective == doctest::Approx(2.8).epsilon(1e-9));
}

TEST_CASE("simplex with inactive constraints") {
    // all rhs nonpositive: zero is optimal
    LpResult r = lp_min({2.0, 1.0}, {{1.0, 0.0}, {0.0, 1.0}}, {-1.0, 0.0});
    REQUIRE(r.feasible);
    CHECK(r.x[0] == doctest::Approx(0.0));
    CHECK(r.x[1] == doctest::Approx(0.0));
}

TEST_CASE("profile lambda fit") {
    std::vector<std::vector<double>> A = {{2.0, 1.0}, {1.0, 3.0}};
    std::vector<double> b = {6.0, -1.0};
    std::vector<double> w = {1.0, 1.0};
    // row 1: lambda (2+1) >= 6 -> lambda = 2; row 2 inactive
    CHECK(fit_profile_lambda(A, b, w) == doctest::Approx(2.0));
    // infeasible along the profile when a positive rhs row sees zero coverage
    CHECK(fit_profile_lambda({{0.0, 0.0}}, {1.0}, w) < 0.0);
}

TEST_CASE("parallel slabs cover every index once") {
    std::vector<int> hits(257, 0);
    parallel_for_slabs(257, 4, [&](int64_t s) { hits[size_t(s)] += 1; });
    for (int h : hits) CHECK(h == 1);
}

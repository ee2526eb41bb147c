#include <catch2/catch_amalgamated.hpp>

#include "reslab/tail_vector.hpp"

using namespace reslab;

TEST_CASE("basis vectors and coefficient access") {
    TailVec e3 = TailVec::basis(3);
    REQUIRE(e3.coeff(3) == cx{1.0, 0.0});
    REQUIRE(e3.coeff(1) == cx{0.0, 0.0});
    REQUIRE(e3.coeff(99) == cx{0.0, 0.0});
    REQUIRE(e3.support() == 3);
    REQUIRE(e3.norm_upper() == 1.0);
}

TEST_CASE("arithmetic keeps exactness on finite vectors") {
    TailVec x = add(TailVec::basis(1), scaled(cx{2.0, 0.0}, TailVec::basis(2)));
    REQUIRE(x.coeff(1) == cx{1.0, 0.0});
    REQUIRE(x.coeff(2) == cx{2.0, 0.0});
    TailVec y = sub(x, x);
    REQUIRE(y.rep_norm() == 0.0);
    REQUIRE(y.tail == 0.0);
}

TEST_CASE("tail bounds are added, never cancelled") {
    TailVec x = TailVec::basis(1);
    x.tail = 1e-3;
    TailVec y = TailVec::basis(1);
    y.tail = 2e-3;
    REQUIRE(sub(x, y).tail == Catch::Approx(3e-3));
    REQUIRE(add(x, y).tail == Catch::Approx(3e-3));
    REQUIRE(scaled(cx{0.0, 2.0}, x).tail == Catch::Approx(2e-3));
}

TEST_CASE("distance_upper includes both tails") {
    TailVec x = TailVec::basis(1);
    TailVec y = TailVec::basis(2);
    REQUIRE(distance_upper(x, y) == Catch::Approx(std::sqrt(2.0)));
    x.tail = 0.5;
    REQUIRE(distance_upper(x, y) == Catch::Approx(std::sqrt(2.0) + 0.5));
}

TEST_CASE("inner product conjugates the second argument") {
    TailVec x = scaled(cx{0.0, 1.0}, TailVec::basis(1));
    TailVec y = TailVec::basis(1);
    REQUIRE(inner(x, y) == cx{0.0, 1.0});
    REQUIRE(inner(y, x) == cx{0.0, -1.0});
}

TEST_CASE("inner_error_bound covers the unseen mass") {
    TailVec x = TailVec::basis(1);
    x.tail = 0.1;
    TailVec y = TailVec::basis(1);
    y.tail = 0.2;
    // |<x,y> - rep part| <= tx*|y| + ty*|x| + tx*ty
    double b = inner_error_bound(x, y);
    REQUIRE(b >= 0.1 * 1.0 + 0.2 * 1.0);
}

TEST_CASE("axpy matches add of scaled") {
    TailVec x = random_probes(1, 6, 7)[0];
    TailVec y = random_probes(1, 6, 8)[0];
    TailVec z = y;
    axpy(cx{0.5, -0.25}, x, z);
    REQUIRE(distance_upper(z, add(y, scaled(cx{0.5, -0.25}, x))) <= 1e-15);
}

TEST_CASE("trim drops exact zeros only") {
    TailVec x;
    x.a = {cx{1.0, 0.0}, cx{0.0, 0.0}, cx{0.0, 0.0}};
    x.trim();
    REQUIRE(x.len() == 1);
}

TEST_CASE("probe generators are deterministic in the seed") {
    std::vector<TailVec> a = random_probes(3, 12, 42);
    std::vector<TailVec> b = random_probes(3, 12, 42);
    std::vector<TailVec> c = random_probes(3, 12, 43);
    for (std::size_t i = 0; i < 3; ++i) REQUIRE(distance_upper(a[i], b[i]) == 0.0);
    REQUIRE(distance_upper(a[0], c[0]) > 0.0);
    REQUIRE(unit_probes(4).size() == 4);
    REQUIRE(standard_probes(1).size() > 16);
}

TEST_CASE("block vectors place coordinates in the right slot") {
    BlockVec b = BlockVec::basis_in(2, 5, 4);
    REQUIRE(b.parts() == 4);
    REQUIRE(b.part[2].coeff(5) == cx{1.0, 0.0});
    REQUIRE(b.part[0].support() == 0);
    REQUIRE(b.norm_upper() == 1.0);

    BlockVec s = BlockVec::single(TailVec::basis(1));
    REQUIRE(s.parts() == 1);
    REQUIRE(distance_upper(b, b) == 0.0);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "uwb/dstbc.hpp"
#include "uwb/simkit.hpp"

#include <vector>

using namespace uwb;

namespace {

Eigen::Matrix2i mat(int a, int b, int c, int d) {
    Eigen::Matrix2i m;
    m << a, b, c, d;
    return m;
}

}  // namespace

TEST_CASE("codebook matrices and construction property") {
    CHECK(Codeword::from_index(1).imatrix() == mat(1, 0, 0, 1));
    CHECK(Codeword::from_index(2).imatrix() == mat(0, 1, -1, 0));
    CHECK(Codeword::from_index(3).imatrix() == mat(-1, 0, 0, -1));
    CHECK(Codeword::from_index(4).imatrix() == mat(0, -1, 1, 0));
    for (int m = 1; m <= 4; ++m) {
        const Eigen::Matrix2i u = Codeword::from_index(m).imatrix();
        CHECK(u * u.transpose() == Eigen::Matrix2i::Identity());
        CHECK(u.transpose() * u == Eigen::Matrix2i::Identity());
        // Signed permutation: one nonzero per row and column.
        for (int r = 0; r < 2; ++r)
            CHECK((u(r, 0) != 0) + (u(r, 1) != 0) == 1);
        for (int c = 0; c < 2; ++c)
            CHECK((u(0, c) != 0) + (u(1, c) != 0) == 1);
    }
}

TEST_CASE("the codebook is an abelian group of order 4") {
    // Closure, commutativity and agreement with literal matrix products,
    // checked over all 16 pairs.
    for (int a = 1; a <= 4; ++a) {
        for (int b = 1; b <= 4; ++b) {
            const Codeword ua = Codeword::from_index(a);
            const Codeword ub = Codeword::from_index(b);
            const Eigen::Matrix2i prod = ua.imatrix() * ub.imatrix();
            const Codeword uc = group_mul(ua, ub);
            CHECK(uc.imatrix() == prod);
            CHECK(group_mul(ub, ua) == uc);
        }
    }
    // Identity element and inverses.
    for (int m = 1; m <= 4; ++m) {
        const Codeword u = Codeword::from_index(m);
        CHECK(group_mul(Codeword::from_index(1), u) == u);
        CHECK(group_mul(u, group_inverse(u)) == Codeword::from_index(1));
    }
    // Z4 structure: U(2) squared is U(3), U(2)*U(4) is the identity.
    Codeword x = Codeword::from_index(2);
    CHECK(group_mul(x, x) == Codeword::from_index(3));
    CHECK(group_mul(x, Codeword::from_index(4)) == Codeword::from_index(1));
}

TEST_CASE("Gray mapping") {
    CHECK(codeword_from_bits({0, 0}) == Codeword::from_index(1));
    CHECK(codeword_from_bits({0, 1}) == Codeword::from_index(2));
    CHECK(codeword_from_bits({1, 1}) == Codeword::from_index(3));
    CHECK(codeword_from_bits({1, 0}) == Codeword::from_index(4));
    for (int b1 = 0; b1 <= 1; ++b1)
        for (int b2 = 0; b2 <= 1; ++b2) {
            const BitPair bits{b1, b2};
            CHECK(bits_from_codeword(codeword_from_bits(bits)) == bits);
        }
    CHECK(bits_from_codeword(Codeword::from_index(2)) == BitPair{0, 1});
    // Adjacent codewords in the cycle differ in exactly one bit.
    for (int m = 1; m <= 4; ++m)
        CHECK(bit_distance(Codeword::from_index(m),
                           Codeword::from_index(m % 4 + 1)) == 1);
    CHECK(bit_distance(Codeword::from_index(1), Codeword::from_index(3)) == 2);
}

TEST_CASE("matrix lookup rejects non-codewords") {
    CHECK(codeword_from_matrix(mat(0, 1, -1, 0)) == Codeword::from_index(2));
    CHECK_THROWS_AS(codeword_from_matrix(mat(2, 0, 0, 2)),
                    std::invalid_argument);
    CHECK_THROWS_AS(codeword_from_matrix(mat(1, 0, 0, -1)),
                    std::invalid_argument);
}

TEST_CASE("differential encoding") {
    SUBCASE("empty input yields just the reference symbol") {
        const auto out = differential_encode({});
        REQUIRE(out.size() == 1);
        CHECK(out[0].d == mat(1, 1, 1, -1));
    }
    SUBCASE("identity codeword repeats D0") {
        const std::vector<Codeword> info{Codeword::from_index(1)};
        const auto out = differential_encode(info);
        REQUIRE(out.size() == 2);
        CHECK(out[0] == out[1]);
    }
    SUBCASE("U(2) step") {
        const std::vector<Codeword> info{Codeword::from_index(2)};
        const auto out = differential_encode(info);
        REQUIRE(out.size() == 2);
        CHECK(out[1].d == mat(-1, 1, 1, 1));
    }
}

TEST_CASE("every differentially encoded symbol stays orthogonal") {
    RngStream rng = derive_stream(11, "encode", 0);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<Codeword> info;
        const int len = 1 + static_cast<int>(rng.next_u64() % 16);
        for (int i = 0; i < len; ++i)
            info.push_back(
                Codeword::from_index(1 + static_cast<int>(rng.next_u64() & 3)));
        const auto symbols = differential_encode(info);
        CHECK(symbols.size() == info.size() + 1);
        for (const SymbolMatrix& s : symbols) CHECK(is_valid_symbol(s));
    }
}

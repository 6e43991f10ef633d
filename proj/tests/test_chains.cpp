#include <catch2/catch.hpp>

#include <algorithm>
#include <random>
#include <vector>

#include "cubeflow/chains.hpp"

using namespace cubeflow;

namespace {

// Independent expansion of the Serre diagonal straight from the tensor
// definition: per coordinate, [0,1] splits as [0] (x) [0,1] or [0,1] (x) [1],
// and the Koszul convention contributes (-1) for every pair i < j where the
// second factor at i (degree 1) moves past the first factor at j (degree 1).
struct OracleTerm {
    FacePartition left, right;
    int sign;
};

std::vector<OracleTerm> koszul_diagonal_oracle(int d) {
    std::vector<OracleTerm> terms;
    for (AxisMask choice = 0; choice < (AxisMask(1) << d); ++choice) {
        // bit set at i-1 <-> coordinate i splits as [0,1] (x) [1].
        int koszul = 0;
        for (int i = 1; i <= d; ++i)
            for (int j = i + 1; j <= d; ++j) {
                bool second_at_i_free = !(choice & axis_bit(i));  // x_i^(2) = [0,1]
                bool first_at_j_free = (choice & axis_bit(j));    // x_j^(1) = [0,1]
                if (second_at_i_free && first_at_j_free) ++koszul;
            }
        AxisMask free_left = choice;
        AxisMask free_right = full_mask(d) & ~choice;
        terms.push_back({FacePartition(d, free_right, free_left, 0),
                         FacePartition(d, 0, free_right, choice), (koszul % 2) ? -1 : +1});
    }
    return terms;
}

IntCochain random_cochain(const CubicalComplex& complex, int degree, std::mt19937& rng) {
    IntCochain out(&complex, degree);
    std::uniform_int_distribution<int> value(-3, 3);
    for (CubeId c : complex.cubes_of_dim(degree)) out.set(c, value(rng));
    return out;
}

IntChain random_chain(const CubicalComplex& complex, int degree, std::mt19937& rng) {
    IntChain out(&complex, degree);
    std::uniform_int_distribution<int> value(-3, 3);
    for (CubeId c : complex.cubes_of_dim(degree)) out.set(c, value(rng));
    return out;
}

int vid33(int i, int j) { return ((i % 3) + 3) % 3 * 3 + ((j % 3) + 3) % 3; }

CubeId square33(const CubicalComplex& t2, int i, int j) {
    return *t2.find_by_vertices({vid33(i, j), vid33(i + 1, j), vid33(i, j + 1), vid33(i + 1, j + 1)});
}
CubeId hedge33(const CubicalComplex& t2, int i, int j) {
    return *t2.find_by_vertices({vid33(i, j), vid33(i + 1, j)});
}
CubeId vedge33(const CubicalComplex& t2, int i, int j) {
    return *t2.find_by_vertices({vid33(i, j), vid33(i, j + 1)});
}

}  // namespace

TEST_CASE("boundary of an edge is terminal minus initial", "[chains]") {
    auto complex = build_cube_complex(1);
    auto edge = *complex.find_by_vertices({0, 1});
    auto b = boundary(complex, edge);
    CHECK(b[*complex.find_by_vertices({1})] == 1);
    CHECK(b[*complex.find_by_vertices({0})] == -1);
}

TEST_CASE("boundary of a square follows the Leibniz signs", "[chains]") {
    auto complex = build_cube_complex(2);
    auto square = *complex.find_by_vertices({0, 1, 2, 3});
    auto b = boundary(complex, square);
    auto bottom = *complex.find_by_vertices({0, 1});
    auto right = *complex.find_by_vertices({1, 3});
    auto left = *complex.find_by_vertices({0, 2});
    auto top = *complex.find_by_vertices({2, 3});
    CHECK(b[right] == 1);
    CHECK(b[left] == -1);
    CHECK(b[top] == -1);
    CHECK(b[bottom] == 1);
}

TEST_CASE("fundamental 2-chain of the torus is a cycle", "[chains]") {
    auto t2 = build_torus_grid({3, 3});
    IntChain fundamental(&t2, 2);
    for (CubeId c : t2.cubes_of_dim(2)) fundamental.set(c, 1);
    CHECK(boundary(fundamental).empty());
}

TEST_CASE("boundary of boundary vanishes", "[chains]") {
    for (int d = 1; d <= 6; ++d) {
        auto complex = build_cube_complex(d);
        for (CubeId c : complex.cubes_of_dim(d)) {
            IntChain one(&complex, d);
            one.set(c, 1);
            CHECK(boundary(boundary(one)).empty());
        }
    }
    std::mt19937 rng(7);
    auto t2 = build_torus_grid({3, 3});
    for (int trial = 0; trial < 50; ++trial) CHECK(boundary(boundary(random_chain(t2, 2, rng))).empty());

    // Degree 0 returns the zero chain by convention.
    auto pt = build_cube_complex(0);
    IntChain vertex_chain(&pt, 0);
    vertex_chain.set(pt.id(0), 1);
    CHECK(boundary(vertex_chain).empty());
}

TEST_CASE("coboundary is the transpose of boundary", "[chains]") {
    auto circle = build_torus_grid({3});
    // Indicator of one vertex: signed sum of incident edges.
    IntCochain alpha(&circle, 0);
    auto v0 = *circle.find_by_vertices({0});
    alpha.set(v0, 1);
    auto d = coboundary(alpha);
    int nonzero = 0;
    for (CubeId e : circle.cubes_of_dim(1)) {
        auto b = boundary(circle, e);
        CHECK(d[e] == b[v0]);
        if (d[e] != 0) ++nonzero;
    }
    CHECK(nonzero == 2);

    IntCochain zero(&circle, 0);
    CHECK(coboundary(zero).empty());
}

TEST_CASE("column of horizontal edges is a cocycle on the torus", "[chains]") {
    auto t2 = build_torus_grid({3, 3});
    IntCochain alpha(&t2, 1);
    for (int j = 0; j < 3; ++j) alpha.set(hedge33(t2, 0, j), 1);
    CHECK(coboundary(alpha).empty());
}

TEST_CASE("coboundary squares to zero and pairs with boundary", "[chains]") {
    auto t2 = build_torus_grid({3, 3});
    std::mt19937 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        auto alpha = random_cochain(t2, 0, rng);
        CHECK(coboundary(coboundary(alpha)).empty());
        auto beta = random_cochain(t2, 1, rng);
        auto c = random_chain(t2, 2, rng);
        CHECK(evaluate(coboundary(beta), c) == evaluate(beta, boundary(c)));
        auto c1 = random_chain(t2, 1, rng);
        CHECK(evaluate(coboundary(alpha), c1) == evaluate(alpha, boundary(c1)));
    }
}

TEST_CASE("serre diagonal of low cubes has the classical terms", "[chains]") {
    auto interval = build_cube_complex(1);
    auto edge = *interval.find_by_vertices({0, 1});
    auto terms = serre_diagonal(interval, edge);
    REQUIRE(terms.size() == 2);
    // [0] (x) [0,1] + [0,1] (x) [1].
    auto v0 = *interval.find_by_vertices({0});
    auto v1 = *interval.find_by_vertices({1});
    CHECK(terms[0].left == v0);
    CHECK(terms[0].right == edge);
    CHECK(terms[0].sign == Sign::plus());
    CHECK(terms[1].left == edge);
    CHECK(terms[1].right == v1);
    CHECK(terms[1].sign == Sign::plus());

    // Vertex: v (x) v with sign +1.
    auto vertex_terms = serre_diagonal(interval, v0);
    REQUIRE(vertex_terms.size() == 1);
    CHECK(vertex_terms[0].left == v0);
    CHECK(vertex_terms[0].right == v0);
    CHECK(vertex_terms[0].sign == Sign::plus());

    // Square: initial (x) square + bottom (x) right - left (x) top + square (x) terminal.
    auto sq_complex = build_cube_complex(2);
    auto square = *sq_complex.find_by_vertices({0, 1, 2, 3});
    auto sq_terms = serre_diagonal(sq_complex, square);
    REQUIRE(sq_terms.size() == 4);
    auto bottom = *sq_complex.find_by_vertices({0, 1});
    auto right = *sq_complex.find_by_vertices({1, 3});
    auto left = *sq_complex.find_by_vertices({0, 2});
    auto top = *sq_complex.find_by_vertices({2, 3});
    int checked = 0;
    for (const auto& t : sq_terms) {
        if (t.left == bottom && t.right == right) {
            CHECK(t.sign == Sign::plus());
            ++checked;
        }
        if (t.left == left && t.right == top) {
            CHECK(t.sign == Sign::minus());
            ++checked;
        }
        if (t.right == square) {
            CHECK(t.left == *sq_complex.find_by_vertices({0}));
            CHECK(t.sign == Sign::plus());
            ++checked;
        }
        if (t.left == square) {
            CHECK(t.right == *sq_complex.find_by_vertices({3}));
            CHECK(t.sign == Sign::plus());
            ++checked;
        }
    }
    CHECK(checked == 4);
}

TEST_CASE("serre diagonal agrees with the Koszul expansion oracle", "[chains]") {
    for (int d = 0; d <= 6; ++d) {
        auto complex = build_cube_complex(d);
        auto top = complex.cubes_of_dim(d).front();
        auto terms = serre_diagonal(complex, top);
        auto oracle = koszul_diagonal_oracle(d);
        REQUIRE(terms.size() == oracle.size());
        for (const auto& want : oracle) {
            auto left = complex.face_of(top, want.left);
            auto right = complex.face_of(top, want.right);
            auto it = std::find_if(terms.begin(), terms.end(), [&](const DiagonalTerm& t) {
                return t.left == left && t.right == right;
            });
            REQUIRE(it != terms.end());
            CHECK(it->sign.value() == want.sign);
        }
    }
}

TEST_CASE("diagonal terms are reciprocal pairs", "[chains]") {
    auto t2 = build_torus_grid({3, 3});
    for (CubeId c : t2.cubes_of_dim(2)) {
        auto terms = serre_diagonal(t2, c);
        CHECK(terms.size() == 4);
        for (const auto& t : terms) CHECK(t.left.dim + t.right.dim == 2);
    }
}

TEST_CASE("cup product on a single square", "[chains]") {
    auto complex = build_cube_complex(2);
    auto square = *complex.find_by_vertices({0, 1, 2, 3});
    IntCochain bottom(&complex, 1), right(&complex, 1), left(&complex, 1), top(&complex, 1);
    bottom.set(*complex.find_by_vertices({0, 1}), 1);
    right.set(*complex.find_by_vertices({1, 3}), 1);
    left.set(*complex.find_by_vertices({0, 2}), 1);
    top.set(*complex.find_by_vertices({2, 3}), 1);

    auto br = cup(bottom, right);
    CHECK(br[square] == 1);
    CHECK(br.entries().size() == 1);

    auto lt = cup(left, top);
    CHECK(lt[square] == -1);

    IntCochain zero(&complex, 1);
    CHECK(cup(bottom, zero).empty());
}

TEST_CASE("cup product is associative and satisfies Leibniz", "[chains]") {
    auto t2 = build_torus_grid({3, 3});
    std::mt19937 rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        auto a = random_cochain(t2, trial % 2, rng);
        auto b = random_cochain(t2, (trial / 2) % 2, rng);
        auto g = random_cochain(t2, 0, rng);
        CHECK(cup(cup(a, b), g) == cup(a, cup(b, g)));

        // delta(a cup b) = delta a cup b + (-1)^|a| a cup delta b.
        auto lhs = coboundary(cup(a, b));
        auto rhs = cup(coboundary(a), b);
        auto second = cup(a, coboundary(b));
        second *= (a.degree() % 2 == 0) ? 1 : -1;
        rhs += second;
        CHECK(lhs == rhs);
    }
}

TEST_CASE("smith normal form invariants", "[snf]") {
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> entry(-4, 4);
    for (int trial = 0; trial < 40; ++trial) {
        int m = 1 + trial % 5, n = 1 + (trial / 2) % 5;
        DenseMatrix<CheckedInt> a(m, n);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) a(i, j) = entry(rng);
        auto s = smith_normal_form(a);

        // d = u a v.
        DenseMatrix<CheckedInt> uav(m, n);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) {
                CheckedInt total(0);
                for (int p = 0; p < m; ++p)
                    for (int q = 0; q < n; ++q) total += s.u(i, p) * a(p, q) * s.v(q, j);
                uav(i, j) = total;
            }
        CHECK(uav == s.d);

        // Inverses really invert.
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                CheckedInt total(0);
                for (int p = 0; p < m; ++p) total += s.u(i, p) * s.uinv(p, j);
                CHECK(total == CheckedInt(i == j ? 1 : 0));
            }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                CheckedInt total(0);
                for (int p = 0; p < n; ++p) total += s.v(i, p) * s.vinv(p, j);
                CHECK(total == CheckedInt(i == j ? 1 : 0));
            }

        // Diagonal, nonnegative, divisibility chain.
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) CHECK(s.d(i, j) == CheckedInt(0));
        for (int i = 0; i + 1 < s.rank; ++i) CHECK(s.d(i + 1, i + 1) % s.d(i, i) == CheckedInt(0));

        // Kernel vectors annihilate.
        for (const auto& k : s.kernel_basis()) {
            auto img = a.multiply(k);
            for (const auto& x : img) CHECK(x == CheckedInt(0));
        }
    }

    // Classical invariant-factor example: diag(2,3) ~ diag(1,6).
    DenseMatrix<CheckedInt> diag(2, 2);
    diag(0, 0) = 2;
    diag(1, 1) = 3;
    auto s = smith_normal_form(diag);
    REQUIRE(s.rank == 2);
    CHECK(s.d(0, 0) == CheckedInt(1));
    CHECK(s.d(1, 1) == CheckedInt(6));
}

TEST_CASE("checked arithmetic detects overflow and big integers take over", "[snf]") {
    long long big = 1LL << 62;
    CHECK_THROWS_AS(chk_mul(big, 4), IntegerOverflow);
    CHECK_THROWS_AS(chk_add(big, big), IntegerOverflow);
    CheckedInt a(big), b(3);
    CHECK_THROWS_AS(a * b, IntegerOverflow);

    // Entries whose elimination products exceed 64 bits overflow the checked
    // path but reduce fine over arbitrary precision.
    DenseMatrix<CheckedInt> narrow(2, 2);
    narrow(0, 0) = 1LL << 40;
    narrow(0, 1) = 3;
    narrow(1, 0) = 5;
    narrow(1, 1) = (1LL << 40) + 7;
    CHECK_THROWS_AS(smith_normal_form(narrow), IntegerOverflow);

    DenseMatrix<BigInt> wide = convert_matrix<CheckedInt, BigInt>(narrow, to_big);
    auto s = smith_normal_form(wide);
    CHECK(s.rank == 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            BigInt total = 0;
            for (int p = 0; p < 2; ++p)
                for (int q = 0; q < 2; ++q) total += s.u(i, p) * wide(p, q) * s.v(q, j);
            CHECK(total == s.d(i, j));
        }

    // Both arithmetic backends agree on a real complex.
    auto t2 = build_torus_grid({3, 3});
    auto checked = detail::cohomology_impl<CheckedInt>(t2);
    auto arbitrary = detail::cohomology_impl<BigInt>(t2);
    CHECK(checked == arbitrary);
}

TEST_CASE("cohomology of standard spaces", "[chains]") {
    auto t2 = build_torus_grid({3, 3});
    auto h = cohomology(t2);
    REQUIRE(h.size() == 3);
    CHECK(h[0] == CohomologyGroup{1, {}});
    CHECK(h[1] == CohomologyGroup{2, {}});
    CHECK(h[2] == CohomologyGroup{1, {}});

    auto circle = build_torus_grid({3});
    auto hc = cohomology(circle);
    REQUIRE(hc.size() == 2);
    CHECK(hc[0] == CohomologyGroup{1, {}});
    CHECK(hc[1] == CohomologyGroup{1, {}});

    for (int d = 1; d <= 3; ++d) {
        auto cube = build_cube_complex(d);
        auto hq = cohomology(cube);
        CHECK(hq[0] == CohomologyGroup{1, {}});
        for (int k = 1; k <= d; ++k) CHECK(hq[std::size_t(k)] == CohomologyGroup{0, {}});
    }

    auto t3 = build_torus_grid({3, 3, 3});
    auto h3 = cohomology(t3);
    REQUIRE(h3.size() == 4);
    CHECK(h3[0].betti == 1);
    CHECK(h3[1].betti == 3);
    CHECK(h3[2].betti == 3);
    CHECK(h3[3].betti == 1);
}

TEST_CASE("H^1 generators of the torus and the cup pairing", "[chains]") {
    auto t2 = build_torus_grid({3, 3});
    auto gens = cohomology_generators(t2, 1);
    REQUIRE(gens.size() == 2);
    for (const auto& g : gens) CHECK(coboundary(g).empty());

    // Pair against the two coordinate loops: the matrix must be unimodular.
    IntChain loop_x(&t2, 1), loop_y(&t2, 1);
    for (int i = 0; i < 3; ++i) loop_x.set(hedge33(t2, i, 0), 1);
    for (int j = 0; j < 3; ++j) loop_y.set(vedge33(t2, 0, j), 1);
    CHECK(boundary(loop_x).empty());
    CHECK(boundary(loop_y).empty());
    long long p00 = evaluate(gens[0], loop_x), p01 = evaluate(gens[0], loop_y);
    long long p10 = evaluate(gens[1], loop_x), p11 = evaluate(gens[1], loop_y);
    CHECK(std::abs(p00 * p11 - p01 * p10) == 1);

    // Cup pairing on H^1 evaluated on the fundamental cycle: antisymmetric
    // with determinant +-1.
    IntChain fundamental(&t2, 2);
    for (CubeId c : t2.cubes_of_dim(2)) fundamental.set(c, 1);
    long long q00 = evaluate(cup(gens[0], gens[0]), fundamental);
    long long q01 = evaluate(cup(gens[0], gens[1]), fundamental);
    long long q10 = evaluate(cup(gens[1], gens[0]), fundamental);
    long long q11 = evaluate(cup(gens[1], gens[1]), fundamental);
    CHECK(q00 == 0);
    CHECK(q11 == 0);
    CHECK(q01 == -q10);
    CHECK(std::abs(q00 * q11 - q01 * q10) == 1);
}

TEST_CASE("evaluate conventions", "[chains]") {
    auto t2 = build_torus_grid({3, 3});
    IntCochain alpha(&t2, 1);
    auto e = hedge33(t2, 0, 0);
    alpha.set(e, 1);
    IntChain c(&t2, 1);
    c.set(e, 1);
    CHECK(evaluate(alpha, c) == 1);

    IntChain wrong_degree(&t2, 0);
    wrong_degree.set(*t2.find_by_vertices({vid33(0, 0)}), 5);
    CHECK(evaluate(alpha, wrong_degree) == 0);
}

TEST_CASE("cochain json round trip", "[chains]") {
    auto t2 = build_torus_grid({3, 3});
    std::mt19937 rng(3);
    auto alpha = random_cochain(t2, 1, rng);
    auto j = alpha.to_json();
    CHECK(IntCochain::from_json(t2, j) == alpha);
}

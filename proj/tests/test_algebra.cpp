#include <doctest.h>

#include <cstdint>
#include <optional>
#include <vector>

#include "mta/algebra.hpp"
#include "mta/rng.hpp"
#include "testutil.hpp"

using namespace mta;
using testutil::make_matrix;
using testutil::num;

TEST_CASE("64-bit primality") {
    CHECK(is_prime_u64(2));
    CHECK(is_prime_u64(3));
    CHECK(is_prime_u64(97));
    CHECK(is_prime_u64((1ull << 61) - 1)); // Mersenne
    CHECK_FALSE(is_prime_u64(0));
    CHECK_FALSE(is_prime_u64(1));
    CHECK_FALSE(is_prime_u64(4));
    CHECK_FALSE(is_prime_u64(1ull << 62));
    // Strong pseudoprime to bases 2,3,5,7; must still be rejected.
    CHECK_FALSE(is_prime_u64(3215031751ull));
    CHECK_FALSE(is_prime_u64(((1ull << 61) - 1) * 3));
}

TEST_CASE("modular helpers agree with bignum arithmetic") {
    Rng rng(7);
    std::uint64_t p = (1ull << 62) + 1;
    while (!is_prime_u64(p)) ++p;
    for (int i = 0; i < 50; ++i) {
        const std::uint64_t a = rng.below(p);
        const std::uint64_t b = rng.below(p);
        const mpz_class want = (mpz_class(a) * mpz_class(b)) % mpz_class(p);
        CHECK(mul_mod(a, b, p) == want.get_ui());
        if (a != 0) CHECK(mul_mod(a, inv_mod(a, p), p) == 1);
    }
    CHECK(pow_mod(2, 32, 7) == 4);
    CHECK(pow_mod(5, 0, 7) == 1);
    CHECK(pow_mod(0, 5, 7) == 0);
}

TEST_CASE("field construction and text form") {
    const Field q = Field::rationals();
    CHECK(q.is_rationals());
    CHECK(q.to_string() == "q");
    CHECK(Field::parse("q") == q);

    const Field f7 = Field::prime(7);
    CHECK(f7.is_prime_field());
    CHECK(f7.characteristic() == 7);
    CHECK(f7.to_string() == "fp:7");
    CHECK(Field::parse("fp:7") == f7);
    CHECK(q != f7);

    CHECK_THROWS_AS(Field::prime(6), std::invalid_argument);
    CHECK_THROWS_AS(Field::prime(1ull << 63), std::invalid_argument);
    CHECK_THROWS_AS(Field::parse("fp:8"), std::invalid_argument);
    CHECK_THROWS_AS(Field::parse("r"), std::invalid_argument);
}

TEST_CASE("rational scalars stay canonical") {
    const Field q = Field::rationals();
    const Scalar a = Scalar::parse(q, "2/3");
    const Scalar b = Scalar::parse(q, "-1/6");
    CHECK((a + b).to_string() == "1/2");
    CHECK((a - b).to_string() == "5/6");
    CHECK((a * b).to_string() == "-1/9");
    CHECK((a / b).to_string() == "-4");
    CHECK((-a).to_string() == "-2/3");
    CHECK(Scalar::parse(q, "4/2").to_string() == "2");
    CHECK(Scalar::parse(q, "-0/5").is_zero());
    CHECK(Scalar::parse(q, "7") == num(7));
    CHECK_THROWS_AS(a / Scalar::zero(q), std::domain_error);
    CHECK_THROWS_AS(Scalar::parse(q, "1/0"), std::invalid_argument);
    CHECK_THROWS_AS(Scalar::parse(q, "x"), std::invalid_argument);
    CHECK_THROWS_AS(Scalar::parse(q, ""), std::invalid_argument);
}

TEST_CASE("prime field scalars") {
    const Field f7 = Field::prime(7);
    const Scalar three = Scalar::residue(f7, 3);
    const Scalar five = Scalar::residue(f7, 5);
    CHECK((three + five).res() == 1);
    CHECK((three - five).res() == 5);
    CHECK((three * five).res() == 1);
    CHECK((three / five).res() == 2); // 5 * 2 = 10 = 3
    CHECK((-three).res() == 4);
    CHECK(Scalar::from_long(f7, -1).res() == 6);
    CHECK(Scalar::from_long(f7, 14).is_zero());
    CHECK(Scalar::one(f7).is_one());
    CHECK(five.to_string() == "5");
    CHECK(Scalar::parse(f7, "6").res() == 6);
    CHECK_THROWS_AS(Scalar::parse(f7, "7"), std::invalid_argument);
    CHECK_THROWS_AS(Scalar::parse(f7, "1/2"), std::invalid_argument);
    CHECK_THROWS_AS(three / Scalar::zero(f7), std::domain_error);
    CHECK_THROWS_AS(Scalar::residue(Field::rationals(), 1), std::invalid_argument);
}

TEST_CASE("cross-field arithmetic is rejected") {
    const Scalar a = num(1);
    const Scalar b = Scalar::residue(Field::prime(7), 1);
    CHECK_THROWS_AS(a + b, FieldMismatchError);
    CHECK_THROWS_AS(a * b, FieldMismatchError);
    CHECK_FALSE(a == b); // equality across fields is false, not an error

    const Field q = Field::rationals();
    const Matrix ma = Matrix::identity(q, 2);
    const Matrix mb = Matrix::identity(Field::prime(7), 2);
    CHECK_THROWS_AS(ma + mb, FieldMismatchError);
    CHECK_THROWS_AS(ma * mb, FieldMismatchError);
    CHECK_THROWS_AS(kron(ma, mb), FieldMismatchError);
}

TEST_CASE("matrix arithmetic") {
    const Field q = Field::rationals();
    const Matrix a = make_matrix(q, 2, 3, {1, 2, 3, 4, 5, 6});
    const Matrix b = make_matrix(q, 3, 2, {1, 0, 0, 1, 1, 1});
    CHECK(a * b == make_matrix(q, 2, 2, {4, 5, 10, 11}));
    CHECK(a + a == a.scaled(num(2)));
    CHECK(a - a == Matrix(q, 2, 3));
    CHECK((a - a).is_zero());
    CHECK(a.negated() == a.scaled(num(-1)));
    CHECK(a.row(1) == make_matrix(q, 1, 3, {4, 5, 6}));
    CHECK(Matrix::identity(q, 3) * b == b);
    CHECK(Matrix::row_vector(q, {num(4), num(5)}) ==
          make_matrix(q, 1, 2, {4, 5}));
    CHECK_THROWS_AS(a + b, std::invalid_argument);
    CHECK_THROWS_AS(a * a, std::invalid_argument);
}

TEST_CASE("zero-dimensional matrices are legal") {
    const Field q = Field::rationals();
    const Matrix none(q, 0, 3);
    const Matrix tall(q, 3, 2);
    CHECK((none * tall).rows() == 0);
    CHECK((none * tall).cols() == 2);
    const Matrix wide(q, 2, 0);
    const Matrix prod = wide * Matrix(q, 0, 3);
    CHECK(prod == Matrix(q, 2, 3)); // inner dimension 0 gives the zero matrix
    CHECK(Matrix::identity(q, 0).rows() == 0);
}

TEST_CASE("kronecker product layout") {
    const Field q = Field::rationals();
    const Matrix a = make_matrix(q, 2, 2, {1, 2, 0, 1});
    const Matrix b = make_matrix(q, 2, 2, {1, 0, 1, 1});
    CHECK(kron(a, b) == make_matrix(q, 4, 4,
                                    {1, 0, 2, 0,
                                     1, 1, 2, 2,
                                     0, 0, 1, 0,
                                     0, 0, 1, 1}));
}

TEST_CASE("kronecker product mixed-product law") {
    Rng rng(11);
    const Field q = Field::rationals();
    for (int i = 0; i < 10; ++i) {
        auto rnd = [&](std::size_t r, std::size_t c) {
            Matrix m(q, r, c);
            for (std::size_t x = 0; x < r; ++x)
                for (std::size_t y = 0; y < c; ++y)
                    m.at(x, y) = num(rng.int_range(-3, 3));
            return m;
        };
        const Matrix a = rnd(2, 3), c = rnd(3, 2);
        const Matrix b = rnd(3, 2), d = rnd(2, 3);
        CHECK(kron(a, b) * kron(c, d) == kron(a * c, b * d));
    }
}

TEST_CASE("kron_all folds left with empty product the 1x1 identity") {
    const Field q = Field::rationals();
    const Matrix a = make_matrix(q, 1, 2, {1, 2});
    const Matrix b = make_matrix(q, 1, 2, {3, 4});
    const Matrix c = make_matrix(q, 1, 2, {5, 6});
    CHECK(kron_all({}, q) == Matrix::identity(q, 1));
    CHECK(kron_all({a}, q) == a);
    CHECK(kron_all({a, b, c}, q) == kron(kron(a, b), c));
}

TEST_CASE("row basis expresses members exactly") {
    const Field q = Field::rationals();
    RowBasis basis(q, 2);
    CHECK(basis.add_row(make_matrix(q, 1, 2, {1, 0})));
    CHECK(basis.add_row(make_matrix(q, 1, 2, {1, 1})));
    CHECK(basis.size() == 2);
    const auto coeffs = basis.express(make_matrix(q, 1, 2, {2, 3}));
    REQUIRE(coeffs.has_value());
    CHECK((*coeffs)[0] == num(-1));
    CHECK((*coeffs)[1] == num(3));

    CHECK_FALSE(basis.add_row(make_matrix(q, 1, 2, {3, 5}))); // dependent
    CHECK(basis.size() == 2);

    const auto zero = basis.express(Matrix(q, 1, 2));
    REQUIRE(zero.has_value());
    CHECK((*zero)[0].is_zero());
    CHECK((*zero)[1].is_zero());
}

TEST_CASE("row basis rejects vectors outside the span") {
    const Field q = Field::rationals();
    RowBasis basis(q, 3);
    CHECK(basis.add_row(make_matrix(q, 1, 3, {1, 2, 0})));
    CHECK(basis.add_row(make_matrix(q, 1, 3, {0, 1, 0})));
    CHECK_FALSE(basis.express(make_matrix(q, 1, 3, {0, 0, 1})).has_value());
    CHECK_FALSE(basis.add_row(Matrix(q, 1, 3))); // zero row is dependent
}

TEST_CASE("row basis round-trips random rows over a prime field") {
    const Field f = Field::prime(101);
    Rng rng(3);
    RowBasis basis(f, 4);
    std::vector<Matrix> added;
    while (basis.size() < 4) {
        Matrix v(f, 1, 4);
        for (std::size_t j = 0; j < 4; ++j)
            v.at(0, j) = Scalar::residue(f, rng.below(101));
        if (basis.add_row(v)) added.push_back(v);
    }
    for (std::size_t i = 0; i < added.size(); ++i) {
        const auto coeffs = basis.express(added[i]);
        REQUIRE(coeffs.has_value());
        for (std::size_t j = 0; j < coeffs->size(); ++j)
            CHECK((*coeffs)[j].is_zero() == (i != j));
        CHECK((*coeffs)[i].is_one());
    }
}

TEST_CASE("solve_row_equation recovers the unique matrix") {
    const Field q = Field::rationals();
    const Matrix h = make_matrix(q, 2, 2, {1, 0, 1, 1});
    const Matrix targets = make_matrix(q, 2, 2, {2, 3, 0, 1});
    const Matrix m = solve_row_equation(h, targets);
    CHECK(m * h == targets);
    CHECK(m == make_matrix(q, 2, 2, {-1, 3, -1, 1}));

    const Matrix deficient = make_matrix(q, 2, 2, {1, 2, 2, 4});
    CHECK_THROWS_AS(solve_row_equation(deficient, targets), std::invalid_argument);

    const Matrix tall = make_matrix(q, 1, 2, {1, 0});
    CHECK_THROWS_AS(solve_row_equation(tall, make_matrix(q, 1, 2, {0, 1})),
                    std::invalid_argument);
}

TEST_CASE("scalar operations are counted") {
    const std::uint64_t before = scalar_op_count();
    const Scalar s = num(3) * num(4) + num(5);
    CHECK(s == num(17));
    CHECK(scalar_op_count() > before);
}

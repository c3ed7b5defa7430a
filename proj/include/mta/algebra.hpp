#ifndef MTA_ALGEBRA_HPP
#define MTA_ALGEBRA_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "mta/errors.hpp"

namespace mta {

// Deterministic primality for 64-bit inputs: trial division below 2^20,
// Miller-Rabin with a fixed witness set above.
bool is_prime_u64(std::uint64_t n);

// Modular helpers over a 64-bit modulus (p < 2^63).
std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p);
std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t p);
std::uint64_t inv_mod(std::uint64_t a, std::uint64_t p);

// The coefficient field: the rationals, or F_p for a prime p < 2^63.
class Field {
public:
    Field() : p_(0) {}

    static Field rationals() { return Field(); }
    static Field prime(std::uint64_t p);

    bool is_rationals() const { return p_ == 0; }
    bool is_prime_field() const { return p_ != 0; }
    std::uint64_t characteristic() const { return p_; }

    bool operator==(const Field& o) const { return p_ == o.p_; }
    bool operator!=(const Field& o) const { return p_ != o.p_; }

    std::string to_string() const; // "q" or "fp:<p>"
    static Field parse(const std::string& text);

private:
    std::uint64_t p_; // 0 means rationals
};

// Running count of scalar field operations on this thread; observability only.
std::uint64_t scalar_op_count();

// An exact field element tagged with its field. Rationals are kept in
// canonical form (gcd 1, positive denominator, zero as 0/1) by mpq;
// prime-field values are residues in [0, p).
class Scalar {
public:
    Scalar() : field_(Field::rationals()), res_(0) {}

    static Scalar zero(const Field& f) { return Scalar(f); }
    static Scalar one(const Field& f);
    static Scalar from_long(const Field& f, long v);
    static Scalar rational(const mpq_class& q);
    static Scalar residue(const Field& f, std::uint64_t r);

    const Field& field() const { return field_; }
    bool is_zero() const;
    bool is_one() const;

    Scalar operator+(const Scalar& o) const;
    Scalar operator-(const Scalar& o) const;
    Scalar operator*(const Scalar& o) const;
    Scalar operator/(const Scalar& o) const; // division by zero throws
    Scalar operator-() const;

    bool operator==(const Scalar& o) const;
    bool operator!=(const Scalar& o) const { return !(*this == o); }

    // "p/q" with the denominator omitted when 1; residues as decimals.
    std::string to_string() const;
    static Scalar parse(const Field& f, const std::string& token);

    const mpq_class& rat() const { return rat_; }
    std::uint64_t res() const { return res_; }

private:
    explicit Scalar(const Field& f) : field_(f), res_(0) {
        // rat_ defaults to 0/1
    }
    void check_same_field(const Scalar& o) const;

    Field field_;
    mpq_class rat_;      // used iff the field is the rationals
    std::uint64_t res_;  // used iff the field is F_p
};

// Dense row-major matrix over one field. Zero-dimensional shapes are legal;
// a product with inner dimension 0 is the zero matrix.
class Matrix {
public:
    Matrix() : rows_(0), cols_(0) {}
    Matrix(const Field& f, std::size_t rows, std::size_t cols);
    static Matrix identity(const Field& f, std::size_t n);
    static Matrix row_vector(const Field& f, const std::vector<Scalar>& entries);

    const Field& field() const { return field_; }
    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Scalar& at(std::size_t i, std::size_t j);
    const Scalar& at(std::size_t i, std::size_t j) const;

    Matrix operator+(const Matrix& o) const;
    Matrix operator-(const Matrix& o) const;
    Matrix operator*(const Matrix& o) const;
    Matrix scaled(const Scalar& c) const;
    Matrix negated() const;

    Matrix row(std::size_t i) const; // 1 x cols copy
    bool is_zero() const;
    bool operator==(const Matrix& o) const;
    bool operator!=(const Matrix& o) const { return !(*this == o); }

private:
    Field field_;
    std::size_t rows_, cols_;
    std::vector<Scalar> data_;
};

// Kronecker product. Row (i1, i2) of the result is the row-major flattening
// (i1-1)*rows(b) + i2 in 1-based terms, and likewise for columns, so k-fold
// products agree with the mixed-radix tuple indexing used for transitions.
Matrix kron(const Matrix& a, const Matrix& b);
Matrix kron_all(const std::vector<Matrix>& factors, const Field& f);

// Incremental row-space basis with exact elimination: candidate rows are
// reduced by the stored echelon rows in insertion order, pivots are the first
// nonzero column of the residual, and no scaling is ever applied, so the
// representation of any vector in the span is computed deterministically.
class RowBasis {
public:
    RowBasis(const Field& f, std::size_t cols);

    std::size_t size() const { return originals_.size(); }
    std::size_t cols() const { return cols_; }
    const Matrix& row(std::size_t i) const { return originals_[i]; }

    // Appends v when it is independent of the current basis; returns whether
    // it was added.
    bool add_row(const Matrix& v);

    // Coefficients c with sum_i c[i] * row(i) = v, or nullopt when v is
    // outside the span. The zero vector yields all-zero coefficients.
    std::optional<std::vector<Scalar>> express(const Matrix& v) const;

private:
    struct Reduced {
        Matrix residual;
        std::vector<Scalar> coeffs;
    };
    Reduced reduce(const Matrix& v) const;

    Field field_;
    std::size_t cols_;
    std::vector<Matrix> originals_;
    std::vector<Matrix> echelon_;
    std::vector<std::vector<Scalar>> combos_; // echelon_[i] = sum_j combos_[i][j] * originals_[j]
    std::vector<std::size_t> pivots_;
};

// Unique M with M * h = targets, where the rows of h are linearly
// independent. Throws std::invalid_argument when h lacks full row rank or a
// target row is outside the row space.
Matrix solve_row_equation(const Matrix& h, const Matrix& targets);

} // namespace mta

#endif

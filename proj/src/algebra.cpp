#include "mta/algebra.hpp"

namespace mta {

namespace {

thread_local std::uint64_t g_scalar_ops = 0;

bool miller_rabin_witness(std::uint64_t n, std::uint64_t a, std::uint64_t d, int r) {
    a %= n;
    if (a == 0) return false;
    std::uint64_t x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) return false;
    for (int i = 1; i < r; ++i) {
        x = mul_mod(x, x, n);
        if (x == n - 1) return false;
    }
    return true; // composite witnessed
}

} // namespace

std::uint64_t scalar_op_count() { return g_scalar_ops; }

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    return static_cast<std::uint64_t>(
        static_cast<unsigned __int128>(a) * b % p);
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t p) {
    std::uint64_t acc = 1 % p;
    base %= p;
    while (exp) {
        if (exp & 1) acc = mul_mod(acc, base, p);
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    return acc;
}

std::uint64_t inv_mod(std::uint64_t a, std::uint64_t p) {
    if (a % p == 0) throw std::domain_error("division by zero in prime field");
    // extended Euclid on (a, p)
    long long t = 0, new_t = 1;
    long long r = static_cast<long long>(p), new_r = static_cast<long long>(a % p);
    while (new_r != 0) {
        long long q = r / new_r;
        long long tmp = t - q * new_t;
        t = new_t;
        new_t = tmp;
        tmp = r - q * new_r;
        r = new_r;
        new_r = tmp;
    }
    if (t < 0) t += static_cast<long long>(p);
    return static_cast<std::uint64_t>(t);
}

bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    if (n < (1ULL << 20)) {
        if (n % 2 == 0) return n == 2;
        for (std::uint64_t d = 3; d * d <= n; d += 2)
            if (n % d == 0) return false;
        return true;
    }
    if (n % 2 == 0) return false;
    std::uint64_t d = n - 1;
    int r = 0;
    while (d % 2 == 0) {
        d /= 2;
        ++r;
    }
    // This witness set is deterministic for all n < 2^64.
    for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL,
                            19ULL, 23ULL, 29ULL, 31ULL, 37ULL})
        if (miller_rabin_witness(n, a, d, r)) return false;
    return true;
}

Field Field::prime(std::uint64_t p) {
    if (p >= (1ULL << 63))
        throw std::invalid_argument("prime field modulus must be below 2^63");
    if (!is_prime_u64(p))
        throw std::invalid_argument("modulus " + std::to_string(p) + " is not prime");
    Field f;
    f.p_ = p;
    return f;
}

std::string Field::to_string() const {
    return is_rationals() ? "q" : "fp:" + std::to_string(p_);
}

Field Field::parse(const std::string& text) {
    if (text == "q") return rationals();
    if (text.rfind("fp:", 0) == 0) {
        const std::string num = text.substr(3);
        if (num.empty() || num.find_first_not_of("0123456789") != std::string::npos)
            throw std::invalid_argument("bad field tag '" + text + "'");
        unsigned long long p = std::stoull(num);
        return prime(p);
    }
    throw std::invalid_argument("bad field tag '" + text + "' (expected q or fp:<p>)");
}

Scalar Scalar::one(const Field& f) {
    Scalar s(f);
    if (f.is_rationals())
        s.rat_ = 1;
    else
        s.res_ = 1 % f.characteristic();
    return s;
}

Scalar Scalar::from_long(const Field& f, long v) {
    Scalar s(f);
    if (f.is_rationals()) {
        s.rat_ = v;
    } else {
        const std::uint64_t p = f.characteristic();
        long long m = static_cast<long long>(v) % static_cast<long long>(p);
        if (m < 0) m += static_cast<long long>(p);
        s.res_ = static_cast<std::uint64_t>(m);
    }
    return s;
}

Scalar Scalar::rational(const mpq_class& q) {
    Scalar s(Field::rationals());
    s.rat_ = q;
    s.rat_.canonicalize();
    return s;
}

Scalar Scalar::residue(const Field& f, std::uint64_t r) {
    if (!f.is_prime_field())
        throw std::invalid_argument("residue scalar requires a prime field");
    Scalar s(f);
    s.res_ = r % f.characteristic();
    return s;
}

bool Scalar::is_zero() const {
    return field_.is_rationals() ? rat_ == 0 : res_ == 0;
}

bool Scalar::is_one() const {
    return field_.is_rationals() ? rat_ == 1 : res_ == 1 % field_.characteristic();
}

void Scalar::check_same_field(const Scalar& o) const {
    if (field_ != o.field_)
        throw FieldMismatchError("cannot combine values from " + field_.to_string() +
                                 " and " + o.field_.to_string());
}

Scalar Scalar::operator+(const Scalar& o) const {
    check_same_field(o);
    ++g_scalar_ops;
    Scalar s(field_);
    if (field_.is_rationals()) {
        s.rat_ = rat_ + o.rat_;
    } else {
        const std::uint64_t p = field_.characteristic();
        std::uint64_t v = res_ + o.res_;
        if (v >= p) v -= p;
        s.res_ = v;
    }
    return s;
}

Scalar Scalar::operator-(const Scalar& o) const {
    check_same_field(o);
    ++g_scalar_ops;
    Scalar s(field_);
    if (field_.is_rationals()) {
        s.rat_ = rat_ - o.rat_;
    } else {
        const std::uint64_t p = field_.characteristic();
        s.res_ = res_ >= o.res_ ? res_ - o.res_ : res_ + p - o.res_;
    }
    return s;
}

Scalar Scalar::operator*(const Scalar& o) const {
    check_same_field(o);
    ++g_scalar_ops;
    Scalar s(field_);
    if (field_.is_rationals())
        s.rat_ = rat_ * o.rat_;
    else
        s.res_ = mul_mod(res_, o.res_, field_.characteristic());
    return s;
}

Scalar Scalar::operator/(const Scalar& o) const {
    check_same_field(o);
    if (o.is_zero()) throw std::domain_error("scalar division by zero");
    ++g_scalar_ops;
    Scalar s(field_);
    if (field_.is_rationals())
        s.rat_ = rat_ / o.rat_;
    else
        s.res_ = mul_mod(res_, inv_mod(o.res_, field_.characteristic()),
                         field_.characteristic());
    return s;
}

Scalar Scalar::operator-() const {
    ++g_scalar_ops;
    Scalar s(field_);
    if (field_.is_rationals())
        s.rat_ = -rat_;
    else
        s.res_ = res_ == 0 ? 0 : field_.characteristic() - res_;
    return s;
}

bool Scalar::operator==(const Scalar& o) const {
    if (field_ != o.field_) return false;
    return field_.is_rationals() ? rat_ == o.rat_ : res_ == o.res_;
}

std::string Scalar::to_string() const {
    if (field_.is_rationals()) return rat_.get_str();
    return std::to_string(res_);
}

Scalar Scalar::parse(const Field& f, const std::string& token) {
    if (token.empty()) throw std::invalid_argument("empty scalar token");
    if (f.is_rationals()) {
        const auto slash = token.find('/');
        const std::string num = slash == std::string::npos ? token : token.substr(0, slash);
        const std::string den = slash == std::string::npos ? "1" : token.substr(slash + 1);
        auto valid_int = [](const std::string& s) {
            std::size_t i = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
            return i < s.size() &&
                   s.find_first_not_of("0123456789", i) == std::string::npos;
        };
        if (!valid_int(num) || !valid_int(den))
            throw std::invalid_argument("bad rational '" + token + "'");
        mpq_class q{mpz_class(num), mpz_class(den)};
        if (q.get_den() == 0)
            throw std::invalid_argument("zero denominator in '" + token + "'");
        q.canonicalize();
        return rational(q);
    }
    if (token.find_first_not_of("0123456789") != std::string::npos)
        throw std::invalid_argument("bad residue '" + token + "'");
    mpz_class v(token);
    if (v >= mpz_class(std::to_string(f.characteristic())))
        throw std::invalid_argument("residue '" + token + "' not below the modulus");
    return residue(f, v.get_ui());
}

Matrix::Matrix(const Field& f, std::size_t rows, std::size_t cols)
    : field_(f), rows_(rows), cols_(cols), data_(rows * cols, Scalar::zero(f)) {}

Matrix Matrix::identity(const Field& f, std::size_t n) {
    Matrix m(f, n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = Scalar::one(f);
    return m;
}

Matrix Matrix::row_vector(const Field& f, const std::vector<Scalar>& entries) {
    Matrix m(f, 1, entries.size());
    for (std::size_t j = 0; j < entries.size(); ++j) m.at(0, j) = entries[j];
    return m;
}

Scalar& Matrix::at(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
}

const Scalar& Matrix::at(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
}

Matrix Matrix::operator+(const Matrix& o) const {
    if (field_ != o.field_) throw FieldMismatchError("matrix sum across fields");
    if (rows_ != o.rows_ || cols_ != o.cols_)
        throw std::invalid_argument("matrix sum shape mismatch");
    Matrix r(field_, rows_, cols_);
    for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i] + o.data_[i];
    return r;
}

Matrix Matrix::operator-(const Matrix& o) const {
    if (field_ != o.field_) throw FieldMismatchError("matrix difference across fields");
    if (rows_ != o.rows_ || cols_ != o.cols_)
        throw std::invalid_argument("matrix difference shape mismatch");
    Matrix r(field_, rows_, cols_);
    for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i] - o.data_[i];
    return r;
}

Matrix Matrix::operator*(const Matrix& o) const {
    if (field_ != o.field_) throw FieldMismatchError("matrix product across fields");
    if (cols_ != o.rows_)
        throw std::invalid_argument("matrix product shape mismatch");
    Matrix r(field_, rows_, o.cols_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t k = 0; k < cols_; ++k) {
            const Scalar& a = at(i, k);
            if (a.is_zero()) continue;
            for (std::size_t j = 0; j < o.cols_; ++j) {
                const Scalar& b = o.at(k, j);
                if (b.is_zero()) continue;
                r.at(i, j) = r.at(i, j) + a * b;
            }
        }
    return r;
}

Matrix Matrix::scaled(const Scalar& c) const {
    Matrix r(field_, rows_, cols_);
    for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = data_[i] * c;
    return r;
}

Matrix Matrix::negated() const {
    Matrix r(field_, rows_, cols_);
    for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = -data_[i];
    return r;
}

Matrix Matrix::row(std::size_t i) const {
    Matrix r(field_, 1, cols_);
    for (std::size_t j = 0; j < cols_; ++j) r.at(0, j) = at(i, j);
    return r;
}

bool Matrix::is_zero() const {
    for (const auto& s : data_)
        if (!s.is_zero()) return false;
    return true;
}

bool Matrix::operator==(const Matrix& o) const {
    return field_ == o.field_ && rows_ == o.rows_ && cols_ == o.cols_ &&
           data_ == o.data_;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    if (a.field() != b.field())
        throw FieldMismatchError("kronecker product across fields");
    Matrix r(a.field(), a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i1 = 0; i1 < a.rows(); ++i1)
        for (std::size_t j1 = 0; j1 < a.cols(); ++j1) {
            const Scalar& v = a.at(i1, j1);
            if (v.is_zero()) continue;
            for (std::size_t i2 = 0; i2 < b.rows(); ++i2)
                for (std::size_t j2 = 0; j2 < b.cols(); ++j2)
                    r.at(i1 * b.rows() + i2, j1 * b.cols() + j2) = v * b.at(i2, j2);
        }
    return r;
}

Matrix kron_all(const std::vector<Matrix>& factors, const Field& f) {
    Matrix acc = Matrix::identity(f, 1);
    for (const auto& m : factors) acc = kron(acc, m);
    return acc;
}

RowBasis::RowBasis(const Field& f, std::size_t cols) : field_(f), cols_(cols) {}

RowBasis::Reduced RowBasis::reduce(const Matrix& v) const {
    Reduced out{v, std::vector<Scalar>(originals_.size(), Scalar::zero(field_))};
    for (std::size_t i = 0; i < echelon_.size(); ++i) {
        const Scalar& lead = out.residual.at(0, pivots_[i]);
        if (lead.is_zero()) continue;
        const Scalar f = lead / echelon_[i].at(0, pivots_[i]);
        out.residual = out.residual - echelon_[i].scaled(f);
        // combos_[i] only spans the originals present when row i was added.
        for (std::size_t j = 0; j < combos_[i].size(); ++j)
            out.coeffs[j] = out.coeffs[j] + f * combos_[i][j];
    }
    return out;
}

bool RowBasis::add_row(const Matrix& v) {
    if (v.rows() != 1 || v.cols() != cols_ || v.field() != field_)
        throw std::invalid_argument("basis row has wrong shape or field");
    Reduced red = reduce(v);
    if (red.residual.is_zero()) return false;
    std::size_t pivot = 0;
    while (red.residual.at(0, pivot).is_zero()) ++pivot;
    // residual = v - sum_j coeffs[j] * originals_[j]
    std::vector<Scalar> combo(originals_.size() + 1, Scalar::zero(field_));
    for (std::size_t j = 0; j < originals_.size(); ++j) combo[j] = -red.coeffs[j];
    combo[originals_.size()] = Scalar::one(field_);
    originals_.push_back(v);
    echelon_.push_back(std::move(red.residual));
    combos_.push_back(std::move(combo));
    pivots_.push_back(pivot);
    return true;
}

std::optional<std::vector<Scalar>> RowBasis::express(const Matrix& v) const {
    if (v.rows() != 1 || v.cols() != cols_ || v.field() != field_)
        throw std::invalid_argument("expressed row has wrong shape or field");
    Reduced red = reduce(v);
    if (!red.residual.is_zero()) return std::nullopt;
    return red.coeffs;
}

Matrix solve_row_equation(const Matrix& h, const Matrix& targets) {
    if (h.field() != targets.field())
        throw FieldMismatchError("row equation across fields");
    if (h.cols() != targets.cols())
        throw std::invalid_argument("row equation column mismatch");
    RowBasis basis(h.field(), h.cols());
    for (std::size_t i = 0; i < h.rows(); ++i)
        if (!basis.add_row(h.row(i)))
            throw std::invalid_argument("coefficient matrix lacks full row rank");
    Matrix m(h.field(), targets.rows(), h.rows());
    for (std::size_t i = 0; i < targets.rows(); ++i) {
        auto coeffs = basis.express(targets.row(i));
        if (!coeffs)
            throw std::invalid_argument("target row outside the row space");
        for (std::size_t j = 0; j < h.rows(); ++j) m.at(i, j) = (*coeffs)[j];
    }
    return m;
}

} // namespace mta

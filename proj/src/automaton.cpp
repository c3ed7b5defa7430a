#include "mta/automaton.hpp"

#include <istream>
#include <ostream>

namespace mta {

namespace {

// n^k with an overflow guard; 0^0 = 1.
std::size_t checked_pow(std::size_t n, unsigned k) {
    std::size_t r = 1;
    for (unsigned i = 0; i < k; ++i) {
        if (n != 0 && r > (std::size_t(1) << 40) / n)
            throw std::invalid_argument("transition matrix too large");
        r *= n;
    }
    return r;
}

} // namespace

Mta::Mta(Field field, RankedAlphabet alphabet, std::size_t dim,
         std::vector<Matrix> transitions, Matrix final_vector)
    : field_(field), alphabet_(std::move(alphabet)), dim_(dim),
      transitions_(std::move(transitions)), final_(std::move(final_vector)) {
    if (transitions_.size() != alphabet_.size())
        throw std::invalid_argument("one transition matrix per symbol required");
    for (SymbolId s = 0; s < transitions_.size(); ++s) {
        const Matrix& m = transitions_[s];
        if (m.field() != field_)
            throw FieldMismatchError("transition field differs from automaton field");
        if (m.rows() != checked_pow(dim_, alphabet_.rank(s)) || m.cols() != dim_)
            throw std::invalid_argument(
                "transition for '" + alphabet_.name(s) + "' must be n^rank x n");
    }
    if (final_.field() != field_)
        throw FieldMismatchError("final vector field differs from automaton field");
    if (final_.rows() != dim_ || final_.cols() != 1)
        throw std::invalid_argument("final vector must be n x 1");
}

Mta Mta::zero_automaton(const Field& field, const RankedAlphabet& alphabet) {
    std::vector<Matrix> transitions;
    transitions.reserve(alphabet.size());
    for (SymbolId s = 0; s < alphabet.size(); ++s)
        transitions.emplace_back(field, alphabet.rank(s) == 0 ? 1 : 0, 0);
    return Mta(field, alphabet, 0, std::move(transitions), Matrix(field, 0, 1));
}

std::uint64_t Mta::representation_size() const {
    std::uint64_t total = dim_;
    for (SymbolId s = 0; s < alphabet_.size(); ++s) {
        std::uint64_t block = 1;
        for (unsigned i = 0; i < alphabet_.rank(s) + 1; ++i) block *= dim_;
        total += block;
    }
    return total;
}

std::size_t flatten_index(const std::vector<std::size_t>& digits, std::size_t base) {
    std::size_t idx = 0;
    for (std::size_t d : digits) idx = idx * base + d;
    return idx;
}

Matrix apply_transition(const Matrix& mu, const std::vector<const Matrix*>& child_rows) {
    const Field& f = mu.field();
    const std::size_t n = mu.cols();
    Matrix acc(f, 1, n);
    // Walk the support of the Kronecker product of the child rows; the
    // coefficient of flat row index idx is the product of the chosen entries.
    struct Walk {
        const Matrix& mu;
        const std::vector<const Matrix*>& kids;
        Matrix& acc;
        std::size_t n;
        void go(std::size_t pos, std::size_t idx, const Scalar& coeff) {
            if (pos == kids.size()) {
                for (std::size_t j = 0; j < n; ++j) {
                    const Scalar& m = mu.at(idx, j);
                    if (!m.is_zero()) acc.at(0, j) = acc.at(0, j) + coeff * m;
                }
                return;
            }
            const Matrix& v = *kids[pos];
            for (std::size_t i = 0; i < v.cols(); ++i) {
                const Scalar& e = v.at(0, i);
                if (e.is_zero()) continue;
                go(pos + 1, idx * v.cols() + i, coeff * e);
            }
        }
    } walk{mu, child_rows, acc, n};
    std::size_t expected_rows = 1;
    for (const Matrix* v : child_rows) {
        if (v->rows() != 1)
            throw std::invalid_argument("child vectors must be rows");
        if (v->field() != f) throw FieldMismatchError("child vector field mismatch");
        expected_rows *= v->cols();
    }
    if (expected_rows != mu.rows())
        throw std::invalid_argument("child dimensions do not match the transition");
    walk.go(0, 0, Scalar::one(f));
    return acc;
}

RunResult run_dag(const Mta& a, const DagStore& store, NodeId root) {
    if (a.alphabet() != store.alphabet())
        throw std::invalid_argument("automaton and store alphabets differ");
    if (store.contains_box(root))
        throw std::invalid_argument("cannot run an automaton on a context");
    RunResult result;
    for (NodeId v : store.reachable(root)) {
        std::vector<const Matrix*> kids;
        kids.reserve(store.children(v).size());
        for (NodeId c : store.children(v)) kids.push_back(&result.vectors.at(c));
        result.vectors.emplace(v, apply_transition(a.mu(store.symbol(v)), kids));
        ++result.applications;
    }
    return result;
}

Scalar eval(const Mta& a, const DagStore& store, NodeId root) {
    RunResult run = run_dag(a, store, root);
    Matrix w = run.vectors.at(root) * a.final_vector();
    return w.at(0, 0);
}

Matrix mu_context(const Mta& a, const DagStore& store, NodeId context) {
    if (a.alphabet() != store.alphabet())
        throw std::invalid_argument("automaton and store alphabets differ");
    if (!store.is_context(context))
        throw std::invalid_argument("mu_context requires a context");
    const std::size_t n = a.dim();
    // Row vectors for the box-free nodes, bottom-up.
    std::unordered_map<NodeId, Matrix> vecs;
    for (NodeId v : store.reachable(context)) {
        if (store.contains_box(v)) continue;
        std::vector<const Matrix*> kids;
        for (NodeId c : store.children(v)) kids.push_back(&vecs.at(c));
        vecs.emplace(v, apply_transition(a.mu(store.symbol(v)), kids));
    }
    // Along the unique box path, combine one matrix factor with row factors.
    struct Rec {
        const Mta& a;
        const DagStore& store;
        const std::unordered_map<NodeId, Matrix>& vecs;
        std::size_t n;
        Matrix go(NodeId v) {
            if (store.symbol(v) == kBoxSymbol)
                return Matrix::identity(a.field(), n);
            std::vector<Matrix> factors;
            factors.reserve(store.children(v).size());
            for (NodeId c : store.children(v))
                factors.push_back(store.contains_box(c) ? go(c) : vecs.at(c));
            return kron_all(factors, a.field()) * a.mu(store.symbol(v));
        }
    } rec{a, store, vecs, n};
    return rec.go(context);
}

Mta product(const Mta& a, const Mta& b) {
    if (a.field() != b.field())
        throw FieldMismatchError("product of automata over different fields");
    if (a.alphabet() != b.alphabet())
        throw std::invalid_argument("product of automata over different alphabets");
    const Field& f = a.field();
    const std::size_t n1 = a.dim(), n2 = b.dim(), n = n1 * n2;
    std::vector<Matrix> transitions;
    for (SymbolId s = 0; s < a.alphabet().size(); ++s) {
        const unsigned k = a.alphabet().rank(s);
        const std::size_t rows = checked_pow(n, k);
        Matrix m(f, rows, n);
        std::vector<std::size_t> di(k), dj(k);
        for (std::size_t r = 0; r < rows; ++r) {
            // Decode the paired-state tuple, then split into the two factors.
            std::size_t rest = r;
            for (std::size_t l = k; l-- > 0;) {
                const std::size_t d = rest % n;
                rest /= n;
                di[l] = d / n2;
                dj[l] = d % n2;
            }
            const std::size_t ia = flatten_index(di, n1);
            const std::size_t jb = flatten_index(dj, n2);
            for (std::size_t ci = 0; ci < n1; ++ci) {
                const Scalar& va = a.mu(s).at(ia, ci);
                if (va.is_zero()) continue;
                for (std::size_t cj = 0; cj < n2; ++cj) {
                    const Scalar& vb = b.mu(s).at(jb, cj);
                    if (vb.is_zero()) continue;
                    m.at(r, ci * n2 + cj) = va * vb;
                }
            }
        }
        transitions.push_back(std::move(m));
    }
    Matrix final_vec = kron(a.final_vector(), b.final_vector());
    return Mta(f, a.alphabet(), n, std::move(transitions), std::move(final_vec));
}

Mta direct_sum(const Mta& a, const Mta& b, bool negate_second) {
    if (a.field() != b.field())
        throw FieldMismatchError("direct sum of automata over different fields");
    if (a.alphabet() != b.alphabet())
        throw std::invalid_argument("direct sum of automata over different alphabets");
    const Field& f = a.field();
    const std::size_t n1 = a.dim(), n2 = b.dim(), n = n1 + n2;
    std::vector<Matrix> transitions;
    for (SymbolId s = 0; s < a.alphabet().size(); ++s) {
        const unsigned k = a.alphabet().rank(s);
        const std::size_t rows = checked_pow(n, k);
        Matrix m(f, rows, n);
        std::vector<std::size_t> digits(k);
        for (std::size_t r = 0; r < rows; ++r) {
            std::size_t rest = r;
            for (std::size_t l = k; l-- > 0;) {
                digits[l] = rest % n;
                rest /= n;
            }
            bool all_first = true, all_second = true;
            for (std::size_t d : digits) {
                all_first = all_first && d < n1;
                all_second = all_second && d >= n1;
            }
            if (all_first && (k > 0 || n1 > 0)) {
                const std::size_t ia = flatten_index(digits, n1);
                for (std::size_t c = 0; c < n1; ++c) m.at(r, c) = a.mu(s).at(ia, c);
            }
            if (all_second || k == 0) {
                std::vector<std::size_t> shifted(k);
                for (std::size_t l = 0; l < k; ++l) shifted[l] = digits[l] - n1;
                const std::size_t ib = flatten_index(shifted, n2);
                for (std::size_t c = 0; c < n2; ++c)
                    m.at(r, n1 + c) = b.mu(s).at(ib, c);
            }
        }
        transitions.push_back(std::move(m));
    }
    Matrix final_vec(f, n, 1);
    for (std::size_t i = 0; i < n1; ++i) final_vec.at(i, 0) = a.final_vector().at(i, 0);
    for (std::size_t i = 0; i < n2; ++i) {
        const Scalar& v = b.final_vector().at(i, 0);
        final_vec.at(n1 + i, 0) = negate_second ? -v : v;
    }
    return Mta(f, a.alphabet(), n, std::move(transitions), std::move(final_vec));
}

Mta perfect_tree_indicator(const Field& field, const RankedAlphabet& alphabet,
                           SymbolId leaf, SymbolId branch, std::size_t n) {
    if (alphabet.rank(leaf) != 0 || alphabet.rank(branch) != 2)
        throw std::invalid_argument("indicator needs a nullary and a binary symbol");
    if (n == 0) throw std::invalid_argument("indicator dimension must be positive");
    std::vector<Matrix> transitions;
    for (SymbolId s = 0; s < alphabet.size(); ++s)
        transitions.emplace_back(field, checked_pow(n, alphabet.rank(s)), n);
    transitions[leaf].at(0, n - 1) = Scalar::one(field);
    for (std::size_t i = 1; i < n; ++i)
        transitions[branch].at(i * n + i, i - 1) = Scalar::one(field);
    Matrix final_vec(field, n, 1);
    final_vec.at(0, 0) = Scalar::one(field);
    return Mta(field, alphabet, n, std::move(transitions), std::move(final_vec));
}

void print_mta(const Mta& a, std::ostream& out) {
    out << "mta " << a.field().to_string() << ' ' << a.dim() << '\n';
    const RankedAlphabet& al = a.alphabet();
    for (SymbolId s = 0; s < al.size(); ++s)
        out << "sym " << al.name(s) << ' ' << al.rank(s) << '\n';
    for (SymbolId s = 0; s < al.size(); ++s) {
        out << "trans " << al.name(s) << '\n';
        const Matrix& m = a.mu(s);
        if (a.dim() == 0) continue;
        for (std::size_t r = 0; r < m.rows(); ++r) {
            for (std::size_t c = 0; c < m.cols(); ++c) {
                if (c) out << ' ';
                out << m.at(r, c).to_string();
            }
            out << '\n';
        }
    }
    out << "final";
    for (std::size_t i = 0; i < a.dim(); ++i)
        out << (i == 0 ? '\n' : ' ') << a.final_vector().at(i, 0).to_string();
    out << '\n';
}

namespace {

struct Token {
    std::string text;
    int line;
    int col;
};

std::vector<Token> tokenize_stream(std::istream& in) {
    std::vector<Token> toks;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() &&
                   (line[i] == ' ' || line[i] == '\t' || line[i] == '\r'))
                ++i;
            if (i >= line.size()) break;
            std::size_t start = i;
            while (i < line.size() && line[i] != ' ' && line[i] != '\t' &&
                   line[i] != '\r')
                ++i;
            toks.push_back({line.substr(start, i - start),
                            lineno, static_cast<int>(start + 1)});
        }
    }
    toks.push_back({"", lineno + 1, 1}); // end marker
    return toks;
}

class TokenCursor {
public:
    TokenCursor(std::vector<Token> toks, std::string source)
        : toks_(std::move(toks)), source_(std::move(source)) {}

    const Token& peek() const { return toks_[pos_]; }
    bool at_end() const { return toks_[pos_].text.empty(); }

    Token take(const std::string& what) {
        if (at_end()) fail("expected " + what + ", found end of input");
        return toks_[pos_++];
    }

    void expect_keyword(const std::string& kw) {
        Token t = take("'" + kw + "'");
        if (t.text != kw)
            throw ParseError(source_, t.line, t.col,
                             "expected '" + kw + "', found '" + t.text + "'");
    }

    std::uint64_t take_count(const std::string& what) {
        Token t = take(what);
        if (t.text.find_first_not_of("0123456789") != std::string::npos)
            throw ParseError(source_, t.line, t.col, "bad " + what + " '" + t.text + "'");
        try {
            return std::stoull(t.text);
        } catch (const std::out_of_range&) {
            throw ParseError(source_, t.line, t.col, what + " out of range");
        }
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(source_, toks_[pos_].line, toks_[pos_].col, msg);
    }

    const std::string& source() const { return source_; }

private:
    std::vector<Token> toks_;
    std::string source_;
    std::size_t pos_ = 0;
};

Matrix read_matrix(TokenCursor& cur, const Field& field, std::size_t rows,
                   std::size_t cols) {
    Matrix m(field, rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            Token t = cur.take("scalar");
            try {
                m.at(r, c) = Scalar::parse(field, t.text);
            } catch (const std::invalid_argument& e) {
                throw ParseError(cur.source(), t.line, t.col, e.what());
            }
        }
    return m;
}

} // namespace

Mta parse_mta(std::istream& in, const std::string& source_name) {
    TokenCursor cur(tokenize_stream(in), source_name);
    cur.expect_keyword("mta");
    Token ftok = cur.take("field tag");
    Field field;
    try {
        field = Field::parse(ftok.text);
    } catch (const std::invalid_argument& e) {
        throw ParseError(source_name, ftok.line, ftok.col, e.what());
    }
    const std::uint64_t dim = cur.take_count("dimension");

    std::vector<std::pair<std::string, unsigned>> symbols;
    while (!cur.at_end() && cur.peek().text == "sym") {
        cur.expect_keyword("sym");
        Token name = cur.take("symbol name");
        const std::uint64_t rank = cur.take_count("rank");
        for (const auto& [existing, _] : symbols)
            if (existing == name.text)
                throw ParseError(source_name, name.line, name.col,
                                 "duplicate symbol '" + name.text + "'");
        symbols.emplace_back(name.text, static_cast<unsigned>(rank));
    }
    Token alpha_pos = cur.peek();
    RankedAlphabet alphabet;
    try {
        alphabet = RankedAlphabet(symbols);
    } catch (const std::invalid_argument& e) {
        throw ParseError(source_name, alpha_pos.line, alpha_pos.col, e.what());
    }

    std::vector<Matrix> transitions(alphabet.size());
    std::vector<bool> seen(alphabet.size(), false);
    while (!cur.at_end() && cur.peek().text == "trans") {
        cur.expect_keyword("trans");
        Token name = cur.take("symbol name");
        auto sym = alphabet.find(name.text);
        if (!sym)
            throw ParseError(source_name, name.line, name.col,
                             "unknown symbol '" + name.text + "'");
        if (seen[*sym])
            throw ParseError(source_name, name.line, name.col,
                             "second transition block for '" + name.text + "'");
        seen[*sym] = true;
        std::size_t rows = 1;
        try {
            rows = checked_pow(dim, alphabet.rank(*sym));
        } catch (const std::invalid_argument& e) {
            throw ParseError(source_name, name.line, name.col, e.what());
        }
        transitions[*sym] = read_matrix(cur, field, rows, dim);
    }
    for (SymbolId s = 0; s < alphabet.size(); ++s)
        if (!seen[s])
            cur.fail("missing transition block for '" + alphabet.name(s) + "'");
    cur.expect_keyword("final");
    Matrix final_vec(field, dim, 1);
    for (std::size_t i = 0; i < dim; ++i) {
        Token t = cur.take("scalar");
        try {
            final_vec.at(i, 0) = Scalar::parse(field, t.text);
        } catch (const std::invalid_argument& e) {
            throw ParseError(source_name, t.line, t.col, e.what());
        }
    }
    if (!cur.at_end()) cur.fail("unexpected trailing input");
    return Mta(field, alphabet, dim, std::move(transitions), std::move(final_vec));
}

} // namespace mta

#include <cctype>

#include "expr_internal.hpp"
#include "jetsym/expr.hpp"
#include "jetsym/jet_space.hpp"

namespace jetsym {

ParseError::ParseError(const std::string &msg, int line, int column)
    : std::runtime_error(msg + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
      line_(line), column_(column)
{
}

namespace {

enum class Tok { Number, Ident, Symbol, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int line = 1;
    int column = 1;
};

std::vector<Token> lex(const std::string &s)
{
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t k) {
        for (std::size_t j = 0; j < k; ++j) {
            if (s[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        Token t;
        t.line = line;
        t.column = col;
        std::size_t j = i;
        if (std::isdigit(static_cast<unsigned char>(c))) {
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j])))
                ++j;
            if (j + 1 < s.size() && s[j] == '.' && std::isdigit(static_cast<unsigned char>(s[j + 1]))) {
                ++j;
                while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j])))
                    ++j;
            }
            t.kind = Tok::Number;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
                ++j;
            t.kind = Tok::Ident;
        } else if (std::string("+-*/^();,#").find(c) != std::string::npos) {
            j = i + 1;
            t.kind = Tok::Symbol;
        } else {
            throw ParseError(std::string("unexpected character '") + c + "'", line, col);
        }
        t.text = s.substr(i, j - i);
        advance(j - i);
        out.push_back(std::move(t));
    }
    Token end;
    end.line = line;
    end.column = col;
    out.push_back(end);
    return out;
}

Rational decimal(const std::string &text)
{
    auto dot = text.find('.');
    if (dot == std::string::npos)
        return Rational(mpz_class(text));
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    mpz_class den = 1;
    for (std::size_t k = dot + 1; k < text.size(); ++k)
        den *= 10;
    Rational q(mpz_class(digits), den);
    q.canonicalize();
    return q;
}

class Parser
{
  public:
    Parser(const std::string &text, const SymbolTable &symbols) : toks_(lex(text)), sym_(symbols) {}

    Expr run()
    {
        Expr e = expr();
        if (peek().kind != Tok::End)
            fail("unexpected '" + peek().text + "'");
        return e;
    }

  private:
    const Token &peek() const { return toks_[pos_]; }
    bool is_symbol(const char *s) const { return peek().kind == Tok::Symbol && peek().text == s; }
    Token take() { return toks_[pos_++]; }
    [[noreturn]] void fail(const std::string &msg) const { fail_at(msg, peek()); }
    [[noreturn]] static void fail_at(const std::string &msg, const Token &t)
    {
        throw ParseError(msg, t.line, t.column);
    }
    void expect(const char *s)
    {
        if (!is_symbol(s))
            fail(std::string("expected '") + s + "'" + (peek().kind == Tok::End ? " before end of input" : ""));
        ++pos_;
    }

    Expr expr()
    {
        std::vector<Expr> terms{term()};
        while (is_symbol("+") || is_symbol("-")) {
            bool minus = take().text == "-";
            Expr t = term();
            terms.push_back(minus ? -t : t);
        }
        return add(std::move(terms));
    }

    Expr term()
    {
        Expr acc = factor();
        while (is_symbol("*") || is_symbol("/")) {
            Token op = take();
            if (op.text == "*")
                acc = acc * factor();
            else
                acc = acc * reciprocal(op);
        }
        return acc;
    }

    // a/b^q is a*b^-q: inverting the expanded power would give a different
    // canonical form for sums
    Expr reciprocal(const Token &op)
    {
        if (is_symbol("-")) {
            ++pos_;
            return -reciprocal(op);
        }
        Expr b = base();
        Rational q = 1;
        if (is_symbol("^")) {
            ++pos_;
            q = exponent();
        }
        if (b.is_zero() && sgn(q) > 0)
            fail_at("division by zero", op);
        try {
            return pow(b, -q);
        } catch (const MathError &err) {
            fail_at(err.what(), op);
        }
    }

    Expr factor()
    {
        if (is_symbol("-")) {
            ++pos_;
            return -factor();
        }
        Token start = peek();
        Expr b = base();
        if (!is_symbol("^"))
            return b;
        ++pos_;
        Rational q = exponent();
        try {
            return pow(b, q);
        } catch (const MathError &err) {
            fail_at(err.what(), start);
        }
    }

    Rational integer()
    {
        if (peek().kind != Tok::Number || peek().text.find('.') != std::string::npos)
            fail("expected an integer exponent");
        return Rational(mpz_class(take().text));
    }

    Rational rational_body()
    {
        bool neg = false;
        if (is_symbol("-")) {
            ++pos_;
            neg = true;
        }
        Rational q = integer();
        // x^1/2 is x^(1/2); x^2/(...) stays a division.
        if (is_symbol("/") && toks_[pos_ + 1].kind == Tok::Number) {
            ++pos_;
            Token at = peek();
            Rational d = integer();
            if (sgn(d) == 0)
                fail_at("zero denominator in exponent", at);
            q /= d;
        }
        q.canonicalize();
        return neg ? Rational(-q) : q;
    }

    Rational exponent()
    {
        if (is_symbol("(")) {
            ++pos_;
            Rational q = rational_body();
            expect(")");
            return q;
        }
        return rational_body();
    }

    Expr base()
    {
        const Token &t = peek();
        if (t.kind == Tok::Number) {
            ++pos_;
            return num(Complex(decimal(t.text)));
        }
        if (is_symbol("(")) {
            ++pos_;
            Expr e = expr();
            expect(")");
            return e;
        }
        if (t.kind != Tok::Ident)
            fail(t.kind == Tok::End ? "unexpected end of input" : "unexpected '" + t.text + "'");
        Token id = take();
        if (is_symbol("("))
            return call(id);
        return identifier(id);
    }

    Expr identifier(const Token &id)
    {
        const std::string &s = id.text;
        if (s == "i")
            return imag_unit();
        if (s == "t")
            return t_var();
        if (s.size() > 1 && s[0] == 'x' && s.find_first_not_of("0123456789", 1) == std::string::npos) {
            int a = s.size() > 6 ? 0 : std::stoi(s.substr(1));
            if (a < 1 || a > sym_.space.n)
                fail_at("unknown identifier '" + s + "' (spatial dimension is " + std::to_string(sym_.space.n) + ")",
                        id);
            return x_var(a);
        }
        if (sym_.space.declares(s))
            return jet(s);
        if (auto it = sym_.constants.find(s); it != sym_.constants.end())
            return constant(s, it->second);
        if (sym_.functions.count(s))
            fail_at("function '" + s + "' used without arguments", id);
        fail_at("unknown identifier '" + s + "'", id);
    }

    std::vector<Expr> arguments()
    {
        std::vector<Expr> args{expr()};
        while (is_symbol(",")) {
            ++pos_;
            args.push_back(expr());
        }
        return args;
    }

    Expr one_argument(const Token &id)
    {
        Expr a = expr();
        if (!is_symbol(")"))
            fail("'" + id.text + "' takes one argument");
        ++pos_;
        return a;
    }

    Expr call(const Token &id)
    {
        expect("(");
        const std::string &f = id.text;
        if (f == "D")
            return derivative();
        if (f == "exp")
            return exp(one_argument(id));
        if (f == "sin")
            return sin(one_argument(id));
        if (f == "cos")
            return cos(one_argument(id));
        if (f == "conj")
            return conj(one_argument(id));
        if (f == "log") {
            Expr a = one_argument(id);
            try {
                return log(a);
            } catch (const MathError &err) {
                fail_at(err.what(), id);
            }
        }
        auto it = sym_.functions.find(f);
        if (it == sym_.functions.end())
            fail_at("unknown function '" + f + "'", id);
        std::vector<Expr> args = arguments();
        expect(")");
        return func(f, std::move(args), {}, it->second);
    }

    Expr derivative()
    {
        Token at = peek();
        Expr target = expr();
        if (!is_symbol(";"))
            fail("expected ';' in derivative");
        ++pos_;
        if (target.kind() == Kind::Indep)
            fail_at("derivative of an independent variable", at);
        std::vector<int> counts(sym_.space.n + 1, 0);
        std::vector<int> slots;
        do {
            if (is_symbol(","))
                ++pos_;
            if (is_symbol("#")) {
                ++pos_;
                Token k = peek();
                Rational q = integer();
                if (q < 1 || !q.get_num().fits_sint_p())
                    fail_at("slot index must be positive", k);
                slots.push_back(static_cast<int>(q.get_num().get_si()));
                continue;
            }
            if (peek().kind != Tok::Ident)
                fail("expected a variable in derivative");
            Token v = take();
            Expr var = identifier(v);
            if (var.kind() != Kind::Indep)
                fail_at("derivatives are taken with respect to t or x1..xn, not '" + v.text + "'", v);
            counts[var.node().index[0]] += 1;
        } while (is_symbol(","));
        expect(")");
        Expr out = target;
        if (!slots.empty()) {
            if (target.kind() != Kind::Func)
                fail_at("slot derivative '#k' needs a function application", at);
            Node n = target.node();
            for (int k : slots) {
                if (k > static_cast<int>(n.args.size()))
                    fail_at("slot index exceeds function arity", at);
                n.index[k - 1] += 1;
            }
            out = detail::finish(std::move(n));
        }
        return total_derivative(out, std::span<const int>(counts));
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    const SymbolTable &sym_;
};

} // namespace

Expr parse(const std::string &text, const SymbolTable &symbols) { return Parser(text, symbols).run(); }

} // namespace jetsym

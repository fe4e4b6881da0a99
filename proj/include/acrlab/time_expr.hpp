#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "acrlab/common.hpp"

namespace acrlab {

// Nonnegative-function-of-time expression language used for inflow rates.
//
// Grammar (whitespace-insensitive):
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := atom ('^' signed-number)?
//   atom   := number | 't' | identifier | 'exp' '(' expr ')' | 'log' '(' expr ')' | '(' expr ')'
//
// '-' and '/' desugar to Add[a, Mul[-1,b]] and Mul[a, Pow(b,-1)].
// Parsing normalizes lightly (flattening, constant folding, unit/zero removal)
// so that parse ∘ print ∘ parse is a fixpoint on ASTs.

enum class ExprKind { Constant, Time, Param, Add, Mul, Pow, Exp, Log };

class TimeExpr {
public:
    struct Node {
        ExprKind kind;
        double value = 0.0;            // Constant value, or Pow exponent
        std::string name;              // Param identifier
        std::vector<TimeExpr> kids;
    };

    TimeExpr() : node_(constant_node(0.0)) {}

    ExprKind kind() const { return node_->kind; }
    double value() const { return node_->value; }
    const std::string& name() const { return node_->name; }
    const std::vector<TimeExpr>& kids() const { return node_->kids; }

    // -- constructors ------------------------------------------------------

    static TimeExpr constant(double v) { return TimeExpr(constant_node(v)); }
    static TimeExpr time() { return TimeExpr(make(ExprKind::Time)); }
    static TimeExpr param(const std::string& name) {
        auto n = make(ExprKind::Param);
        n->name = name;
        return TimeExpr(n);
    }

    /// n-ary sum; flattens, drops zeros, folds constants. Empty list -> 0.
    static TimeExpr add(std::vector<TimeExpr> parts) {
        std::vector<TimeExpr> flat;
        double csum = 0.0;
        bool has_const = false;
        for (auto& p : parts) {
            if (p.kind() == ExprKind::Add) {
                for (auto& k : p.kids()) {
                    if (k.kind() == ExprKind::Constant) { csum += k.value(); has_const = true; }
                    else flat.push_back(k);
                }
            } else if (p.kind() == ExprKind::Constant) {
                csum += p.value();
                has_const = true;
            } else {
                flat.push_back(p);
            }
        }
        if (has_const && csum != 0.0) flat.insert(flat.begin(), constant(csum));
        if (flat.empty()) return constant(0.0);
        if (flat.size() == 1) return flat[0];
        auto n = make(ExprKind::Add);
        n->kids = std::move(flat);
        return TimeExpr(n);
    }

    /// n-ary product; flattens, folds constants into a leading scalar. Empty -> 1.
    static TimeExpr mul(std::vector<TimeExpr> parts) {
        std::vector<TimeExpr> flat;
        double cprod = 1.0;
        for (auto& p : parts) {
            if (p.kind() == ExprKind::Mul) {
                for (auto& k : p.kids()) {
                    if (k.kind() == ExprKind::Constant) cprod *= k.value();
                    else flat.push_back(k);
                }
            } else if (p.kind() == ExprKind::Constant) {
                cprod *= p.value();
            } else {
                flat.push_back(p);
            }
        }
        if (cprod == 0.0) return constant(0.0);
        if (cprod != 1.0 || flat.empty()) flat.insert(flat.begin(), constant(cprod));
        if (flat.size() == 1) return flat[0];
        auto n = make(ExprKind::Mul);
        n->kids = std::move(flat);
        return TimeExpr(n);
    }

    static TimeExpr pow(TimeExpr base, double exponent) {
        if (exponent == 1.0) return base;
        if (exponent == 0.0) return constant(1.0);
        if (base.kind() == ExprKind::Constant) {
            double v = std::pow(base.value(), exponent);
            if (std::isfinite(v)) return constant(v);
        }
        if (base.kind() == ExprKind::Pow)
            return pow(base.kids()[0], base.value() * exponent);
        auto n = make(ExprKind::Pow);
        n->value = exponent;
        n->kids = {std::move(base)};
        return TimeExpr(n);
    }

    static TimeExpr exp(TimeExpr arg) {
        if (arg.kind() == ExprKind::Constant) return constant(std::exp(arg.value()));
        auto n = make(ExprKind::Exp);
        n->kids = {std::move(arg)};
        return TimeExpr(n);
    }

    static TimeExpr log(TimeExpr arg) {
        if (arg.kind() == ExprKind::Constant) {
            if (arg.value() <= 0) throw EvalError("log of nonpositive constant");
            return constant(std::log(arg.value()));
        }
        auto n = make(ExprKind::Log);
        n->kids = {std::move(arg)};
        return TimeExpr(n);
    }

    static TimeExpr sub(TimeExpr a, TimeExpr b) {
        return add({std::move(a), mul({constant(-1.0), std::move(b)})});
    }

    // -- structural equality ------------------------------------------------

    friend bool operator==(const TimeExpr& a, const TimeExpr& b) {
        if (a.node_ == b.node_) return true;
        if (a.kind() != b.kind()) return false;
        switch (a.kind()) {
            case ExprKind::Constant: return a.value() == b.value();
            case ExprKind::Time: return true;
            case ExprKind::Param: return a.name() == b.name();
            case ExprKind::Pow:
                return a.value() == b.value() && a.kids()[0] == b.kids()[0];
            default:
                if (a.kids().size() != b.kids().size()) return false;
                for (std::size_t i = 0; i < a.kids().size(); ++i)
                    if (!(a.kids()[i] == b.kids()[i])) return false;
                return true;
        }
    }
    friend bool operator!=(const TimeExpr& a, const TimeExpr& b) { return !(a == b); }

    // -- evaluation ----------------------------------------------------------

    /// Plain evaluation at time t. Throws OverflowError once any intermediate
    /// leaves the double range (switch to eval_log), EvalError on log of a
    /// nonpositive value, UnboundParamError on free identifiers.
    double eval(double t) const {
        double v = eval_raw(t);
        if (!std::isfinite(v))
            throw OverflowError("expression overflow at t=" + format_double(t));
        return v;
    }

    /// log of the (nonnegative) value at t, computed in the log domain so that
    /// double-exponential magnitudes never overflow. Throws EvalError if the
    /// value is negative.
    double eval_log(double t) const {
        SignedLog s = eval_sl(t);
        if (s.sign < 0) throw EvalError("log-domain evaluation of a negative value");
        if (s.sign == 0) return -std::numeric_limits<double>::infinity();
        return s.log_abs;
    }

    bool has_unbound_params() const {
        if (kind() == ExprKind::Param) return true;
        for (const auto& k : kids())
            if (k.has_unbound_params()) return true;
        return false;
    }

    void collect_params(std::vector<std::string>& out) const {
        if (kind() == ExprKind::Param) {
            if (std::find(out.begin(), out.end(), name()) == out.end()) out.push_back(name());
        }
        for (const auto& k : kids()) k.collect_params(out);
    }

    /// Substitute parameter values (Param -> Constant); re-normalizes.
    TimeExpr bind(const std::map<std::string, double>& values) const {
        switch (kind()) {
            case ExprKind::Param: {
                auto it = values.find(name());
                if (it == values.end()) return *this;
                return constant(it->second);
            }
            case ExprKind::Constant:
            case ExprKind::Time:
                return *this;
            case ExprKind::Add: {
                std::vector<TimeExpr> ks;
                for (const auto& k : kids()) ks.push_back(k.bind(values));
                return add(std::move(ks));
            }
            case ExprKind::Mul: {
                std::vector<TimeExpr> ks;
                for (const auto& k : kids()) ks.push_back(k.bind(values));
                return mul(std::move(ks));
            }
            case ExprKind::Pow: return pow(kids()[0].bind(values), value());
            case ExprKind::Exp: return exp(kids()[0].bind(values));
            case ExprKind::Log: return log(kids()[0].bind(values));
        }
        throw Error("unreachable");
    }

    // -- symbolic derivative --------------------------------------------------

    TimeExpr diff() const {
        switch (kind()) {
            case ExprKind::Constant:
            case ExprKind::Param:
                return constant(0.0);
            case ExprKind::Time:
                return constant(1.0);
            case ExprKind::Add: {
                std::vector<TimeExpr> ks;
                for (const auto& k : kids()) ks.push_back(k.diff());
                return add(std::move(ks));
            }
            case ExprKind::Mul: {
                std::vector<TimeExpr> terms;
                for (std::size_t i = 0; i < kids().size(); ++i) {
                    std::vector<TimeExpr> fs;
                    for (std::size_t j = 0; j < kids().size(); ++j)
                        fs.push_back(i == j ? kids()[j].diff() : kids()[j]);
                    terms.push_back(mul(std::move(fs)));
                }
                return add(std::move(terms));
            }
            case ExprKind::Pow:
                // d/dt b^e = e * b^(e-1) * b'
                return mul({constant(value()), pow(kids()[0], value() - 1.0), kids()[0].diff()});
            case ExprKind::Exp:
                return mul({kids()[0].diff(), *this});
            case ExprKind::Log:
                return mul({kids()[0].diff(), pow(kids()[0], -1.0)});
        }
        throw Error("unreachable");
    }

    // -- printing ---------------------------------------------------------------

    std::string print() const {
        std::string out;
        print_expr(out);
        return out;
    }

private:
    using NodePtr = std::shared_ptr<const Node>;
    explicit TimeExpr(NodePtr n) : node_(std::move(n)) {}

    static std::shared_ptr<Node> make(ExprKind k) {
        auto n = std::make_shared<Node>();
        n->kind = k;
        return n;
    }
    static NodePtr constant_node(double v) {
        auto n = make(ExprKind::Constant);
        n->value = v;
        return n;
    }

    double eval_raw(double t) const {
        switch (kind()) {
            case ExprKind::Constant: return value();
            case ExprKind::Time: return t;
            case ExprKind::Param:
                throw UnboundParamError("unbound identifier '" + name() + "'");
            case ExprKind::Add: {
                double s = 0;
                for (const auto& k : kids()) s += k.eval_raw(t);
                return s;
            }
            case ExprKind::Mul: {
                double p = 1;
                for (const auto& k : kids()) p *= k.eval_raw(t);
                return p;
            }
            case ExprKind::Pow: {
                double b = kids()[0].eval_raw(t);
                double e = value();
                if (b == 0.0 && e < 0) throw EvalError("zero raised to a negative power");
                double r = std::pow(b, e);
                if (std::isnan(r)) throw EvalError("invalid power (negative base, fractional exponent)");
                return r;
            }
            case ExprKind::Exp: return std::exp(kids()[0].eval_raw(t));
            case ExprKind::Log: {
                double a = kids()[0].eval_raw(t);
                if (a <= 0) throw EvalError("log of nonpositive value at t=" + format_double(t));
                return std::log(a);
            }
        }
        throw Error("unreachable");
    }

    struct SignedLog {
        int sign;        // -1, 0, +1
        double log_abs;  // log |v|; meaningless when sign == 0
    };

    static SignedLog sl_of(double v) {
        if (v == 0) return {0, 0};
        return {v > 0 ? 1 : -1, std::log(std::fabs(v))};
    }

    // exact signed log-sum-exp over accumulated terms
    static SignedLog sl_sum(const std::vector<SignedLog>& parts) {
        double mx = -std::numeric_limits<double>::infinity();
        for (const auto& p : parts)
            if (p.sign != 0) mx = std::max(mx, p.log_abs);
        if (!std::isfinite(mx)) return {0, 0};
        double acc = 0;
        for (const auto& p : parts)
            if (p.sign != 0) acc += p.sign * std::exp(p.log_abs - mx);
        if (acc == 0) return {0, 0};
        return {acc > 0 ? 1 : -1, mx + std::log(std::fabs(acc))};
    }

    SignedLog eval_sl(double t) const {
        switch (kind()) {
            case ExprKind::Constant: return sl_of(value());
            case ExprKind::Time: return sl_of(t);
            case ExprKind::Param:
                throw UnboundParamError("unbound identifier '" + name() + "'");
            case ExprKind::Add: {
                std::vector<SignedLog> parts;
                for (const auto& k : kids()) parts.push_back(k.eval_sl(t));
                return sl_sum(parts);
            }
            case ExprKind::Mul: {
                int sg = 1;
                double la = 0;
                for (const auto& k : kids()) {
                    SignedLog s = k.eval_sl(t);
                    if (s.sign == 0) return {0, 0};
                    sg *= s.sign;
                    la += s.log_abs;
                }
                return {sg, la};
            }
            case ExprKind::Pow: {
                SignedLog b = kids()[0].eval_sl(t);
                double e = value();
                if (b.sign == 0) {
                    if (e < 0) throw EvalError("zero raised to a negative power");
                    return e == 0 ? sl_of(1.0) : SignedLog{0, 0};
                }
                if (b.sign < 0) {
                    double ri = std::round(e);
                    if (std::fabs(e - ri) > 1e-12)
                        throw EvalError("invalid power (negative base, fractional exponent)");
                    int sg = (std::llround(ri) % 2 == 0) ? 1 : -1;
                    return {sg, e * b.log_abs};
                }
                return {1, e * b.log_abs};
            }
            case ExprKind::Exp: {
                // the argument itself is evaluated in the plain domain
                double a = kids()[0].eval_raw(t);
                if (!std::isfinite(a)) throw OverflowError("exp argument overflow");
                return {1, a};
            }
            case ExprKind::Log: {
                double a = kids()[0].eval_log(t);
                if (!std::isfinite(a) && a < 0) throw EvalError("log of zero");
                return sl_of(a);
            }
        }
        throw Error("unreachable");
    }

    // precedence levels: 0 add, 1 mul, 2 pow/atom
    void print_expr(std::string& out) const {
        if (kind() == ExprKind::Add) {
            bool first = true;
            for (const auto& k : kids()) {
                print_signed_term(out, k, first);
                first = false;
            }
            return;
        }
        bool first = true;
        print_signed_term(out, *this, first);
    }

    // Prints one Add operand, using binary '-' for negative-scalar terms.
    // A negative first term is rendered as "0 - ..." to stay inside the grammar.
    static void print_signed_term(std::string& out, const TimeExpr& term, bool first) {
        double scalar = 1.0;
        TimeExpr rest = term;
        if (term.kind() == ExprKind::Constant) {
            scalar = term.value();
            rest = constant(std::fabs(term.value()));
        } else if (term.kind() == ExprKind::Mul && term.kids()[0].kind() == ExprKind::Constant) {
            scalar = term.kids()[0].value();
            if (scalar < 0) {
                std::vector<TimeExpr> ks(term.kids().begin(), term.kids().end());
                ks[0] = constant(-scalar);
                rest = mul(std::move(ks));
            }
        }
        if (scalar < 0) {
            if (first) out += "0 - ";
            else out += " - ";
        } else if (!first) {
            out += " + ";
        }
        rest.print_term(out);
    }

    void print_term(std::string& out) const {
        if (kind() == ExprKind::Mul) {
            bool first = true;
            for (const auto& k : kids()) {
                if (!first) out += "*";
                k.print_factor(out);
                first = false;
            }
            return;
        }
        print_factor(out);
    }

    void print_factor(std::string& out) const {
        switch (kind()) {
            case ExprKind::Constant: {
                if (value() < 0) { out += "(0 - " + format_double(-value()) + ")"; return; }
                out += format_double(value());
                return;
            }
            case ExprKind::Time: out += "t"; return;
            case ExprKind::Param: out += name(); return;
            case ExprKind::Exp:
                out += "exp(";
                kids()[0].print_expr(out);
                out += ")";
                return;
            case ExprKind::Log:
                out += "log(";
                kids()[0].print_expr(out);
                out += ")";
                return;
            case ExprKind::Pow: {
                const TimeExpr& b = kids()[0];
                bool atom = b.kind() == ExprKind::Time || b.kind() == ExprKind::Param ||
                            b.kind() == ExprKind::Exp || b.kind() == ExprKind::Log ||
                            (b.kind() == ExprKind::Constant && b.value() >= 0);
                if (!atom) out += "(";
                b.print_factor(out);
                if (!atom) out += ")";
                out += "^" + format_double(value());
                return;
            }
            default:
                out += "(";
                print_expr(out);
                out += ")";
                return;
        }
    }

    NodePtr node_;
};

// ---------------------------------------------------------------------------
// recursive-descent parser

namespace detail {

class ExprParser {
public:
    explicit ExprParser(std::string_view text) : text_(text) {}

    TimeExpr parse() {
        TimeExpr e = parse_expr();
        skip_ws();
        if (pos_ != text_.size())
            throw ExprParseError("unexpected trailing input", pos_);
        return e;
    }

private:
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace((unsigned char)text_[pos_])) ++pos_;
    }
    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }
    bool consume(char c) {
        if (peek() == c) { ++pos_; return true; }
        return false;
    }

    TimeExpr parse_expr() {
        std::vector<TimeExpr> terms{parse_term()};
        for (;;) {
            char c = peek();
            if (c == '+') { ++pos_; terms.push_back(parse_term()); }
            else if (c == '-') { ++pos_; terms.push_back(TimeExpr::mul({TimeExpr::constant(-1.0), parse_term()})); }
            else break;
        }
        return TimeExpr::add(std::move(terms));
    }

    TimeExpr parse_term() {
        std::vector<TimeExpr> factors{parse_factor()};
        for (;;) {
            char c = peek();
            if (c == '*') { ++pos_; factors.push_back(parse_factor()); }
            else if (c == '/') {
                ++pos_;
                std::size_t at = pos_;
                TimeExpr d = parse_factor();
                check_divisor(d, at);
                factors.push_back(TimeExpr::pow(d, -1.0));
            } else break;
        }
        return TimeExpr::mul(std::move(factors));
    }

    // authoring check: reject divisors that are exactly zero at t = 0
    void check_divisor(const TimeExpr& d, std::size_t at) {
        if (d.has_unbound_params()) return;
        try {
            if (d.eval(0.0) == 0.0)
                throw ExprParseError("division by an expression that is zero at t=0", at);
        } catch (const ExprParseError&) {
            throw;
        } catch (const Error&) {
            // not evaluable at 0 (e.g. log) — leave it to runtime
        }
    }

    TimeExpr parse_factor() {
        TimeExpr a = parse_atom();
        if (peek() == '^') {
            ++pos_;
            double e = parse_signed_number();
            return TimeExpr::pow(a, e);
        }
        return a;
    }

    TimeExpr parse_atom() {
        char c = peek();
        if (c == '(') {
            ++pos_;
            TimeExpr e = parse_expr();
            if (!consume(')')) throw ExprParseError("expected ')'", pos_);
            return e;
        }
        if (std::isdigit((unsigned char)c) || c == '.') return TimeExpr::constant(parse_number());
        if (std::isalpha((unsigned char)c) || c == '_') {
            std::size_t start = pos_;
            std::string id = parse_identifier();
            if (peek() == '(') {
                ++pos_;
                TimeExpr arg = parse_expr();
                if (!consume(')')) throw ExprParseError("expected ')'", pos_);
                if (id == "exp") return TimeExpr::exp(arg);
                if (id == "log") return TimeExpr::log(arg);
                throw ExprParseError("unknown function '" + id + "'", start);
            }
            if (id == "t") return TimeExpr::time();
            return TimeExpr::param(id);
        }
        throw ExprParseError("expected a number, 't', identifier, or '('", pos_);
    }

    std::string parse_identifier() {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum((unsigned char)text_[pos_]) || text_[pos_] == '_'))
            ++pos_;
        return std::string(text_.substr(start, pos_ - start));
    }

    double parse_signed_number() {
        skip_ws();
        bool neg = false;
        if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+'))
            neg = text_[pos_++] == '-';
        double v = parse_number();
        return neg ? -v : v;
    }

    double parse_number() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit((unsigned char)text_[pos_])) ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (pos_ < text_.size() && std::isdigit((unsigned char)text_[pos_])) ++pos_;
        }
        if (pos_ == start) throw ExprParseError("expected a number", pos_);
        // scientific suffix, only when unambiguously an exponent
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t save = pos_;
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (pos_ < text_.size() && std::isdigit((unsigned char)text_[pos_])) {
                while (pos_ < text_.size() && std::isdigit((unsigned char)text_[pos_])) ++pos_;
            } else {
                pos_ = save;
            }
        }
        std::string num(text_.substr(start, pos_ - start));
        try {
            return std::stod(num);
        } catch (...) {
            throw ExprParseError("bad numeric literal '" + num + "'", start);
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline TimeExpr parse_expr(std::string_view text) {
    return detail::ExprParser(text).parse();
}

inline double eval_expr(const TimeExpr& e, double t) { return e.eval(t); }
inline TimeExpr diff_expr(const TimeExpr& e) { return e.diff(); }

/// Fixed sampling grid for validating that an inflow expression is nonnegative.
inline const double kNonnegSampleGrid[] = {0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 100.0};

/// Checks e(t) >= 0 on the fixed sample grid (log-domain fallback when the
/// plain evaluation overflows). Returns the offending t, or nullopt if fine.
inline std::optional<double> find_negative_sample(const TimeExpr& e) {
    for (double t : kNonnegSampleGrid) {
        try {
            if (e.eval(t) < 0.0) return t;
        } catch (const OverflowError&) {
            try {
                e.eval_log(t);  // throws if the value is negative
            } catch (const EvalError&) {
                return t;
            }
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Stack-machine compilation for fast repeated evaluation inside the integrator.

class ExprProgram {
public:
    ExprProgram() = default;

    explicit ExprProgram(const TimeExpr& e) { compile(e); }

    /// Evaluate at t. Returns +inf on overflow (callers guard).
    template <typename Real = double>
    Real eval(Real t) const {
        Real stack[32];
        int sp = 0;
        for (const auto& op : ops_) {
            switch (op.code) {
                case Op::PushConst: stack[sp++] = Real(op.a); break;
                case Op::PushTime: stack[sp++] = t; break;
                case Op::Add: --sp; stack[sp - 1] += stack[sp]; break;
                case Op::Mul: --sp; stack[sp - 1] *= stack[sp]; break;
                case Op::PowC: stack[sp - 1] = std::pow(stack[sp - 1], Real(op.a)); break;
                case Op::PowI: stack[sp - 1] = pow_int(stack[sp - 1], (int)op.a); break;
                case Op::Exp: stack[sp - 1] = std::exp(stack[sp - 1]); break;
                case Op::Log: stack[sp - 1] = std::log(stack[sp - 1]); break;
            }
        }
        return stack[0];
    }

private:
    struct Op {
        enum Code { PushConst, PushTime, Add, Mul, PowC, PowI, Exp, Log } code;
        double a = 0;
    };

    void compile(const TimeExpr& e) {
        switch (e.kind()) {
            case ExprKind::Constant: ops_.push_back({Op::PushConst, e.value()}); return;
            case ExprKind::Time: ops_.push_back({Op::PushTime, 0}); return;
            case ExprKind::Param:
                throw UnboundParamError("cannot compile unbound identifier '" + e.name() + "'");
            case ExprKind::Add:
                compile(e.kids()[0]);
                for (std::size_t i = 1; i < e.kids().size(); ++i) {
                    compile(e.kids()[i]);
                    ops_.push_back({Op::Add, 0});
                }
                return;
            case ExprKind::Mul:
                compile(e.kids()[0]);
                for (std::size_t i = 1; i < e.kids().size(); ++i) {
                    compile(e.kids()[i]);
                    ops_.push_back({Op::Mul, 0});
                }
                return;
            case ExprKind::Pow: {
                compile(e.kids()[0]);
                double ex = e.value();
                if (ex == std::round(ex) && std::fabs(ex) <= 64)
                    ops_.push_back({Op::PowI, ex});
                else
                    ops_.push_back({Op::PowC, ex});
                return;
            }
            case ExprKind::Exp:
                compile(e.kids()[0]);
                ops_.push_back({Op::Exp, 0});
                return;
            case ExprKind::Log:
                compile(e.kids()[0]);
                ops_.push_back({Op::Log, 0});
                return;
        }
    }

    std::vector<Op> ops_;
};

}  // namespace acrlab

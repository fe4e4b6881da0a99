#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "acrlab/rational.hpp"
#include "acrlab/time_expr.hpp"

namespace acrlab {

// Reaction-network DSL. `;`-terminated statements, `#` line comments:
//
//   species A, B, C;
//   A + B -> 2 B @ k1 = 1.0;
//   B -> A @ k2 = 2.0;
//   inflow A @ t^2 + 1;
//   inflow B @ exp(0.5*t);
//   outflow A @ 0.3;
//   outflow B @ 0.3;
//
// Reversible reactions are written as two one-way reactions. Inflows are
// time-dependent forcing, outflows are linear decay at a constant rate.

/// Formal nonnegative-integer combination of species; empty map is the zero complex.
struct Complex {
    std::map<std::string, int> coefficients;

    bool is_zero() const { return coefficients.empty(); }
    int coeff(const std::string& s) const {
        auto it = coefficients.find(s);
        return it == coefficients.end() ? 0 : it->second;
    }
    friend bool operator==(const Complex& a, const Complex& b) {
        return a.coefficients == b.coefficients;
    }
    friend bool operator!=(const Complex& a, const Complex& b) { return !(a == b); }
};

struct Reaction {
    Complex reactant;
    Complex product;
    std::string rate_name;
    double rate_value = 0;

    friend bool operator==(const Reaction& a, const Reaction& b) {
        return a.reactant == b.reactant && a.product == b.product &&
               a.rate_name == b.rate_name && a.rate_value == b.rate_value;
    }
};

struct Network {
    std::vector<std::string> species;             // declaration order
    std::vector<Reaction> reactions;
    std::map<std::string, TimeExpr> inflows;      // species -> raw (unbound) expression
    std::map<std::string, Rational> outflows;     // species -> constant rate

    int species_index(const std::string& name) const {
        for (std::size_t i = 0; i < species.size(); ++i)
            if (species[i] == name) return (int)i;
        return -1;
    }

    /// Rate-constant values as declared in the DSL text.
    Bindings rate_values() const {
        Bindings b;
        for (const auto& r : reactions) b[r.rate_name] = r.rate_value;
        return b;
    }

    /// Declared values merged with overrides (overrides win; unknown names rejected).
    Bindings bindings_with(const Bindings& overrides) const {
        Bindings b = rate_values();
        for (const auto& [k, v] : overrides) {
            if (!b.count(k)) throw Error("--set: unknown rate constant '" + k + "'");
            b[k] = v;
        }
        return b;
    }

    friend bool operator==(const Network& a, const Network& b) {
        return a.species == b.species && a.reactions == b.reactions &&
               a.inflows == b.inflows && a.outflows == b.outflows;
    }
};

// ---------------------------------------------------------------------------

namespace detail {

class NetParser {
public:
    explicit NetParser(std::string_view text) : text_(text) {}

    Network parse() {
        while (!at_end()) {
            skip_ws();
            if (at_end()) break;
            parse_statement();
        }
        validate();
        return net_;
    }

private:
    bool at_end() {
        skip_ws();
        return pos_ >= text_.size();
    }

    void skip_ws() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else if (std::isspace((unsigned char)c)) {
                advance();
            } else {
                break;
            }
        }
    }

    void advance() {
        if (text_[pos_] == '\n') { ++line_; col_ = 1; }
        else ++col_;
        ++pos_;
    }

    [[noreturn]] void fail(const std::string& msg) { throw NetParseError(msg, line_, col_); }
    [[noreturn]] void fail_at(const std::string& msg, int ln, int col) {
        throw NetParseError(msg, ln, col);
    }

    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    bool consume(char c) {
        if (peek() == c) { advance(); return true; }
        return false;
    }

    void expect(char c, const std::string& what) {
        if (!consume(c)) fail("expected '" + std::string(1, c) + "' " + what);
    }

    bool consume_word(const std::string& w) {
        skip_ws();
        if (text_.substr(pos_).rfind(w, 0) == 0) {
            std::size_t after = pos_ + w.size();
            if (after >= text_.size() || !(std::isalnum((unsigned char)text_[after]) || text_[after] == '_')) {
                for (std::size_t i = 0; i < w.size(); ++i) advance();
                return true;
            }
        }
        return false;
    }

    std::string parse_identifier(const std::string& what) {
        skip_ws();
        if (pos_ >= text_.size() ||
            !(std::isalpha((unsigned char)text_[pos_]) || text_[pos_] == '_'))
            fail("expected " + what);
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum((unsigned char)text_[pos_]) || text_[pos_] == '_'))
            advance();
        return std::string(text_.substr(start, pos_ - start));
    }

    std::string parse_number_text() {
        skip_ws();
        std::size_t start = pos_;
        if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) advance();
        bool digits = false;
        while (pos_ < text_.size() && std::isdigit((unsigned char)text_[pos_])) { advance(); digits = true; }
        if (pos_ < text_.size() && text_[pos_] == '.') {
            advance();
            while (pos_ < text_.size() && std::isdigit((unsigned char)text_[pos_])) { advance(); digits = true; }
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            advance();
            if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) advance();
            while (pos_ < text_.size() && std::isdigit((unsigned char)text_[pos_])) advance();
        }
        if (!digits) fail("expected a number");
        return std::string(text_.substr(start, pos_ - start));
    }

    void parse_statement() {
        int ln = line_, col = col_;
        if (consume_word("species")) {
            do {
                int sl = line_, sc = col_;
                std::string name = parse_identifier("species name");
                if (net_.species_index(name) >= 0)
                    fail_at("duplicate species '" + name + "'", sl, sc);
                net_.species.push_back(name);
            } while (consume(','));
            expect(';', "after species list");
            return;
        }
        if (consume_word("inflow")) {
            int sl = line_, sc = col_;
            std::string name = parse_identifier("species name");
            require_species(name, sl, sc);
            if (net_.inflows.count(name))
                fail_at("duplicate inflow for species '" + name + "'", sl, sc);
            expect('@', "before inflow expression");
            std::string expr_text = read_until_semicolon();
            TimeExpr e;
            try {
                e = parse_expr(expr_text);
            } catch (const ExprParseError& pe) {
                fail_at(std::string("inflow expression: ") + pe.what(), ln, col);
            }
            net_.inflows.emplace(name, e);
            return;
        }
        if (consume_word("outflow")) {
            int sl = line_, sc = col_;
            std::string name = parse_identifier("species name");
            require_species(name, sl, sc);
            if (net_.outflows.count(name))
                fail_at("duplicate outflow for species '" + name + "'", sl, sc);
            expect('@', "before outflow rate");
            int nl = line_, nc = col_;
            std::string num = parse_number_text();
            Rational r;
            try {
                r = Rational::from_decimal(num);
            } catch (const Error& e) {
                fail_at(e.what(), nl, nc);
            }
            if (r.sign() < 0) fail_at("outflow rate must be nonnegative", nl, nc);
            expect(';', "after outflow rate");
            net_.outflows.emplace(name, r);
            return;
        }
        // otherwise: a reaction  complex -> complex @ name = value ;
        Reaction rx;
        rx.reactant = parse_complex();
        expect('-', "(reaction arrow '->')");
        expect('>', "(reaction arrow '->')");
        rx.product = parse_complex();
        if (rx.product == rx.reactant)
            fail_at("reaction with product equal to reactant", ln, col);
        expect('@', "before rate constant");
        int kl = line_, kc = col_;
        rx.rate_name = parse_identifier("rate constant name");
        expect('=', "after rate constant name");
        int vl = line_, vc = col_;
        std::string val = parse_number_text();
        try {
            rx.rate_value = std::stod(val);
        } catch (...) {
            fail_at("bad rate value '" + val + "'", vl, vc);
        }
        if (!(rx.rate_value > 0)) fail_at("rate constant must be positive", vl, vc);
        expect(';', "after reaction");
        for (const auto& prev : net_.reactions) {
            if (prev.rate_name == rx.rate_name)
                fail_at("duplicate rate constant name '" + rx.rate_name + "'", kl, kc);
            if (prev.reactant == rx.reactant && prev.product == rx.product)
                fail_at("duplicate reaction arrow", ln, col);
        }
        net_.reactions.push_back(std::move(rx));
    }

    Complex parse_complex() {
        Complex c;
        skip_ws();
        if (peek() == '0') {
            advance();
            return c;  // the zero complex
        }
        for (;;) {
            int coeff = 1;
            skip_ws();
            int cl = line_, cc = col_;
            if (pos_ < text_.size() && std::isdigit((unsigned char)text_[pos_])) {
                coeff = 0;
                while (pos_ < text_.size() && std::isdigit((unsigned char)text_[pos_])) {
                    coeff = coeff * 10 + (text_[pos_] - '0');
                    if (coeff > 99) fail_at("stoichiometric coefficient above 99", cl, cc);
                    advance();
                }
                if (coeff == 0) fail_at("zero stoichiometric coefficient", cl, cc);
            }
            int sl = line_, sc = col_;
            std::string name = parse_identifier("species name in complex");
            require_species(name, sl, sc);
            int total = c.coeff(name) + coeff;
            if (total > 99) fail_at("stoichiometric coefficient above 99", cl, cc);
            c.coefficients[name] = total;
            if (!consume('+')) break;
        }
        return c;
    }

    void require_species(const std::string& name, int ln, int col) {
        if (net_.species_index(name) < 0)
            fail_at("undeclared species '" + name + "'", ln, col);
    }

    std::string read_until_semicolon() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && text_[pos_] != ';' && text_[pos_] != '#') advance();
        if (pos_ >= text_.size() || text_[pos_] != ';') fail("expected ';' after expression");
        std::string out(text_.substr(start, pos_ - start));
        advance();
        return out;
    }

    void validate() {
        if (net_.species.empty()) fail_at("no species declared", 1, 1);
        // every species must appear in a complex, inflow, or outflow
        std::set<std::string> used;
        for (const auto& r : net_.reactions) {
            for (const auto& [s, n] : r.reactant.coefficients) used.insert(s);
            for (const auto& [s, n] : r.product.coefficients) used.insert(s);
        }
        for (const auto& [s, e] : net_.inflows) used.insert(s);
        for (const auto& [s, r] : net_.outflows) used.insert(s);
        for (const auto& s : net_.species)
            if (!used.count(s))
                fail_at("species '" + s + "' appears in no reaction, inflow, or outflow", 1, 1);
        // inflow expressions: identifiers must resolve to rate constants, and the
        // bound expression must be nonnegative on the sampling grid
        Bindings values = net_.rate_values();
        for (const auto& [s, e] : net_.inflows) {
            TimeExpr bound = e.bind(values);
            std::vector<std::string> free;
            bound.collect_params(free);
            if (!free.empty())
                fail_at("inflow for '" + s + "' references unknown identifier '" + free[0] + "'", 1, 1);
            if (auto bad = find_negative_sample(bound))
                fail_at("inflow for '" + s + "' is negative at t=" + format_double(*bad), 1, 1);
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    Network net_;
};

}  // namespace detail

inline Network parse_network(std::string_view text) {
    return detail::NetParser(text).parse();
}

inline std::string print_complex(const Complex& c) {
    if (c.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [name, n] : c.coefficients) {
        if (!first) out += " + ";
        if (n != 1) out += std::to_string(n) + " ";
        out += name;
        first = false;
    }
    return out;
}

/// Canonical DSL text; parse_network(print_network(n)) is structurally equal to n.
inline std::string print_network(const Network& n) {
    std::string out = "species ";
    for (std::size_t i = 0; i < n.species.size(); ++i) {
        if (i) out += ", ";
        out += n.species[i];
    }
    out += ";\n";
    for (const auto& r : n.reactions) {
        out += print_complex(r.reactant) + " -> " + print_complex(r.product) + " @ " +
               r.rate_name + " = " + format_double(r.rate_value) + ";\n";
    }
    for (const auto& s : n.species) {
        auto it = n.inflows.find(s);
        if (it != n.inflows.end()) out += "inflow " + s + " @ " + it->second.print() + ";\n";
    }
    for (const auto& s : n.species) {
        auto it = n.outflows.find(s);
        if (it != n.outflows.end()) {
            const Rational& r = it->second;
            // every DSL-parseable rate has an exact decimal form; shortest wins
            std::string num = r.den() == 1 ? std::to_string(r.num())
                                           : format_double(r.to_double());
            if (r.den() != 1 && Rational::from_decimal(num) != r)
                num = format_double17(r.to_double());
            out += "outflow " + s + " @ " + num + ";\n";
        }
    }
    return out;
}

}  // namespace acrlab

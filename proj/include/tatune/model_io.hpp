#pragma once

#include "tatune/error.hpp"
#include "tatune/model.hpp"

#include <cctype>
#include <charconv>
#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace tatune {

/// A parsed model file: the automaton plus the optional `tunable` directive.
struct ModelFile {
    TimedAutomaton automaton;
    std::optional<std::vector<std::string>> tunable;
};

namespace detail {

enum class Tok { Ident, Number, LBrace, RBrace, Semi, Comma, Hash, Minus, Less, LessEq, Greater, GreaterEq, And, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::size_t line = 1;
    std::size_t column = 1;
};

inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

inline std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    std::size_t line = 1, col = 1, i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k, ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    auto emit = [&](Tok kind, std::size_t len) {
        out.push_back({kind, std::string(text.substr(i, len)), line, col});
        advance(len);
    };
    while (i < text.size()) {
        const char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
        } else if (c == '#') {
            // '#' glued to an identifier is part of a constraint id; otherwise a comment.
            if (i > 0 && ident_char(text[i - 1])) {
                emit(Tok::Hash, 1);
            } else {
                while (i < text.size() && text[i] != '\n') advance(1);
            }
        } else if (ident_start(c)) {
            std::size_t len = 1;
            while (i + len < text.size() && ident_char(text[i + len])) ++len;
            emit(Tok::Ident, len);
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t len = 1;
            while (i + len < text.size() && std::isdigit(static_cast<unsigned char>(text[i + len]))) ++len;
            emit(Tok::Number, len);
        } else if (c == '{') {
            emit(Tok::LBrace, 1);
        } else if (c == '}') {
            emit(Tok::RBrace, 1);
        } else if (c == ';') {
            emit(Tok::Semi, 1);
        } else if (c == ',') {
            emit(Tok::Comma, 1);
        } else if (c == '-') {
            emit(Tok::Minus, 1);
        } else if (c == '<') {
            if (i + 1 < text.size() && text[i + 1] == '=') emit(Tok::LessEq, 2);
            else emit(Tok::Less, 1);
        } else if (c == '>') {
            if (i + 1 < text.size() && text[i + 1] == '=') emit(Tok::GreaterEq, 2);
            else emit(Tok::Greater, 1);
        } else if (c == '&' && i + 1 < text.size() && text[i + 1] == '&') {
            emit(Tok::And, 2);
        } else {
            throw ParseError(line, col, std::string("unexpected character '") + c + "'");
        }
    }
    out.push_back({Tok::End, "", line, col});
    return out;
}

class Parser {
public:
    explicit Parser(std::string_view text) : toks_(tokenize(text)) {}

    ModelFile parse() {
        ModelFile mf;
        auto& ta = mf.automaton;
        while (peek().kind != Tok::End) {
            const Token& kw = expect(Tok::Ident, "a declaration keyword");
            if (kw.text == "clocks") {
                do {
                    const Token& name = expect(Tok::Ident, "a clock name");
                    if (ta.find_clock(name.text))
                        throw SemanticError(where(name) + "duplicate clock '" + name.text + "'");
                    ta.clocks.push_back(name.text);
                } while (accept(Tok::Comma));
            } else if (kw.text == "location") {
                parse_location(ta);
            } else if (kw.text == "edge") {
                parse_edge(ta);
            } else if (kw.text == "target") {
                do target_refs_.push_back(expect(Tok::Ident, "a location name"));
                while (accept(Tok::Comma));
            } else if (kw.text == "tunable") {
                if (!mf.tunable) mf.tunable.emplace();
                do {
                    const Token& owner = expect(Tok::Ident, "a constraint owner");
                    expect(Tok::Hash, "'#'");
                    const Token& idx = expect(Tok::Number, "an atom index");
                    mf.tunable->push_back(owner.text + "#" + idx.text);
                } while (accept(Tok::Comma));
            } else {
                throw ParseError(kw.line, kw.column, "unknown declaration '" + kw.text + "'");
            }
            accept(Tok::Semi);
        }
        resolve(ta);
        return mf;
    }

private:
    struct PendingEdge {
        Token from, to;
        bool has_from = false, has_to = false;
    };

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::vector<PendingEdge> pending_;
    std::vector<Token> target_refs_;
    std::set<std::string> owner_names_;

    const Token& peek() const { return toks_[pos_]; }
    bool accept(Tok kind) {
        if (peek().kind != kind) return false;
        ++pos_;
        return true;
    }
    const Token& expect(Tok kind, const char* what) {
        const Token& t = peek();
        if (t.kind != kind)
            throw ParseError(t.line, t.column,
                             std::string("expected ") + what + ", found '" +
                                 (t.kind == Tok::End ? std::string("end of input") : t.text) + "'");
        ++pos_;
        return t;
    }
    static std::string where(const Token& t) {
        return "line " + std::to_string(t.line) + ", column " + std::to_string(t.column) + ": ";
    }

    void claim_owner_name(const Token& name) {
        if (!owner_names_.insert(name.text).second)
            throw SemanticError(where(name) + "duplicate name '" + name.text + "'");
    }

    void end_statement() {
        if (peek().kind == Tok::RBrace) return;
        expect(Tok::Semi, "';'");
    }

    std::int64_t parse_int() {
        const bool negative = accept(Tok::Minus);
        const Token& num = expect(Tok::Number, "an integer");
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(num.text.data(), num.text.data() + num.text.size(), v);
        // keep headroom so relaxed bounds and path sums never overflow
        constexpr std::int64_t kMax = std::int64_t{1} << 40;
        if (ec != std::errc() || v > kMax)
            throw ParseError(num.line, num.column, "integer constant out of range");
        return negative ? -v : v;
    }

    ClockId parse_clock(const TimedAutomaton& ta) {
        const Token& t = expect(Tok::Ident, "a clock name");
        auto c = ta.find_clock(t.text);
        if (!c) throw SemanticError(where(t) + "unknown clock '" + t.text + "'");
        return *c;
    }

    std::vector<SimpleConstraint> parse_atoms(const TimedAutomaton& ta) {
        std::vector<SimpleConstraint> atoms;
        if (peek().kind == Tok::Ident && peek().text == "true") {
            ++pos_;
            return atoms;
        }
        do {
            const Token& start = peek();
            ClockId x = parse_clock(ta);
            ClockId y = kZeroClock;
            if (accept(Tok::Minus)) y = parse_clock(ta);
            if (x == y) throw SemanticError(where(start) + "atom compares a clock with itself");
            CompareOp op;
            const Token& o = peek();
            switch (o.kind) {
            case Tok::Less: op = CompareOp::Less; break;
            case Tok::LessEq: op = CompareOp::LessEq; break;
            case Tok::Greater: op = CompareOp::Greater; break;
            case Tok::GreaterEq: op = CompareOp::GreaterEq; break;
            default: throw ParseError(o.line, o.column, "expected a comparison operator");
            }
            ++pos_;
            atoms.push_back(normalize_atom(x, y, op, parse_int()));
        } while (accept(Tok::And));
        return atoms;
    }

    void parse_location(TimedAutomaton& ta) {
        const Token& name = expect(Tok::Ident, "a location name");
        claim_owner_name(name);
        Location loc;
        loc.name = name.text;
        expect(Tok::LBrace, "'{'");
        while (!accept(Tok::RBrace)) {
            const Token& kw = expect(Tok::Ident, "a location attribute");
            if (kw.text == "initial") {
                loc.initial = true;
            } else if (kw.text == "invariant") {
                auto atoms = parse_atoms(ta);
                loc.invariant.insert(loc.invariant.end(), atoms.begin(), atoms.end());
            } else {
                throw ParseError(kw.line, kw.column, "unknown location attribute '" + kw.text + "'");
            }
            end_statement();
        }
        ta.locations.push_back(std::move(loc));
    }

    void parse_edge(TimedAutomaton& ta) {
        const Token& name = expect(Tok::Ident, "an edge name");
        claim_owner_name(name);
        Edge edge;
        edge.name = name.text;
        PendingEdge pe;
        expect(Tok::LBrace, "'{'");
        while (!accept(Tok::RBrace)) {
            const Token& kw = expect(Tok::Ident, "an edge attribute");
            if (kw.text == "from") {
                pe.from = expect(Tok::Ident, "a location name");
                pe.has_from = true;
            } else if (kw.text == "to") {
                pe.to = expect(Tok::Ident, "a location name");
                pe.has_to = true;
            } else if (kw.text == "guard") {
                auto atoms = parse_atoms(ta);
                edge.guard.insert(edge.guard.end(), atoms.begin(), atoms.end());
            } else if (kw.text == "reset") {
                do edge.resets.push_back(parse_clock(ta));
                while (accept(Tok::Comma));
            } else {
                throw ParseError(kw.line, kw.column, "unknown edge attribute '" + kw.text + "'");
            }
            end_statement();
        }
        if (!pe.has_from || !pe.has_to)
            throw SemanticError(where(name) + "edge '" + name.text + "' needs both 'from' and 'to'");
        std::sort(edge.resets.begin(), edge.resets.end());
        edge.resets.erase(std::unique(edge.resets.begin(), edge.resets.end()), edge.resets.end());
        ta.edges.push_back(std::move(edge));
        pending_.push_back(std::move(pe));
    }

    LocationId lookup_location(const TimedAutomaton& ta, const Token& ref) {
        auto l = ta.find_location(ref.text);
        if (!l) throw SemanticError(where(ref) + "unknown location '" + ref.text + "'");
        return *l;
    }

    void resolve(TimedAutomaton& ta) {
        for (std::size_t e = 0; e < ta.edges.size(); ++e) {
            ta.edges[e].source = lookup_location(ta, pending_[e].from);
            ta.edges[e].target = lookup_location(ta, pending_[e].to);
        }
        for (const auto& ref : target_refs_) ta.targets.push_back(lookup_location(ta, ref));
        std::sort(ta.targets.begin(), ta.targets.end());
        ta.targets.erase(std::unique(ta.targets.begin(), ta.targets.end()), ta.targets.end());
        ta.validate();
    }
};

} // namespace detail

inline ModelFile parse_model_file(std::string_view text) { return detail::Parser(text).parse(); }

inline TimedAutomaton parse_model(std::string_view text) { return parse_model_file(text).automaton; }

inline std::string serialize_model(const TimedAutomaton& ta,
                                   const std::optional<std::vector<std::string>>& tunable = std::nullopt) {
    std::ostringstream os;
    auto atoms = [&](const std::vector<SimpleConstraint>& list) {
        std::string s;
        for (std::size_t i = 0; i < list.size(); ++i) {
            if (i) s += " && ";
            s += format_atom(ta, list[i]);
        }
        return s;
    };
    if (!ta.clocks.empty()) {
        os << "clocks ";
        for (std::size_t i = 0; i < ta.clocks.size(); ++i) os << (i ? ", " : "") << ta.clocks[i];
        os << "\n";
    }
    for (const auto& l : ta.locations) {
        os << "location " << l.name << " {";
        if (l.initial) os << " initial;";
        if (!l.invariant.empty()) os << " invariant " << atoms(l.invariant) << ";";
        os << " }\n";
    }
    for (const auto& e : ta.edges) {
        os << "edge " << e.name << " { from " << ta.locations[e.source].name << "; to "
           << ta.locations[e.target].name << ";";
        if (!e.guard.empty()) os << " guard " << atoms(e.guard) << ";";
        if (!e.resets.empty()) {
            os << " reset ";
            for (std::size_t i = 0; i < e.resets.size(); ++i)
                os << (i ? ", " : "") << ta.clock_name(e.resets[i]);
            os << ";";
        }
        os << " }\n";
    }
    if (!ta.targets.empty()) {
        os << "target ";
        for (std::size_t i = 0; i < ta.targets.size(); ++i)
            os << (i ? ", " : "") << ta.locations[ta.targets[i]].name;
        os << "\n";
    }
    if (tunable && !tunable->empty()) {
        os << "tunable ";
        for (std::size_t i = 0; i < tunable->size(); ++i) os << (i ? ", " : "") << (*tunable)[i];
        os << "\n";
    }
    return os.str();
}

/// Universe mask from `owner#index` ids; an absent list means every constraint.
inline ConstraintSet resolve_universe(const ConstraintTable& table,
                                      const std::optional<std::vector<std::string>>& ids) {
    if (!ids) return table.universe();
    ConstraintSet u = table.empty_set();
    for (const auto& id : *ids) u.set(table.resolve(id).value);
    return u;
}

} // namespace tatune

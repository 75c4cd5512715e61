// Recursive-descent parser and canonical printer for the opponent-script
// language. The language is deliberately closed: no arithmetic, no loops, no
// state, so any parse result is safe to run and total to evaluate.
//
// Grammar (also in docs/dsl.md and embedded in generation prompts):
//
//   script     ::= { rule } fallback
//   rule       ::= "when" condition ":" action ";"
//   fallback   ::= "fallback" ":" action [";"]
//   condition  ::= or_term
//   or_term    ::= and_term { "or" and_term }
//   and_term   ::= factor { "and" factor }
//   factor     ::= "not" factor | "(" condition ")" | comparison | "cooldown_ready"
//   comparison ::= metric cmp number
//   metric     ::= "distance_to_nearest_enemy" | "hp_fraction" | "shield_fraction"
//              |   "enemies_in_range" | "step_count"
//   cmp        ::= "<" | "<=" | ">" | ">=" | "==" | "!="
//   action     ::= "attack_nearest" | "attack_weakest" | "attack_highest_hate"
//              |   "attack_focus" | "move_toward_enemy_spawn" | "move_toward_own_spawn"
//              |   "move_away_from_nearest_enemy" | "hold"
//   number     ::= digits [ "." digits ]
//
// '#' starts a comment that runs to end of line.
#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <vector>

#include "skirmish/core/error.hpp"
#include "skirmish/script/ast.hpp"

namespace skirmish::script {

namespace detail {

struct Token {
    enum class Kind { Word, Number, Cmp, Colon, Semicolon, LParen, RParen, End };
    Kind kind = Kind::End;
    std::string text;
    Fixed number;
    int line = 1;
    int column = 1;
};

class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) {}

    std::vector<Token> run() {
        std::vector<Token> tokens;
        while (true) {
            skip_ws_and_comments();
            Token t;
            t.line = line_;
            t.column = col_;
            if (eof()) {
                t.kind = Token::Kind::End;
                tokens.push_back(t);
                return tokens;
            }
            char c = peek();
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                t.kind = Token::Kind::Word;
                while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) {
                    t.text.push_back(take());
                }
            } else if (std::isdigit(static_cast<unsigned char>(c))) {
                t.kind = Token::Kind::Number;
                t.number = lex_number(t);
            } else if (c == '<' || c == '>' || c == '=' || c == '!') {
                t.kind = Token::Kind::Cmp;
                t.text.push_back(take());
                if (!eof() && peek() == '=') t.text.push_back(take());
                if (t.text == "=" || t.text == "!") {
                    throw ParseError("unknown operator '" + t.text + "'", t.line, t.column);
                }
            } else if (c == ':') {
                t.kind = Token::Kind::Colon;
                take();
            } else if (c == ';') {
                t.kind = Token::Kind::Semicolon;
                take();
            } else if (c == '(') {
                t.kind = Token::Kind::LParen;
                take();
            } else if (c == ')') {
                t.kind = Token::Kind::RParen;
                take();
            } else {
                throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
            }
            tokens.push_back(std::move(t));
        }
    }

private:
    bool eof() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }
    char take() {
        char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_ws_and_comments() {
        while (!eof()) {
            if (std::isspace(static_cast<unsigned char>(peek()))) {
                take();
            } else if (peek() == '#') {
                while (!eof() && peek() != '\n') take();
            } else {
                return;
            }
        }
    }

    // Exact decimal-to-fixed conversion in integer arithmetic. Fractional
    // digits beyond the fixed-point resolution are rounded.
    Fixed lex_number(const Token& at) {
        int64_t whole = 0;
        int digits = 0;
        while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) {
            whole = whole * 10 + (take() - '0');
            if (++digits > 12) throw ParseError("number literal too long", at.line, at.column);
        }
        int64_t frac_num = 0;
        int64_t frac_den = 1;
        if (!eof() && peek() == '.') {
            take();
            if (eof() || !std::isdigit(static_cast<unsigned char>(peek()))) {
                throw ParseError("expected digits after decimal point", at.line, at.column);
            }
            int fdigits = 0;
            while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) {
                char c = take();
                if (++fdigits <= 12) {
                    frac_num = frac_num * 10 + (c - '0');
                    frac_den *= 10;
                }
            }
        }
        int64_t raw = whole * Fixed::kScale +
                      (frac_num * Fixed::kScale + frac_den / 2) / frac_den;
        return Fixed(raw);
    }

    const std::string& text_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

inline std::optional<MetricKind> metric_from(const std::string& word) {
    for (MetricKind m : {MetricKind::DistanceToNearestEnemy, MetricKind::HpFraction,
                         MetricKind::ShieldFraction, MetricKind::EnemiesInRange,
                         MetricKind::StepCount}) {
        if (word == to_keyword(m)) return m;
    }
    return std::nullopt;
}

inline std::optional<ActionKind> action_from(const std::string& word) {
    for (ActionKind a : {ActionKind::AttackNearest, ActionKind::AttackWeakest,
                         ActionKind::AttackHighestHate, ActionKind::AttackFocus,
                         ActionKind::MoveTowardEnemySpawn, ActionKind::MoveTowardOwnSpawn,
                         ActionKind::MoveAwayFromNearestEnemy, ActionKind::Hold}) {
        if (word == to_keyword(a)) return a;
    }
    return std::nullopt;
}

inline std::optional<Comparator> comparator_from(const std::string& text) {
    if (text == "<") return Comparator::Lt;
    if (text == "<=") return Comparator::Le;
    if (text == ">") return Comparator::Gt;
    if (text == ">=") return Comparator::Ge;
    if (text == "==") return Comparator::Eq;
    if (text == "!=") return Comparator::Ne;
    return std::nullopt;
}

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    DecisionTree run(const std::string& name) {
        DecisionTree tree;
        tree.name = name;
        bool have_fallback = false;
        while (peek().kind != Token::Kind::End) {
            const Token& t = peek();
            if (t.kind != Token::Kind::Word) {
                throw ParseError("expected 'when' or 'fallback'", t.line, t.column);
            }
            if (t.text == "when") {
                if (have_fallback) {
                    throw ParseError("rule after fallback", t.line, t.column);
                }
                take();
                Rule rule;
                rule.condition = parse_condition();
                expect(Token::Kind::Colon, "':'");
                rule.action = parse_action();
                expect(Token::Kind::Semicolon, "';'");
                tree.rules.push_back(std::move(rule));
            } else if (t.text == "fallback") {
                if (have_fallback) {
                    throw ParseError("duplicate fallback rule", t.line, t.column);
                }
                take();
                expect(Token::Kind::Colon, "':'");
                tree.fallback = parse_action();
                if (peek().kind == Token::Kind::Semicolon) take();
                have_fallback = true;
            } else {
                throw ParseError("expected 'when' or 'fallback', got '" + t.text + "'", t.line,
                                 t.column);
            }
        }
        if (!have_fallback) {
            const Token& t = peek();
            throw ParseError("missing fallback rule", t.line, t.column);
        }
        return tree;
    }

private:
    const Token& peek() const { return tokens_[pos_]; }
    const Token& take() { return tokens_[pos_++]; }

    const Token& expect(Token::Kind kind, const char* what) {
        const Token& t = peek();
        if (t.kind != kind) {
            throw ParseError(std::string("expected ") + what, t.line, t.column);
        }
        return take();
    }

    Condition parse_condition() { return parse_or(); }

    Condition parse_or() {
        Condition lhs = parse_and();
        while (peek().kind == Token::Kind::Word && peek().text == "or") {
            take();
            Condition node;
            node.kind = Condition::Kind::Or;
            node.children.push_back(std::move(lhs));
            node.children.push_back(parse_and());
            lhs = std::move(node);
        }
        return lhs;
    }

    Condition parse_and() {
        Condition lhs = parse_factor();
        while (peek().kind == Token::Kind::Word && peek().text == "and") {
            take();
            Condition node;
            node.kind = Condition::Kind::And;
            node.children.push_back(std::move(lhs));
            node.children.push_back(parse_factor());
            lhs = std::move(node);
        }
        return lhs;
    }

    Condition parse_factor() {
        const Token& t = peek();
        if (t.kind == Token::Kind::LParen) {
            take();
            Condition inner = parse_condition();
            expect(Token::Kind::RParen, "')'");
            return inner;
        }
        if (t.kind != Token::Kind::Word) {
            throw ParseError("expected a predicate", t.line, t.column);
        }
        if (t.text == "not") {
            take();
            Condition node;
            node.kind = Condition::Kind::Not;
            node.children.push_back(parse_factor());
            return node;
        }
        if (t.text == "cooldown_ready") {
            take();
            Condition node;
            node.kind = Condition::Kind::CooldownReady;
            return node;
        }
        if (auto metric = metric_from(t.text)) {
            take();
            Condition node;
            node.kind = Condition::Kind::Compare;
            node.metric = *metric;
            const Token& op = peek();
            if (op.kind != Token::Kind::Cmp) {
                throw ParseError("expected a comparator after '" + t.text + "'", op.line,
                                 op.column);
            }
            node.cmp = *comparator_from(take().text);
            const Token& num = peek();
            if (num.kind != Token::Kind::Number) {
                throw ParseError("expected a number", num.line, num.column);
            }
            node.literal = take().number;
            return node;
        }
        if (action_from(t.text)) {
            throw ParseError("'" + t.text + "' is an action, not a predicate", t.line, t.column);
        }
        throw ParseError("unknown predicate '" + t.text + "'", t.line, t.column);
    }

    ActionKind parse_action() {
        const Token& t = peek();
        if (t.kind != Token::Kind::Word) {
            throw ParseError("expected an action name", t.line, t.column);
        }
        if (auto action = action_from(t.text)) {
            take();
            return *action;
        }
        throw ParseError("unknown action '" + t.text + "'", t.line, t.column);
    }

    std::vector<Token> tokens_;
    size_t pos_ = 0;
};

inline void print_condition(std::string& out, const Condition& c, int min_prec) {
    auto prec = [](const Condition& n) {
        switch (n.kind) {
            case Condition::Kind::Or: return 1;
            case Condition::Kind::And: return 2;
            case Condition::Kind::Not: return 3;
            default: return 4;
        }
    };
    bool parens = prec(c) < min_prec;
    if (parens) out.push_back('(');
    switch (c.kind) {
        case Condition::Kind::Or:
            print_condition(out, c.children[0], 1);
            out += " or ";
            print_condition(out, c.children[1], 2);
            break;
        case Condition::Kind::And:
            print_condition(out, c.children[0], 2);
            out += " and ";
            print_condition(out, c.children[1], 3);
            break;
        case Condition::Kind::Not:
            out += "not ";
            print_condition(out, c.children[0], 3);
            break;
        case Condition::Kind::Compare:
            out += to_keyword(c.metric);
            out.push_back(' ');
            out += to_keyword(c.cmp);
            out.push_back(' ');
            out += c.literal.to_string();
            break;
        case Condition::Kind::CooldownReady:
            out += "cooldown_ready";
            break;
    }
    if (parens) out.push_back(')');
}

}  // namespace detail

inline DecisionTree parse_script(const ScriptSource& source) {
    detail::Lexer lexer(source.text);
    detail::Parser parser(lexer.run());
    return parser.run(source.name);
}

// Canonical text form; parse(to_text(t)) is structurally identical to t.
inline std::string to_text(const DecisionTree& tree) {
    std::string out;
    for (const auto& rule : tree.rules) {
        out += "when ";
        detail::print_condition(out, rule.condition, 0);
        out += ": ";
        out += to_keyword(rule.action);
        out += ";\n";
    }
    out += "fallback: ";
    out += to_keyword(tree.fallback);
    out += ";\n";
    return out;
}

}  // namespace skirmish::script

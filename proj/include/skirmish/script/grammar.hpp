#pragma once

namespace skirmish::script {

// Canonical grammar reference, embedded verbatim into generation prompts and
// quoted in docs/dsl.md.
inline constexpr const char* kGrammarText = R"DSL(Opponent scripts are ordered condition -> action rules with a mandatory
fallback. Rules are checked top to bottom for each unit every step; the first
matching rule fires, otherwise the fallback does.

EBNF:
  script     ::= { rule } fallback
  rule       ::= "when" condition ":" action ";"
  fallback   ::= "fallback" ":" action [";"]
  condition  ::= or_term
  or_term    ::= and_term { "or" and_term }
  and_term   ::= factor { "and" factor }
  factor     ::= "not" factor | "(" condition ")" | comparison | "cooldown_ready"
  comparison ::= metric cmp number
  metric     ::= "distance_to_nearest_enemy" | "hp_fraction" | "shield_fraction"
             |   "enemies_in_range" | "step_count"
  cmp        ::= "<" | "<=" | ">" | ">=" | "==" | "!="
  action     ::= "attack_nearest" | "attack_weakest" | "attack_highest_hate"
             |   "attack_focus" | "move_toward_enemy_spawn" | "move_toward_own_spawn"
             |   "move_away_from_nearest_enemy" | "hold"
  number     ::= digits [ "." digits ]

'#' starts a comment running to the end of the line.

Semantics notes:
- hp_fraction and shield_fraction are the acting unit's own, in [0, 1].
- enemies_in_range counts living enemies within the unit's attack range.
- attack_* actions fire when the chosen target is in attack range and step
  toward it otherwise; move_toward_* actions hold once arrived.
- Every attack_* tie-break goes to the lowest enemy unit id.)DSL";

}  // namespace skirmish::script

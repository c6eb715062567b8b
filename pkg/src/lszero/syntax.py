"""Typeable text forms for characters, atoms and factors.

Grammar::

    factor    := atom [" x " atom]
    atom      := component* ["@" character]
    component := "A" digit "(" slot ")" | ["~"] slot | "1"
    character := "1" | term ("*" term)*
    term      := ["~"] generator ["^" integer]

A bare GL(2) slot name means A1 of that slot; ``~`` on a GL(2) slot means
its contragredient, on an opaque slot its dual, and on a generator the
inverse character.  Relations are written ``chi^2=1`` or ``chi^2``.
"""

from __future__ import annotations

import re

from .repring import Atom, CharacterExpr, Opaque, dual_atom

_TERM = re.compile(r"^(~?)([A-Za-z_][A-Za-z0-9_]*)(?:\^(-?\d+))?$")
_LEVEL = re.compile(r"^A(\d+)\((~?)([A-Za-z_][A-Za-z0-9_]*)\)$")


class SyntaxProblem(ValueError):
    pass


def parse_character(text: str) -> CharacterExpr:
    text = text.strip().replace(" ", "")
    if text in ("", "1"):
        return CharacterExpr()
    acc = CharacterExpr()
    for part in text.split("*"):
        m = _TERM.match(part)
        if not m:
            raise SyntaxProblem(f"bad character term {part!r}")
        inv, g, e = m.groups()
        power = int(e) if e else 1
        if inv:
            power = -power
        acc = acc * CharacterExpr.gen(g, power)
    return acc


def parse_relation(text: str) -> CharacterExpr:
    lhs, _, rhs = text.partition("=")
    c = parse_character(lhs)
    if rhs.strip():
        c = c * parse_character(rhs).inverse()
    return c


def parse_atom(text: str, gl2_slots, opaque: dict[str, Opaque]) -> Atom:
    text = text.strip()
    body, _, tw = text.partition("@")
    atom = Atom.unit(parse_character(tw) if tw.strip() else CharacterExpr())
    for tok in body.split():
        if tok == "1":
            continue
        m = _LEVEL.match(tok)
        if m:
            j, tilde, slot = int(m.group(1)), m.group(2), m.group(3)
            if slot not in gl2_slots:
                raise SyntaxProblem(f"unknown GL(2) slot {slot!r}")
            piece = Atom.A(j, slot)
        else:
            tilde = "~" if tok.startswith("~") else ""
            slot = tok.lstrip("~")
            if slot in gl2_slots:
                piece = Atom.A(1, slot)
            elif slot in opaque:
                piece = Atom.of_opaque(opaque[slot])
            else:
                raise SyntaxProblem(f"unknown slot {slot!r}")
        if tilde:
            piece = dual_atom(piece)
        if piece.slots & atom.slots:
            raise SyntaxProblem(f"slot repeated in atom {text!r}")
        atom = atom.merge(piece)
    return atom


def split_factor(text: str) -> tuple[str, str | None]:
    parts = re.split(r"\s+x\s+", text.strip())
    if len(parts) == 1:
        return parts[0], None
    if len(parts) == 2:
        return parts[0], parts[1]
    raise SyntaxProblem(f"a factor has at most two sides: {text!r}")


def format_atom(a: Atom) -> str:
    return str(a)

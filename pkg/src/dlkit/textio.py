"""Line-oriented text format for instances and models.

    var x y z
    con x - y in [0,3] | x - y in [5,5]
    con y - z <= 4          # sugar for (-inf,4]

`#` starts a comment, blank lines are ignored.  Models print as `SAT` or
`UNSAT`, then one `name = p/q` line per variable (reduced, `/1` omitted).
The printer emits the canonical `in` form only, so parse(print(inst))
round-trips bit-exactly on printed output.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .core import (
    Assignment,
    Atom,
    Constraint,
    Instance,
    Interval,
    Rational,
    at_least,
    at_most,
    above,
    below,
    point,
)


class ParseError(ValueError):
    def __init__(self, line: int, col: int, msg: str):
        super().__init__(f"line {line}, col {col}: {msg}")
        self.line = line
        self.col = col
        self.msg = msg


_INTERVAL_RE = re.compile(r"^([\[\(])(-inf|-?\d+),(\+inf|-?\d+)([\]\)])$")
_RESERVED = {"var", "con", "in", "-", "|", "<=", "<", "=", ">=", ">"}


def _tokenize(line: str) -> list[tuple[int, str]]:
    """(column, token) pairs, 1-based columns, comment stripped."""
    cut = line.find("#")
    if cut >= 0:
        line = line[:cut]
    out = []
    for m in re.finditer(r"\S+", line):
        out.append((m.start() + 1, m.group()))
    return out


def _parse_interval(tok: str, ln: int, col: int) -> Interval:
    m = _INTERVAL_RE.match(tok)
    if not m:
        raise ParseError(ln, col, f"bad interval literal {tok!r}")
    left, lo_s, hi_s, right = m.groups()
    lo = None if lo_s == "-inf" else int(lo_s)
    hi = None if hi_s == "+inf" else int(hi_s)
    lo_open = left == "("
    hi_open = right == ")"
    if lo is None and not lo_open:
        raise ParseError(ln, col, "infinite endpoint must be open")
    if hi is None and not hi_open:
        raise ParseError(ln, col, "infinite endpoint must be open")
    if lo is not None and hi is not None:
        if lo > hi or (lo == hi and (lo_open or hi_open)):
            raise ParseError(ln, col, f"empty interval {tok!r}")
    return Interval(lo, hi, lo_open, hi_open)


_SUGAR = {
    "<=": at_most,
    "<": below,
    "=": point,
    ">=": at_least,
    ">": above,
}


def parse_instance(text: str) -> Instance:
    names: list[str] = []
    ids: dict[str, int] = {}
    constraints: list[Constraint] = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        toks = _tokenize(raw)
        if not toks:
            continue
        col0, head = toks[0]
        rest = toks[1:]
        if head == "var":
            if not rest:
                raise ParseError(ln, col0, "expected at least one variable name")
            for col, name in rest:
                if name in _RESERVED or _INTERVAL_RE.match(name):
                    raise ParseError(ln, col, f"invalid variable name {name!r}")
                if name in ids:
                    raise ParseError(ln, col, f"duplicate variable {name!r}")
                ids[name] = len(names)
                names.append(name)
        elif head == "con":
            if not rest:
                raise ParseError(ln, col0, "constraint needs at least one atom")
            atoms: list[Atom] = []
            tautology = False
            i = 0
            while i < len(rest):
                chunk = []
                while i < len(rest) and rest[i][1] != "|":
                    chunk.append(rest[i])
                    i += 1
                if i < len(rest):
                    i += 1  # skip the bar
                if len(chunk) != 5:
                    at = chunk[0][0] if chunk else (rest[-1][0] if rest else col0)
                    raise ParseError(ln, at, "atom must be '<x> - <y> in <interval>' or '<x> - <y> <op> <int>'")
                (cx, tx), (cm, tm), (cy, ty), (ck, kw), (cv, tv) = chunk
                if tx not in ids:
                    raise ParseError(ln, cx, f"unknown variable {tx!r}")
                if tm != "-":
                    raise ParseError(ln, cm, f"expected '-', got {tm!r}")
                if ty not in ids:
                    raise ParseError(ln, cy, f"unknown variable {ty!r}")
                if kw == "in":
                    iv = _parse_interval(tv, ln, cv)
                elif kw in _SUGAR:
                    if not re.match(r"^-?\d+$", tv):
                        raise ParseError(ln, cv, f"expected integer, got {tv!r}")
                    iv = _SUGAR[kw](int(tv))
                else:
                    raise ParseError(ln, ck, f"expected 'in' or comparison op, got {kw!r}")
                x, y = ids[tx], ids[ty]
                if x == y:
                    if iv.contains(0):
                        tautology = True
                        continue
                    raise ParseError(ln, cx, f"self-difference {tx!r} - {ty!r} can never lie in {iv}")
                atoms.append(Atom(x, y, iv))
            if tautology:
                continue  # the whole disjunction is always true
            constraints.append(Constraint(tuple(atoms)))
        else:
            raise ParseError(ln, col0, f"expected 'var' or 'con', got {head!r}")
    return Instance(tuple(names), tuple(constraints))


def print_instance(inst: Instance) -> str:
    lines = []
    if inst.var_names:
        lines.append("var " + " ".join(inst.var_names))
    for c in inst.constraints:
        if not c.atoms:
            raise ValueError("empty constraint has no text form")
        parts = [
            f"{inst.var_names[a.x]} - {inst.var_names[a.y]} in {a.interval}"
            for a in c.atoms
        ]
        lines.append("con " + " | ".join(parts))
    return "\n".join(lines) + "\n"


def print_model(inst: Instance, assignment: Assignment | None) -> str:
    if assignment is None:
        return "UNSAT\n"
    lines = ["SAT"]
    for i, name in enumerate(inst.var_names):
        lines.append(f"{name} = {assignment[i]}")
    return "\n".join(lines) + "\n"


def parse_model(text: str, inst: Instance) -> Assignment | None:
    """Read a model file; a leading SAT/UNSAT line is optional."""
    assignment: Assignment = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        toks = _tokenize(raw)
        if not toks:
            continue
        if len(toks) == 1 and toks[0][1] in ("SAT", "UNSAT"):
            if toks[0][1] == "UNSAT":
                return None
            continue
        if len(toks) != 3 or toks[1][1] != "=":
            raise ParseError(ln, toks[0][0], "expected '<name> = <value>'")
        (cn, name), _, (cv, val) = toks
        try:
            vid = inst.var_id(name)
        except KeyError:
            raise ParseError(ln, cn, f"unknown variable {name!r}") from None
        try:
            assignment[vid] = Fraction(val)
        except (ValueError, ZeroDivisionError):
            raise ParseError(ln, cv, f"bad rational {val!r}") from None
    return assignment

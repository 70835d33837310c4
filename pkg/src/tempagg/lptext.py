"""Plain-text LP file export and import.

The emitted dialect is the widely used LP file format: a Minimize
section, Subject To rows, a Bounds section and End.  Numbers are written
with ``repr`` so every float round-trips exactly; free variables are
declared explicitly and fixed variables use the ``name = value`` form.
The parser accepts everything the writer emits (plus minor whitespace
and case variations), which is enough to hand instances to external
solvers and read our own files back.
"""

from __future__ import annotations

import math
import re
from pathlib import Path

from .lp import LinearProgram

__all__ = ["export_lp_text", "write_lp_file", "parse_lp_text", "read_lp_file"]


def _num(value: float) -> str:
    text = repr(float(value))
    return text


_RESERVED = {
    "minimize", "minimise", "min", "maximize", "maximise", "max",
    "subject", "to", "st", "s.t.", "bounds", "bound", "end",
    "free", "infinity", "inf",
}


def _terms(pairs: list[tuple[str, float]]) -> str:
    """Render a linear expression as signed coefficient/name terms."""
    if not pairs:
        return ""
    parts: list[str] = []
    for pos, (name, coef) in enumerate(pairs):
        sign = "-" if coef < 0 else "+"
        mag = abs(coef)
        term = name if mag == 1.0 else f"{_num(mag)} {name}"
        if pos == 0 and sign == "+":
            parts.append(term)
        else:
            parts.append(f"{sign} {term}")
    return " ".join(parts)


def export_lp_text(lp: LinearProgram) -> str:
    """Serialize the program to LP file format text."""
    for name in lp.variable_names:
        if name.lower() in _RESERVED:
            raise ValueError(
                f"variable name {name!r} is a reserved LP format keyword"
            )
    lines = [f"\\ LP export of {lp.name}", "Minimize"]
    objective = lp.objective_vector()
    obj_pairs = [
        (name, float(objective[i]))
        for i, name in enumerate(lp.variable_names)
        if objective[i] != 0.0
    ]
    lines.append(" obj: " + _terms(obj_pairs))
    lines.append("Subject To")
    for c in range(lp.n_constraints):
        row = lp.constraint_row(c)
        pairs = [(lp.variable_names[i], row[i]) for i in sorted(row)]
        body = _terms(pairs) if pairs else "0 " + lp.variable_names[0]
        sense = lp.constraint_sense(c)
        rhs = _num(lp.constraint_rhs(c))
        lines.append(f" {lp.constraint_names[c]}: {body} {sense} {rhs}")
    lines.append("Bounds")
    for name in lp.variable_names:
        lo, hi = lp.variable_bounds(name)
        if math.isinf(lo) and math.isinf(hi):
            lines.append(f" {name} free")
        elif lo == hi:
            lines.append(f" {name} = {_num(lo)}")
        elif math.isinf(lo):
            lines.append(f" -infinity <= {name} <= {_num(hi)}")
        elif math.isinf(hi):
            lines.append(f" {name} >= {_num(lo)}")
        else:
            lines.append(f" {_num(lo)} <= {name} <= {_num(hi)}")
    lines.append("End")
    return "\n".join(lines) + "\n"


def write_lp_file(lp: LinearProgram, path: str | Path) -> Path:
    """Write the program to ``path``, enforcing the .lp extension."""
    target = Path(path)
    if target.suffix != ".lp":
        raise ValueError(f"LP files use the .lp extension, got {target.name!r}")
    target.write_text(export_lp_text(lp), encoding="ascii")
    return target


_TOKEN_RE = re.compile(
    r"""
    (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_.]*)
  | (?P<op><=|>=|=<|=>|=|\+|-|:)
    """,
    re.VERBOSE,
)

_SECTION_WORDS = {
    "minimize": "objective",
    "minimise": "objective",
    "min": "objective",
    "maximize": "maximize",
    "maximise": "maximize",
    "max": "maximize",
    "subject": "constraints",
    "st": "constraints",
    "s.t.": "constraints",
    "bounds": "bounds",
    "bound": "bounds",
    "end": "end",
}


def _tokenize(text: str) -> list[str]:
    tokens: list[str] = []
    for raw_line in text.splitlines():
        line = raw_line.split("\\", 1)[0]
        pos = 0
        while pos < len(line):
            if line[pos].isspace():
                pos += 1
                continue
            match = _TOKEN_RE.match(line, pos)
            if not match:
                raise ValueError(f"cannot tokenize LP text at: {line[pos:pos+20]!r}")
            tokens.append(match.group(0))
            pos = match.end()
    return tokens


class _TokenStream:
    def __init__(self, tokens: list[str]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise ValueError("unexpected end of LP text")
        self.pos += 1
        return tok


_NUM_START = re.compile(r"[\d.]")


def _is_number(token: str | None) -> bool:
    return token is not None and bool(_NUM_START.match(token[0]))


def _section_of(token: str | None) -> str | None:
    if token is None:
        return "end"
    return _SECTION_WORDS.get(token.lower())


def _parse_expression(stream: _TokenStream) -> dict[str, float]:
    """Read sign/coefficient/name terms until a sense or section token."""
    coeffs: dict[str, float] = {}
    while True:
        token = stream.peek()
        if token is None or token in ("<=", ">=", "=", "=<", "=>"):
            return coeffs
        if _section_of(token) and not _is_number(token):
            # a bare section keyword ends the expression; variables named
            # like keywords would have been rejected at export time
            return coeffs
        sign = 1.0
        while token in ("+", "-"):
            stream.take()
            if token == "-":
                sign = -sign
            token = stream.peek()
        coef = 1.0
        if _is_number(token):
            coef = float(stream.take())
            token = stream.peek()
        if token is not None and not _is_number(token) and not _section_of(token) \
                and token not in ("<=", ">=", "=", "=<", "=>", "+", "-", ":"):
            name = stream.take()
            coeffs[name] = coeffs.get(name, 0.0) + sign * coef
        else:
            raise ValueError(
                f"expected a variable name in expression, found {token!r}"
            )


def parse_lp_text(text: str) -> LinearProgram:
    """Parse LP file text back into a :class:`LinearProgram`.

    Handles the subset emitted by :func:`export_lp_text`: labeled
    minimize objective, labeled constraints, an optional Bounds section
    and a mandatory End marker.  Unknown variables get default bounds
    [0, inf) until the Bounds section overrides them.
    """
    stream = _TokenStream(_tokenize(text))
    order: list[str] = []
    bounds: dict[str, list[float]] = {}
    objective: dict[str, float] = {}
    constraints: list[tuple[str, dict[str, float], str, float]] = []

    def touch(name: str) -> None:
        if name not in bounds:
            bounds[name] = [0.0, math.inf]
            order.append(name)

    section = _section_of(stream.take())
    if section == "maximize":
        raise ValueError("only minimization programs are supported")
    if section != "objective":
        raise ValueError("LP text must start with a Minimize section")
    # optional objective label
    if stream.peek() is not None and stream.tokens[stream.pos + 1 : stream.pos + 2] == [":"]:
        stream.take()
        stream.take()
    objective = _parse_expression(stream)
    for name in objective:
        touch(name)
    token = stream.take()
    if _section_of(token) != "constraints":
        raise ValueError(f"expected the constraint section, found {token!r}")
    if token.lower() == "subject":
        nxt = stream.take()
        if nxt.lower() != "to":
            raise ValueError("expected 'Subject To'")
    counter = 0
    while True:
        token = stream.peek()
        sect = _section_of(token)
        if sect in ("bounds", "end"):
            break
        label = f"c{counter}"
        if stream.tokens[stream.pos + 1 : stream.pos + 2] == [":"]:
            label = stream.take()
            stream.take()
        coeffs = _parse_expression(stream)
        sense = stream.take()
        sense = {"=<": "<=", "=>": ">="}.get(sense, sense)
        if sense not in ("<=", ">=", "="):
            raise ValueError(f"expected a constraint sense, found {sense!r}")
        sign = 1.0
        tok = stream.take()
        while tok in ("+", "-"):
            if tok == "-":
                sign = -sign
            tok = stream.take()
        if not _is_number(tok):
            raise ValueError(f"expected a numeric right-hand side, found {tok!r}")
        rhs = sign * float(tok)
        for name in coeffs:
            touch(name)
        constraints.append((label, coeffs, sense, rhs))
        counter += 1
    if _section_of(stream.peek()) == "bounds":
        stream.take()
        while True:
            token = stream.peek()
            if _section_of(token) == "end" and (token or "").lower() == "end":
                break
            if token is None:
                break
            _parse_bound_line(stream, bounds, touch)
    closing = stream.peek()
    if closing is None or closing.lower() != "end":
        raise ValueError("LP text must finish with an End marker")
    stream.take()
    if stream.peek() is not None:
        raise ValueError(f"unexpected content after End: {stream.peek()!r}")
    lp = LinearProgram("parsed")
    for name in order:
        lo, hi = bounds[name]
        lp.add_variable(name, lo, hi, objective.get(name, 0.0))
    for label, coeffs, sense, rhs in constraints:
        lp.add_constraint(label, coeffs, sense, rhs)
    return lp


def _parse_bound_line(
    stream: _TokenStream, bounds: dict[str, list[float]], touch
) -> None:
    """One bounds declaration in any of the emitted forms."""
    sign = 1.0
    token = stream.take()
    while token in ("+", "-"):
        if token == "-":
            sign = -sign
        token = stream.take()
    if _is_number(token) or token.lower() in ("infinity", "inf"):
        # "<number> <= name <= <number>" or "-infinity <= name <= u"
        low = -math.inf if token.lower() in ("infinity", "inf") else sign * float(token)
        if stream.take() not in ("<=", "=<"):
            raise ValueError("malformed bounds line")
        name = stream.take()
        touch(name)
        bounds[name][0] = low
        if stream.peek() in ("<=", "=<"):
            stream.take()
            up_sign = 1.0
            tok = stream.take()
            while tok in ("+", "-"):
                if tok == "-":
                    up_sign = -up_sign
                tok = stream.take()
            if tok.lower() in ("infinity", "inf"):
                bounds[name][1] = math.inf if up_sign > 0 else -math.inf
            else:
                bounds[name][1] = up_sign * float(tok)
        return
    name = token
    touch(name)
    follower = stream.peek()
    if follower is not None and follower.lower() == "free":
        stream.take()
        bounds[name][0] = -math.inf
        bounds[name][1] = math.inf
        return
    op = stream.take()
    val_sign = 1.0
    tok = stream.take()
    while tok in ("+", "-"):
        if tok == "-":
            val_sign = -val_sign
        tok = stream.take()
    if tok.lower() in ("infinity", "inf"):
        value = math.inf if val_sign > 0 else -math.inf
    else:
        value = val_sign * float(tok)
    if op in (">=", "=>"):
        bounds[name][0] = value
    elif op in ("<=", "=<"):
        bounds[name][1] = value
    elif op == "=":
        bounds[name][0] = value
        bounds[name][1] = value
    else:
        raise ValueError(f"malformed bounds line near {name!r}")


def read_lp_file(path: str | Path) -> LinearProgram:
    return parse_lp_text(Path(path).read_text(encoding="ascii"))

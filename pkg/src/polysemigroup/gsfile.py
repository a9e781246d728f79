"""Generator-set text files.

One generator per non-comment line, optionally labeled:

    # Cantor-of-circles pair
    cube:   monomial 1 3
    qsq:    coeffs = [0, 0, 1/4]

Forms:
    coeffs = [c0, c1, ...]     ascending coefficients, complex literals
    monomial A D               A * z^D
    shifted A B D              A * (z - B)^D + B
    logistic C A B             C * z^A * (1 - z)^B
    iterate N <form>           N-fold self-composition of <form>

Numeric literals are decimals or rationals (1/64), parsed exactly as
binary64; complex literals look like 1+2i, -0.5i, 3, i.
"""

from __future__ import annotations

import re
from fractions import Fraction

from polysemigroup import families, poly
from polysemigroup.poly import Polynomial
from polysemigroup.semigroup import GeneratorSet


class ParseError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


_NUM = r"(?:\d+/\d+|\d*\.?\d+(?:[eE][+-]?\d+)?)"
_SIGNED = rf"[+-]?{_NUM}"
_COMPLEX_RE = re.compile(
    rf"^(?:(?P<re>{_SIGNED}))?(?P<im>[+-]?(?:{_NUM})?)(?P<isuf>i)?$"
)


def parse_number(text: str) -> float:
    if "/" in text:
        num, den = text.split("/")
        sign = 1.0
        if num.startswith("-"):
            sign, num = -1.0, num[1:]
        elif num.startswith("+"):
            num = num[1:]
        return sign * float(Fraction(int(num), int(den)))
    return float(text)


def parse_complex(text: str) -> complex:
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError("empty number")
    if s.endswith("i"):
        body = s[:-1]
        # split into real part and imaginary coefficient
        for k in range(len(body) - 1, 0, -1):
            if body[k] in "+-" and body[k - 1] not in "eE/":
                re_part, im_part = body[:k], body[k:]
                break
        else:
            re_part, im_part = "", body
        if im_part in ("", "+"):
            im = 1.0
        elif im_part == "-":
            im = -1.0
        else:
            im = parse_number(im_part.lstrip("+")) if not im_part.startswith("-") else -parse_number(im_part[1:])
        re_val = 0.0
        if re_part:
            re_val = parse_number(re_part.lstrip("+")) if not re_part.startswith("-") else -parse_number(re_part[1:])
        return complex(re_val, im)
    val = parse_number(s.lstrip("+")) if not s.startswith("-") else -parse_number(s[1:])
    return complex(val, 0.0)


def _parse_form(tokens: list[str], line_no: int) -> Polynomial:
    if not tokens:
        raise ParseError(line_no, "empty generator form")
    head = tokens[0].lower()
    if head == "coeffs":
        joined = " ".join(tokens)
        m = re.match(r"coeffs\s*=\s*\[(.*)\]\s*$", joined, flags=re.IGNORECASE)
        if not m:
            raise ParseError(line_no, "expected coeffs = [c0, c1, ...]")
        items = [t for t in m.group(1).split(",") if t.strip()]
        if len(items) < 2:
            raise ParseError(line_no, "need at least two coefficients")
        try:
            cs = [parse_complex(t) for t in items]
        except ValueError as exc:
            raise ParseError(line_no, str(exc)) from exc
        return poly.polynomial(cs)
    if head == "monomial":
        if len(tokens) != 3:
            raise ParseError(line_no, "monomial needs: monomial A D")
        return poly.monomial(parse_complex(tokens[1]), int(tokens[2]))
    if head == "shifted":
        if len(tokens) != 4:
            raise ParseError(line_no, "shifted needs: shifted A B D")
        return poly.shifted_power(parse_complex(tokens[1]), parse_complex(tokens[2]), int(tokens[3]))
    if head == "logistic":
        if len(tokens) != 4:
            raise ParseError(line_no, "logistic needs: logistic C A B")
        spec = families.logistic_family(parse_number(tokens[1]), int(tokens[2]), int(tokens[3]))
        return spec.generators.generators[0]
    if head == "iterate":
        if len(tokens) < 3:
            raise ParseError(line_no, "iterate needs: iterate N <form>")
        return poly.iterate(_parse_form(tokens[2:], line_no), int(tokens[1]))
    raise ParseError(line_no, f"unknown form {tokens[0]!r}")


def parse_generator_file(text: str) -> GeneratorSet:
    gens: list[Polynomial] = []
    labels: list[str] = []
    any_label = False
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        label = None
        if ":" in line:  # no form syntax uses a colon
            label, line = line.split(":", 1)
            label = label.strip()
            line = line.strip()
            any_label = True
        try:
            p = _parse_form(line.split(), line_no)
        except ParseError:
            raise
        except (ValueError, OverflowError) as exc:
            raise ParseError(line_no, str(exc)) from exc
        if p.degree < 2:
            raise ParseError(line_no, "generator degree must be >= 2")
        gens.append(p)
        labels.append(label if label is not None else f"g{len(gens) - 1}")
    if not gens:
        raise ParseError(0, "no generators found")
    return GeneratorSet(tuple(gens), tuple(labels) if any_label else None)


def load_generator_file(path: str) -> GeneratorSet:
    with open(path) as fh:
        return parse_generator_file(fh.read())


def _fmt_complex(z: complex) -> str:
    if z.imag == 0:
        return f"{z.real!r}"
    if z.real == 0:
        return f"{z.imag!r}i"
    sign = "+" if z.imag >= 0 else "-"
    return f"{z.real!r}{sign}{abs(z.imag)!r}i"


def format_generator_set(gs: GeneratorSet) -> str:
    """Writable text form; iterated generators keep their chain structure."""
    lines = []
    for i, g in enumerate(gs.generators):
        label = gs.label(i)
        factors = g.factors()
        if len(factors) > 1 and all(f == factors[0] for f in factors):
            inner = ", ".join(_fmt_complex(c) for c in factors[0].coeffs)
            lines.append(f"{label}: iterate {len(factors)} coeffs = [{inner}]")
        else:
            inner = ", ".join(_fmt_complex(c) for c in g.coeffs)
            lines.append(f"{label}: coeffs = [{inner}]")
    return "\n".join(lines) + "\n"

"""Noncommutative polynomials over complex matrices.

A polynomial is a complex-weighted sum of words in the variables X1, X2, ...
Words multiply by concatenation; nothing commutes except scalars. Evaluation
substitutes square matrices for the variables; the empty word contributes a
multiple of the identity.

The text grammar (parsed by `parse`, printed by `NcPolynomial.to_string`):

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor ('*' factor)*
    factor := atom ('^' uint)?
    atom   := var | scalar | '(' expr ')' | '[' expr ',' expr ']'
    var    := 'X' uint              (uint >= 1)
    scalar := '(' decimal ('+'|'-') decimal 'i' ')' | decimal

Commutator brackets desugar to a*b - b*a.
"""

from dataclasses import dataclass

import numpy as np

from .config import CLASSIFY_KMAX, CLASSIFY_SAMPLES, CLASSIFY_TOL
from .errors import ParseError

Word = tuple  # tuple of 1-based variable indices; () is the constant word


class NcPolynomial:
    """Canonical form: a dict mapping each word to its nonzero coefficient."""

    def __init__(self, terms=None):
        merged = {}
        for word, coeff in (terms or {}).items():
            word = tuple(int(i) for i in word)
            if any(i < 1 for i in word):
                raise ValueError(f"variable indices must be >= 1, got {word}")
            c = merged.get(word, 0j) + complex(coeff)
            merged[word] = c
        self.terms = {w: c for w, c in merged.items() if c != 0}
        self.num_vars = max((max(w) for w in self.terms if w), default=0)

    @classmethod
    def zero(cls):
        return cls({})

    @classmethod
    def constant(cls, c):
        return cls({(): c})

    @classmethod
    def variable(cls, index):
        return cls({(index,): 1.0})

    def __add__(self, other):
        other = _coerce(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0j) + c
        return NcPolynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return NcPolynomial({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __mul__(self, other):
        other = _coerce(other)
        out = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 + w2
                out[w] = out.get(w, 0j) + c1 * c2
        return NcPolynomial(out)

    def __rmul__(self, scalar):
        return NcPolynomial({w: scalar * c for w, c in self.terms.items()})

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative polynomial powers are not defined")
        result = NcPolynomial.constant(1.0)
        for _ in range(int(k)):
            result = result * self
        return result

    def __eq__(self, other):
        return isinstance(other, NcPolynomial) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self):
        return not self.terms

    def is_multilinear(self):
        """True when every word uses each of X1..Xm exactly once.

        The constant polynomial and polynomials with a constant term are not
        multilinear (the empty word misses every variable).
        """
        m = self.num_vars
        if m == 0 or not self.terms:
            return False
        target = tuple(range(1, m + 1))
        return all(tuple(sorted(w)) == target for w in self.terms)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda item: (len(item[0]), item[0]))

    def to_string(self):
        if not self.terms:
            return "0"
        parts = []
        for word, coeff in self.sorted_terms():
            sign, body = _format_term(word, coeff)
            if not parts:
                parts.append(body if sign == "+" else "-" + body)
            else:
                parts.append(f" {sign} {body}")
        return "".join(parts)

    def __repr__(self):
        return f"NcPolynomial({self.to_string()!r})"


def _coerce(value):
    if isinstance(value, NcPolynomial):
        return value
    if isinstance(value, (int, float, complex)):
        return NcPolynomial.constant(value)
    raise TypeError(f"cannot combine NcPolynomial with {type(value).__name__}")


def _format_decimal(x):
    # repr round-trips doubles exactly
    return repr(float(x))


def _format_term(word, coeff):
    """Return (sign, body) with the sign factored out of the real part."""
    wstr = "*".join(_format_run(v, k) for v, k in _runs(word))
    if coeff.imag == 0:
        sign = "-" if coeff.real < 0 else "+"
        mag = abs(coeff.real)
        if wstr and mag == 1.0:
            return sign, wstr
        cstr = _format_decimal(mag)
        return sign, f"{cstr}*{wstr}" if wstr else cstr
    # complex coefficient: parenthesized literal, sign factored from Re (or Im)
    sign = "+"
    if coeff.real < 0 or (coeff.real == 0 and coeff.imag < 0):
        sign, coeff = "-", -coeff
    mid = "+" if coeff.imag >= 0 else "-"
    cstr = f"({_format_decimal(coeff.real)}{mid}{_format_decimal(abs(coeff.imag))}i)"
    return sign, f"{cstr}*{wstr}" if wstr else cstr


def _runs(word):
    runs = []
    for v in word:
        if runs and runs[-1][0] == v:
            runs[-1][1] += 1
        else:
            runs.append([v, 1])
    return [(v, k) for v, k in runs]


def _format_run(v, k):
    return f"X{v}" if k == 1 else f"X{v}^{k}"


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

_OPERATORS = set("+-*^()[],")


def _tokenize(text):
    """Tokens: ('num', value, is_imag, pos), ('var', index, pos), (op, pos)."""
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _OPERATORS:
            tokens.append((ch, None, None, i))
            i += 1
            continue
        if ch == "X":
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            if j == i + 1:
                raise ParseError("variable needs a numeric index after 'X'", i)
            index = int(text[i + 1 : j])
            if index == 0:
                raise ParseError("variable index 0 is not allowed", i)
            tokens.append(("var", index, None, i))
            i = j
            continue
        if ch.isdigit() or ch == ".":
            j = i
            while j < n and (text[j].isdigit() or text[j] == "."):
                j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    while k < n and text[k].isdigit():
                        k += 1
                    j = k
            lit = text[i:j]
            try:
                value = float(lit)
            except ValueError:
                raise ParseError(f"malformed number {lit!r}", i) from None
            is_imag = j < n and text[j] == "i"
            if is_imag:
                j += 1
            tokens.append(("num", value, is_imag, i))
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", i)
    tokens.append(("end", None, None, n))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self, offset=0):
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def next(self):
        tok = self.tokens[self.pos]
        if tok[0] != "end":
            self.pos += 1
        return tok

    def expect(self, kind):
        tok = self.next()
        if tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[0]!r}", tok[3])
        return tok

    def parse(self):
        poly = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected trailing {tok[0]!r}", tok[3])
        return poly

    def expr(self):
        sign = 1.0
        if self.peek()[0] in "+-":
            sign = -1.0 if self.next()[0] == "-" else 1.0
        poly = sign * self.term()
        while self.peek()[0] in "+-":
            op = self.next()[0]
            rhs = self.term()
            poly = poly + rhs if op == "+" else poly - rhs
        return poly

    def term(self):
        poly = self.factor()
        while self.peek()[0] == "*":
            self.next()
            poly = poly * self.factor()
        return poly

    def factor(self):
        poly = self.atom()
        if self.peek()[0] == "^":
            self.next()
            tok = self.expect("num")
            if tok[2] or tok[1] != int(tok[1]) or tok[1] < 0:
                raise ParseError("exponent must be a nonnegative integer", tok[3])
            poly = poly ** int(tok[1])
        return poly

    def atom(self):
        tok = self.peek()
        kind = tok[0]
        if kind == "var":
            self.next()
            return NcPolynomial.variable(tok[1])
        if kind == "num":
            self.next()
            return NcPolynomial.constant(tok[1] * 1j if tok[2] else tok[1])
        if kind == "(":
            self.next()
            lit = self._complex_literal()
            if lit is not None:
                return lit
            poly = self.expr()
            self.expect(")")
            return poly
        if kind == "[":
            self.next()
            a = self.expr()
            self.expect(",")
            b = self.expr()
            self.expect("]")
            return a * b - b * a
        raise ParseError("expected a variable, number, '(' or '['", tok[3])

    def _complex_literal(self):
        """Consume 'a±bi)' right after '(' when it matches; else leave alone."""
        t0, t1, t2, t3 = self.peek(0), self.peek(1), self.peek(2), self.peek(3)
        if (
            t0[0] == "num" and not t0[2]
            and t1[0] in "+-"
            and t2[0] == "num" and t2[2]
            and t3[0] == ")"
        ):
            self.pos += 4
            imag = t2[1] if t1[0] == "+" else -t2[1]
            return NcPolynomial.constant(complex(t0[1], imag))
        return None


def parse(text):
    """Parse polynomial text into canonical form. Raises ParseError."""
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def evaluate(f, args):
    """Substitute the matrices `args` into f and return the image matrix.

    args[k] stands for X(k+1); extra arguments beyond f.num_vars are ignored.
    """
    mats = [np.asarray(a, dtype=complex) for a in args]
    if not mats:
        raise ValueError("need at least one matrix to fix the evaluation size")
    n = mats[0].shape[0]
    for a in mats:
        if a.shape != (n, n):
            raise ValueError(f"arguments must all be {n}x{n}, got {a.shape}")
    if len(mats) < f.num_vars:
        raise ValueError(f"polynomial uses X{f.num_vars} but only "
                         f"{len(mats)} arguments were given")
    out = np.zeros((n, n), dtype=complex)
    eye = np.eye(n, dtype=complex)
    for word, coeff in f.terms.items():
        prod = eye
        for v in word:
            prod = prod @ mats[v - 1]
        out += coeff * prod
    return out


def random_tuple(rng, n, m):
    """m matrices with i.i.d. standard complex Gaussian entries."""
    return tuple(
        rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        for _ in range(m)
    )


# ---------------------------------------------------------------------------
# probabilistic classification
# ---------------------------------------------------------------------------

VERDICT_IDENTITY = "identity"
VERDICT_CENTRAL = "central"
VERDICT_K_CENTRAL = "k-central"
VERDICT_GENERIC = "generic"


@dataclass(frozen=True)
class PolyClass:
    """Sampled verdict; valid only relative to (n, samples, tolerance)."""

    verdict: str
    k: int | None
    n: int
    samples: int
    tolerance: float

    @property
    def is_identity_or_central(self):
        return self.verdict in (VERDICT_IDENTITY, VERDICT_CENTRAL)

    def describe(self):
        if self.verdict == VERDICT_K_CENTRAL:
            return f"{self.k}-central"
        return self.verdict


def scalar_distance(M):
    """Frobenius distance to the scalar matrices (orthogonal projection
    under the trace inner product)."""
    n = M.shape[0]
    return float(np.linalg.norm(M - (np.trace(M) / n) * np.eye(n)))


def classify(f, n, samples=CLASSIFY_SAMPLES, tol=CLASSIFY_TOL, seed=0,
             k_max=CLASSIFY_KMAX):
    """Classify f on M_n(C) by evaluating seeded random tuples.

    The verdict is probabilistic: identity / central are certified only up to
    the sampled tuples and the tolerance. k-central means the k-th power of
    every sampled image is scalar while lower powers are not.
    """
    if n < 1 or samples < 1:
        raise ValueError("need n >= 1 and samples >= 1")
    rng = np.random.default_rng(seed)
    m = max(f.num_vars, 1)
    images = [evaluate(f, random_tuple(rng, n, m)) for _ in range(samples)]
    scale = max(float(np.linalg.norm(M)) for M in images)
    if scale <= tol:
        return PolyClass(VERDICT_IDENTITY, None, n, samples, tol)
    powers = list(images)
    for k in range(1, k_max + 1):
        if k > 1:
            powers = [P @ M for P, M in zip(powers, images)]
        power_scale = max(float(np.linalg.norm(P)) for P in powers)
        if power_scale <= tol * scale ** k:
            break  # f^k vanished on all samples; no higher power turns central
        if all(scalar_distance(P) <= tol * power_scale for P in powers):
            verdict = VERDICT_CENTRAL if k == 1 else VERDICT_K_CENTRAL
            return PolyClass(verdict, k, n, samples, tol)
    return PolyClass(VERDICT_GENERIC, None, n, samples, tol)

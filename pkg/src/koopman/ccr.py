"""Noncommutative operator algebra with central canonical commutators.

Generators are, per classical particle and axis, the multiplication
operators q, p and the derivative operators lam_q = -i d/dq,
lam_p = -i d/dp; quantum particles carry x (multiplication) and
k = -i d/dx.  The only nonzero commutators are

    [q, lam_q] = [p, lam_p] = [x, k] = i        (same particle and axis)

so every operator has a normal form: words are sorted in a fixed total
order, with the multiplication generators to the left of the derivative
generators, and structural equality of normal forms is operator equality.

On top of the normal-ordered arithmetic this module provides the two
assignment rules that turn phase-space functions into Hermitian operators
(the Poisson-bracket rule and its variant with the added scalar
f - p.df/dp), the Galilei generator sets built from them, the partial
canonical quantization that turns classical particles into quantum ones,
and an exact relation checker used by the verification suites.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .exactpoly import CPoly, GaussianRational, I, SymbolMismatch

_CLASSICAL_KINDS = ("pos", "mom", "lam_pos", "lam_mom")
_QUANTUM_KINDS = ("pos", "mom")
_BASE_NAMES = {
    ("classical", "pos"): "q",
    ("classical", "mom"): "p",
    ("classical", "lam_pos"): "lam_q",
    ("classical", "lam_mom"): "lam_p",
    ("quantum", "pos"): "x",
    ("quantum", "mom"): "k",
}
# multiplication operators vs derivative operators; the normal order keeps
# the whole multiplication class to the left so products born from the
# assignment rules are already ordered
_DERIVATIVE = {("classical", "lam_pos"), ("classical", "lam_mom"), ("quantum", "mom")}
_CLASS_RANK = {
    ("classical", "pos"): 0,
    ("classical", "mom"): 1,
    ("quantum", "pos"): 2,
    ("classical", "lam_pos"): 0,
    ("classical", "lam_mom"): 1,
    ("quantum", "mom"): 2,
}


@dataclass(frozen=True)
class GeneratorId:
    sector: str  # "classical" | "quantum"
    kind: str    # pos | mom | lam_pos | lam_mom (classical); pos | mom (quantum)
    particle: int
    axis: int

    def __post_init__(self):
        if self.sector not in ("classical", "quantum"):
            raise ValueError(f"bad sector {self.sector!r}")
        kinds = _CLASSICAL_KINDS if self.sector == "classical" else _QUANTUM_KINDS
        if self.kind not in kinds:
            raise ValueError(f"bad kind {self.kind!r} for sector {self.sector!r}")
        if self.particle < 1 or self.axis < 1:
            raise ValueError("particle and axis indices are 1-based")

    @property
    def order_key(self) -> tuple:
        sk = (self.sector, self.kind)
        return (sk in _DERIVATIVE, _CLASS_RANK[sk], self.particle, self.axis)

    @property
    def is_multiplication(self) -> bool:
        return (self.sector, self.kind) not in _DERIVATIVE


@dataclass(frozen=True)
class ParticleSpec:
    sector: str
    dim: int
    mass: str  # central symbol name


class Algebra:
    """A fixed particle layout, its generators, and their commutator table."""

    def __init__(self, particles: Sequence[ParticleSpec], constants: Iterable[str] = ()):
        self.particles = tuple(particles)
        if not self.particles:
            raise ValueError("empty particle layout")
        dims = {p.dim for p in self.particles}
        if len(dims) != 1:
            raise ValueError("all particles must share one spatial dimension")
        self.dim = dims.pop()
        if self.dim not in (1, 2, 3):
            raise ValueError("spatial dimension must be 1, 2 or 3")
        masses = []
        for p in self.particles:
            if p.mass not in masses:
                masses.append(p.mass)
        self.central_symbols = tuple(masses) + ("t",) + tuple(
            c for c in constants if c not in masses and c != "t"
        )
        gens = []
        for n, p in enumerate(self.particles, start=1):
            kinds = _CLASSICAL_KINDS if p.sector == "classical" else _QUANTUM_KINDS
            for kind in kinds:
                for axis in range(1, p.dim + 1):
                    gens.append(GeneratorId(p.sector, kind, n, axis))
        self.generators = tuple(sorted(gens, key=lambda g: g.order_key))
        self._names = {g: self._make_name(g) for g in self.generators}
        self._by_name = {v: k for k, v in self._names.items()}
        self.mult_symbols = tuple(
            self._names[g] for g in self.generators if g.is_multiplication
        )
        # symbol set for phase-space observables f(q, p[, x]); central
        # parameters first so monomials render as e.g. m*q, kappa*q^2
        self.observable_symbols = self.central_symbols + self.mult_symbols

    # -- naming ----------------------------------------------------------

    def _make_name(self, g: GeneratorId) -> str:
        base = _BASE_NAMES[(g.sector, g.kind)]
        in_sector = sum(1 for p in self.particles if p.sector == g.sector)
        suffix = ""
        if in_sector > 1 and self.dim > 1:
            suffix = f"{g.particle}_{g.axis}"
        elif in_sector > 1:
            suffix = str(g.particle)
        elif self.dim > 1:
            suffix = str(g.axis)
        return base + suffix

    def name(self, g: GeneratorId) -> str:
        return self._names[g]

    def generator(self, name: str) -> GeneratorId:
        try:
            return self._by_name[name]
        except KeyError:
            raise ValueError(f"no generator named {name!r}") from None

    # -- commutator table ---------------------------------------------------

    def commutator_scalar(self, a: GeneratorId, b: GeneratorId) -> GaussianRational:
        """Central scalar [a, b]; only conjugate pairs are nonzero."""
        if a.particle != b.particle or a.axis != b.axis or a.sector != b.sector:
            return GaussianRational(0)
        pair = (a.kind, b.kind)
        if a.sector == "classical":
            if pair in (("pos", "lam_pos"), ("mom", "lam_mom")):
                return I
            if pair in (("lam_pos", "pos"), ("lam_mom", "mom")):
                return -I
        else:
            if pair == ("pos", "mom"):
                return I
            if pair == ("mom", "pos"):
                return -I
        return GaussianRational(0)

    def commutator_table(self) -> dict:
        """Full table as {frozen pair: CPoly}; every value is central."""
        table = {}
        for i, a in enumerate(self.generators):
            for b in self.generators[i:]:
                c = self.commutator_scalar(a, b)
                if not c.is_zero:
                    table[(a, b)] = CPoly.constant(self.central_symbols, c)
        return table

    # -- element constructors -----------------------------------------------

    def coeff(self, value) -> CPoly:
        if isinstance(value, CPoly):
            if value.symbols != self.central_symbols:
                raise SymbolMismatch("coefficient over wrong symbol set")
            return value
        return CPoly.constant(self.central_symbols, value)

    def coeff_symbol(self, name: str) -> CPoly:
        return CPoly.variable(self.central_symbols, name)

    def zero(self) -> "NCPoly":
        return NCPoly(self, {})

    def one(self) -> "NCPoly":
        return NCPoly(self, {(): self.coeff(1)})

    def op(self, name: str, coeff=1) -> "NCPoly":
        """Single-generator operator by name, e.g. algebra.op("lam_q")."""
        return self.from_word((self.generator(name),), coeff)

    def from_word(self, word: Sequence[GeneratorId], coeff=1) -> "NCPoly":
        return normal_order(self, tuple(word), self.coeff(coeff))

    def observable(self, name: str) -> CPoly:
        """Coordinate or central symbol as a phase-space polynomial."""
        return CPoly.variable(self.observable_symbols, name)

    # -- embedding of multiplication operators -------------------------------

    def _split_observable(self, f: CPoly):
        if f.symbols != self.observable_symbols:
            raise SymbolMismatch("observable over wrong symbol set")
        ncentral = len(self.central_symbols)
        coord_gids = [self.generator(s) for s in self.mult_symbols]
        for expo, coeff in f.terms.items():
            word = []
            for gid, e in zip(coord_gids, expo[ncentral:]):
                if e < 0:
                    raise ValueError("negative power of a coordinate symbol")
                word.extend([gid] * e)
            central = CPoly(
                self.central_symbols,
                {tuple(expo[:ncentral]): coeff},
            )
            yield tuple(word), central

    def mult_operator(self, f: CPoly) -> "NCPoly":
        """Multiplication by the phase-space function f."""
        out = self.zero()
        for word, central in self._split_observable(f):
            out = out + self.from_word(word, central)
        return out

    # -- assignment rules ------------------------------------------------------

    def _classical_pairs(self):
        for n, p in enumerate(self.particles, start=1):
            if p.sector != "classical":
                continue
            for axis in range(1, p.dim + 1):
                yield (
                    self._names[GeneratorId("classical", "pos", n, axis)],
                    self._names[GeneratorId("classical", "mom", n, axis)],
                    GeneratorId("classical", "lam_pos", n, axis),
                    GeneratorId("classical", "lam_mom", n, axis),
                )

    def poisson_rule(self, f: CPoly) -> "NCPoly":
        """-i{., f}: the non-projective operator assignment.

        Yields sum_a (df/dp_a) lam_q_a - (df/dq_a) lam_p_a with the
        multiplication coefficients left of the derivative generators.
        """
        out = self.zero()
        for qname, pname, lamq, lamp in self._classical_pairs():
            dfdp = f.partial(pname)
            if not dfdp.is_zero:
                for word, central in self._split_observable(dfdp):
                    out = out + self.from_word(word + (lamq,), central)
            dfdq = f.partial(qname)
            if not dfdq.is_zero:
                for word, central in self._split_observable(dfdq):
                    out = out - self.from_word(word + (lamp,), central)
        return out

    def prequantum_rule(self, f: CPoly) -> "NCPoly":
        """-i{., f} + f - sum_a p_a df/dp_a: the projective assignment."""
        scalar = f
        for _, pname, _, _ in self._classical_pairs():
            scalar = scalar - CPoly.variable(f.symbols, pname) * f.partial(pname)
        return self.poisson_rule(f) + self.mult_operator(scalar)

    # aliases matching the two formalism names used throughout
    kvn_map = poisson_rule
    kvh_map = prequantum_rule

    def apply_rule(self, f: CPoly, formalism: str) -> "NCPoly":
        if formalism == "kvn":
            return self.poisson_rule(f)
        if formalism == "kvh":
            return self.prequantum_rule(f)
        raise ValueError(f"unknown classical rule {formalism!r}")

    # -- partial quantization ----------------------------------------------------

    def quantized(self, targets: Iterable[int]) -> "Algebra":
        targets = set(targets)
        parts = []
        for n, p in enumerate(self.particles, start=1):
            if n in targets:
                if p.sector != "classical":
                    raise ValueError(f"particle {n} is not classical")
                parts.append(ParticleSpec("quantum", p.dim, p.mass))
            else:
                parts.append(p)
        extra = [
            c for c in self.central_symbols
            if c != "t" and c not in {p.mass for p in self.particles}
        ]
        return Algebra(parts, constants=extra)


def normal_order(algebra: Algebra, word: tuple, coeff: CPoly) -> "NCPoly":
    """Rewrite coeff*word into normal form.

    Termination is guaranteed because every commutator is central: each
    swap either reduces the number of inversions or shortens the word.
    """
    acc: dict = {}
    _normal_into(algebra, tuple(word), coeff, acc)
    return NCPoly(algebra, acc)


def _normal_into(algebra: Algebra, word: tuple, coeff: CPoly, acc: dict):
    if coeff.is_zero:
        return
    for i in range(len(word) - 1):
        a, b = word[i], word[i + 1]
        if a.order_key > b.order_key:
            # a b = b a + [a, b]
            swapped = word[:i] + (b, a) + word[i + 2:]
            _normal_into(algebra, swapped, coeff, acc)
            c = algebra.commutator_scalar(a, b)
            if not c.is_zero:
                reduced = word[:i] + word[i + 2:]
                _normal_into(algebra, reduced, coeff * c, acc)
            return
    prev = acc.get(word)
    total = coeff if prev is None else prev + coeff
    if total.is_zero:
        acc.pop(word, None)
    else:
        acc[word] = total


class NCPoly:
    """Normal-ordered noncommutative polynomial over central CPoly coefficients."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: Algebra, terms: Mapping):
        self.algebra = algebra
        self.terms = {w: c for w, c in terms.items() if not c.is_zero}

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: "NCPoly"):
        if self.algebra is not other.algebra and (
            self.algebra.particles != other.algebra.particles
            or self.algebra.central_symbols != other.algebra.central_symbols
        ):
            raise ValueError("operands belong to different algebras")

    def _coerce(self, other) -> "NCPoly":
        if isinstance(other, NCPoly):
            self._check(other)
            return other
        return NCPoly(self.algebra, {(): self.algebra.coeff(other)})

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self.terms)
        for w, c in other.terms.items():
            s = terms.get(w)
            s = c if s is None else s + c
            if s.is_zero:
                terms.pop(w, None)
            else:
                terms[w] = s
        return NCPoly(self.algebra, terms)

    __radd__ = __add__

    def __neg__(self):
        return NCPoly(self.algebra, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, (CPoly, GaussianRational, int, Fraction, complex)):
            coeff = self.algebra.coeff(other)
            return NCPoly(self.algebra, {w: c * coeff for w, c in self.terms.items()})
        other = self._coerce(other)
        out = self.algebra.zero()
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                out = out + normal_order(self.algebra, w1 + w2, c1 * c2)
        return out

    def __rmul__(self, other):
        if isinstance(other, (CPoly, GaussianRational, int, Fraction, complex)):
            return self * other
        return self._coerce(other) * self

    def commutator(self, other: "NCPoly") -> "NCPoly":
        other = self._coerce(other)
        return self * other - other * self

    def adjoint(self) -> "NCPoly":
        """Reverse words, conjugate coefficients, re-normal-order.

        Every generator is self-adjoint, so this is the full dagger.
        """
        out = self.algebra.zero()
        for w, c in self.terms.items():
            out = out + normal_order(self.algebra, tuple(reversed(w)), c.conjugate())
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational, complex, CPoly)):
            other = self._coerce(other)
        if not isinstance(other, NCPoly):
            return NotImplemented
        self._check(other)
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset((w, c) for w, c in self.terms.items()))

    def central_part(self) -> CPoly:
        """Coefficient of the identity word."""
        return self.terms.get((), self.algebra.coeff(0))

    def is_central(self) -> bool:
        return all(w == () for w in self.terms)

    def render(self) -> str:
        if not self.terms:
            return "0"
        alg = self.algebra

        def word_key(w):
            return (-len(w), tuple(g.order_key for g in w))

        parts = []
        for w in sorted(self.terms, key=word_key):
            factors = []
            for g in w:
                name = alg.name(g)
                if factors and factors[-1][0] == name:
                    factors[-1][1] += 1
                else:
                    factors.append([name, 1])
            body = "*".join(n if e == 1 else f"{n}^{e}" for n, e in factors)
            coeff = self.terms[w].render()
            if len(self.terms[w].terms) > 1:
                coeff = f"({coeff})"
            parts.append(f"{coeff}{'*' + body if body else ''}")
        return " + ".join(parts)

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"NCPoly({self.render()})"


# ---------------------------------------------------------------------------
# standard layouts
# ---------------------------------------------------------------------------

def single_classical(dim: int = 1, mass: str = "m", constants: Iterable[str] = ()) -> Algebra:
    return Algebra([ParticleSpec("classical", dim, mass)], constants)


def two_classical(dim: int = 1, masses=("m1", "m2"), constants: Iterable[str] = ("kappa",)) -> Algebra:
    return Algebra(
        [ParticleSpec("classical", dim, masses[0]), ParticleSpec("classical", dim, masses[1])],
        constants,
    )


def single_quantum(dim: int = 1, mass: str = "m", constants: Iterable[str] = ()) -> Algebra:
    return Algebra([ParticleSpec("quantum", dim, mass)], constants)


def hybrid_pair(dim: int = 1, masses=("m1", "m2"), constants: Iterable[str] = ("kappa",)) -> Algebra:
    """Classical particle 1 tensor quantum particle 2."""
    return Algebra(
        [ParticleSpec("classical", dim, masses[0]), ParticleSpec("quantum", dim, masses[1])],
        constants,
    )


# ---------------------------------------------------------------------------
# Galilei generators
# ---------------------------------------------------------------------------

_EPS3 = {
    (1, 2, 3): 1, (2, 3, 1): 1, (3, 1, 2): 1,
    (1, 3, 2): -1, (3, 2, 1): -1, (2, 1, 3): -1,
}


def _axis_names(algebra: Algebra, particle: int, base_kind: str):
    p = algebra.particles[particle - 1]
    return [
        algebra.name(GeneratorId(p.sector, base_kind, particle, axis))
        for axis in range(1, p.dim + 1)
    ]


def free_hamiltonian(algebra: Algebra) -> CPoly:
    """sum_a p_a^2 / 2 m_a over classical particles, k-free (kinetic only)."""
    H = CPoly.constant(algebra.observable_symbols, 0)
    for n, p in enumerate(algebra.particles, start=1):
        if p.sector != "classical":
            continue
        m = CPoly.variable(algebra.observable_symbols, p.mass)
        for pname in _axis_names(algebra, n, "mom"):
            pv = CPoly.variable(algebra.observable_symbols, pname)
            H = H + pv * pv / (2 * m)
    return H


def quantum_kinetic(algebra: Algebra) -> NCPoly:
    """sum over quantum particles of k^2 / 2m as a normal-ordered operator."""
    out = algebra.zero()
    for n, p in enumerate(algebra.particles, start=1):
        if p.sector != "quantum":
            continue
        minv = algebra.coeff(Fraction(1, 2)) / algebra.coeff_symbol(p.mass)
        for axis in range(1, p.dim + 1):
            k = GeneratorId("quantum", "mom", n, axis)
            out = out + algebra.from_word((k, k), minv)
    return out


def time_translation(algebra: Algebra, formalism: str, potential: CPoly | None = None) -> NCPoly:
    """The evolution generator for the requested formalism.

    kvn / kvh: the assignment rule applied to H = sum p^2/2m + V.
    hybrid: the kvh rule over the classical sector plus the quantum
    kinetic term; V may involve quantum positions (it enters both the
    derivative-coupling and the multiplication part).
    quantum: kinetic plus multiplication by V(x).
    """
    H = free_hamiltonian(algebra)
    if potential is not None:
        H = H + potential
    if formalism in ("kvn", "kvh"):
        return algebra.apply_rule(H, formalism)
    if formalism == "hybrid":
        return algebra.prequantum_rule(H) + quantum_kinetic(algebra)
    if formalism == "quantum":
        out = quantum_kinetic(algebra)
        if potential is not None:
            out = out + algebra.mult_operator(potential)
        return out
    raise ValueError(f"unknown formalism {formalism!r}")


def translation_generator(algebra: Algebra, axis: int = 1) -> NCPoly:
    """Total spatial translation: sum of lam_q (classical) and k (quantum)."""
    out = algebra.zero()
    for n, p in enumerate(algebra.particles, start=1):
        kind = "lam_pos" if p.sector == "classical" else "mom"
        out = out + algebra.from_word((GeneratorId(p.sector, kind, n, axis),))
    return out


def momentum_observable(algebra: Algebra, axis: int = 1) -> NCPoly:
    """Total momentum observable: sum of p (classical) and k (quantum)."""
    out = algebra.zero()
    for n, p in enumerate(algebra.particles, start=1):
        out = out + algebra.from_word((GeneratorId(p.sector, "mom", n, axis),))
    return out


def boost_generator(algebra: Algebra, formalism: str, axis: int = 1) -> NCPoly:
    """Total Galilei boost at symbolic time t.

    Classical particles contribute the assignment rule applied to
    m*q - t*p; quantum ones contribute m*x - t*k directly.
    """
    out = algebra.zero()
    tsym = algebra.coeff_symbol("t")
    for n, p in enumerate(algebra.particles, start=1):
        msym = algebra.coeff_symbol(p.mass)
        if p.sector == "classical":
            qname = algebra.name(GeneratorId("classical", "pos", n, axis))
            pname = algebra.name(GeneratorId("classical", "mom", n, axis))
            g = (
                algebra.observable(p.mass) * algebra.observable(qname)
                - algebra.observable("t") * algebra.observable(pname)
            )
            rule = "kvn" if formalism == "kvn" else "kvh"
            out = out + algebra.apply_rule(g, rule)
        else:
            x = GeneratorId("quantum", "pos", n, axis)
            k = GeneratorId("quantum", "mom", n, axis)
            out = out + algebra.from_word((x,), msym) - algebra.from_word((k,), tsym)
    return out


def rotation_generator(algebra: Algebra, formalism: str, axis: int = 3) -> NCPoly:
    """Total rotation generator about one axis (dim >= 2 only).

    For dim == 2 only the single in-plane generator (axis 3 pattern
    restricted to axes 1, 2) exists.
    """
    if algebra.dim == 1:
        raise ValueError("rotations require spatial dimension >= 2")
    if algebra.dim == 2 and axis != 3:
        raise ValueError("dim 2 has a single rotation generator (axis=3)")
    out = algebra.zero()
    for n, p in enumerate(algebra.particles, start=1):
        if p.sector == "classical":
            qn = _axis_names(algebra, n, "pos")
            pn = _axis_names(algebra, n, "mom")
            j = CPoly.constant(algebra.observable_symbols, 0)
            for (i, jj, kk), sign in _EPS3.items():
                if i != axis or jj > p.dim or kk > p.dim:
                    continue
                j = j + sign * (
                    CPoly.variable(algebra.observable_symbols, qn[jj - 1])
                    * CPoly.variable(algebra.observable_symbols, pn[kk - 1])
                )
            rule = "kvn" if formalism == "kvn" else "kvh"
            out = out + algebra.apply_rule(j, rule)
        else:
            for (i, jj, kk), sign in _EPS3.items():
                if i != axis or jj > p.dim or kk > p.dim:
                    continue
                x = GeneratorId("quantum", "pos", n, jj)
                k = GeneratorId("quantum", "mom", n, kk)
                out = out + algebra.from_word((x, k), sign)
    return out


def galilei_generators(algebra: Algebra, formalism: str, potential: CPoly | None = None) -> dict:
    """The named generator set for one formalism.

    Keys: translation[_i], boost[_i], rotation[_i] (dim >= 2),
    time_translation.  Errors if the formalism does not match the layout.
    """
    sectors = {p.sector for p in algebra.particles}
    if formalism in ("kvn", "kvh") and sectors != {"classical"}:
        raise ValueError(f"{formalism} needs an all-classical layout")
    if formalism == "quantum" and sectors != {"quantum"}:
        raise ValueError("quantum needs an all-quantum layout")
    if formalism == "hybrid" and sectors != {"classical", "quantum"}:
        raise ValueError("hybrid needs a mixed layout")

    def key(base, axis):
        return base if algebra.dim == 1 else f"{base}_{axis}"

    gens = {}
    for axis in range(1, algebra.dim + 1):
        gens[key("translation", axis)] = translation_generator(algebra, axis)
        gens[key("boost", axis)] = boost_generator(algebra, formalism, axis)
    if algebra.dim == 3:
        for axis in range(1, 4):
            gens[f"rotation_{axis}"] = rotation_generator(algebra, formalism, axis)
    elif algebra.dim == 2:
        gens["rotation"] = rotation_generator(algebra, formalism, 3)
    gens["time_translation"] = time_translation(algebra, formalism, potential)
    return gens


# ---------------------------------------------------------------------------
# Klein partial quantization
# ---------------------------------------------------------------------------

def klein_quantize(a: NCPoly, targets: Iterable[int]) -> NCPoly:
    """Quantize the target classical particles of a normal-ordered operator.

    Step 1 deletes every word containing a target lam_p (states no longer
    depend on that momentum coordinate); step 2 substitutes, left to right
    within each canonical word, p -> k, q -> x, lam_q -> k, and the result
    is re-normal-ordered in the enlarged algebra.
    """
    targets = set(targets)
    alg = a.algebra
    for n in targets:
        if n < 1 or n > len(alg.particles):
            raise ValueError(f"no particle {n}")
        if alg.particles[n - 1].sector != "classical":
            raise ValueError(f"particle {n} is not classical")
    new_alg = alg.quantized(targets)

    def subst(g: GeneratorId) -> GeneratorId:
        if g.particle not in targets:
            return g
        if g.kind == "pos":
            return GeneratorId("quantum", "pos", g.particle, g.axis)
        if g.kind in ("mom", "lam_pos"):
            return GeneratorId("quantum", "mom", g.particle, g.axis)
        raise AssertionError("lam_mom words are deleted before substitution")

    out = new_alg.zero()
    for word, coeff in a.terms.items():
        if any(g.kind == "lam_mom" and g.particle in targets for g in word):
            continue
        new_word = tuple(subst(g) for g in word)
        out = out + normal_order(
            new_alg, new_word, CPoly(new_alg.central_symbols, coeff.terms)
        )
    return out


# ---------------------------------------------------------------------------
# relation checking
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Relation:
    """One exact operator statement to verify.

    Either a commutator statement [a, b] = expected, or a direct equality
    lhs = expected (used e.g. for the partial-quantization identities).
    ``expect_match=False`` marks a negative control: the check passes
    only if the statement does NOT hold.
    """
    rid: str
    expected: NCPoly
    a: NCPoly | None = None
    b: NCPoly | None = None
    lhs: NCPoly | None = None
    expect_match: bool = True
    note: str = ""

    def left_side(self) -> NCPoly:
        if self.lhs is not None:
            return self.lhs
        if self.a is None or self.b is None:
            raise ValueError(f"relation {self.rid}: need either lhs or (a, b)")
        return self.a.commutator(self.b)


@dataclass(frozen=True)
class RelationResult:
    rid: str
    passed: bool
    expect_match: bool
    residual: str  # canonical rendering; "0" on exact match
    note: str = ""

    @property
    def status(self) -> str:
        return "PASS" if self.passed else "FAIL"


@dataclass
class VerificationReport:
    results: list = field(default_factory=list)

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def counts(self) -> tuple:
        passed = sum(1 for r in self.results if r.passed)
        return passed, len(self.results)

    def lines(self) -> list:
        out = []
        for r in self.results:
            tag = "" if r.expect_match else "  [negative control]"
            note = f"   ({r.note})" if r.note else ""
            out.append(f"{r.status}  {r.rid}  residual={r.residual}{tag}{note}")
        p, n = self.counts
        out.append(f"{'PASS' if self.all_passed else 'FAIL'} {p}/{n} relations")
        return out

    def csv_rows(self) -> list:
        return [(r.rid, r.status, r.residual) for r in self.results]


def verify_algebra(relations: Sequence[Relation]) -> VerificationReport:
    """Exact pass/fail for a list of commutator statements.

    Failures are results, not errors; residuals are rendered canonically.
    """
    report = VerificationReport()
    for rel in relations:
        residual = rel.left_side() - rel.expected
        matched = residual.is_zero
        passed = matched if rel.expect_match else not matched
        report.results.append(
            RelationResult(rel.rid, passed, rel.expect_match, residual.render(), rel.note)
        )
    return report

"""Scalars, polynomials and rational functions in one variable.

Two coefficient backends are supported and never mixed:

* ``EXACT`` -- Gaussian rationals (a pair of rationals), used everywhere a
  result is claimed exactly.  Uses ``gmpy2.mpq`` when available, otherwise
  ``fractions.Fraction``.
* ``FLOAT`` -- complex double precision, used for contour geometry and
  quadrature.

Conversion is one-way, EXACT -> FLOAT, via ``to_float``.

Rational functions keep their denominator in factored form ``prod (z-p)^m``
times an optional non-split monic "opaque" factor.  All pipelines in this
package produce denominators that split over a known pole set (marked points
and roots), so reduction is a cheap divisibility check at the known poles;
polynomial gcd is only needed when the opaque factor is nontrivial (general
division).  Callers that obtain an opaque denominator can re-split it against
a candidate pole list with :meth:`RationalFunction.split`.
"""

from __future__ import annotations

from fractions import Fraction

try:  # optional fast rational backend
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover - exercised only without gmpy2
    _Q = Fraction

EXACT = "exact"
FLOAT = "float"

_RZERO = _Q(0)
_RONE = _Q(1)


class BackendMismatch(TypeError):
    """Raised when EXACT and FLOAT operands meet in one operation."""


def _rat(x) -> _Q:
    """Coerce an int, rational or string ("p/q" or decimal) to a rational."""
    if isinstance(x, int):
        return _Q(x)
    if isinstance(x, str):
        s = x.strip()
        if "/" in s:
            n, d = s.split("/")
            return _Q(Fraction(n) / Fraction(d))
        return _Q(Fraction(s))
    if isinstance(x, Fraction):
        return _Q(x)
    if isinstance(x, type(_RZERO)):
        return x
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


class Scalar:
    """A number in one of the two backends.

    EXACT scalars hold a pair of rationals (re, im); FLOAT scalars hold a
    pair of Python floats.  Equality is exact in both backends; approximate
    comparison goes through :meth:`almost_equal`.
    """

    __slots__ = ("backend", "re", "im")

    def __init__(self, backend, re, im):
        self.backend = backend
        self.re = re
        self.im = im

    # -- constructors ---------------------------------------------------

    @staticmethod
    def exact(re, im=0) -> "Scalar":
        return Scalar(EXACT, _rat(re), _rat(im))

    @staticmethod
    def of_float(re, im=0.0) -> "Scalar":
        return Scalar(FLOAT, float(re), float(im))

    @staticmethod
    def from_complex(z) -> "Scalar":
        z = complex(z)
        return Scalar(FLOAT, z.real, z.imag)

    @staticmethod
    def zero(backend) -> "Scalar":
        return _ZERO[backend]

    @staticmethod
    def one(backend) -> "Scalar":
        return _ONE[backend]

    @staticmethod
    def parse(obj, backend=EXACT) -> "Scalar":
        """Parse the JSON form: a single string, or a [re, im] pair.
        Scalars pass through untouched."""
        if isinstance(obj, Scalar):
            return obj
        if isinstance(obj, (list, tuple)):
            if len(obj) != 2:
                raise ValueError(f"scalar pair must have two entries, got {obj!r}")
            re, im = obj
        else:
            re, im = obj, 0
        if backend == EXACT:
            return Scalar.exact(_parse_real(re), _parse_real(im))
        return Scalar.of_float(float(_parse_float(re)), float(_parse_float(im)))

    def to_json(self):
        if self.backend == EXACT:
            if self.im == 0:
                return str(self.re)
            return [str(self.re), str(self.im)]
        if self.im == 0.0:
            return repr(self.re)
        return [repr(self.re), repr(self.im)]

    # -- queries ---------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    @property
    def is_real(self) -> bool:
        return self.im == 0

    def as_complex(self) -> complex:
        return complex(float(self.re), float(self.im))

    def to_float(self) -> "Scalar":
        if self.backend == FLOAT:
            return self
        return Scalar(FLOAT, float(self.re), float(self.im))

    # -- arithmetic -------------------------------------------------------

    def _check(self, other) -> "Scalar":
        if not isinstance(other, Scalar):
            raise TypeError(f"expected Scalar, got {type(other).__name__}")
        if other.backend != self.backend:
            raise BackendMismatch(
                f"cannot combine {self.backend} and {other.backend} scalars"
            )
        return other

    def __add__(self, other):
        other = self._check(other)
        return Scalar(self.backend, self.re + other.re, self.im + other.im)

    def __sub__(self, other):
        other = self._check(other)
        return Scalar(self.backend, self.re - other.re, self.im - other.im)

    def __neg__(self):
        return Scalar(self.backend, -self.re, -self.im)

    def __mul__(self, other):
        other = self._check(other)
        a, b, c, d = self.re, self.im, other.re, other.im
        return Scalar(self.backend, a * c - b * d, a * d + b * c)

    def __truediv__(self, other):
        other = self._check(other)
        c, d = other.re, other.im
        n = c * c + d * d
        if n == 0:
            raise ZeroDivisionError("scalar division by zero")
        a, b = self.re, self.im
        return Scalar(self.backend, (a * c + b * d) / n, (b * c - a * d) / n)

    def conjugate(self) -> "Scalar":
        return Scalar(self.backend, self.re, -self.im)

    def __eq__(self, other):
        if not isinstance(other, Scalar):
            return NotImplemented
        return (
            self.backend == other.backend
            and self.re == other.re
            and self.im == other.im
        )

    def __hash__(self):
        return hash((self.backend, self.re, self.im))

    def almost_equal(self, other, tol=1e-10) -> bool:
        """|self - other| <= tol * max(1, |self|, |other|), via complex."""
        a, b = self.as_complex(), other.as_complex()
        scale = max(1.0, abs(a), abs(b))
        return abs(a - b) <= tol * scale

    def __repr__(self):
        if self.backend == EXACT:
            if self.im == 0:
                return f"Scalar({self.re})"
            return f"Scalar({self.re}, {self.im}i)"
        return f"Scalar({self.as_complex()!r})"


def _parse_real(x):
    if isinstance(x, int):
        return x
    if isinstance(x, str):
        return x
    if isinstance(x, float):
        raise ValueError(
            f"refusing to read float {x!r} into the EXACT backend; "
            "pass a 'p/q' or decimal string"
        )
    raise ValueError(f"cannot parse {x!r} as an exact real part")


def _parse_float(x):
    if isinstance(x, str):
        s = x.strip()
        if "/" in s:
            n, d = s.split("/")
            return float(Fraction(n) / Fraction(d))
        return float(s)
    return float(x)


_ZERO = {EXACT: Scalar(EXACT, _RZERO, _RZERO), FLOAT: Scalar(FLOAT, 0.0, 0.0)}
_ONE = {EXACT: Scalar(EXACT, _RONE, _RZERO), FLOAT: Scalar(FLOAT, 1.0, 0.0)}


class Polynomial:
    """Dense polynomial with ascending coefficients.

    Coefficients are a tuple of Scalars with no trailing zeros; the zero
    polynomial is the empty tuple and reports degree -1 (sentinel).
    """

    __slots__ = ("backend", "coeffs")

    def __init__(self, backend, coeffs):
        self.backend = backend
        self.coeffs = coeffs

    @staticmethod
    def of(coeffs, backend=None) -> "Polynomial":
        coeffs = list(coeffs)
        if backend is None:
            if not coeffs:
                raise ValueError("cannot infer backend of an empty coefficient list")
            backend = coeffs[0].backend
        for c in coeffs:
            if c.backend != backend:
                raise BackendMismatch("mixed backends in coefficient list")
        while coeffs and coeffs[-1].is_zero:
            coeffs.pop()
        return Polynomial(backend, tuple(coeffs))

    @staticmethod
    def zero(backend) -> "Polynomial":
        return Polynomial(backend, ())

    @staticmethod
    def one(backend) -> "Polynomial":
        return Polynomial(backend, (Scalar.one(backend),))

    @staticmethod
    def constant(s: Scalar) -> "Polynomial":
        if s.is_zero:
            return Polynomial(s.backend, ())
        return Polynomial(s.backend, (s,))

    @staticmethod
    def variable(backend) -> "Polynomial":
        return Polynomial(backend, (Scalar.zero(backend), Scalar.one(backend)))

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> Scalar:
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def _check(self, other):
        if not isinstance(other, Polynomial):
            raise TypeError(f"expected Polynomial, got {type(other).__name__}")
        if other.backend != self.backend:
            raise BackendMismatch("mixed backends in polynomial arithmetic")
        return other

    def __add__(self, other):
        other = self._check(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        while out and out[-1].is_zero:
            out.pop()
        return Polynomial(self.backend, tuple(out))

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return Polynomial(self.backend, tuple(-c for c in self.coeffs))

    def __mul__(self, other):
        other = self._check(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Polynomial(self.backend, ())
        if self.backend == EXACT:
            # unpacked rational loop: avoids building intermediate Scalars
            ar = [c.re for c in a]
            ai = [c.im for c in a]
            br = [c.re for c in b]
            bi = [c.im for c in b]
            n, m = len(a), len(b)
            outr = [_RZERO] * (n + m - 1)
            outi = [_RZERO] * (n + m - 1)
            for i in range(n):
                x, y = ar[i], ai[i]
                if x == 0 and y == 0:
                    continue
                for j in range(m):
                    u, v = br[j], bi[j]
                    k = i + j
                    outr[k] += x * u - y * v
                    outi[k] += x * v + y * u
            out = [Scalar(EXACT, r, s) for r, s in zip(outr, outi)]
        else:
            av = [complex(c.re, c.im) for c in a]
            bv = [complex(c.re, c.im) for c in b]
            acc = [0j] * (len(a) + len(b) - 1)
            for i, x in enumerate(av):
                if x == 0:
                    continue
                for j, y in enumerate(bv):
                    acc[i + j] += x * y
            out = [Scalar(FLOAT, z.real, z.imag) for z in acc]
        while out and out[-1].is_zero:
            out.pop()
        return Polynomial(self.backend, tuple(out))

    def scale(self, s: Scalar) -> "Polynomial":
        if s.is_zero:
            return Polynomial(self.backend, ())
        out = tuple(c * s for c in self.coeffs)
        return Polynomial(self.backend, out)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative polynomial power")
        result = Polynomial.one(self.backend)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __divmod__(self, other):
        other = self._check(other)
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dlead = other.leading()
        dd = other.degree
        q = [Scalar.zero(self.backend)] * max(0, len(rem) - dd)
        for i in range(len(rem) - 1, dd - 1, -1):
            c = rem[i]
            if c.is_zero:
                continue
            f = c / dlead
            q[i - dd] = f
            for j, oc in enumerate(other.coeffs):
                rem[i - dd + j] = rem[i - dd + j] - f * oc
        while rem and rem[-1].is_zero:
            rem.pop()
        return (
            Polynomial.of(q, self.backend) if q else Polynomial.zero(self.backend),
            Polynomial(self.backend, tuple(rem)),
        )

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def derivative(self) -> "Polynomial":
        if len(self.coeffs) <= 1:
            return Polynomial.zero(self.backend)
        if self.backend == EXACT:
            out = [
                Scalar(EXACT, c.re * k, c.im * k)
                for k, c in enumerate(self.coeffs)
            ][1:]
        else:
            out = [
                Scalar(FLOAT, c.re * k, c.im * k)
                for k, c in enumerate(self.coeffs)
            ][1:]
        return Polynomial.of(out, self.backend)

    def eval(self, s: Scalar) -> Scalar:
        if s.backend != self.backend:
            raise BackendMismatch("evaluation point backend mismatch")
        acc = Scalar.zero(self.backend)
        for c in reversed(self.coeffs):
            acc = acc * s + c
        return acc

    def eval_complex(self, z: complex) -> complex:
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * z + complex(c.re, c.im)
        return acc

    def shift(self, a: Scalar) -> "Polynomial":
        """Taylor shift: returns q with q(z) = p(z + a)."""
        if a.backend != self.backend:
            raise BackendMismatch("shift point backend mismatch")
        return _taylor_shift(self, a)

    def monic(self):
        """Return (monic polynomial, leading coefficient)."""
        if self.is_zero:
            raise ValueError("zero polynomial cannot be made monic")
        lead = self.leading()
        if lead == Scalar.one(self.backend):
            return self, lead
        inv = Scalar.one(self.backend) / lead
        return self.scale(inv), lead

    def divide_linear(self, a: Scalar):
        """Synthetic division by (z - a): returns (quotient, remainder scalar)."""
        if self.is_zero:
            return self, Scalar.zero(self.backend)
        out = [Scalar.zero(self.backend)] * self.degree
        acc = self.coeffs[-1]
        for i in range(self.degree - 1, -1, -1):
            out[i] = acc
            acc = self.coeffs[i] + acc * a
        quot = Polynomial.of(out, self.backend) if out else Polynomial.zero(self.backend)
        return quot, acc

    def to_float(self) -> "Polynomial":
        if self.backend == FLOAT:
            return self
        if not self.coeffs:
            return Polynomial.zero(FLOAT)
        return Polynomial.of([c.to_float() for c in self.coeffs], FLOAT)

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.backend == other.backend and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.backend, self.coeffs))

    def to_json(self):
        return [c.to_json() for c in self.coeffs]

    @staticmethod
    def parse(obj, backend=EXACT) -> "Polynomial":
        coeffs = [Scalar.parse(c, backend) for c in obj]
        if not coeffs:
            return Polynomial.zero(backend)
        return Polynomial.of(coeffs, backend)

    def __repr__(self):
        if self.is_zero:
            return "Polynomial(0)"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c.is_zero:
                continue
            if self.backend == EXACT and c.im == 0:
                cs = str(c.re)
            else:
                cs = f"({c.re}+{c.im}i)" if c.im else str(c.re)
            terms.append(cs if k == 0 else (f"{cs}*z^{k}" if k > 1 else f"{cs}*z"))
        return "Polynomial(" + " + ".join(terms) + ")"


def _taylor_shift(p: Polynomial, a: Scalar) -> Polynomial:
    """q(z) = p(z + a) by repeated synthetic division by (z + a)... i.e. at -a."""
    # p(z + a) coefficients are the Taylor coefficients of p at a:
    # repeatedly divide by (z - a); remainders are p(a), p'(a)/1!, ...
    if p.is_zero:
        return p
    work = list(p.coeffs)
    out = []
    for _ in range(len(p.coeffs)):
        # synthetic division of `work` by (z - a)
        acc = work[-1]
        quot = []
        for i in range(len(work) - 2, -1, -1):
            quot.append(acc)
            acc = work[i] + acc * a
        out.append(acc)  # remainder = value at a
        quot.reverse()
        work = quot
        if not work:
            break
    return Polynomial.of(out, p.backend)


# expose the correct implementation (the method above delegates here)
Polynomial.shift = lambda self, a: _taylor_shift(self, a)


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic gcd by the Euclidean algorithm (EXACT backend)."""
    if a.backend != EXACT or b.backend != EXACT:
        raise BackendMismatch("poly_gcd is an EXACT-only operation")
    while not b.is_zero:
        a, b = b, a % b
    if a.is_zero:
        return a
    return a.monic()[0]


def _series_inv(coeffs, order, backend):
    """Inverse of a power series (c0 != 0) to the given order."""
    c0 = coeffs[0]
    if c0.is_zero:
        raise ZeroDivisionError("series inversion needs a unit constant term")
    inv0 = Scalar.one(backend) / c0
    out = [inv0]
    for n in range(1, order):
        acc = Scalar.zero(backend)
        for k in range(1, min(n, len(coeffs) - 1) + 1):
            acc = acc + coeffs[k] * out[n - k]
        out.append(-inv0 * acc)
    return out


def _series_mul(a, b, order, backend):
    out = [Scalar.zero(backend)] * order
    for i, x in enumerate(a[:order]):
        if x.is_zero:
            continue
        for j, y in enumerate(b[: order - i]):
            out[i + j] = out[i + j] + x * y
    return out


class RationalFunction:
    """Quotient of polynomials with a factored denominator.

    The denominator is ``prod (z - p)^m`` over the stored pole list times a
    monic ``extra`` polynomial for non-split factors.  On the EXACT backend the
    numerator shares no root with the denominator (enforced at the known poles
    by synthetic division, and against ``extra`` by gcd); the denominator is
    monic.  FLOAT values are normalized the same way but never reduced.
    """

    __slots__ = ("backend", "num", "poles", "extra")

    def __init__(self, backend, num, poles, extra):
        self.backend = backend
        self.num = num
        self.poles = poles  # tuple of (Scalar, multiplicity), canonically sorted
        self.extra = extra  # monic Polynomial, one() when trivial

    # -- constructors ----------------------------------------------------

    @staticmethod
    def from_split(num: Polynomial, poles, reduce=True) -> "RationalFunction":
        """Build num / prod (z-p)^m from a {pole: multiplicity} mapping."""
        backend = num.backend
        items = dict(poles) if not isinstance(poles, dict) else dict(poles)
        items = {p: int(m) for p, m in items.items() if m}
        for p, m in items.items():
            if p.backend != backend:
                raise BackendMismatch("pole backend mismatch")
            if m < 0:
                raise ValueError("negative pole multiplicity")
        rf = RationalFunction(
            backend, num, _sorted_poles(items), Polynomial.one(backend)
        )
        if reduce and backend == EXACT:
            rf = rf._reduced()
        return rf

    @staticmethod
    def from_num_den(num: Polynomial, den: Polynomial) -> "RationalFunction":
        """General quotient; EXACT cancels the gcd, denominator goes opaque."""
        if den.is_zero:
            raise ZeroDivisionError("zero denominator")
        backend = num.backend
        if den.backend != backend:
            raise BackendMismatch("numerator/denominator backend mismatch")
        if num.is_zero:
            return RationalFunction.zero(backend)
        if backend == EXACT:
            g = poly_gcd(num, den)
            if g.degree > 0:
                num = (num // g)
                den = (den // g)
        den, lead = den.monic()
        num = num.scale(Scalar.one(backend) / lead)
        if den.degree == 0:
            return RationalFunction(
                backend, num, (), Polynomial.one(backend)
            )
        return RationalFunction(backend, num, (), den)

    @staticmethod
    def from_poly(p: Polynomial) -> "RationalFunction":
        return RationalFunction(p.backend, p, (), Polynomial.one(p.backend))

    @staticmethod
    def from_scalar(s: Scalar) -> "RationalFunction":
        return RationalFunction.from_poly(Polynomial.constant(s))

    @staticmethod
    def zero(backend) -> "RationalFunction":
        return RationalFunction(
            backend, Polynomial.zero(backend), (), Polynomial.one(backend)
        )

    @staticmethod
    def one(backend) -> "RationalFunction":
        return RationalFunction.from_poly(Polynomial.one(backend))

    @staticmethod
    def variable(backend) -> "RationalFunction":
        return RationalFunction.from_poly(Polynomial.variable(backend))

    @staticmethod
    def simple_pole(residue: Scalar, pole: Scalar) -> "RationalFunction":
        """residue / (z - pole)."""
        return RationalFunction.from_split(
            Polynomial.constant(residue), {pole: 1}
        )

    # -- structure --------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    @property
    def is_polynomial(self) -> bool:
        return not self.poles and self.extra.degree <= 0

    def pole_dict(self) -> dict:
        return dict(self.poles)

    def den_poly(self) -> Polynomial:
        """Expanded (monic) denominator."""
        den = self.extra
        for p, m in self.poles:
            lin = Polynomial.of([-p, Scalar.one(self.backend)], self.backend)
            for _ in range(m):
                den = den * lin
        return den

    def _reduced(self) -> "RationalFunction":
        """Cancel numerator roots sitting at known poles (EXACT hot path)."""
        if self.num.is_zero:
            return RationalFunction.zero(self.backend)
        num = self.num
        newpoles = []
        for p, m in self.poles:
            while m > 0 and not num.is_zero:
                q, r = num.divide_linear(p)
                if r.is_zero:
                    num, m = q, m - 1
                else:
                    break
            if m:
                newpoles.append((p, m))
        extra = self.extra
        if extra.degree > 0:
            g = poly_gcd(num, extra)
            if g.degree > 0:
                num = num // g
                extra = extra // g
        return RationalFunction(self.backend, num, tuple(newpoles), extra)

    def split(self, candidates) -> "RationalFunction":
        """Factor the opaque denominator part over candidate poles.

        Every candidate that exactly divides the opaque factor is moved into
        the pole list (with its full multiplicity).  Raises if a nontrivial
        opaque factor remains -- the caller's candidate list was incomplete.
        """
        if self.extra.degree <= 0:
            return self
        if self.backend != EXACT:
            raise BackendMismatch("split() works on the EXACT backend")
        extra = self.extra
        found = dict(self.poles)
        for a in candidates:
            while extra.degree > 0:
                q, r = extra.divide_linear(a)
                if r.is_zero:
                    extra = q
                    found[a] = found.get(a, 0) + 1
                else:
                    break
        if extra.degree > 0:
            raise ValueError(
                "denominator does not split over the supplied pole candidates"
            )
        return RationalFunction(
            self.backend, self.num, _sorted_poles(found), Polynomial.one(self.backend)
        )

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            if other.backend != self.backend:
                raise BackendMismatch("mixed backends in rational arithmetic")
            return other
        if isinstance(other, Polynomial):
            return RationalFunction.from_poly(other)
        if isinstance(other, Scalar):
            return RationalFunction.from_scalar(other)
        raise TypeError(f"cannot combine RationalFunction with {type(other).__name__}")

    def __add__(self, other):
        other = self._coerce(other)
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        apoles, bpoles = dict(self.poles), dict(other.poles)
        allpoles = {
            p: max(apoles.get(p, 0), bpoles.get(p, 0))
            for p in {*apoles, *bpoles}
        }
        na = self.num * _linear_product(
            self.backend, {p: allpoles[p] - apoles.get(p, 0) for p in allpoles}
        )
        nb = other.num * _linear_product(
            self.backend, {p: allpoles[p] - bpoles.get(p, 0) for p in allpoles}
        )
        ea, eb = self.extra, other.extra
        if ea == eb:
            extra = ea
        else:
            na = na * eb
            nb = nb * ea
            extra = ea * eb
        num = na + nb
        rf = RationalFunction(self.backend, num, _sorted_poles(allpoles), extra)
        return rf._reduced() if self.backend == EXACT else rf

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __neg__(self):
        return RationalFunction(self.backend, -self.num, self.poles, self.extra)

    def __mul__(self, other):
        other = self._coerce(other)
        if self.is_zero or other.is_zero:
            return RationalFunction.zero(self.backend)
        poles = dict(self.poles)
        for p, m in other.poles:
            poles[p] = poles.get(p, 0) + m
        rf = RationalFunction(
            self.backend,
            self.num * other.num,
            _sorted_poles(poles),
            self.extra * other.extra,
        )
        return rf._reduced() if self.backend == EXACT else rf

    def scale(self, s: Scalar) -> "RationalFunction":
        if s.is_zero:
            return RationalFunction.zero(self.backend)
        return RationalFunction(self.backend, self.num.scale(s), self.poles, self.extra)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other.is_zero:
            raise ZeroDivisionError("division by the zero rational function")
        return self * other._inverted()

    def _inverted(self) -> "RationalFunction":
        # zeros of self become poles (opaque: we do not know them);
        # poles of self become zeros (re-expanded into the numerator).
        num = _linear_product(self.backend, dict(self.poles)) * self.extra
        return RationalFunction.from_num_den(num, self.num)

    def derivative(self) -> "RationalFunction":
        if self.is_zero:
            return self
        if not self.poles and self.extra.degree <= 0:
            return RationalFunction.from_poly(self.num.derivative())
        # f = n / D, D = prod (z-p)^m * extra
        # f' = (n' D - n D') / D^2, with D'/D = sum m/(z-p) + extra'/extra
        D = self.den_poly()
        Dp = D.derivative()
        num = self.num.derivative() * D - self.num * Dp
        poles = {p: 2 * m for p, m in self.poles}
        extra = self.extra * self.extra
        rf = RationalFunction(self.backend, num, _sorted_poles(poles), extra)
        return rf._reduced() if self.backend == EXACT else rf

    # -- evaluation ---------------------------------------------------------

    def eval(self, s: Scalar) -> Scalar:
        num = self.num.eval(s)
        den = Scalar.one(self.backend)
        for p, m in self.poles:
            d = s - p
            if d.is_zero:
                raise ZeroDivisionError(f"evaluation at a pole {s!r}")
            for _ in range(m):
                den = den * d
        if self.extra.degree > 0:
            den = den * self.extra.eval(s)
        return num / den

    def eval_complex(self, z: complex) -> complex:
        num = self.num.eval_complex(z)
        den = 1 + 0j
        for p, m in self.poles:
            den *= (z - complex(p.re, p.im)) ** m
        if self.extra.degree > 0:
            den *= self.extra.eval_complex(z)
        return num / den

    def to_float(self) -> "RationalFunction":
        if self.backend == FLOAT:
            return self
        return RationalFunction(
            FLOAT,
            self.num.to_float(),
            tuple((p.to_float(), m) for p, m in self.poles),
            self.extra.to_float(),
        )

    # -- expansions ----------------------------------------------------------

    def laurent_at(self, a: Scalar, keep_regular=0):
        """Principal part coefficients at a: list of (order k, coeff of (z-a)^-k).

        With keep_regular > 0 the first regular Taylor coefficients follow as
        (order 0, value), (order -1, first derivative coeff), ... counted with
        negative "orders" -j for the (z-a)^j coefficient.
        """
        m = dict(self.poles).get(a, 0)
        order = m + keep_regular
        if order == 0:
            return []
        # g(w) = num(a+w) / (other factors)(a+w); f = g(w)/w^m
        numser = list(self.num.shift(a).coeffs)
        denser = [Scalar.one(self.backend)]
        denpoly = Polynomial.one(self.backend)
        for p, mp in self.poles:
            if p == a:
                continue
            lin = Polynomial.of([a - p, Scalar.one(self.backend)], self.backend)
            for _ in range(mp):
                denpoly = denpoly * lin
        if self.extra.degree > 0:
            denpoly = denpoly * self.extra.shift(a)
        denser = list(denpoly.coeffs)
        if not numser:
            return []
        numser += [Scalar.zero(self.backend)] * max(0, order - len(numser))
        g = _series_mul(
            numser, _series_inv(denser, order, self.backend), order, self.backend
        )
        out = []
        for j, c in enumerate(g):
            k = m - j  # coefficient of (z-a)^(-k)
            if not c.is_zero or k > 0:
                out.append((k, c))
        return [(k, c) for k, c in out if (k > 0 and not c.is_zero) or k <= 0]

    def residue_at(self, a: Scalar) -> Scalar:
        for k, c in self.laurent_at(a):
            if k == 1:
                return c
        return Scalar.zero(self.backend)

    def pole_order_at(self, a: Scalar) -> int:
        """Actual pole order at a (0 if regular), from the reduced form."""
        rf = self._reduced() if self.backend == EXACT else self
        return dict(rf.poles).get(a, 0)

    # -- reparameterization ---------------------------------------------------

    def compose_mobius(self, a: Scalar, b: Scalar, c: Scalar, d: Scalar
                       ) -> "RationalFunction":
        """f((a z + b)/(c z + d)) as a rational function of z; ad - bc != 0."""
        det = a * d - b * c
        if det.is_zero:
            raise ValueError("singular coefficient matrix for a Moebius map")
        backend = self.backend
        one = Scalar.one(backend)
        A = Polynomial.of([b, a], backend)  # a z + b
        B = Polynomial.of([d, c], backend)  # c z + d
        # numerator through the map
        num, npow = _compose_num(self.num, A, B)
        # denominator factors (z0 - p) -> ((a - p c) z + (b - p d)) / B
        poles = {}
        scale = one
        dpow = 0
        den_extra_num = Polynomial.one(backend)
        for p, m in self.poles:
            lc = a - p * c
            cc = b - p * d
            dpow += m
            if lc.is_zero:
                # the pole sits at the image of infinity; factor is constant/B
                for _ in range(m):
                    scale = scale * cc
            else:
                root = -(cc / lc)
                poles[root] = poles.get(root, 0) + m
                for _ in range(m):
                    scale = scale * lc
        if self.extra.degree > 0:
            e_num, e_pow = _compose_num(self.extra, A, B)
            dpow += e_pow
            den_extra_num = e_num
        # assemble: f(mu(z)) = num * B^(dpow - npow) / (scale * prod(z-root)^m * den_extra_num)
        invscale = one / scale
        num = num.scale(invscale)
        bexp = dpow - npow
        if bexp > 0:
            num = num * (B ** bexp)
        elif bexp < 0:
            if c.is_zero:
                # B is the constant d: fold its powers into the scale
                sc = one
                for _ in range(-bexp):
                    sc = sc * (one / d)
                num = num.scale(sc)
            else:
                root = -(d / c)
                poles[root] = poles.get(root, 0) + (-bexp)
                sc = one
                for _ in range(-bexp):
                    sc = sc * (one / c)
                num = num.scale(sc)
        rf = RationalFunction(backend, num, _sorted_poles(poles), Polynomial.one(backend))
        if den_extra_num.degree > 0:
            dmon, dlead = den_extra_num.monic()
            rf = RationalFunction(
                backend, rf.num.scale(one / dlead), rf.poles, dmon
            )
        return rf._reduced() if backend == EXACT else rf

    # -- comparison / io -------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, RationalFunction):
            return NotImplemented
        if other.backend != self.backend:
            return False
        return (self.num * other.den_poly()) == (other.num * self.den_poly())

    def __hash__(self):
        # hash via the reduced canonical pair
        rf = self._reduced() if self.backend == EXACT else self
        return hash((rf.backend, rf.num, rf.poles, rf.extra))

    def almost_equal(self, other, tol=1e-10) -> bool:
        """Coefficient-wise comparison of num/den after monic normalization."""
        a = self.num * other.den_poly()
        b = other.num * self.den_poly()
        n = max(len(a.coeffs), len(b.coeffs))
        scale = max(
            [1.0]
            + [abs(c.as_complex()) for c in a.coeffs]
            + [abs(c.as_complex()) for c in b.coeffs]
        )
        for i in range(n):
            ca = a.coeffs[i].as_complex() if i < len(a.coeffs) else 0j
            cb = b.coeffs[i].as_complex() if i < len(b.coeffs) else 0j
            if abs(ca - cb) > tol * scale:
                return False
        return True

    def to_json(self):
        return {"num": self.num.to_json(), "den": self.den_poly().to_json()}

    @staticmethod
    def parse(obj, backend=EXACT) -> "RationalFunction":
        num = Polynomial.parse(obj["num"], backend)
        den = Polynomial.parse(obj.get("den", ["1"]), backend)
        return RationalFunction.from_num_den(num, den)

    def __repr__(self):
        ps = ", ".join(f"{p!r}^{m}" for p, m in self.poles)
        ex = f", extra={self.extra!r}" if self.extra.degree > 0 else ""
        return f"RF({self.num!r} / [{ps}]{ex})"


def _sorted_poles(poles: dict):
    items = [(p, m) for p, m in poles.items() if m]
    items.sort(key=lambda pm: (pm[0].re, pm[0].im))
    return tuple(items)


def _linear_product(backend, mults: dict) -> Polynomial:
    out = Polynomial.one(backend)
    one = Scalar.one(backend)
    for p, m in mults.items():
        if m <= 0:
            continue
        lin = Polynomial.of([-p, one], backend)
        for _ in range(m):
            out = out * lin
    return out


def _compose_num(p: Polynomial, A: Polynomial, B: Polynomial):
    """p((az+b)/(cz+d)) = (returned polynomial) / B^deg(p); returns (poly, deg)."""
    if p.is_zero:
        return Polynomial.zero(p.backend), 0
    n = p.degree
    # Horner in A/B: result = sum p_k A^k B^(n-k)
    acc = Polynomial.constant(p.coeffs[n])
    for k in range(n - 1, -1, -1):
        acc = acc * A + Polynomial.constant(p.coeffs[k]) * (B ** (n - k))
    return acc, n


def rf_arith(a: RationalFunction, b: RationalFunction, op: str) -> RationalFunction:
    """Convenience dispatcher: op in '+', '-', '*', '/'."""
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        return a / b
    raise ValueError(f"unknown operation {op!r}")


def residue_at(f: RationalFunction, x0: Scalar) -> Scalar:
    """Residue of f at x0."""
    return f.residue_at(x0)


def _float_roots(p: Polynomial, tol=1e-13, maxit=200):
    """All complex roots of a FLOAT polynomial (Aberth iteration)."""
    coeffs = [complex(c.re, c.im) for c in p.coeffs]
    n = len(coeffs) - 1
    if n <= 0:
        return []
    # initial guesses on a circle slightly off-symmetric
    import cmath

    radius = 1.0 + max(abs(c) for c in coeffs[:-1]) / abs(coeffs[-1])
    roots = [
        radius * cmath.exp(2j * cmath.pi * (k + 0.35) / n) for k in range(n)
    ]
    def val_der(z):
        v, d = 0j, 0j
        for c in reversed(coeffs):
            d = d * z + v
            v = v * z + c
        return v, d

    for _ in range(maxit):
        new = []
        done = True
        for i, z in enumerate(roots):
            v, d = val_der(z)
            if v == 0:
                new.append(z)
                continue
            s = sum(1.0 / (z - w) for j, w in enumerate(roots) if j != i)
            denom = d / v - s
            step = 1.0 / denom if denom != 0 else 0.1
            if abs(step) > tol * max(1.0, abs(z)):
                done = False
            new.append(z - step)
        roots = new
        if done:
            break
    return roots


def partial_fractions(f: RationalFunction, candidates=None):
    """Decompose f into (polynomial part, [(pole, order, coefficient), ...]).

    EXACT: the denominator must split over the known poles plus the supplied
    candidates.  FLOAT: leftover denominator factors get their roots from a
    numeric solve.  Entries with zero coefficient are omitted; orders run from
    each pole's multiplicity down to 1.
    """
    if f.backend == EXACT:
        if f.extra.degree > 0:
            f = f.split(candidates or [])
    else:
        if f.extra.degree > 0:
            roots = _float_roots(f.extra)
            poles = dict(f.poles)
            for r in roots:
                key = Scalar.of_float(r.real, r.imag)
                # merge numerically coincident roots
                merged = False
                for p in list(poles):
                    if abs(p.as_complex() - r) < 1e-9:
                        poles[p] += 1
                        merged = True
                        break
                if not merged:
                    poles[key] = poles.get(key, 0) + 1
            f = RationalFunction(FLOAT, f.num, _sorted_poles(poles),
                                 Polynomial.one(FLOAT))
    den = f.den_poly()
    if den.degree <= 0:
        return f.num, []
    qpart, rem = divmod(f.num, den)
    frac = RationalFunction(f.backend, rem, f.poles, Polynomial.one(f.backend))
    terms = []
    for p, m in f.poles:
        for k, c in frac.laurent_at(p):
            if k >= 1 and not c.is_zero:
                terms.append((p, k, c))
    return qpart, terms


def recombine(poly_part: Polynomial, terms) -> RationalFunction:
    """Inverse of partial_fractions, for checking decompositions."""
    out = RationalFunction.from_poly(poly_part)
    for p, k, c in terms:
        out = out + RationalFunction.from_split(
            Polynomial.constant(c), {p: k}, reduce=False
        )
    return out

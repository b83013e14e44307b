"""Truncated formal series in monomials x^i y^m (i >= 0, m in Z).

The grade of a monomial is delta = i + m; every series carries a floor
dmin and silently drops terms with delta < dmin.  Truncated
multiplication is exact for the use here because every multiplied factor
has all grades <= 0 (valid on |x| <= |y|, |y| large).  Coefficients may
be exact (QC/Fraction/int) or complex floats; mixed arithmetic degrades
to complex.
"""

from __future__ import annotations

from fractions import Fraction

from ._exact import is_zero


class LaurentSeries2:
    __slots__ = ("terms", "dmin")

    def __init__(self, dmin: int, terms=None):
        self.dmin = dmin
        self.terms = {}
        if terms:
            for (i, mth), v in terms.items():
                if i + mth >= dmin and not is_zero(v):
                    self.terms[(i, mth)] = v

    # -- constructors --------------------------------------------------
    @classmethod
    def const(cls, c, dmin: int):
        return cls(dmin, {(0, 0): c})

    @classmethod
    def mono(cls, coeff, i: int, m: int, dmin: int):
        return cls(dmin, {(i, m): coeff})

    # -- basic ops -----------------------------------------------------
    def _new(self, terms):
        s = LaurentSeries2.__new__(LaurentSeries2)
        s.dmin = self.dmin
        s.terms = terms
        return s

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            s = out.get(k, 0) + v
            if is_zero(s):
                out.pop(k, None)
            else:
                out[k] = s
        return self._new(out)

    def __neg__(self):
        return self._new({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        dmin = self.dmin
        out = {}
        for (i1, m1), v1 in self.terms.items():
            for (i2, m2), v2 in other.terms.items():
                i, mth = i1 + i2, m1 + m2
                if i + mth < dmin:
                    continue
                k = (i, mth)
                s = out.get(k, 0) + v1 * v2
                if is_zero(s):
                    out.pop(k, None)
                else:
                    out[k] = s
        return self._new(out)

    def scaled(self, c):
        if is_zero(c):
            return self._new({})
        return self._new({k: c * v for k, v in self.terms.items()})

    def shifted(self, i0: int, m0: int):
        """Multiply by the monomial x^{i0} y^{m0}.

        The result is only complete down to grade dmin + i0 + m0; callers
        shifting upward must have headroom in dmin.
        """
        dmin = self.dmin
        out = {}
        for (i, mth), v in self.terms.items():
            k = (i + i0, mth + m0)
            if k[0] + k[1] >= dmin and k[0] >= 0:
                out[k] = v
        return self._new(out)

    def max_grade(self):
        return max((i + m for (i, m) in self.terms), default=None)

    def is_zero(self) -> bool:
        return not self.terms

    def coeff(self, i: int, m: int):
        return self.terms.get((i, m), 0)

    # -- powers --------------------------------------------------------
    def pow_int(self, n: int):
        if n < 0:
            raise ValueError("use binomial_pow for negative powers")
        out = LaurentSeries2.const(1, self.dmin)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def binomial_pow(self, r):
        """(1 + u)^r for self = 1 + u with all grades of u <= -1.

        r may be any Fraction/int (negative allowed); the binomial series
        terminates at order -dmin because u^k has top grade <= -k.
        """
        one = self.coeff(0, 0)
        if is_zero(one - 1):
            u = self - LaurentSeries2.const(one, self.dmin)
        else:
            raise ValueError("binomial_pow requires constant term 1")
        mg = u.max_grade()
        if mg is not None and mg > -1:
            raise ValueError("binomial_pow requires u with grades <= -1")
        r = Fraction(r) if isinstance(r, int) else r
        out = LaurentSeries2.const(1, self.dmin)
        upow = LaurentSeries2.const(1, self.dmin)
        coef = Fraction(1)
        for k in range(1, -self.dmin + 1):
            coef = coef * (r - (k - 1)) / k
            upow = upow * u
            if upow.is_zero():
                break
            out = out + upow.scaled(coef)
        return out

    def __repr__(self):
        items = sorted(self.terms.items(), key=lambda kv: (-(kv[0][0] + kv[0][1]), kv[0]))
        return f"LaurentSeries2(dmin={self.dmin}, {dict(items)!r})"
